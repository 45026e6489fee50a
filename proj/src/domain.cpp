#include "shortcut/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace shortcut {

std::string_view to_string(NodeKind kind) {
    return kind == NodeKind::Store ? "store" : "fc";
}

NodeKind node_kind_from_string(std::string_view text) {
    if (text == "store") return NodeKind::Store;
    if (text == "fc") return NodeKind::FulfillmentCenter;
    throw Error("BAD_NODE_KIND", "unknown node kind '" + std::string(text) + "'");
}

int Order::total_quantity() const {
    int total = 0;
    for (const auto& line : lines) total += line.quantity;
    return total;
}

bool is_single_unit_order(const Order& order) {
    return order.lines.size() == 1 && order.lines.front().quantity == 1;
}

std::vector<Violation> validate_network(const FulfillmentNetwork& network) {
    std::vector<Violation> out;
    std::map<std::string, const ItemCatalogEntry*> items;
    std::map<std::string, const Node*> nodes;

    for (const auto& item : network.catalog) {
        if (!items.emplace(item.item_id, &item).second)
            out.push_back({"DUPLICATE_ITEM_ID", item.item_id});
        if (!(item.weight > 0.0) || !std::isfinite(item.weight))
            out.push_back({"BAD_ITEM_WEIGHT", item.item_id});
        if (!(item.price >= 0.0) || !std::isfinite(item.price))
            out.push_back({"BAD_ITEM_PRICE", item.item_id});
    }
    for (const auto& node : network.nodes) {
        if (!nodes.emplace(node.node_id, &node).second)
            out.push_back({"DUPLICATE_NODE_ID", node.node_id});
        if (!(node.fixed_shipment_cost >= 0.0) || !(node.unit_rate >= 0.0) ||
            !std::isfinite(node.fixed_shipment_cost) || !std::isfinite(node.unit_rate))
            out.push_back({"BAD_NODE_COST", node.node_id});
    }

    auto key_text = [](const StockKey& key) { return key.first + "@" + key.second; };

    for (const auto& [key, units] : network.inventory) {
        auto item = items.find(key.first);
        auto node = nodes.find(key.second);
        if (item == items.end() || node == nodes.end()) {
            out.push_back({"DANGLING_INVENTORY_REF", key_text(key)});
            continue;
        }
        if (units < 0) out.push_back({"NEGATIVE_INVENTORY", key_text(key)});
        if (units > 0 && node->second->kind == NodeKind::Store && !item->second->sfs_eligible)
            out.push_back({"STORE_STOCKS_NON_SFS", key_text(key)});
    }
    for (const auto& [key, saving] : network.clearance_saving) {
        if (!items.count(key.first) || !nodes.count(key.second)) {
            out.push_back({"DANGLING_SAVING_REF", key_text(key)});
            continue;
        }
        if (!network.inventory.count(key)) out.push_back({"SAVING_WITHOUT_INVENTORY", key_text(key)});
        if (!(saving >= 0.0) || !std::isfinite(saving))
            out.push_back({"NEGATIVE_SAVING", key_text(key)});
    }
    return out;
}

std::vector<Violation> validate_order(const Order& order) {
    std::vector<Violation> out;
    if (order.lines.empty()) out.push_back({"EMPTY_ORDER", order.order_id});
    std::set<std::string> seen;
    for (const auto& line : order.lines) {
        if (!seen.insert(line.item_id).second)
            out.push_back({"DUPLICATE_ORDER_ITEM", order.order_id + "/" + line.item_id});
        if (line.quantity < 1)
            out.push_back({"BAD_QUANTITY", order.order_id + "/" + line.item_id});
    }
    return out;
}

double shipping_distance(const Node& node, const Point& destination) {
    return std::hypot(node.location.x - destination.x, node.location.y - destination.y);
}

double shipment_cost(const Node& node, const Point& destination, double total_weight) {
    return node.fixed_shipment_cost +
           node.unit_rate * total_weight * shipping_distance(node, destination);
}

namespace {

std::string describe(const std::vector<Violation>& violations) {
    std::string text = "invalid network:";
    for (std::size_t i = 0; i < violations.size() && i < 5; ++i)
        text += " " + violations[i].code + "(" + violations[i].detail + ")";
    if (violations.size() > 5) text += " ... (" + std::to_string(violations.size()) + " total)";
    return text;
}

} // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error("INVALID_NETWORK", describe(violations)), violations_(std::move(violations)) {}

NetworkIndex::NetworkIndex(FulfillmentNetwork network) {
    auto violations = validate_network(network);
    if (!violations.empty()) throw ValidationError(std::move(violations));

    auto impl = std::make_shared<Impl>();
    impl->network = std::move(network);
    const auto& net = impl->network;
    const std::size_t n_items = net.catalog.size();
    const std::size_t n_nodes = net.nodes.size();

    for (std::size_t i = 0; i < n_items; ++i) impl->item_lookup.emplace(net.catalog[i].item_id, i);
    for (std::size_t n = 0; n < n_nodes; ++n) impl->node_lookup.emplace(net.nodes[n].node_id, n);

    impl->inventory.assign(n_items * n_nodes, 0);
    impl->saving.assign(n_items * n_nodes, 0.0);
    impl->stocking.assign(n_items, {});
    for (const auto& [key, units] : net.inventory) {
        const auto i = impl->item_lookup.at(key.first);
        const auto n = impl->node_lookup.at(key.second);
        impl->inventory[i * n_nodes + n] = units;
    }
    for (const auto& [key, saving] : net.clearance_saving) {
        const auto i = impl->item_lookup.at(key.first);
        const auto n = impl->node_lookup.at(key.second);
        impl->saving[i * n_nodes + n] = saving;
    }
    for (std::size_t i = 0; i < n_items; ++i)
        for (std::size_t n = 0; n < n_nodes; ++n)
            if (impl->inventory[i * n_nodes + n] > 0) impl->stocking[i].push_back(n);

    std::vector<std::size_t> by_id(n_nodes);
    std::iota(by_id.begin(), by_id.end(), std::size_t{0});
    std::sort(by_id.begin(), by_id.end(),
              [&](std::size_t a, std::size_t b) { return net.nodes[a].node_id < net.nodes[b].node_id; });
    impl->node_rank.assign(n_nodes, 0);
    for (std::size_t r = 0; r < n_nodes; ++r) impl->node_rank[by_id[r]] = r;

    impl_ = std::move(impl);
}

std::optional<std::size_t> NetworkIndex::find_item(std::string_view item_id) const {
    auto it = impl_->item_lookup.find(item_id);
    if (it == impl_->item_lookup.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> NetworkIndex::find_node(std::string_view node_id) const {
    auto it = impl_->node_lookup.find(node_id);
    if (it == impl_->node_lookup.end()) return std::nullopt;
    return it->second;
}

std::vector<std::size_t> resolve_order_items(const Order& order, const NetworkIndex& network) {
    auto violations = validate_order(order);
    if (!violations.empty())
        throw InfeasibleOrderError(order.order_id, "malformed order: " + violations.front().code);
    std::vector<std::size_t> items;
    items.reserve(order.lines.size());
    for (const auto& line : order.lines) {
        auto idx = network.find_item(line.item_id);
        if (!idx) throw InfeasibleOrderError(order.order_id, "unknown item '" + line.item_id + "'");
        items.push_back(*idx);
    }
    return items;
}

Assignment make_assignment(const Order& order, const NetworkIndex& network,
                           std::vector<Allocation> allocations, double w_clearance) {
    std::map<std::string_view, std::size_t> line_of;
    for (std::size_t l = 0; l < order.lines.size(); ++l) line_of.emplace(order.lines[l].item_id, l);

    auto line_index = [&](const Allocation& a) {
        auto it = line_of.find(a.item_id);
        if (it == line_of.end())
            throw InfeasibleOrderError(order.order_id, "allocation for item not in order: " + a.item_id);
        return it->second;
    };
    std::sort(allocations.begin(), allocations.end(), [&](const Allocation& a, const Allocation& b) {
        const auto la = line_index(a);
        const auto lb = line_index(b);
        if (la != lb) return la < lb;
        return a.node_id < b.node_id;
    });

    Assignment out;
    std::map<std::string, double> weight_at_node;
    double savings = 0.0;
    for (const auto& a : allocations) {
        const auto item = network.find_item(a.item_id);
        const auto node = network.find_node(a.node_id);
        if (!item || !node)
            throw InfeasibleOrderError(order.order_id, "allocation references unknown item or node");
        weight_at_node[a.node_id] += network.item(*item).weight * a.quantity;
        savings += network.saving(*item, *node) * a.quantity;
    }
    double shipping = 0.0;
    for (const auto& [node_id, weight] : weight_at_node)
        shipping += shipment_cost(network.node(*network.find_node(node_id)), order.destination, weight);

    out.allocations = std::move(allocations);
    out.shipping_cost = shipping;
    out.clearance_savings_total = savings;
    out.objective = shipping - w_clearance * savings;
    out.nodes_used = static_cast<int>(weight_at_node.size());
    return out;
}

std::vector<Violation> check_assignment(const Order& order, const NetworkIndex& network,
                                        const Assignment& assignment, double w_clearance) {
    std::vector<Violation> out;
    std::map<std::string, long> ordered;
    for (const auto& line : order.lines) ordered[line.item_id] += line.quantity;

    std::map<std::string, long> allocated;
    std::set<std::string> used;
    std::map<std::string, double> node_weight;
    double savings = 0.0;
    for (const auto& a : assignment.allocations) {
        const auto item = network.find_item(a.item_id);
        const auto node = network.find_node(a.node_id);
        if (!item || !node) {
            out.push_back({"UNKNOWN_REF", a.item_id + "@" + a.node_id});
            continue;
        }
        if (a.quantity < 1) out.push_back({"NONPOSITIVE_ALLOCATION", a.item_id + "@" + a.node_id});
        if (a.quantity > network.inventory(*item, *node))
            out.push_back({"EXCEEDS_INVENTORY", a.item_id + "@" + a.node_id});
        allocated[a.item_id] += a.quantity;
        used.insert(a.node_id);
        node_weight[a.node_id] += network.item(*item).weight * a.quantity;
        savings += network.saving(*item, *node) * a.quantity;
    }
    if (allocated != ordered) out.push_back({"QUANTITY_MISMATCH", order.order_id});
    if (static_cast<std::size_t>(assignment.nodes_used) != used.size())
        out.push_back({"NODES_USED_MISMATCH", order.order_id});

    double shipping = 0.0;
    for (const auto& [node_id, weight] : node_weight) {
        const Node& node = network.node(*network.find_node(node_id));
        const double dx = node.location.x - order.destination.x;
        const double dy = node.location.y - order.destination.y;
        shipping += node.fixed_shipment_cost + node.unit_rate * weight * std::sqrt(dx * dx + dy * dy);
    }
    const double objective = shipping - w_clearance * savings;
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a) + std::abs(b)); };
    if (!close(shipping, assignment.shipping_cost)) out.push_back({"SHIPPING_MISMATCH", order.order_id});
    if (!close(savings, assignment.clearance_savings_total))
        out.push_back({"SAVINGS_MISMATCH", order.order_id});
    if (!close(objective, assignment.objective)) out.push_back({"OBJECTIVE_MISMATCH", order.order_id});
    return out;
}

} // namespace shortcut
