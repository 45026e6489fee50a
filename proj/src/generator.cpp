#include "shortcut/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "shortcut/rng.hpp"

namespace shortcut {

namespace {

std::string padded_id(char prefix, std::size_t index, std::size_t count) {
    const int width = static_cast<int>(std::to_string(count > 0 ? count - 1 : 0).size());
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%c%0*zu", prefix, width, index);
    return buffer;
}

std::size_t round_half_up(double value) {
    return static_cast<std::size_t>(std::floor(value + 0.5));
}

void check_fraction(double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0)) throw ConfigError(std::string("generator.") + name + " must lie in [0,1]");
}

template <class T>
void check_range(const Range<T>& range, const char* name, T lower_limit) {
    if (!(range.min <= range.max)) throw ConfigError(std::string("generator.") + name + " must have min <= max");
    if (!(range.min >= lower_limit)) throw ConfigError(std::string("generator.") + name + " is below its lower limit");
}

double truncated_geometric_mean(double q, std::size_t max_lines) {
    double mass = 0.0;
    double mean = 0.0;
    double p = q;
    for (std::size_t k = 0; k < max_lines; ++k) {
        mass += p;
        mean += p * static_cast<double>(k + 1);
        p *= 1.0 - q;
    }
    return mean / mass;
}

} // namespace

void GeneratorConfig::validate() const {
    if (n_nodes < 1) throw ConfigError("generator.n_nodes must be >= 1");
    if (n_items < 1) throw ConfigError("generator.n_items must be >= 1");
    if (n_orders < 1) throw ConfigError("generator.n_orders must be >= 1");
    if (max_lines < 1) throw ConfigError("generator.max_lines must be >= 1");
    check_fraction(store_fraction, "store_fraction");
    check_fraction(sfs_eligible_fraction, "sfs_eligible_fraction");
    check_fraction(single_item_order_fraction, "single_item_order_fraction");
    check_fraction(inventory_density, "inventory_density");
    check_fraction(fc_inventory_density, "fc_inventory_density");
    check_fraction(clearance_probability, "clearance_probability");
    if (!(items_per_order_mean > 0.0)) throw ConfigError("generator.items_per_order_mean must be > 0");
    check_range(item_weight_range, "item_weight_range", 0.0);
    if (!(item_weight_range.min > 0.0)) throw ConfigError("generator.item_weight_range must be > 0");
    check_range(item_price_range, "item_price_range", 0.0);
    check_range(inventory_level_range, "inventory_level_range", std::int64_t{1});
    check_range(clearance_saving_range, "clearance_saving_range", 0.0);
    check_range(fixed_cost_range, "fixed_cost_range", 0.0);
    check_range(unit_rate_range, "unit_rate_range", 0.0);
    if (!(plane_size > 0.0)) throw ConfigError("generator.plane_size must be > 0");
    if (quantity_distribution.empty()) throw ConfigError("generator.quantity_distribution must be non-empty");
    double mass = 0.0;
    for (double m : quantity_distribution) {
        if (!(m >= 0.0)) throw ConfigError("generator.quantity_distribution masses must be >= 0");
        mass += m;
    }
    if (!(mass > 0.0)) throw ConfigError("generator.quantity_distribution must have positive mass");
}

double line_count_parameter(double target_mean, std::size_t max_lines) {
    if (target_mean <= 1.0 || max_lines <= 1) return 1.0;
    double lo = 1e-9;
    double hi = 1.0;
    if (truncated_geometric_mean(lo, max_lines) <= target_mean) return lo;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (truncated_geometric_mean(mid, max_lines) > target_mean)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

FulfillmentNetwork generate_network(const GeneratorConfig& config) {
    config.validate();
    Rng rng(Rng::mix(config.seed, 1));
    FulfillmentNetwork net;

    const std::size_t n_stores = std::min(config.n_nodes, round_half_up(config.n_nodes * config.store_fraction));
    for (std::size_t n = 0; n < config.n_nodes; ++n) {
        Node node;
        node.node_id = padded_id('N', n, config.n_nodes);
        node.kind = n < n_stores ? NodeKind::Store : NodeKind::FulfillmentCenter;
        node.location = {rng.uniform(0.0, config.plane_size), rng.uniform(0.0, config.plane_size)};
        node.fixed_shipment_cost = rng.uniform(config.fixed_cost_range.min, config.fixed_cost_range.max);
        node.unit_rate = rng.uniform(config.unit_rate_range.min, config.unit_rate_range.max);
        net.nodes.push_back(std::move(node));
    }

    std::vector<std::size_t> order(config.n_items);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    const std::size_t n_eligible =
        std::min(config.n_items, round_half_up(config.n_items * config.sfs_eligible_fraction));
    std::vector<char> eligible(config.n_items, 0);
    for (std::size_t k = 0; k < n_eligible; ++k) eligible[order[k]] = 1;

    for (std::size_t i = 0; i < config.n_items; ++i) {
        ItemCatalogEntry item;
        item.item_id = padded_id('I', i, config.n_items);
        item.weight = rng.uniform(config.item_weight_range.min, config.item_weight_range.max);
        item.price = rng.uniform(config.item_price_range.min, config.item_price_range.max);
        item.sfs_eligible = eligible[i] != 0;
        net.catalog.push_back(std::move(item));
    }

    for (const auto& item : net.catalog) {
        for (const auto& node : net.nodes) {
            const bool store = node.kind == NodeKind::Store;
            if (store && !item.sfs_eligible) continue;
            const double density = store ? config.inventory_density : config.fc_inventory_density;
            if (!rng.bernoulli(density)) continue;
            const StockKey key{item.item_id, node.node_id};
            net.inventory[key] =
                rng.uniform_int(config.inventory_level_range.min, config.inventory_level_range.max);
            if (store && rng.bernoulli(config.clearance_probability))
                net.clearance_saving[key] =
                    rng.uniform(config.clearance_saving_range.min, config.clearance_saving_range.max);
        }
    }
    return net;
}

namespace {

bool coverable(const Order& order, const NetworkIndex& network, const OptimizerConfig& optimizer) {
    CandidateSet candidates;
    try {
        candidates = candidate_nodes(order, network, optimizer);
    } catch (const InfeasibleOrderError&) {
        return false;
    }
    const auto items = resolve_order_items(order, network);
    auto holds = [&](std::size_t l, std::size_t node) {
        return network.inventory(items[l], node) >= order.lines[l].quantity;
    };
    if (optimizer.split_limit(order) < order.lines.size()) {
        for (auto node : candidates.node_indices) {
            bool all = true;
            for (std::size_t l = 0; l < items.size() && all; ++l) all = holds(l, node);
            if (all) return true;
        }
        return false;
    }
    for (std::size_t l = 0; l < items.size(); ++l) {
        bool any = false;
        for (auto node : candidates.node_indices) any = any || holds(l, node);
        if (!any) return false;
    }
    return true;
}

} // namespace

std::vector<Order> generate_orders(const GeneratorConfig& config, const NetworkIndex& network,
                                   const OptimizerConfig& optimizer) {
    config.validate();
    optimizer.validate();
    if (network.item_count() == 0) throw GenerationError("network has no items");
    Rng rng(Rng::mix(config.seed, 2));

    const double s = config.single_item_order_fraction;
    const std::size_t max_lines = std::min(config.max_lines, network.item_count());
    const double multi_mean = s < 1.0 ? (config.items_per_order_mean - s) / (1.0 - s) : 1.0;
    const double q = line_count_parameter(multi_mean, max_lines);
    std::vector<double> line_weights(max_lines);
    {
        double p = q;
        for (auto& w : line_weights) {
            w = p;
            p *= 1.0 - q;
        }
    }
    std::vector<double> multi_unit_quantity = config.quantity_distribution;
    multi_unit_quantity[0] = 0.0;
    const bool has_multi_unit =
        std::any_of(multi_unit_quantity.begin(), multi_unit_quantity.end(), [](double m) { return m > 0.0; });

    std::vector<std::size_t> all_items(network.item_count());
    std::iota(all_items.begin(), all_items.end(), std::size_t{0});

    std::vector<Order> orders;
    orders.reserve(config.n_orders);
    for (std::size_t o = 0; o < config.n_orders; ++o) {
        Order order;
        order.order_id = padded_id('O', o, config.n_orders);
        const bool single = rng.bernoulli(s);
        bool accepted = false;
        for (int attempt = 0; attempt < 100 && !accepted; ++attempt) {
            order.lines.clear();
            order.destination = {rng.uniform(0.0, config.plane_size), rng.uniform(0.0, config.plane_size)};
            const std::size_t n_lines = single ? 1 : 1 + rng.categorical(line_weights);
            // Partial Fisher-Yates draw of distinct items.
            for (std::size_t l = 0; l < n_lines; ++l) {
                const auto j = static_cast<std::size_t>(
                    rng.uniform_int(static_cast<std::int64_t>(l), static_cast<std::int64_t>(all_items.size()) - 1));
                std::swap(all_items[l], all_items[j]);
                int quantity = 1;
                if (!single) {
                    if (n_lines == 1 && has_multi_unit)
                        quantity = 1 + static_cast<int>(rng.categorical(multi_unit_quantity));
                    else
                        quantity = 1 + static_cast<int>(rng.categorical(config.quantity_distribution));
                }
                order.lines.push_back({network.item(all_items[l]).item_id, quantity});
            }
            accepted = coverable(order, network, optimizer);
        }
        if (!accepted)
            throw GenerationError("order " + order.order_id +
                                  ": no fulfillable draw after 100 attempts; inventory too sparse");
        orders.push_back(std::move(order));
    }
    return orders;
}

} // namespace shortcut
