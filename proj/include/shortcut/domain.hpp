#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shortcut/errors.hpp"

namespace shortcut {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

struct ItemCatalogEntry {
    std::string item_id;
    double weight = 1.0;  // mass per unit, > 0
    double price = 0.0;
    bool sfs_eligible = false;

    friend bool operator==(const ItemCatalogEntry&, const ItemCatalogEntry&) = default;
};

enum class NodeKind { Store, FulfillmentCenter };

std::string_view to_string(NodeKind kind);
NodeKind node_kind_from_string(std::string_view text);

struct Node {
    std::string node_id;
    NodeKind kind = NodeKind::Store;
    Point location;
    double fixed_shipment_cost = 0.0;
    double unit_rate = 0.0;  // currency per (mass x distance)

    friend bool operator==(const Node&, const Node&) = default;
};

// (item_id, node_id)
using StockKey = std::pair<std::string, std::string>;

struct FulfillmentNetwork {
    std::vector<ItemCatalogEntry> catalog;
    std::vector<Node> nodes;
    std::map<StockKey, std::int64_t> inventory;
    std::map<StockKey, double> clearance_saving;

    friend bool operator==(const FulfillmentNetwork&, const FulfillmentNetwork&) = default;
};

struct OrderLine {
    std::string item_id;
    int quantity = 1;

    friend bool operator==(const OrderLine&, const OrderLine&) = default;
};

struct Order {
    std::string order_id;
    Point destination;
    std::vector<OrderLine> lines;

    int total_quantity() const;
    friend bool operator==(const Order&, const Order&) = default;
};

// One line, quantity one: no split is possible.
bool is_single_unit_order(const Order& order);

struct Allocation {
    std::string item_id;
    std::string node_id;
    int quantity = 0;

    friend bool operator==(const Allocation&, const Allocation&) = default;
};

struct Assignment {
    std::vector<Allocation> allocations;
    double objective = 0.0;
    double shipping_cost = 0.0;
    double clearance_savings_total = 0.0;
    int nodes_used = 0;

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct SplitLabel {
    std::string order_id;
    int y = 0;
    int nodes_used = 0;
    double objective = 0.0;

    friend bool operator==(const SplitLabel&, const SplitLabel&) = default;
};

struct Violation {
    std::string code;
    std::string detail;
};

// Codes: DUPLICATE_ITEM_ID, DUPLICATE_NODE_ID, BAD_ITEM_WEIGHT, BAD_ITEM_PRICE,
// BAD_NODE_COST, DANGLING_INVENTORY_REF, NEGATIVE_INVENTORY, DANGLING_SAVING_REF,
// SAVING_WITHOUT_INVENTORY, NEGATIVE_SAVING, STORE_STOCKS_NON_SFS.
std::vector<Violation> validate_network(const FulfillmentNetwork& network);

std::vector<Violation> validate_order(const Order& order);

double shipping_distance(const Node& node, const Point& destination);

// One shipment per (order, node): fixed cost plus rate x weight x distance.
double shipment_cost(const Node& node, const Point& destination, double total_weight);

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;
};

// Validated, immutable, dense view over a FulfillmentNetwork. Cheap to copy.
class NetworkIndex {
public:
    explicit NetworkIndex(FulfillmentNetwork network);

    const FulfillmentNetwork& data() const { return impl_->network; }
    std::size_t item_count() const { return impl_->network.catalog.size(); }
    std::size_t node_count() const { return impl_->network.nodes.size(); }

    const ItemCatalogEntry& item(std::size_t i) const { return impl_->network.catalog[i]; }
    const Node& node(std::size_t n) const { return impl_->network.nodes[n]; }

    std::optional<std::size_t> find_item(std::string_view item_id) const;
    std::optional<std::size_t> find_node(std::string_view node_id) const;

    std::int64_t inventory(std::size_t item, std::size_t node) const {
        return impl_->inventory[item * node_count() + node];
    }
    double saving(std::size_t item, std::size_t node) const {
        return impl_->saving[item * node_count() + node];
    }
    // Nodes with positive inventory of `item`, ascending node index.
    const std::vector<std::size_t>& stocking_nodes(std::size_t item) const {
        return impl_->stocking[item];
    }
    // Position of the node in ascending node_id order; used for tie-breaks.
    std::size_t node_rank(std::size_t node) const { return impl_->node_rank[node]; }

private:
    struct Impl {
        FulfillmentNetwork network;
        std::map<std::string, std::size_t, std::less<>> item_lookup;
        std::map<std::string, std::size_t, std::less<>> node_lookup;
        std::vector<std::int64_t> inventory;
        std::vector<double> saving;
        std::vector<std::vector<std::size_t>> stocking;
        std::vector<std::size_t> node_rank;
    };
    std::shared_ptr<const Impl> impl_;
};

// Resolve order lines to item indices; throws InfeasibleOrderError naming the
// order when an item is unknown or the order itself is malformed.
std::vector<std::size_t> resolve_order_items(const Order& order, const NetworkIndex& network);

// Builds the canonical Assignment for a set of allocations: allocations
// sorted by (order line, node_id), costs accumulated in that order, one
// shipment per distinct node. Both the solver and any checker derive the
// objective through this function so equal allocations give equal doubles.
Assignment make_assignment(const Order& order, const NetworkIndex& network,
                           std::vector<Allocation> allocations, double w_clearance);

// Re-verifies the Assignment invariants (quantities, inventory, node count,
// objective recomputed from scratch). Returns violations; empty means valid.
std::vector<Violation> check_assignment(const Order& order, const NetworkIndex& network,
                                        const Assignment& assignment, double w_clearance);

} // namespace shortcut
