#pragma once

#include <string>
#include <vector>

#include "shortcut/domain.hpp"

namespace fixtures {

using namespace shortcut;

inline Node node(std::string id, double x, double y, double fixed, double rate,
                 NodeKind kind = NodeKind::FulfillmentCenter) {
    return {std::move(id), kind, {x, y}, fixed, rate};
}

inline Order order(std::string id, std::vector<OrderLine> lines, Point dest = {0.0, 0.0}) {
    return {std::move(id), dest, std::move(lines)};
}

// Items A and B (weight 1); N1 one unit from the origin stocking A, N2 two
// units away stocking A and B. Both charge 5 fixed plus rate 1.
inline FulfillmentNetwork two_node_network(double saving_a_n1 = 0.0) {
    FulfillmentNetwork net;
    net.catalog = {{"A", 1.0, 10.0, true}, {"B", 1.0, 10.0, true}};
    net.nodes = {node("N1", 1.0, 0.0, 5.0, 1.0), node("N2", 2.0, 0.0, 5.0, 1.0)};
    net.inventory = {{{"A", "N1"}, 5}, {{"A", "N2"}, 5}, {{"B", "N2"}, 5}};
    if (saving_a_n1 > 0.0) net.clearance_saving[{"A", "N1"}] = saving_a_n1;
    return net;
}

inline Order two_item_order() { return order("O1", {{"A", 1}, {"B", 1}}); }

} // namespace fixtures
