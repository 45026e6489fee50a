#include "doctest.h"

#include "fixtures.hpp"
#include "shortcut/domain.hpp"

using namespace shortcut;
using fixtures::node;

namespace {

bool has_code(const std::vector<Violation>& v, const std::string& code) {
    for (const auto& x : v)
        if (x.code == code) return true;
    return false;
}

} // namespace

TEST_CASE("validate_network flags a store stocking a non-SFS item") {
    FulfillmentNetwork net;
    net.catalog = {{"A", 1.0, 1.0, false}};
    net.nodes = {node("S1", 0, 0, 1, 1, NodeKind::Store)};
    net.inventory[{"A", "S1"}] = 2;
    const auto v = validate_network(net);
    REQUIRE(v.size() == 1);
    CHECK(v[0].code == "STORE_STOCKS_NON_SFS");
}

TEST_CASE("validate_network accepts the empty network") {
    CHECK(validate_network(FulfillmentNetwork{}).empty());
}

TEST_CASE("validate_network flags dangling and malformed references") {
    FulfillmentNetwork net;
    net.catalog = {{"A", 1.0, 1.0, true}, {"A", 2.0, 1.0, true}, {"C", -1.0, 1.0, true}};
    net.nodes = {node("N1", 0, 0, 1, 1), node("N1", 1, 1, 1, 1), node("N2", 0, 0, -1, 1)};
    net.inventory[{"A", "NX"}] = 1;
    net.inventory[{"A", "N2"}] = -1;
    net.clearance_saving[{"C", "N1"}] = 1.0;
    net.clearance_saving[{"Z", "N1"}] = 1.0;
    const auto v = validate_network(net);
    CHECK(has_code(v, "DANGLING_INVENTORY_REF"));
    CHECK(has_code(v, "DUPLICATE_ITEM_ID"));
    CHECK(has_code(v, "DUPLICATE_NODE_ID"));
    CHECK(has_code(v, "BAD_ITEM_WEIGHT"));
    CHECK(has_code(v, "BAD_NODE_COST"));
    CHECK(has_code(v, "NEGATIVE_INVENTORY"));
    CHECK(has_code(v, "SAVING_WITHOUT_INVENTORY"));
    CHECK(has_code(v, "DANGLING_SAVING_REF"));
}

TEST_CASE("NetworkIndex rejects invalid networks") {
    FulfillmentNetwork net;
    net.catalog = {{"A", 1.0, 1.0, false}};
    net.nodes = {node("S1", 0, 0, 1, 1, NodeKind::Store)};
    net.inventory[{"A", "S1"}] = 2;
    CHECK_THROWS_AS(NetworkIndex{net}, ValidationError);
}

TEST_CASE("shipping_distance") {
    CHECK(shipping_distance(node("N", 0, 0, 0, 0), {3, 4}) == doctest::Approx(5.0));
    CHECK(shipping_distance(node("N", 7, -2, 0, 0), {7, -2}) == 0.0);
    CHECK(shipping_distance(node("N", 1, 1, 0, 0), {1, 2}) == doctest::Approx(1.0));
}

TEST_CASE("shipment_cost") {
    CHECK(shipment_cost(node("N", 0, 0, 5, 1), {2, 0}, 2.0) == doctest::Approx(9.0));
    CHECK(shipment_cost(node("N", 0, 0, 5, 1), {2, 0}, 0.0) == 5.0);
    CHECK(shipment_cost(node("N", 0, 0, 0, 0), {2, 0}, 3.0) == 0.0);
}

TEST_CASE("validate_order") {
    CHECK(validate_order(fixtures::order("O", {{"A", 1}})).empty());
    CHECK_FALSE(validate_order(fixtures::order("O", {})).empty());
    CHECK_FALSE(validate_order(fixtures::order("O", {{"A", 0}})).empty());
    CHECK_FALSE(validate_order(fixtures::order("O", {{"A", 1}, {"A", 2}})).empty());
}

TEST_CASE("make_assignment accumulates one shipment per node and passes the checker") {
    const NetworkIndex index(fixtures::two_node_network(10.0));
    const auto order = fixtures::two_item_order();
    const auto a = make_assignment(order, index, {{"B", "N2", 1}, {"A", "N1", 1}}, 1.0);
    CHECK(a.nodes_used == 2);
    CHECK(a.shipping_cost == doctest::Approx(13.0));
    CHECK(a.clearance_savings_total == doctest::Approx(10.0));
    CHECK(a.objective == doctest::Approx(3.0));
    CHECK(a.allocations.front().item_id == "A");
    CHECK(check_assignment(order, index, a, 1.0).empty());

    auto bad = a;
    bad.allocations[0].quantity = 2;
    CHECK_FALSE(check_assignment(order, index, bad, 1.0).empty());
}

TEST_CASE("resolve_order_items names the order for unknown items") {
    const NetworkIndex index(fixtures::two_node_network());
    try {
        resolve_order_items(fixtures::order("ORD-9", {{"ZZ", 1}}), index);
        FAIL("expected an error");
    } catch (const InfeasibleOrderError& e) {
        CHECK(e.order_id() == "ORD-9");
    }
}
