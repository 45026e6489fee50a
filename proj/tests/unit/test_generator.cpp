#include "doctest.h"

#include "shortcut/formats.hpp"
#include "shortcut/generator.hpp"

using namespace shortcut;

namespace {

GeneratorConfig small_config() {
    GeneratorConfig c;
    c.n_nodes = 10;
    c.store_fraction = 0.8;
    c.n_items = 40;
    c.n_orders = 200;
    return c;
}

} // namespace

TEST_CASE("store and FC counts follow store_fraction") {
    const auto net = generate_network(small_config());
    int stores = 0;
    int fcs = 0;
    for (const auto& n : net.nodes) (n.kind == NodeKind::Store ? stores : fcs)++;
    CHECK(stores == 8);
    CHECK(fcs == 2);
    CHECK(validate_network(net).empty());
}

TEST_CASE("same config gives a byte-identical network and order stream") {
    const auto c = small_config();
    const auto a = generate_network(c);
    const auto b = generate_network(c);
    CHECK(network_to_text(a) == network_to_text(b));
    const NetworkIndex index(a);
    CHECK(orders_to_text(generate_orders(c, index)) == orders_to_text(generate_orders(c, index)));
}

TEST_CASE("a different seed changes the network") {
    auto c = small_config();
    const auto a = network_to_text(generate_network(c));
    c.seed = 7;
    CHECK(a != network_to_text(generate_network(c)));
}

TEST_CASE("sfs_eligible_fraction=0 leaves stores empty") {
    auto c = small_config();
    c.sfs_eligible_fraction = 0.0;
    const auto net = generate_network(c);
    for (const auto& [key, units] : net.inventory) {
        const auto& node = *std::find_if(net.nodes.begin(), net.nodes.end(),
                                         [&](const Node& n) { return n.node_id == key.second; });
        CHECK(node.kind == NodeKind::FulfillmentCenter);
    }
}

TEST_CASE("single-item share on 1000 orders stays near 0.301") {
    GeneratorConfig c;
    c.n_orders = 1000;
    const NetworkIndex index(generate_network(c));
    const auto orders = generate_orders(c, index);
    REQUIRE(orders.size() == 1000);
    std::size_t single = 0;
    for (const auto& o : orders) single += is_single_unit_order(o) ? 1 : 0;
    CHECK(single >= 281);
    CHECK(single <= 321);
}

TEST_CASE("mean of one line per order gives single-line orders") {
    auto c = small_config();
    c.items_per_order_mean = 1.0;
    const NetworkIndex index(generate_network(c));
    for (const auto& o : generate_orders(c, index)) CHECK(o.lines.size() == 1);
}

TEST_CASE("invalid generator config names the field") {
    auto c = small_config();
    c.store_fraction = 1.5;
    try {
        generate_network(c);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("store_fraction") != std::string::npos);
    }
}

TEST_CASE("orders unreachable from inventory raise a generation error") {
    auto c = small_config();
    c.inventory_density = 0.0;
    c.fc_inventory_density = 0.0;
    c.single_item_order_fraction = 0.0;
    const auto net = generate_network(c);
    CHECK_THROWS_AS(generate_orders(c, NetworkIndex(net)), GenerationError);
}
