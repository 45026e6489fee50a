#include "doctest.h"

#include <filesystem>

#include "data.hpp"
#include "fixtures.hpp"
#include "shortcut/config.hpp"
#include "shortcut/formats.hpp"
#include "shortcut/generator.hpp"
#include "shortcut/io.hpp"

using namespace shortcut;

namespace {

struct Small {
    GeneratorConfig config;
    FulfillmentNetwork network;
    std::vector<Order> orders;
};

Small small() {
    Small s;
    s.config.n_nodes = 15;
    s.config.n_items = 30;
    s.config.n_orders = 60;
    s.network = generate_network(s.config);
    s.orders = generate_orders(s.config, NetworkIndex(s.network));
    return s;
}

} // namespace

TEST_CASE("doubles print in shortest round-trip form") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 123456789.125, 0.0})
        CHECK(io::parse_double(io::format_double(v), "x", 1) == v);
    CHECK(io::format_double(0.1) == "0.1");
}

TEST_CASE("csv quoting") {
    const auto row = io::csv_row({"a", "b,c", "d\"e"});
    const auto back = io::split_csv_line(io::split_lines(row).at(0), "x", 1);
    CHECK(back == std::vector<std::string>{"a", "b,c", "d\"e"});
}

TEST_CASE("network, orders and labels round-trip") {
    const auto s = small();
    CHECK(network_from_text(network_to_text(s.network)) == s.network);
    CHECK(orders_from_text(orders_to_text(s.orders)) == s.orders);
    const auto labels = label_orders(s.orders, NetworkIndex(s.network), {});
    CHECK(labels_from_text(labels_to_text(labels)) == labels);
}

TEST_CASE("features round-trip and check the catalog") {
    const auto s = small();
    const auto fs = extract_all(s.orders, NetworkIndex(s.network), {});
    const auto text = features_to_text(fs);
    CHECK(features_from_text(text) == fs);
    auto other = text;
    other.replace(other.find(kCatalogVersion), kCatalogVersion.size(), "order-features-v0");
    CHECK_THROWS_AS(features_from_text(other), VersionError);
}

TEST_CASE("outcomes and summary round-trip") {
    const auto s = small();
    const NetworkIndex index(s.network);
    const SplitPredictor half = [](const Order&, const FeatureVector&) { return 0.01; };
    const auto r = simulate_stream(s.orders, index, half, RouterConfig{}, {}, true);
    CHECK(outcomes_from_text(outcomes_to_text(r.outcomes)) == r.outcomes);
    CHECK(summary_from_text(summary_to_text(r.summary)).equal_ignoring_time(r.summary));
}

TEST_CASE("bins and partition round-trip") {
    std::vector<BinRate> bins{{0.0, 1.0, 3, 0.25}, {1.0, 2.0, 0, std::nullopt}};
    const auto back = bins_from_text(bins_to_text("total_quantity", bins));
    REQUIRE(back.size() == 2);
    CHECK(back[0].split_fraction == 0.25);
    CHECK_FALSE(back[1].split_fraction.has_value());

    PartitionSummary p;
    p.total = 10;
    p.single_item = 3;
    p.multi_item = 7;
    p.multi_item_split = 2;
    p.single_item_share = 0.3;
    p.multi_item_split_share = 2.0 / 7.0;
    p.multi_item_not_split_share = 5.0 / 7.0;
    p.evaluation_possible = true;
    const auto q = partition_from_text(partition_to_text(p, SingleItemCriterion::OneLineQtyOne));
    CHECK(q.multi_item_split_share == p.multi_item_split_share);
    CHECK(q.total == 10);
}

TEST_CASE("parse errors carry line numbers") {
    const auto text = orders_to_text({fixtures::two_item_order()});
    auto broken = text + "O2,notanumber,1,\"A:1\"\n";
    try {
        orders_from_text(broken, "orders.csv");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
    CHECK_THROWS_AS(orders_from_text("garbage\n"), Error);
}

TEST_CASE("missing file") {
    try {
        read_orders("/nonexistent/orders.csv");
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == "MISSING_FILE");
    }
}

TEST_CASE("atomic writes leave no temporary files") {
    const auto dir = std::filesystem::temp_directory_path() / "shortcut_atomic_test";
    std::filesystem::remove_all(dir);
    io::write_file_atomic(dir / "a" / "f.txt", "hello");
    CHECK(io::read_file(dir / "a" / "f.txt") == "hello");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir / "a")) ++entries;
    CHECK(entries == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("run config round-trips and rejects bad input") {
    RunConfig c;
    c.set_seed(7);
    c.cv.n_repeats = 2;
    c.router.threshold = 0.9;
    c.generator.item_weight_range = {0.5, 2.0};
    const auto back = config_from_text(config_to_text(c));
    CHECK(config_to_text(back) == config_to_text(c));
    CHECK(back.generator.seed == 7);
    CHECK(back.cv.seed == 7);

    CHECK(config_from_text("{}").cv.n_repeats == 5);
    CHECK_THROWS_AS(config_from_text(R"({"bogus": 1})"), ConfigError);
    CHECK_THROWS_AS(config_from_text(R"({"router": {"threshold": 0.2}})"), ConfigError);
    CHECK_THROWS_AS(config_from_text(R"({"cv": {"n_repeats": "five"}})"), ConfigError);
    CHECK_THROWS_AS(config_from_text(R"({"paths": {"labels": "x.csv", "features": "x.csv"}})"), ConfigError);
    CHECK_THROWS_AS(config_from_text("{"), ParseError);
}
