#include "doctest.h"

#include <cmath>
#include <map>
#include <set>

#include "fixtures.hpp"
#include "shortcut/generator.hpp"
#include "shortcut/router.hpp"

using namespace shortcut;

namespace {

SplitModel canonical_constant(double p) {
    const auto& cat = canonical_catalog();
    LogisticParams params;
    params.weights.assign(cat.size(), 0.0);
    params.intercept = std::log(p / (1.0 - p));
    return SplitModel(params, cat.names(), cat.version,
                      {std::vector<double>(cat.size(), 0.0), std::vector<double>(cat.size(), 1.0)}, {});
}

struct Stream {
    NetworkIndex index;
    std::vector<Order> orders;
};

Stream small_stream() {
    GeneratorConfig c;
    c.n_nodes = 25;
    c.n_items = 60;
    c.n_orders = 150;
    c.seed = 3;
    NetworkIndex index(generate_network(c));
    auto orders = generate_orders(c, index);
    return {index, orders};
}

SplitPredictor oracle_predictor(const Stream& s) {
    std::map<std::string, double> p;
    for (const auto& o : s.orders) p[o.order_id] = solve_full(o, s.index, {}).nodes_used > 1 ? 1.0 : 0.0;
    return [p](const Order& o, const FeatureVector&) { return p.at(o.order_id); };
}

std::set<std::string> shortcut_set(const StreamResult& r) {
    std::set<std::string> out;
    for (const auto& o : r.outcomes)
        if (o.route == Route::ShortcutNoSplit) out.insert(o.order_id);
    return out;
}

} // namespace

TEST_CASE("router config validation") {
    RouterConfig c;
    c.threshold = 0.4;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.threshold = 1.0;
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("threshold 1.0 never shortcuts a multi-item order") {
    const NetworkIndex index(fixtures::two_node_network());
    RouterConfig c;
    c.threshold = 1.0;
    const auto out = route_order(fixtures::two_item_order(), index, canonical_constant(1e-15), c);
    CHECK(out.route == Route::FullOptimizer);
    CHECK(*out.predicted_p_split > 0.0);
}

TEST_CASE("single unit bypasses the model") {
    const NetworkIndex index(fixtures::two_node_network());
    bool called = false;
    const SplitPredictor spy = [&](const Order&, const FeatureVector&) {
        called = true;
        return 0.5;
    };
    const auto out = route_order(fixtures::order("O", {{"A", 1}}), index, spy, RouterConfig{});
    CHECK(out.route == Route::TrivialNoSplit);
    CHECK_FALSE(called);
    CHECK_FALSE(out.predicted_p_split.has_value());
    CHECK(out.assignment.nodes_used == 1);
}

TEST_CASE("confident no-split prediction takes the shortcut") {
    const NetworkIndex index(fixtures::two_node_network());
    const auto out = route_order(fixtures::two_item_order(), index, canonical_constant(0.02), RouterConfig{});
    CHECK(out.route == Route::ShortcutNoSplit);
    CHECK(out.assignment.nodes_used == 1);
    CHECK(out.assignment.objective == doctest::Approx(9.0));
    CHECK(out.decide_cost_units <= 2);
}

TEST_CASE("shortcut without a feasible single node falls back") {
    FulfillmentNetwork net = fixtures::two_node_network();
    net.inventory.erase({"A", "N2"});
    const auto out = route_order(fixtures::two_item_order(), NetworkIndex(net), canonical_constant(0.02),
                                 RouterConfig{});
    CHECK(out.route == Route::ShortcutFallback);
    CHECK(out.assignment.nodes_used == 2);
}

TEST_CASE("a model on another catalog is refused") {
    LogisticParams params;
    params.weights = {0.0};
    const SplitModel other(params, {"f0"}, "anon", {{0.0}, {1.0}}, {});
    CHECK_THROWS_AS(model_predictor(other), ModelError);
}

TEST_CASE("always-split model takes no shortcuts and has no regret") {
    const auto s = small_stream();
    const auto r = simulate_stream(s.orders, s.index, canonical_constant(0.999), RouterConfig{}, {}, true);
    CHECK(r.summary.route_counts.at("ShortcutNoSplit") == 0);
    CHECK(*r.summary.total_regret == 0.0);
    CHECK(r.summary.errors.empty());
}

TEST_CASE("oracle labels at threshold 0.5 give zero regret") {
    const auto s = small_stream();
    RouterConfig c;
    c.threshold = 0.5;
    const auto r = simulate_stream(s.orders, s.index, oracle_predictor(s), c, {}, true);
    for (const auto& o : r.outcomes) CHECK(*o.regret == 0.0);
    CHECK(*r.summary.total_regret == 0.0);
    CHECK(*r.summary.shortcut_errors == 0);
    CHECK(r.summary.route_counts.at("ShortcutNoSplit") > 0);
    CHECK(*r.summary.counterfactual_cost_units >= r.summary.decide_cost_units);
}

TEST_CASE("never-shortcut setting reproduces solve_full") {
    const auto s = small_stream();
    RouterConfig c;
    c.threshold = 1.0;
    c.trivial_bypass = false;
    const auto r = simulate_stream(s.orders, s.index, canonical_constant(0.01), c, {}, false);
    REQUIRE(r.outcomes.size() == s.orders.size());
    for (std::size_t i = 0; i < s.orders.size(); ++i) {
        CHECK(r.outcomes[i].route == Route::FullOptimizer);
        CHECK(r.outcomes[i].assignment == solve_full(s.orders[i], s.index, {}));
    }
    CHECK_FALSE(r.summary.total_regret.has_value());
    CHECK_FALSE(r.summary.counterfactual_cost_units.has_value());
}

TEST_CASE("raising the threshold shrinks the shortcut set") {
    const auto s = small_stream();
    // Predictions spread across the whole range so both thresholds bite.
    const SplitPredictor spread = [](const Order& o, const FeatureVector&) {
        return static_cast<double>(std::hash<std::string>{}(o.order_id) % 1000) / 10000.0;
    };
    RouterConfig lo;
    lo.threshold = 0.9;
    RouterConfig hi;
    hi.threshold = 0.97;
    const auto a = shortcut_set(simulate_stream(s.orders, s.index, spread, lo, {}, true));
    const auto b = shortcut_set(simulate_stream(s.orders, s.index, spread, hi, {}, true));
    CHECK(b.size() < a.size());
    for (const auto& id : b) CHECK(a.count(id) == 1);
}

TEST_CASE("stream output is independent of thread count") {
    const auto s = small_stream();
    const auto a = simulate_stream(s.orders, s.index, canonical_constant(0.02), RouterConfig{}, {}, true, 1);
    const auto b = simulate_stream(s.orders, s.index, canonical_constant(0.02), RouterConfig{}, {}, true, 4);
    CHECK(a.outcomes == b.outcomes);
    CHECK(a.summary.equal_ignoring_time(b.summary));
}

TEST_CASE("per-order failures are tallied and the stream continues") {
    const NetworkIndex index(fixtures::two_node_network());
    const std::vector<Order> orders{fixtures::two_item_order(), fixtures::order("BAD", {{"ZZ", 1}, {"A", 1}})};
    const auto r = simulate_stream(orders, index, canonical_constant(0.5), RouterConfig{}, {}, true);
    CHECK(r.outcomes.size() == 1);
    REQUIRE(r.summary.errors.size() == 1);
    CHECK(r.summary.errors[0].order_id == "BAD");
}
