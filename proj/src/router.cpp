#include "shortcut/router.hpp"

#include <chrono>

#include "shortcut/parallel.hpp"

namespace shortcut {

void RouterConfig::validate() const {
    if (!(threshold >= 0.5 && threshold <= 1.0)) throw ConfigError("router threshold must lie in [0.5, 1]");
}

std::string_view to_string(Route route) {
    switch (route) {
    case Route::TrivialNoSplit: return "TrivialNoSplit";
    case Route::ShortcutNoSplit: return "ShortcutNoSplit";
    case Route::FullOptimizer: return "FullOptimizer";
    case Route::ShortcutFallback: return "ShortcutFallback";
    }
    return "Unknown";
}

Route route_from_string(std::string_view text) {
    for (auto r : {Route::TrivialNoSplit, Route::ShortcutNoSplit, Route::FullOptimizer, Route::ShortcutFallback})
        if (to_string(r) == text) return r;
    throw ConfigError("unknown route '" + std::string(text) + "'");
}

SplitPredictor model_predictor(const SplitModel& model) {
    const auto& catalog = canonical_catalog();
    if (model.catalog_version() != catalog.version || model.feature_names() != catalog.names())
        throw ModelError("CATALOG_MISMATCH", "model was trained on feature catalog '" + model.catalog_version() +
                                                 "', the extractor produces '" + catalog.version + "'");
    return [model](const Order&, const FeatureVector& features) { return predict(model, features.values); };
}

RoutingOutcome route_order(const Order& order, const NetworkIndex& network, const SplitPredictor& predictor,
                           const RouterConfig& config, const OptimizerConfig& optimizer) {
    config.validate();
    RoutingOutcome out;
    out.order_id = order.order_id;
    const auto candidates = candidate_nodes(order, network, optimizer);
    SolveStats stats;

    if (config.trivial_bypass && is_single_unit_order(order)) {
        out.route = Route::TrivialNoSplit;
        auto single = solve_no_split(order, network, optimizer, candidates, &stats);
        out.assignment = single ? std::move(*single) : solve_full(order, network, optimizer, candidates, &stats);
        out.decide_cost_units = stats.cost_evaluations;
        return out;
    }

    const auto features = extract_features(order, network, candidates, optimizer);
    const double p_split = predictor(order, features);
    out.predicted_p_split = p_split;
    if (1.0 - p_split >= config.threshold) {
        if (auto single = solve_no_split(order, network, optimizer, candidates, &stats)) {
            out.route = Route::ShortcutNoSplit;
            out.assignment = std::move(*single);
        } else {
            out.route = Route::ShortcutFallback;
            out.assignment = solve_full(order, network, optimizer, candidates, &stats);
        }
    } else {
        out.route = Route::FullOptimizer;
        out.assignment = solve_full(order, network, optimizer, candidates, &stats);
    }
    out.decide_cost_units = stats.cost_evaluations;
    return out;
}

RoutingOutcome route_order(const Order& order, const NetworkIndex& network, const SplitModel& model,
                           const RouterConfig& config, const OptimizerConfig& optimizer) {
    return route_order(order, network, model_predictor(model), config, optimizer);
}

bool StreamSummary::equal_ignoring_time(const StreamSummary& o) const {
    return n_orders == o.n_orders && n_routed == o.n_routed && route_counts == o.route_counts &&
           route_fractions == o.route_fractions && optimizer_invocations == o.optimizer_invocations &&
           optimizer_invocations_avoided == o.optimizer_invocations_avoided &&
           decide_cost_units == o.decide_cost_units && counterfactual_cost_units == o.counterfactual_cost_units &&
           non_trivial_orders == o.non_trivial_orders && shortcut_coverage == o.shortcut_coverage &&
           shortcut_errors == o.shortcut_errors && shortcut_error_rate == o.shortcut_error_rate &&
           total_regret == o.total_regret && mean_regret == o.mean_regret && errors == o.errors;
}

StreamResult simulate_stream(const std::vector<Order>& orders, const NetworkIndex& network,
                             const SplitPredictor& predictor, const RouterConfig& config,
                             const OptimizerConfig& optimizer, bool with_ground_truth, std::size_t threads) {
    config.validate();
    optimizer.validate();
    const auto start = std::chrono::steady_clock::now();

    struct Slot {
        std::optional<RoutingOutcome> outcome;
        std::uint64_t full_units = 0;
        std::optional<RoutingError> error;
    };
    std::vector<Slot> slots(orders.size());
    parallel_for(orders.size(), threads, [&](std::size_t i) {
        auto& slot = slots[i];
        try {
            auto outcome = route_order(orders[i], network, predictor, config, optimizer);
            if (with_ground_truth) {
                if (outcome.route == Route::FullOptimizer) {
                    slot.full_units = outcome.decide_cost_units;
                    outcome.regret = 0.0;
                    outcome.true_split = outcome.assignment.nodes_used > 1;
                } else {
                    SolveStats stats;
                    const auto truth = solve_full(orders[i], network, optimizer, &stats);
                    slot.full_units = stats.cost_evaluations;
                    outcome.regret = outcome.assignment.objective - truth.objective;
                    outcome.true_split = truth.nodes_used > 1;
                }
            }
            slot.outcome = std::move(outcome);
        } catch (const Error& e) {
            slot.error = RoutingError{orders[i].order_id, e.code(), e.what()};
        }
    });

    StreamResult result;
    auto& s = result.summary;
    s.n_orders = orders.size();
    for (auto r : {Route::TrivialNoSplit, Route::ShortcutNoSplit, Route::FullOptimizer, Route::ShortcutFallback})
        s.route_counts[std::string(to_string(r))] = 0;
    std::uint64_t counterfactual = 0;
    std::size_t shortcut_errors = 0;
    double total_regret = 0.0;
    for (auto& slot : slots) {
        if (slot.error) {
            s.errors.push_back(*slot.error);
            continue;
        }
        auto& o = *slot.outcome;
        ++s.n_routed;
        ++s.route_counts[std::string(to_string(o.route))];
        s.decide_cost_units += o.decide_cost_units;
        if (o.route == Route::FullOptimizer || o.route == Route::ShortcutFallback) ++s.optimizer_invocations;
        if (with_ground_truth) {
            counterfactual += slot.full_units;
            total_regret += *o.regret;
            if (o.route == Route::ShortcutNoSplit && *o.true_split) ++shortcut_errors;
        }
        result.outcomes.push_back(std::move(o));
    }
    for (const auto& [name, count] : s.route_counts)
        s.route_fractions[name] = s.n_routed ? static_cast<double>(count) / static_cast<double>(s.n_routed) : 0.0;
    s.optimizer_invocations_avoided = s.n_routed - s.optimizer_invocations;
    s.non_trivial_orders = s.n_routed - s.route_counts["TrivialNoSplit"];
    const auto shortcuts = s.route_counts["ShortcutNoSplit"];
    if (s.non_trivial_orders > 0)
        s.shortcut_coverage = static_cast<double>(shortcuts) / static_cast<double>(s.non_trivial_orders);
    if (with_ground_truth) {
        s.counterfactual_cost_units = counterfactual;
        s.shortcut_errors = shortcut_errors;
        s.shortcut_error_rate = shortcuts ? static_cast<double>(shortcut_errors) / static_cast<double>(shortcuts) : 0.0;
        s.total_regret = total_regret;
        s.mean_regret = s.n_routed ? total_regret / static_cast<double>(s.n_routed) : 0.0;
    }
    s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

StreamResult simulate_stream(const std::vector<Order>& orders, const NetworkIndex& network, const SplitModel& model,
                             const RouterConfig& config, const OptimizerConfig& optimizer, bool with_ground_truth,
                             std::size_t threads) {
    return simulate_stream(orders, network, model_predictor(model), config, optimizer, with_ground_truth, threads);
}

} // namespace shortcut
