#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shortcut/domain.hpp"
#include "shortcut/features.hpp"
#include "shortcut/models.hpp"
#include "shortcut/optimizer.hpp"

namespace shortcut {

struct RouterConfig {
    double threshold = 0.97;  // shortcut when 1 - p_split >= threshold
    std::string model_path;
    bool trivial_bypass = true;

    void validate() const;
};

enum class Route { TrivialNoSplit, ShortcutNoSplit, FullOptimizer, ShortcutFallback };
std::string_view to_string(Route route);
Route route_from_string(std::string_view text);

struct RoutingOutcome {
    std::string order_id;
    Route route = Route::FullOptimizer;
    Assignment assignment;
    std::optional<double> predicted_p_split;
    std::uint64_t decide_cost_units = 0;
    std::optional<double> regret;
    // Set alongside regret: whether the true optimum splits.
    std::optional<bool> true_split;

    friend bool operator==(const RoutingOutcome&, const RoutingOutcome&) = default;
};

// Probability of split for an order, given its extracted features.
using SplitPredictor = std::function<double(const Order&, const FeatureVector&)>;

// Wraps a trained model; throws CATALOG_MISMATCH unless the model was trained
// on the canonical feature catalog.
SplitPredictor model_predictor(const SplitModel& model);

RoutingOutcome route_order(const Order& order, const NetworkIndex& network, const SplitPredictor& predictor,
                           const RouterConfig& config, const OptimizerConfig& optimizer = {});
RoutingOutcome route_order(const Order& order, const NetworkIndex& network, const SplitModel& model,
                           const RouterConfig& config, const OptimizerConfig& optimizer = {});

struct RoutingError {
    std::string order_id;
    std::string code;
    std::string message;

    friend bool operator==(const RoutingError&, const RoutingError&) = default;
};

struct StreamSummary {
    std::size_t n_orders = 0;
    std::size_t n_routed = 0;
    std::map<std::string, std::size_t> route_counts;  // by route name, all four present
    std::map<std::string, double> route_fractions;    // of routed orders
    std::size_t optimizer_invocations = 0;
    std::size_t optimizer_invocations_avoided = 0;
    std::uint64_t decide_cost_units = 0;
    // Work if every order had gone to the full optimizer (ground truth only).
    std::optional<std::uint64_t> counterfactual_cost_units;
    std::size_t non_trivial_orders = 0;
    double shortcut_coverage = 0.0;  // ShortcutNoSplit / non-trivial orders
    std::optional<std::size_t> shortcut_errors;
    std::optional<double> shortcut_error_rate;
    std::optional<double> total_regret;
    std::optional<double> mean_regret;  // over routed orders
    std::vector<RoutingError> errors;
    double wall_seconds = 0.0;  // not part of the deterministic output

    bool equal_ignoring_time(const StreamSummary& other) const;
};

struct StreamResult {
    std::vector<RoutingOutcome> outcomes;  // input order, failed orders omitted
    StreamSummary summary;
};

// Routes every order; per-order failures are tallied and the stream continues.
// With ground truth, each order is also solved exactly to measure regret.
StreamResult simulate_stream(const std::vector<Order>& orders, const NetworkIndex& network,
                             const SplitPredictor& predictor, const RouterConfig& config,
                             const OptimizerConfig& optimizer, bool with_ground_truth, std::size_t threads = 1);
StreamResult simulate_stream(const std::vector<Order>& orders, const NetworkIndex& network, const SplitModel& model,
                             const RouterConfig& config, const OptimizerConfig& optimizer, bool with_ground_truth,
                             std::size_t threads = 1);

} // namespace shortcut
