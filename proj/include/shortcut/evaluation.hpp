#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shortcut/dataset.hpp"
#include "shortcut/domain.hpp"
#include "shortcut/models.hpp"
#include "shortcut/rng.hpp"

namespace shortcut {

// --- metrics ------------------------------------------------------------------

// Fraction of examples where (p > 0.5) agrees with y; p == 0.5 predicts 0.
double accuracy(std::span<const double> predictions, std::span<const int> labels);
// Mean negative log-likelihood, natural log, p clamped to [1e-12, 1 - 1e-12].
double log_loss(std::span<const double> predictions, std::span<const int> labels);

struct CurvePoint {
    double threshold = 0.5;
    double coverage = 0.0;
    std::size_t covered = 0;
    std::optional<double> accuracy;  // absent when nothing is covered

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

// An example is covered at t when max(p, 1 - p) >= t.
std::vector<CurvePoint> coverage_accuracy_curve(std::span<const double> predictions, std::span<const int> labels,
                                                std::span<const double> thresholds);

// 0.500, 0.505, ..., 0.995 with 0.97 guaranteed present.
std::vector<double> default_curve_thresholds();

// --- configuration ---------------------------------------------------------------

struct HyperParamGrid {
    // Logistic penalties are given per training example: lambda = value * n.
    std::vector<double> logistic_lambda{0.001, 0.01, 0.1, 1.0, 10.0};
    std::vector<std::size_t> tree_min_leaf{5, 20, 50, 100};
    std::vector<std::size_t> boost_iterations{50, 100, 200, 400};
    double boost_shrinkage = 0.1;

    void validate() const;
    friend bool operator==(const HyperParamGrid&, const HyperParamGrid&) = default;
};

enum class SelectionMetric { LogLoss, Accuracy };
std::string_view to_string(SelectionMetric metric);
SelectionMetric selection_metric_from_string(std::string_view text);

struct CVConfig {
    std::size_t n_repeats = 5;
    std::size_t n_outer_folds = 10;
    std::size_t n_inner_folds = 10;
    std::uint64_t seed = 42;
    HyperParamGrid grid;
    SelectionMetric selection_metric = SelectionMetric::LogLoss;
    // Members averaged into the Ensemble entry.
    std::vector<ModelKind> ensemble_members{ModelKind::DecisionTree, ModelKind::LogitBoost};
    std::vector<double> curve_thresholds = default_curve_thresholds();
    std::size_t threads = 1;

    void validate() const;
};

// --- learners ----------------------------------------------------------------------

// A model family with a finite hyperparameter grid. `predict_grid` trains on
// `train` once per grid point (or shares work across points) and returns
// test-set predictions for each point; `fit` retrains a single grid point.
struct Learner {
    std::string name;
    std::vector<std::map<std::string, double>> grid;
    std::function<std::vector<std::vector<double>>(const Dataset& train, const Dataset& test)> predict_grid;
    std::function<SplitModel(const Dataset& train, std::size_t grid_index)> fit;
};

Learner make_learner(ModelKind kind, const HyperParamGrid& grid, const FeatureSchema& schema);
// Predicts the training base rate everywhere.
Learner constant_learner(const FeatureSchema& schema);

// --- folds and nested cross-validation ---------------------------------------------

// Stratified k-fold partition: each class is shuffled and dealt round-robin,
// so per-fold class counts differ by at most one. Indices sorted per fold.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, std::size_t k, Rng& rng);

// Plain k-fold selection over a learner's grid (lowest score wins, ties to the
// earlier grid point). Returns the chosen grid index.
std::size_t select_hyperparameters(const Learner& learner, const Dataset& data, std::size_t folds,
                                   SelectionMetric metric, std::uint64_t seed);

// Order-independent checksum of an index set.
std::uint64_t index_checksum(std::span<const std::size_t> indices);

struct CellResult {
    std::size_t repeat = 0;
    std::size_t fold = 0;
    std::map<std::string, double> hyperparameters;
    double accuracy = 0.0;
    double log_loss = 0.0;
    std::size_t n_test = 0;

    friend bool operator==(const CellResult&, const CellResult&) = default;
};

struct ModelEvaluation {
    std::string name;
    double accuracy_mean = 0.0;
    double accuracy_std = 0.0;
    double log_loss_mean = 0.0;
    double log_loss_std = 0.0;
    std::vector<CellResult> cells;  // ordered by (repeat, fold)
    std::vector<CurvePoint> curve;  // pooled outer-test predictions
    std::vector<std::pair<std::string, double>> importance;

    friend bool operator==(const ModelEvaluation&, const ModelEvaluation&) = default;
};

struct FoldAudit {
    std::size_t repeat = 0;
    std::size_t fold = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::uint64_t train_checksum = 0;
    std::uint64_t test_checksum = 0;
    // Checksum of the union of the inner folds; must equal train_checksum.
    std::uint64_t inner_checksum = 0;
    bool disjoint = false;
    bool covers_all = false;

    bool clean() const { return disjoint && covers_all && inner_checksum == train_checksum; }
    friend bool operator==(const FoldAudit&, const FoldAudit&) = default;
};

struct EvalReport {
    std::size_t n_examples = 0;
    std::size_t n_positive = 0;
    std::size_t n_repeats = 0;
    std::size_t n_outer_folds = 0;
    std::size_t n_inner_folds = 0;
    std::uint64_t seed = 0;
    SelectionMetric selection_metric = SelectionMetric::LogLoss;
    std::vector<std::string> feature_names;
    std::vector<ModelEvaluation> models;
    std::vector<FoldAudit> audit;

    const ModelEvaluation& model(std::string_view name) const;
    bool leak_free() const;
    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Repeated nested cross-validation. With `ensemble_members` non-empty, an
// "Ensemble" entry averages those learners' per-cell models.
EvalReport nested_cv(const Dataset& data, const CVConfig& config, const std::vector<Learner>& learners,
                     const std::vector<std::string>& ensemble_members = {},
                     const FeatureSchema& schema = {});

// Convenience entry: builds the standard learners for `kinds`. Ensemble uses
// the per-cell DecisionTree and LogitBoost models.
EvalReport nested_cv(const std::vector<LabeledExample>& data, const CVConfig& config,
                     const std::vector<ModelKind>& kinds, const FeatureSchema& schema);

std::string report_to_text(const EvalReport& report);
EvalReport report_from_text(std::string_view text, const std::string& source = "<memory>");

// --- single-item accounting ------------------------------------------------------------

enum class SingleItemCriterion { OneLineQtyOne, OneLine };
std::string_view to_string(SingleItemCriterion criterion);
SingleItemCriterion single_item_criterion_from_string(std::string_view text);

bool is_single_item(const Order& order, SingleItemCriterion criterion);

struct PartitionSummary {
    std::size_t total = 0;
    std::size_t single_item = 0;
    std::size_t multi_item = 0;
    std::size_t multi_item_split = 0;
    double single_item_share = 0.0;
    double multi_item_split_share = 0.0;      // of multi-item orders
    double multi_item_not_split_share = 0.0;  // of multi-item orders
    bool evaluation_possible = false;
};

struct Partition {
    std::vector<std::size_t> single_item;  // indices into the input
    std::vector<std::size_t> multi_item;
    PartitionSummary summary;
};

// Labels are matched to orders by position and must carry the same order ids.
Partition single_item_partition(const std::vector<Order>& orders, const std::vector<SplitLabel>& labels,
                                SingleItemCriterion criterion = SingleItemCriterion::OneLineQtyOne);

} // namespace shortcut
