#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "shortcut/dataset.hpp"
#include "shortcut/errors.hpp"

namespace shortcut {

enum class ModelKind { LogisticL1, DecisionTree, LogitBoost, Ensemble };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view text);

// Probabilities leaving predict() are clamped to [kProbabilityEpsilon, 1 - kProbabilityEpsilon].
inline constexpr double kProbabilityEpsilon = 1e-12;

struct Standardization {
    std::vector<double> mean;
    std::vector<double> scale;  // population stddev, 1 for constant columns

    static Standardization fit(const Dataset& data);
    double apply(std::size_t j, double x) const { return (x - mean[j]) / scale[j]; }
};

struct LogisticParams {
    std::vector<double> weights;  // on standardized features
    double intercept = 0.0;
    std::size_t iterations = 0;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;  // left: x < threshold, right: x >= threshold
    int left = -1;
    int right = -1;
    double probability = 0.5;  // Laplace-smoothed P(y=1)
    std::int64_t count = 0;
    std::int64_t positives = 0;
    double impurity_decrease = 0.0;  // count-weighted Gini decrease at this split

    bool is_leaf() const { return feature < 0; }
};

struct TreeParams {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct Stump {
    int feature = -1;  // -1: constant stump
    double threshold = 0.0;
    double left_value = 0.0;  // added to the score when x < threshold
    double right_value = 0.0;
    double gain = 0.0;  // weighted squared-error decrease of the fit
};

// Score F(x) = base_score + sum of stumps; P(y=1) = sigmoid(F).
struct BoostParams {
    double base_score = 0.0;
    std::vector<Stump> stumps;
};

class SplitModel;

struct EnsembleParams {
    std::vector<SplitModel> members;
};

class SplitModel {
public:
    using Params = std::variant<LogisticParams, TreeParams, BoostParams, EnsembleParams>;

    SplitModel() = default;
    SplitModel(Params params, std::vector<std::string> feature_names, std::string catalog_version,
               Standardization standardization, std::map<std::string, double> hyperparameters,
               std::map<std::string, std::string> metadata = {});

    ModelKind kind() const;
    const Params& params() const { return params_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    const std::string& catalog_version() const { return catalog_version_; }
    const Standardization& standardization() const { return standardization_; }
    const std::map<std::string, double>& hyperparameters() const { return hyperparameters_; }
    const std::map<std::string, std::string>& metadata() const { return metadata_; }

    const LogisticParams& logistic() const { return std::get<LogisticParams>(params_); }
    const TreeParams& tree() const { return std::get<TreeParams>(params_); }
    const BoostParams& boost() const { return std::get<BoostParams>(params_); }
    const EnsembleParams& ensemble() const { return std::get<EnsembleParams>(params_); }

private:
    Params params_;
    std::vector<std::string> feature_names_;
    std::string catalog_version_;
    Standardization standardization_;
    std::map<std::string, double> hyperparameters_;
    std::map<std::string, std::string> metadata_;
};

// Feature naming attached to trained models.
struct FeatureSchema {
    std::vector<std::string> names;
    std::string catalog_version;

    static FeatureSchema anonymous(std::size_t cols);
};

// --- L1 logistic regression -------------------------------------------------

// Smooth part of the training objective on standardized data:
// sum_i [log(1 + exp(z_i)) - y_i z_i], z_i = w . x~_i + b. Parameters are laid
// out as (w_1..w_p, b).
class LogisticProblem {
public:
    LogisticProblem(const Dataset& data, const Standardization& standardization);

    std::size_t dimension() const { return cols_ + 1; }
    double smooth_value(std::span<const double> params) const;
    std::vector<double> smooth_gradient(std::span<const double> params) const;
    // smooth_value + lambda * ||w||_1 (intercept unpenalized).
    double objective(std::span<const double> params, double lambda) const;

    std::size_t rows() const { return labels_.size(); }
    std::size_t cols() const { return cols_; }
    // Evaluates value and gradient in one pass; gradient may be null.
    double value_and_gradient(std::span<const double> params, std::vector<double>* gradient) const;

private:
    std::size_t cols_;
    std::vector<double> x_;  // standardized, row-major
    std::vector<int> labels_;
};

struct LogisticOptions {
    double tolerance = 1e-8;
    std::size_t max_iterations = 10000;
};

SplitModel train_logistic_l1(const Dataset& data, double lambda, const FeatureSchema& schema,
                             const LogisticOptions& options = {}, const LogisticParams* warm_start = nullptr);

// --- CART -------------------------------------------------------------------

SplitModel train_decision_tree(const Dataset& data, std::size_t min_leaf, const FeatureSchema& schema);

// --- LogitBoost ---------------------------------------------------------------

struct BoostOptions {
    double weight_floor = 1e-6;
    double response_clip = 4.0;
};

// Training log loss after 0, 1, ..., n_iters stumps.
using BoostTrace = std::vector<double>;

SplitModel train_logitboost(const Dataset& data, std::size_t n_iters, double shrinkage, const FeatureSchema& schema,
                            const BoostOptions& options = {}, BoostTrace* trace = nullptr);

// --- Ensemble and inference -----------------------------------------------------

SplitModel train_ensemble(std::vector<SplitModel> members);

double predict(const SplitModel& model, std::span<const double> x);

// Boosting score truncated to the first `n_stumps` stumps.
double predict_boost_prefix(const SplitModel& model, std::span<const double> x, std::size_t n_stumps);

std::vector<double> predict_all(const SplitModel& model, const Dataset& data);

// Normalized to sum to one (or all zero), sorted descending, ties by feature index.
std::vector<std::pair<std::string, double>> feature_importance(const SplitModel& model);

struct Rule {
    std::vector<std::string> conditions;  // path order
    double probability = 0.5;
    std::int64_t support = 0;
    std::string text;
};

std::vector<Rule> extract_rules(const SplitModel& model);

std::size_t tree_depth(const TreeParams& tree);
std::size_t leaf_count(const TreeParams& tree);

} // namespace shortcut
