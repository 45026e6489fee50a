#include "shortcut/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "json.hpp"
#include "shortcut/io.hpp"
#include "shortcut/parallel.hpp"

namespace shortcut {

using nlohmann::ordered_json;

namespace {

void check_lengths(std::size_t predictions, std::size_t labels) {
    if (predictions != labels)
        throw ShapeError("predictions (" + std::to_string(predictions) + ") and labels (" + std::to_string(labels) +
                         ") differ in length");
    if (predictions == 0) throw ShapeError("metrics need at least one example");
}

double clamp_probability(double p) {
    return std::clamp(p, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
}

} // namespace

double accuracy(std::span<const double> predictions, std::span<const int> labels) {
    check_lengths(predictions.size(), labels.size());
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if ((predictions[i] > 0.5) == (labels[i] == 1)) ++correct;
    return static_cast<double>(correct) / static_cast<double>(labels.size());
}

double log_loss(std::span<const double> predictions, std::span<const int> labels) {
    check_lengths(predictions.size(), labels.size());
    double total = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double p = clamp_probability(predictions[i]);
        total -= labels[i] == 1 ? std::log(p) : std::log1p(-p);
    }
    return total / static_cast<double>(labels.size());
}

std::vector<CurvePoint> coverage_accuracy_curve(std::span<const double> predictions, std::span<const int> labels,
                                                std::span<const double> thresholds) {
    check_lengths(predictions.size(), labels.size());
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
        if (!(thresholds[k] >= 0.5 && thresholds[k] <= 1.0))
            throw ConfigError("curve threshold " + io::format_double(thresholds[k]) + " is outside [0.5, 1]");
        if (k > 0 && thresholds[k] < thresholds[k - 1]) throw ConfigError("curve thresholds must be sorted ascending");
    }
    std::vector<CurvePoint> curve;
    curve.reserve(thresholds.size());
    const double n = static_cast<double>(labels.size());
    for (double t : thresholds) {
        CurvePoint point;
        point.threshold = t;
        std::size_t correct = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const double p = predictions[i];
            if (std::max(p, 1.0 - p) < t) continue;
            ++point.covered;
            if ((p > 0.5) == (labels[i] == 1)) ++correct;
        }
        point.coverage = static_cast<double>(point.covered) / n;
        if (point.covered > 0) point.accuracy = static_cast<double>(correct) / static_cast<double>(point.covered);
        curve.push_back(point);
    }
    return curve;
}

std::vector<double> default_curve_thresholds() {
    std::vector<double> t;
    for (int k = 100; k < 200; ++k) t.push_back(k / 200.0);
    return t;
}

void HyperParamGrid::validate() const {
    if (logistic_lambda.empty() || tree_min_leaf.empty() || boost_iterations.empty())
        throw ConfigError("hyperparameter grids must be non-empty");
    for (double l : logistic_lambda)
        if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("logistic lambda must be finite and >= 0");
    for (auto m : tree_min_leaf)
        if (m < 1) throw ConfigError("tree min_leaf must be >= 1");
    if (!(boost_shrinkage > 0.0 && boost_shrinkage <= 1.0)) throw ConfigError("boost shrinkage must lie in (0, 1]");
}

std::string_view to_string(SelectionMetric metric) {
    return metric == SelectionMetric::LogLoss ? "LogLoss" : "Accuracy";
}

SelectionMetric selection_metric_from_string(std::string_view text) {
    if (text == "LogLoss") return SelectionMetric::LogLoss;
    if (text == "Accuracy") return SelectionMetric::Accuracy;
    throw ConfigError("unknown selection metric '" + std::string(text) + "'");
}

void CVConfig::validate() const {
    if (n_repeats < 1) throw ConfigError("n_repeats must be >= 1");
    if (ensemble_members.empty()) throw ConfigError("ensemble needs at least one member");
    for (auto k : ensemble_members)
        if (k == ModelKind::Ensemble) throw ConfigError("an ensemble cannot contain an ensemble");
    if (n_outer_folds < 2 || n_inner_folds < 2) throw ConfigError("fold counts must be >= 2");
    grid.validate();
    for (std::size_t k = 0; k < curve_thresholds.size(); ++k) {
        if (!(curve_thresholds[k] >= 0.5 && curve_thresholds[k] <= 1.0))
            throw ConfigError("curve thresholds must lie in [0.5, 1]");
        if (k > 0 && curve_thresholds[k] < curve_thresholds[k - 1])
            throw ConfigError("curve thresholds must be sorted ascending");
    }
}

// --- learners ------------------------------------------------------------------

Learner make_learner(ModelKind kind, const HyperParamGrid& grid, const FeatureSchema& schema) {
    grid.validate();
    Learner learner;
    learner.name = std::string(to_string(kind));
    switch (kind) {
    case ModelKind::LogisticL1: {
        const auto lambdas = grid.logistic_lambda;
        for (double l : lambdas) learner.grid.push_back({{"lambda_per_example", l}});
        learner.fit = [lambdas, schema](const Dataset& train, std::size_t g) {
            return train_logistic_l1(train, lambdas[g] * static_cast<double>(train.rows()), schema);
        };
        // Regularization path from the strongest penalty down, warm-started.
        learner.predict_grid = [lambdas, schema](const Dataset& train, const Dataset& test) {
            std::vector<std::size_t> order(lambdas.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return lambdas[a] > lambdas[b]; });
            std::vector<std::vector<double>> out(lambdas.size());
            std::optional<LogisticParams> previous;
            for (auto g : order) {
                auto model = train_logistic_l1(train, lambdas[g] * static_cast<double>(train.rows()), schema, {},
                                               previous ? &*previous : nullptr);
                out[g] = predict_all(model, test);
                previous = model.logistic();
            }
            return out;
        };
        break;
    }
    case ModelKind::DecisionTree: {
        const auto leaves = grid.tree_min_leaf;
        for (auto m : leaves) learner.grid.push_back({{"min_leaf", static_cast<double>(m)}});
        learner.fit = [leaves, schema](const Dataset& train, std::size_t g) {
            return train_decision_tree(train, leaves[g], schema);
        };
        learner.predict_grid = [leaves, schema](const Dataset& train, const Dataset& test) {
            std::vector<std::vector<double>> out;
            for (auto m : leaves) out.push_back(predict_all(train_decision_tree(train, m, schema), test));
            return out;
        };
        break;
    }
    case ModelKind::LogitBoost: {
        const auto iterations = grid.boost_iterations;
        const double shrinkage = grid.boost_shrinkage;
        for (auto it : iterations)
            learner.grid.push_back({{"n_iters", static_cast<double>(it)}, {"shrinkage", shrinkage}});
        learner.fit = [iterations, shrinkage, schema](const Dataset& train, std::size_t g) {
            return train_logitboost(train, iterations[g], shrinkage, schema);
        };
        // Boosting is stagewise: a shorter run is a prefix of the longest one.
        learner.predict_grid = [iterations, shrinkage, schema](const Dataset& train, const Dataset& test) {
            const auto longest = *std::max_element(iterations.begin(), iterations.end());
            const auto model = train_logitboost(train, longest, shrinkage, schema);
            std::vector<std::vector<double>> out(iterations.size(), std::vector<double>(test.rows()));
            for (std::size_t g = 0; g < iterations.size(); ++g)
                for (std::size_t i = 0; i < test.rows(); ++i)
                    out[g][i] = predict_boost_prefix(model, test.row(i), iterations[g]);
            return out;
        };
        break;
    }
    case ModelKind::Ensemble:
        throw ConfigError("Ensemble is assembled from other learners and has no grid of its own");
    }
    return learner;
}

Learner constant_learner(const FeatureSchema& schema) {
    Learner learner;
    learner.name = "Constant";
    learner.grid = {{{"n_iters", 0.0}}};
    learner.fit = [schema](const Dataset& train, std::size_t) { return train_logitboost(train, 0, 1.0, schema); };
    learner.predict_grid = [schema](const Dataset& train, const Dataset& test) {
        return std::vector<std::vector<double>>{predict_all(train_logitboost(train, 0, 1.0, schema), test)};
    };
    return learner;
}

// --- folds -------------------------------------------------------------------------

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, std::size_t k, Rng& rng) {
    if (k < 2) throw ConfigError("need at least two folds");
    if (labels.size() < k)
        throw Error("STRATIFICATION", "cannot make " + std::to_string(k) + " folds from " +
                                          std::to_string(labels.size()) + " examples");
    std::vector<std::size_t> positives, negatives;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 1 ? positives : negatives).push_back(i);
    rng.shuffle(positives);
    rng.shuffle(negatives);
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t slot = 0;
    for (auto i : positives) folds[slot++ % k].push_back(i);
    for (auto i : negatives) folds[slot++ % k].push_back(i);
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

std::uint64_t index_checksum(std::span<const std::size_t> indices) {
    std::uint64_t sum = 0;
    for (auto i : indices) sum += Rng::mix(static_cast<std::uint64_t>(i), 0x5eed);
    return sum;
}

// --- nested cross-validation -------------------------------------------------------------

namespace {

struct FoldData {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

std::vector<std::size_t> complement(const std::vector<std::vector<std::size_t>>& folds, std::size_t skip) {
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < folds.size(); ++f)
        if (f != skip) out.insert(out.end(), folds[f].begin(), folds[f].end());
    std::sort(out.begin(), out.end());
    return out;
}

bool both_classes(const Dataset& data, const std::vector<std::size_t>& rows) {
    bool pos = false, neg = false;
    for (auto i : rows) (data.label(i) == 1 ? pos : neg) = true;
    return pos && neg;
}

struct ModelCell {
    CellResult result;
    std::vector<double> predictions;
    std::vector<double> importance;  // feature order
};

struct CellOutput {
    FoldAudit audit;
    std::vector<ModelCell> models;
};

std::vector<double> importance_by_feature(const SplitModel& model) {
    const auto& names = model.feature_names();
    std::vector<double> out(names.size(), 0.0);
    for (const auto& [name, value] : feature_importance(model)) {
        const auto it = std::find(names.begin(), names.end(), name);
        out[static_cast<std::size_t>(it - names.begin())] = value;
    }
    return out;
}

double selection_score(SelectionMetric metric, const std::vector<double>& p, const std::vector<int>& y) {
    // Lower is better.
    return metric == SelectionMetric::LogLoss ? log_loss(p, y) : -accuracy(p, y);
}

double sample_std(const std::vector<double>& values, double mean) {
    if (values.size() < 2) return 0.0;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

} // namespace

std::size_t select_hyperparameters(const Learner& learner, const Dataset& data, std::size_t folds,
                                   SelectionMetric metric, std::uint64_t seed) {
    if (learner.grid.size() == 1) return 0;
    Rng rng(seed);
    const auto parts = stratified_folds(data.labels(), folds, rng);
    std::vector<std::vector<double>> pooled(learner.grid.size());
    std::vector<int> labels;
    for (std::size_t g = 0; g < parts.size(); ++g) {
        const auto rows = complement(parts, g);
        if (!both_classes(data, rows)) throw Error("STRATIFICATION", "a training split lacks a class");
        const auto preds = learner.predict_grid(data.subset(rows), data.subset(parts[g]));
        for (std::size_t h = 0; h < preds.size(); ++h) pooled[h].insert(pooled[h].end(), preds[h].begin(), preds[h].end());
        for (auto i : parts[g]) labels.push_back(data.label(i));
    }
    std::size_t chosen = 0;
    double best = 0.0;
    for (std::size_t h = 0; h < pooled.size(); ++h) {
        const double score = selection_score(metric, pooled[h], labels);
        if (h == 0 || score < best) {
            best = score;
            chosen = h;
        }
    }
    return chosen;
}

const ModelEvaluation& EvalReport::model(std::string_view name) const {
    for (const auto& m : models)
        if (m.name == name) return m;
    throw Error("UNKNOWN_MODEL", "report has no model named '" + std::string(name) + "'");
}

bool EvalReport::leak_free() const {
    return std::all_of(audit.begin(), audit.end(), [](const FoldAudit& a) { return a.clean(); });
}

EvalReport nested_cv(const Dataset& data, const CVConfig& config, const std::vector<Learner>& learners,
                     const std::vector<std::string>& ensemble_members, const FeatureSchema& schema_in) {
    config.validate();
    if (learners.empty()) throw ConfigError("nested_cv needs at least one learner");
    std::vector<std::size_t> member_index;
    for (const auto& name : ensemble_members) {
        const auto it = std::find_if(learners.begin(), learners.end(), [&](const Learner& l) { return l.name == name; });
        if (it == learners.end()) throw ConfigError("ensemble member '" + name + "' is not among the learners");
        member_index.push_back(static_cast<std::size_t>(it - learners.begin()));
    }
    const FeatureSchema schema = schema_in.names.empty() ? FeatureSchema::anonymous(data.cols()) : schema_in;
    const std::size_t n = data.rows();
    if (n < config.n_outer_folds)
        throw Error("STRATIFICATION", "fewer examples than outer folds");
    if (!data.has_both_classes()) throw Error("STRATIFICATION", "both classes are required for cross-validation");

    // Fold assignments are drawn up front so they do not depend on scheduling.
    std::vector<std::vector<std::vector<std::size_t>>> outer(config.n_repeats);
    for (std::size_t r = 0; r < config.n_repeats; ++r) {
        Rng rng(Rng::mix(config.seed, r));
        outer[r] = stratified_folds(data.labels(), config.n_outer_folds, rng);
    }

    const std::size_t n_cells = config.n_repeats * config.n_outer_folds;
    const std::size_t n_models = learners.size() + (member_index.empty() ? 0 : 1);
    std::vector<CellOutput> cells(n_cells);

    parallel_for(n_cells, config.threads, [&](std::size_t c) {
        const std::size_t r = c / config.n_outer_folds;
        const std::size_t f = c % config.n_outer_folds;
        CellOutput& out = cells[c];
        const auto& test = outer[r][f];
        const auto train = complement(outer[r], f);
        if (!both_classes(data, train))
            throw Error("STRATIFICATION", "outer training split lacks a class (repeat " + std::to_string(r) +
                                              ", fold " + std::to_string(f) + ")");

        out.audit.repeat = r;
        out.audit.fold = f;
        out.audit.n_train = train.size();
        out.audit.n_test = test.size();
        out.audit.train_checksum = index_checksum(train);
        out.audit.test_checksum = index_checksum(test);
        {
            std::vector<std::size_t> overlap;
            std::set_intersection(train.begin(), train.end(), test.begin(), test.end(), std::back_inserter(overlap));
            out.audit.disjoint = overlap.empty();
            out.audit.covers_all = train.size() + test.size() == n;
        }

        const Dataset train_data = data.subset(train);
        const Dataset test_data = data.subset(test);

        // Inner folds index positions inside the outer training split only.
        Rng inner_rng(Rng::mix(Rng::mix(config.seed, r), 1 + f));
        const auto inner = stratified_folds(train_data.labels(), config.n_inner_folds, inner_rng);
        std::vector<std::size_t> inner_global;
        std::vector<Dataset> inner_train, inner_test;
        std::vector<int> inner_labels;
        for (std::size_t g = 0; g < inner.size(); ++g) {
            for (auto i : inner[g]) inner_global.push_back(train[i]);
            const auto rows = complement(inner, g);
            if (!both_classes(train_data, rows))
                throw Error("STRATIFICATION", "inner training split lacks a class");
            inner_train.push_back(train_data.subset(rows));
            inner_test.push_back(train_data.subset(inner[g]));
            for (auto i : inner[g]) inner_labels.push_back(train_data.label(i));
        }
        out.audit.inner_checksum = index_checksum(inner_global);

        std::vector<SplitModel> fitted;
        for (const auto& learner : learners) {
            std::vector<std::vector<double>> pooled(learner.grid.size());
            for (std::size_t g = 0; g < inner.size(); ++g) {
                auto preds = learner.predict_grid(inner_train[g], inner_test[g]);
                if (preds.size() != learner.grid.size()) throw ShapeError("learner returned the wrong grid size");
                for (std::size_t h = 0; h < preds.size(); ++h)
                    pooled[h].insert(pooled[h].end(), preds[h].begin(), preds[h].end());
            }
            std::size_t chosen = 0;
            double best = 0.0;
            for (std::size_t h = 0; h < pooled.size(); ++h) {
                const double score = selection_score(config.selection_metric, pooled[h], inner_labels);
                if (h == 0 || score < best) {
                    best = score;
                    chosen = h;
                }
            }
            auto model = learner.fit(train_data, chosen);
            ModelCell cell;
            cell.predictions = predict_all(model, test_data);
            cell.result = {r, f, learner.grid[chosen], accuracy(cell.predictions, test_data.labels()),
                           log_loss(cell.predictions, test_data.labels()), test.size()};
            cell.importance = importance_by_feature(model);
            out.models.push_back(std::move(cell));
            fitted.push_back(std::move(model));
        }
        if (!member_index.empty()) {
            std::vector<SplitModel> members;
            std::map<std::string, double> hyper;
            for (auto k : member_index) {
                members.push_back(fitted[k]);
                for (const auto& [key, value] : out.models[k].result.hyperparameters)
                    hyper[learners[k].name + "." + key] = value;
            }
            const auto ensemble = train_ensemble(std::move(members));
            ModelCell cell;
            cell.predictions = predict_all(ensemble, test_data);
            cell.result = {r, f, std::move(hyper), accuracy(cell.predictions, test_data.labels()),
                           log_loss(cell.predictions, test_data.labels()), test.size()};
            cell.importance = importance_by_feature(ensemble);
            out.models.push_back(std::move(cell));
        }
    });

    EvalReport report;
    report.n_examples = n;
    report.n_positive = data.positives();
    report.n_repeats = config.n_repeats;
    report.n_outer_folds = config.n_outer_folds;
    report.n_inner_folds = config.n_inner_folds;
    report.seed = config.seed;
    report.selection_metric = config.selection_metric;
    report.feature_names = schema.names;
    for (const auto& c : cells) report.audit.push_back(c.audit);

    for (std::size_t m = 0; m < n_models; ++m) {
        ModelEvaluation eval;
        eval.name = m < learners.size() ? learners[m].name : "Ensemble";
        std::vector<double> accs, losses, pooled_p;
        std::vector<int> pooled_y;
        std::vector<double> importance(data.cols(), 0.0);
        for (std::size_t c = 0; c < n_cells; ++c) {
            const auto& cell = cells[c].models[m];
            eval.cells.push_back(cell.result);
            accs.push_back(cell.result.accuracy);
            losses.push_back(cell.result.log_loss);
            pooled_p.insert(pooled_p.end(), cell.predictions.begin(), cell.predictions.end());
            const auto& test = outer[cells[c].audit.repeat][cells[c].audit.fold];
            for (auto i : test) pooled_y.push_back(data.label(i));
            for (std::size_t j = 0; j < importance.size(); ++j) importance[j] += cell.importance[j];
        }
        eval.accuracy_mean = std::accumulate(accs.begin(), accs.end(), 0.0) / static_cast<double>(n_cells);
        eval.log_loss_mean = std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(n_cells);
        eval.accuracy_std = sample_std(accs, eval.accuracy_mean);
        eval.log_loss_std = sample_std(losses, eval.log_loss_mean);
        eval.curve = coverage_accuracy_curve(pooled_p, pooled_y, config.curve_thresholds);
        std::vector<std::size_t> order(importance.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return importance[a] > importance[b]; });
        for (auto j : order) eval.importance.emplace_back(schema.names[j], importance[j] / static_cast<double>(n_cells));
        report.models.push_back(std::move(eval));
    }
    return report;
}

EvalReport nested_cv(const std::vector<LabeledExample>& data, const CVConfig& config,
                     const std::vector<ModelKind>& kinds, const FeatureSchema& schema) {
    const bool want_ensemble = std::find(kinds.begin(), kinds.end(), ModelKind::Ensemble) != kinds.end();
    std::vector<ModelKind> base;
    for (auto k : kinds)
        if (k != ModelKind::Ensemble && std::find(base.begin(), base.end(), k) == base.end()) base.push_back(k);
    std::vector<std::string> members;
    if (want_ensemble) {
        for (auto k : config.ensemble_members) {
            if (std::find(base.begin(), base.end(), k) == base.end()) base.push_back(k);
            members.emplace_back(to_string(k));
        }
    }
    std::vector<Learner> learners;
    for (auto k : base) learners.push_back(make_learner(k, config.grid, schema));
    auto report = nested_cv(Dataset::from_examples(data), config, learners, members, schema);
    // Only report the kinds that were asked for, in the order asked.
    std::vector<ModelEvaluation> kept;
    for (auto k : kinds) {
        const auto name = std::string(to_string(k));
        if (std::none_of(kept.begin(), kept.end(), [&](const ModelEvaluation& m) { return m.name == name; }))
            kept.push_back(report.model(name));
    }
    report.models = std::move(kept);
    return report;
}

// --- report serialization ---------------------------------------------------------------

namespace {

constexpr int kReportVersion = 1;

ordered_json curve_json(const std::vector<CurvePoint>& curve) {
    ordered_json out = ordered_json::array();
    for (const auto& p : curve) {
        ordered_json point{{"threshold", p.threshold}, {"coverage", p.coverage}, {"covered", p.covered}};
        point["accuracy"] = p.accuracy ? ordered_json(*p.accuracy) : ordered_json(nullptr);
        out.push_back(std::move(point));
    }
    return out;
}

} // namespace

std::string report_to_text(const EvalReport& report) {
    ordered_json j;
    j["n_examples"] = report.n_examples;
    j["n_positive"] = report.n_positive;
    j["n_repeats"] = report.n_repeats;
    j["n_outer_folds"] = report.n_outer_folds;
    j["n_inner_folds"] = report.n_inner_folds;
    j["seed"] = report.seed;
    j["selection_metric"] = std::string(to_string(report.selection_metric));
    j["feature_names"] = report.feature_names;
    j["curve_columns"] = {{"coverage", "fraction of examples with max(p, 1-p) >= threshold (recall)"},
                          {"accuracy", "accuracy among covered examples (precision)"}};
    j["models"] = ordered_json::array();
    for (const auto& m : report.models) {
        ordered_json mj;
        mj["name"] = m.name;
        mj["accuracy_mean"] = m.accuracy_mean;
        mj["accuracy_std"] = m.accuracy_std;
        mj["log_loss_mean"] = m.log_loss_mean;
        mj["log_loss_std"] = m.log_loss_std;
        mj["cells"] = ordered_json::array();
        for (const auto& c : m.cells)
            mj["cells"].push_back({{"repeat", c.repeat},
                                   {"fold", c.fold},
                                   {"hyperparameters", c.hyperparameters},
                                   {"accuracy", c.accuracy},
                                   {"log_loss", c.log_loss},
                                   {"n_test", c.n_test}});
        mj["curve"] = curve_json(m.curve);
        mj["importance"] = ordered_json::array();
        for (const auto& [name, value] : m.importance) mj["importance"].push_back({{"feature", name}, {"value", value}});
        j["models"].push_back(std::move(mj));
    }
    j["audit"] = ordered_json::array();
    for (const auto& a : report.audit)
        j["audit"].push_back({{"repeat", a.repeat},
                              {"fold", a.fold},
                              {"n_train", a.n_train},
                              {"n_test", a.n_test},
                              {"train_checksum", a.train_checksum},
                              {"test_checksum", a.test_checksum},
                              {"inner_checksum", a.inner_checksum},
                              {"disjoint", a.disjoint},
                              {"covers_all", a.covers_all}});
    return io::header_line({"eval-report", kReportVersion, {}}) + "\n" + j.dump(1) + "\n";
}

EvalReport report_from_text(std::string_view text, const std::string& source) {
    const auto newline = text.find('\n');
    if (newline == std::string_view::npos) throw ParseError(source, 1, "truncated report");
    io::expect_header(text.substr(0, newline), source, "eval-report", kReportVersion);
    try {
        const auto j = ordered_json::parse(text.substr(newline + 1));
        EvalReport r;
        r.n_examples = j.at("n_examples").get<std::size_t>();
        r.n_positive = j.at("n_positive").get<std::size_t>();
        r.n_repeats = j.at("n_repeats").get<std::size_t>();
        r.n_outer_folds = j.at("n_outer_folds").get<std::size_t>();
        r.n_inner_folds = j.at("n_inner_folds").get<std::size_t>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.selection_metric = selection_metric_from_string(j.at("selection_metric").get<std::string>());
        r.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        for (const auto& mj : j.at("models")) {
            ModelEvaluation m;
            m.name = mj.at("name").get<std::string>();
            m.accuracy_mean = mj.at("accuracy_mean").get<double>();
            m.accuracy_std = mj.at("accuracy_std").get<double>();
            m.log_loss_mean = mj.at("log_loss_mean").get<double>();
            m.log_loss_std = mj.at("log_loss_std").get<double>();
            for (const auto& c : mj.at("cells"))
                m.cells.push_back({c.at("repeat").get<std::size_t>(), c.at("fold").get<std::size_t>(),
                                   c.at("hyperparameters").get<std::map<std::string, double>>(),
                                   c.at("accuracy").get<double>(), c.at("log_loss").get<double>(),
                                   c.at("n_test").get<std::size_t>()});
            for (const auto& p : mj.at("curve")) {
                CurvePoint point;
                point.threshold = p.at("threshold").get<double>();
                point.coverage = p.at("coverage").get<double>();
                point.covered = p.at("covered").get<std::size_t>();
                if (!p.at("accuracy").is_null()) point.accuracy = p.at("accuracy").get<double>();
                m.curve.push_back(point);
            }
            for (const auto& e : mj.at("importance"))
                m.importance.emplace_back(e.at("feature").get<std::string>(), e.at("value").get<double>());
            r.models.push_back(std::move(m));
        }
        for (const auto& a : j.at("audit"))
            r.audit.push_back({a.at("repeat").get<std::size_t>(), a.at("fold").get<std::size_t>(),
                               a.at("n_train").get<std::size_t>(), a.at("n_test").get<std::size_t>(),
                               a.at("train_checksum").get<std::uint64_t>(), a.at("test_checksum").get<std::uint64_t>(),
                               a.at("inner_checksum").get<std::uint64_t>(), a.at("disjoint").get<bool>(),
                               a.at("covers_all").get<bool>()});
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source, 2, std::string("malformed report: ") + e.what());
    }
}

// --- single-item accounting ----------------------------------------------------------------

std::string_view to_string(SingleItemCriterion criterion) {
    return criterion == SingleItemCriterion::OneLineQtyOne ? "OneLineQtyOne" : "OneLine";
}

SingleItemCriterion single_item_criterion_from_string(std::string_view text) {
    if (text == "OneLineQtyOne") return SingleItemCriterion::OneLineQtyOne;
    if (text == "OneLine") return SingleItemCriterion::OneLine;
    throw ConfigError("unknown single-item criterion '" + std::string(text) + "'");
}

bool is_single_item(const Order& order, SingleItemCriterion criterion) {
    if (order.lines.size() != 1) return false;
    return criterion == SingleItemCriterion::OneLine || order.lines.front().quantity == 1;
}

Partition single_item_partition(const std::vector<Order>& orders, const std::vector<SplitLabel>& labels,
                                SingleItemCriterion criterion) {
    if (orders.size() != labels.size()) throw ShapeError("orders and labels differ in length");
    Partition out;
    auto& s = out.summary;
    std::size_t multi_not_split = 0;
    for (std::size_t i = 0; i < orders.size(); ++i) {
        if (orders[i].order_id != labels[i].order_id)
            throw ShapeError("label " + labels[i].order_id + " is not aligned with order " + orders[i].order_id);
        if (is_single_item(orders[i], criterion)) {
            out.single_item.push_back(i);
        } else {
            out.multi_item.push_back(i);
            (labels[i].y == 1 ? s.multi_item_split : multi_not_split) += 1;
        }
    }
    s.total = orders.size();
    s.single_item = out.single_item.size();
    s.multi_item = out.multi_item.size();
    if (s.total > 0) s.single_item_share = static_cast<double>(s.single_item) / static_cast<double>(s.total);
    if (s.multi_item > 0) {
        s.multi_item_split_share = static_cast<double>(s.multi_item_split) / static_cast<double>(s.multi_item);
        s.multi_item_not_split_share = static_cast<double>(multi_not_split) / static_cast<double>(s.multi_item);
    }
    s.evaluation_possible = s.multi_item_split > 0 && multi_not_split > 0;
    return out;
}

} // namespace shortcut
