// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "data.hpp"
#include "oracle.hpp"
#include "shortcut/evaluation.hpp"
#include "shortcut/features.hpp"
#include "shortcut/generator.hpp"
#include "shortcut/models.hpp"
#include "shortcut/optimizer.hpp"
#include "shortcut/router.hpp"

using namespace shortcut;

namespace {

constexpr std::size_t kOracleInstances = 500;
constexpr double kOracleSeconds = 120.0;
constexpr double kMetricTolerance = 1e-9;
constexpr double kGradientTolerance = 1e-5;
constexpr std::size_t kGradientPoints = 20;
constexpr std::size_t kBoostDatasets = 10;
constexpr std::size_t kTreeMaxRows = 2000;
constexpr double kEnsembleAccuracy = 0.88;
constexpr double kLogLossSlack = 0.005;
constexpr double kCurveThreshold = 0.97;
constexpr double kEndToEndSeconds = 30.0 * 60.0;
constexpr double kSingleItemTarget = 0.301;
constexpr double kSingleItemTolerance = 0.02;
constexpr double kNotSplitLow = 0.55;
constexpr double kNotSplitHigh = 0.75;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

struct Result {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Result()>& check) {
    Result r;
    try {
        r = check();
    } catch (const std::exception& e) {
        r = {false, std::string("exception: ") + e.what()};
    }
    if (!r.pass) ++failures;
    std::printf("[%s] %2d %s: %s\n", r.pass ? "PASS" : "FAIL", id, name.c_str(), r.detail.c_str());
    std::fflush(stdout);
}

// --- optimizer ----------------------------------------------------------------

struct OracleCase {
    oracle::Instance instance;
    Assignment optimum;
};

std::vector<OracleCase> oracle_cases;

Result optimizer_oracle() {
    const auto start = Clock::now();
    std::size_t mismatches = 0;
    std::size_t infeasible_agree = 0;
    std::size_t infeasible_disagree = 0;
    std::size_t max_candidates = 0;
    for (std::uint64_t seed = 1; oracle_cases.size() < kOracleInstances; ++seed) {
        auto inst = oracle::random_instance(Rng::mix(seed, 0xacce));
        const NetworkIndex index(inst.network);
        const auto ref = oracle::solve(inst.order, index, {});
        std::optional<Assignment> got;
        try {
            max_candidates = std::max(max_candidates, candidate_nodes(inst.order, index, {}).node_ids.size());
            got = solve_full(inst.order, index, {});
        } catch (const InfeasibleOrderError&) {
        }
        if (!ref) {
            (got ? infeasible_disagree : infeasible_agree)++;
            continue;
        }
        if (!got || !(*got == ref->assignment)) ++mismatches;
        oracle_cases.push_back({std::move(inst), ref->assignment});
    }
    const double secs = seconds_since(start);
    const bool ok = mismatches == 0 && infeasible_disagree == 0 && max_candidates <= 12 && secs <= kOracleSeconds;
    return {ok, std::to_string(oracle_cases.size()) + " feasible instances, " + std::to_string(mismatches) +
                    " mismatches, " + std::to_string(infeasible_agree) + " infeasible agreed, " +
                    std::to_string(infeasible_disagree) + " infeasible disagreed, max candidates " +
                    std::to_string(max_candidates) + ", " + fmt(secs, 1) + " s (limit " + fmt(kOracleSeconds, 0) +
                    " s)"};
}

Result no_split_consistency() {
    std::size_t violations = 0;
    std::size_t single_node_optima = 0;
    for (const auto& c : oracle_cases) {
        const NetworkIndex index(c.instance.network);
        const auto full = solve_full(c.instance.order, index, {});
        const auto single = solve_no_split(c.instance.order, index, {});
        if (full.nodes_used == 1) {
            ++single_node_optima;
            if (!single || single->objective != full.objective) ++violations;
        } else if (single && single->objective < full.objective) {
            ++violations;
        }
    }
    return {violations == 0 && !oracle_cases.empty(),
            std::to_string(oracle_cases.size()) + " instances (" + std::to_string(single_node_optima) +
                " single-node optima), " + std::to_string(violations) + " violations"};
}

// --- metrics and learners ---------------------------------------------------------

Result metric_correctness() {
    struct Case {
        std::string name;
        double got;
        double want;
    };
    std::vector<double> half(100, 0.5);
    std::vector<int> balanced(100);
    for (std::size_t i = 0; i < balanced.size(); ++i) balanced[i] = static_cast<int>(i % 2);
    const std::vector<Case> cases{
        {"accuracy [0.9,0.2,0.6]", accuracy(std::vector<double>{0.9, 0.2, 0.6}, std::vector<int>{1, 0, 0}), 2.0 / 3.0},
        {"accuracy p=0.5,y=0", accuracy(std::vector<double>{0.5}, std::vector<int>{0}), 1.0},
        {"accuracy perfect", accuracy(std::vector<double>{1, 0, 1, 0}, std::vector<int>{1, 0, 1, 0}), 1.0},
        {"log_loss p=0.5,y=1", log_loss(std::vector<double>{0.5}, std::vector<int>{1}), std::log(2.0)},
        {"log_loss near-perfect", log_loss(std::vector<double>{1.0 - 1e-12}, std::vector<int>{1}), 1e-12},
        {"log_loss [0.8,0.8]", log_loss(std::vector<double>{0.8, 0.8}, std::vector<int>{1, 0}),
         (-std::log(0.8) - std::log(0.2)) / 2.0},
        {"log_loss constant 0.5 balanced", log_loss(half, balanced), std::log(2.0)},
        {"log_loss clamped perfect", log_loss(std::vector<double>{1.0, 0.0}, std::vector<int>{1, 0}), 1e-12},
    };
    double worst = 0.0;
    std::string worst_name;
    for (const auto& c : cases) {
        const double err = std::abs(c.got - c.want);
        if (err >= worst) {
            worst = err;
            worst_name = c.name;
        }
    }
    return {worst <= kMetricTolerance, std::to_string(cases.size()) + " analytic cases, max abs error " +
                                           sci(worst) + " (" + worst_name + "), tolerance 1e-9"};
}

Result gradient_check() {
    const auto d = testdata::random_dataset(77, 300, 6, 1.0);
    const auto standardization = Standardization::fit(d);
    const LogisticProblem problem(d, standardization);
    Rng rng(1234);
    double worst = 0.0;
    for (std::size_t point = 0; point < kGradientPoints; ++point) {
        std::vector<double> theta(problem.dimension());
        for (auto& v : theta) v = rng.uniform(-1.5, 1.5);
        const auto g = problem.smooth_gradient(theta);
        std::vector<double> fd(theta.size());
        for (std::size_t k = 0; k < theta.size(); ++k) {
            const double h = 1e-5 * std::max(1.0, std::abs(theta[k]));
            auto plus = theta;
            auto minus = theta;
            plus[k] += h;
            minus[k] -= h;
            fd[k] = (problem.smooth_value(plus) - problem.smooth_value(minus)) / (2.0 * h);
        }
        double num = 0.0;
        double den = 0.0;
        for (std::size_t k = 0; k < theta.size(); ++k) {
            num += (g[k] - fd[k]) * (g[k] - fd[k]);
            den += fd[k] * fd[k];
        }
        worst = std::max(worst, std::sqrt(num) / std::max(std::sqrt(den), 1e-12));
    }
    const auto heavy = train_logistic_l1(d, 1e6, FeatureSchema::anonymous(d.cols()));
    std::size_t nonzero = 0;
    for (double w : heavy.logistic().weights) nonzero += w != 0.0 ? 1 : 0;
    return {worst <= kGradientTolerance && nonzero == 0,
            std::to_string(kGradientPoints) + " points, max relative error " + sci(worst) +
                " (limit 1e-5); lambda=1e6 leaves " + std::to_string(nonzero) + " nonzero weights"};
}

Result boost_monotonicity() {
    std::size_t violations = 0;
    std::size_t steps = 0;
    for (std::size_t k = 0; k < kBoostDatasets; ++k) {
        const auto d = testdata::random_dataset(500 + k, 100 + 40 * k, 2 + k % 5, 0.5 + 0.2 * static_cast<double>(k));
        const double shrinkage = k % 2 ? 1.0 : 0.1;
        BoostTrace trace;
        train_logitboost(d, 150, shrinkage, FeatureSchema::anonymous(d.cols()), {}, &trace);
        for (std::size_t i = 1; i < trace.size(); ++i, ++steps)
            if (trace[i] > trace[i - 1]) ++violations;
    }
    return {violations == 0, std::to_string(kBoostDatasets) + " datasets, " + std::to_string(steps) +
                                 " iterations checked, " + std::to_string(violations) + " increases"};
}

// Consistent data: continuous draws (no duplicate rows) and a coarse integer
// grid where duplicate rows share a label by construction.
Result tree_replay() {
    std::size_t datasets = 0;
    std::size_t imperfect = 0;
    for (std::size_t rows : {std::size_t{50}, std::size_t{400}, std::size_t{1000}, kTreeMaxRows}) {
        const auto d = testdata::random_dataset(900 + rows, rows, 5, 3.0);
        const auto m = train_decision_tree(d, 1, FeatureSchema::anonymous(d.cols()));
        ++datasets;
        if (accuracy(predict_all(m, d), d.labels()) != 1.0) ++imperfect;
    }
    {
        Rng rng(31);
        std::vector<double> x;
        std::vector<int> y;
        for (std::size_t i = 0; i < kTreeMaxRows; ++i) {
            const auto a = rng.uniform_int(0, 9);
            const auto b = rng.uniform_int(0, 9);
            const auto c = rng.uniform_int(0, 3);
            x.insert(x.end(), {static_cast<double>(a), static_cast<double>(b), static_cast<double>(c)});
            y.push_back(static_cast<int>(Rng::mix(static_cast<std::uint64_t>(a * 100 + b * 10 + c), 7) % 2));
        }
        const Dataset d(3, x, y);
        const auto m = train_decision_tree(d, 1, FeatureSchema::anonymous(3));
        ++datasets;
        if (accuracy(predict_all(m, d), d.labels()) != 1.0) ++imperfect;
    }
    return {imperfect == 0, std::to_string(datasets) + " consistent datasets up to " + std::to_string(kTreeMaxRows) +
                                " rows, " + std::to_string(imperfect) + " below training accuracy 1.0"};
}

Result cv_shape() {
    const auto d = testdata::random_dataset(4242, 400, 4, 1.0);
    std::vector<LabeledExample> ex;
    for (std::size_t i = 0; i < d.rows(); ++i) ex.push_back({"E" + std::to_string(i), {d.row(i).begin(), d.row(i).end()}, d.label(i)});
    CVConfig cfg;
    cfg.n_repeats = 5;
    cfg.n_outer_folds = 10;
    cfg.n_inner_folds = 3;
    cfg.grid.logistic_lambda = {0.01, 1.0};
    cfg.grid.tree_min_leaf = {5, 20};
    cfg.grid.boost_iterations = {20, 50};
    const std::vector<ModelKind> kinds{ModelKind::LogisticL1, ModelKind::DecisionTree, ModelKind::LogitBoost,
                                       ModelKind::Ensemble};
    const auto a = nested_cv(ex, cfg, kinds, FeatureSchema::anonymous(4));
    const auto b = nested_cv(ex, cfg, kinds, FeatureSchema::anonymous(4));
    bool cells_ok = a.models.size() == 4;
    for (const auto& m : a.models) cells_ok = cells_ok && m.cells.size() == 50;
    std::size_t dirty = 0;
    for (const auto& f : a.audit) dirty += f.clean() ? 0 : 1;
    const bool identical = report_to_text(a) == report_to_text(b);
    return {cells_ok && a.audit.size() == 50 && dirty == 0 && identical,
            std::string("50 cells per model: ") + (cells_ok ? "yes" : "no") + ", audited folds " +
                std::to_string(a.audit.size()) + " with " + std::to_string(dirty) +
                " overlaps/gaps, byte-identical rerun: " + (identical ? "yes" : "no")};
}

// --- default synthetic stream ---------------------------------------------------

struct Stream {
    GeneratorConfig config;
    std::optional<NetworkIndex> index;
    std::vector<Order> orders;
    std::vector<SplitLabel> labels;
    std::vector<FeatureVector> features;
    Partition partition;
    double build_seconds = 0.0;
};

Stream& default_stream() {
    static Stream s = [] {
        Stream st;
        const auto start = Clock::now();
        st.index.emplace(generate_network(st.config));
        st.orders = generate_orders(st.config, *st.index);
        st.labels = label_orders(st.orders, *st.index, {});
        st.features = extract_all(st.orders, *st.index, {});
        st.partition = single_item_partition(st.orders, st.labels);
        st.build_seconds = seconds_since(start);
        return st;
    }();
    return s;
}

std::vector<LabeledExample> multi_item(const Stream& s) {
    std::vector<LabeledExample> out;
    for (auto i : s.partition.multi_item) out.push_back({s.orders[i].order_id, s.features[i].values, s.labels[i].y});
    return out;
}

Result end_to_end() {
    const auto start = Clock::now();
    auto& s = default_stream();
    const auto data = multi_item(s);
    CVConfig cfg;
    const auto& cat = canonical_catalog();
    const auto report = nested_cv(data, cfg,
                                  {ModelKind::LogisticL1, ModelKind::DecisionTree, ModelKind::LogitBoost,
                                   ModelKind::Ensemble},
                                  FeatureSchema{cat.names(), cat.version});
    const double secs = seconds_since(start);
    const auto& ens = report.model("Ensemble");
    bool loss_ok = true;
    std::ostringstream losses;
    for (const auto& m : report.models) {
        losses << " " << m.name << " " << fmt(m.accuracy_mean) << "/" << fmt(m.log_loss_mean) << ";";
        if (m.name != "Ensemble" && ens.log_loss_mean > m.log_loss_mean + kLogLossSlack) loss_ok = false;
    }
    std::optional<double> at97;
    double coverage97 = 0.0;
    for (const auto& p : ens.curve)
        if (p.threshold == kCurveThreshold) {
            at97 = p.accuracy;
            coverage97 = p.coverage;
        }
    const auto pooled = ens.curve.front();
    const bool acc_ok = ens.accuracy_mean >= kEnsembleAccuracy;
    const bool curve_ok = at97 && pooled.accuracy && *at97 >= *pooled.accuracy;
    const bool time_ok = secs <= kEndToEndSeconds;
    return {acc_ok && loss_ok && curve_ok && time_ok,
            std::to_string(data.size()) + " multi-item orders; accuracy/log loss:" + losses.str() +
                " ensemble accuracy >= 0.88: " + (acc_ok ? "yes" : "no") +
                "; ensemble log loss within 0.005 of every single model: " + (loss_ok ? "yes" : "no") +
                "; at t=0.97 coverage " + fmt(coverage97) + " accuracy " + (at97 ? fmt(*at97) : "n/a") +
                " vs overall " + (pooled.accuracy ? fmt(*pooled.accuracy) : "n/a") + "; " + fmt(secs, 1) +
                " s (limit 1800 s)"};
}

SplitModel fixed_ensemble(const std::vector<LabeledExample>& data) {
    const auto d = Dataset::from_examples(data);
    const auto& cat = canonical_catalog();
    const FeatureSchema schema{cat.names(), cat.version};
    return train_ensemble({train_decision_tree(d, 20, schema), train_logitboost(d, 200, 0.1, schema)});
}

Result router_guarantees() {
    auto& s = default_stream();
    const auto& net = *s.index;

    std::map<std::string, double> truth;
    for (std::size_t i = 0; i < s.orders.size(); ++i) truth[s.orders[i].order_id] = s.labels[i].y;
    const SplitPredictor oracle_model = [&](const Order& o, const FeatureVector&) { return truth.at(o.order_id); };
    RouterConfig half;
    half.threshold = 0.5;
    const auto oracle_run = simulate_stream(s.orders, net, oracle_model, half, {}, true);
    std::size_t nonzero_regret = 0;
    for (const auto& o : oracle_run.outcomes) nonzero_regret += *o.regret != 0.0 ? 1 : 0;
    const bool regret_ok = *oracle_run.summary.total_regret == 0.0 && nonzero_regret == 0 &&
                           oracle_run.outcomes.size() == s.orders.size();

    const auto model = fixed_ensemble(multi_item(s));
    RouterConfig never;
    never.threshold = 1.0;
    never.trivial_bypass = false;
    const auto never_run = simulate_stream(s.orders, net, model, never, {}, false);
    std::size_t differing = 0;
    for (std::size_t i = 0; i < s.orders.size(); ++i) {
        const auto full = solve_full(s.orders[i], net, {});
        if (i >= never_run.outcomes.size() || !(never_run.outcomes[i].assignment == full) ||
            full.objective != s.labels[i].objective)
            ++differing;
    }

    RouterConfig lo;
    lo.threshold = 0.9;
    RouterConfig hi;
    hi.threshold = 0.97;
    std::set<std::string> set_lo;
    std::set<std::string> set_hi;
    for (const auto& o : simulate_stream(s.orders, net, model, lo, {}, false).outcomes)
        if (o.route == Route::ShortcutNoSplit) set_lo.insert(o.order_id);
    const auto hi_run = simulate_stream(s.orders, net, model, hi, {}, true);
    for (const auto& o : hi_run.outcomes)
        if (o.route == Route::ShortcutNoSplit) set_hi.insert(o.order_id);
    std::size_t outside = 0;
    for (const auto& id : set_hi) outside += set_lo.count(id) ? 0 : 1;
    const bool inclusion_ok = outside == 0 && set_hi.size() <= set_lo.size();

    return {regret_ok && differing == 0 && inclusion_ok,
            "oracle at 0.5: total regret " + sci(*oracle_run.summary.total_regret) + " over " +
                std::to_string(oracle_run.outcomes.size()) + " orders; threshold 1.0 without bypass: " +
                std::to_string(differing) + " assignments differ from solve_full; shortcut set 0.9 -> 0.97: " +
                std::to_string(set_lo.size()) + " -> " + std::to_string(set_hi.size()) + ", " +
                std::to_string(outside) + " outside (coverage " + fmt(hi_run.summary.shortcut_coverage) +
                ", shortcut error rate " + fmt(*hi_run.summary.shortcut_error_rate) + " at 0.97)"};
}

Result generator_calibration() {
    const auto& s = default_stream();
    const auto& p = s.partition.summary;
    const bool single_ok = std::abs(p.single_item_share - kSingleItemTarget) <= kSingleItemTolerance;
    const bool not_split_ok = p.multi_item_not_split_share >= kNotSplitLow && p.multi_item_not_split_share <= kNotSplitHigh;
    return {single_ok && not_split_ok && p.total == 10000,
            std::to_string(p.total) + " orders; single-item share " + fmt(p.single_item_share) +
                " (target 0.301 +/- 0.02); multi-item not-split share " + fmt(p.multi_item_not_split_share) +
                " (target [0.55, 0.75])"};
}

} // namespace

int main() {
    report(1, "optimizer oracle equivalence", optimizer_oracle);
    report(2, "no-split consistency", no_split_consistency);
    report(3, "metric correctness", metric_correctness);
    report(4, "logistic gradient check", gradient_check);
    report(5, "LogitBoost monotonicity", boost_monotonicity);
    report(6, "tree replay", tree_replay);
    report(7, "nested-CV protocol shape", cv_shape);
    report(8, "synthetic end-to-end", end_to_end);
    report(9, "router guarantees", router_guarantees);
    report(10, "generator calibration", generator_calibration);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
