#include "doctest.h"

#include <cmath>

#include "data.hpp"
#include "fixtures.hpp"
#include "shortcut/evaluation.hpp"

using namespace shortcut;

namespace {

std::vector<LabeledExample> examples(const Dataset& d) {
    std::vector<LabeledExample> out;
    for (std::size_t i = 0; i < d.rows(); ++i)
        out.push_back({"E" + std::to_string(i), {d.row(i).begin(), d.row(i).end()}, d.label(i)});
    return out;
}

CVConfig small_cv() {
    CVConfig c;
    c.n_repeats = 2;
    c.n_outer_folds = 3;
    c.n_inner_folds = 3;
    c.grid.logistic_lambda = {0.01, 1.0};
    c.grid.tree_min_leaf = {5, 20};
    c.grid.boost_iterations = {10, 20};
    return c;
}

} // namespace

TEST_CASE("accuracy") {
    CHECK(accuracy(std::vector<double>{0.9, 0.2, 0.6}, std::vector<int>{1, 0, 0}) == doctest::Approx(2.0 / 3.0));
    CHECK(accuracy(std::vector<double>{0.5}, std::vector<int>{0}) == 1.0);
    CHECK(accuracy(std::vector<double>{1, 0, 1}, std::vector<int>{1, 0, 1}) == 1.0);
    CHECK_THROWS_AS(accuracy(std::vector<double>{0.5}, std::vector<int>{0, 1}), ShapeError);
}

TEST_CASE("log_loss") {
    CHECK(log_loss(std::vector<double>{0.5}, std::vector<int>{1}) == doctest::Approx(std::log(2.0)));
    CHECK(log_loss(std::vector<double>{1.0 - 1e-12}, std::vector<int>{1}) < 1e-11);
    CHECK(log_loss(std::vector<double>{0.8, 0.8}, std::vector<int>{1, 0}) == doctest::Approx(0.916291).epsilon(1e-6));
    CHECK(log_loss(std::vector<double>{1.0, 0.0}, std::vector<int>{1, 0}) <= 1e-11);
    CHECK_THROWS_AS(log_loss(std::vector<double>{0.5, 0.5}, std::vector<int>{1}), ShapeError);
}

TEST_CASE("coverage_accuracy_curve") {
    const std::vector<double> p{0.99, 0.6, 0.02};
    const std::vector<int> y{1, 0, 0};
    const std::vector<double> t{0.5, 0.97};
    const auto curve = coverage_accuracy_curve(p, y, t);
    CHECK(curve[0].coverage == 1.0);
    CHECK(*curve[0].accuracy == doctest::Approx(accuracy(p, y)));
    CHECK(curve[1].coverage == doctest::Approx(2.0 / 3.0));
    CHECK(*curve[1].accuracy == 1.0);

    const std::vector<double> high{1.0};
    const auto none = coverage_accuracy_curve(std::vector<double>{0.6}, std::vector<int>{1}, high);
    CHECK(none[0].covered == 0);
    CHECK_FALSE(none[0].accuracy.has_value());

    const auto perfect = coverage_accuracy_curve(std::vector<double>{1.0, 0.0}, std::vector<int>{1, 0},
                                                 default_curve_thresholds());
    for (const auto& pt : perfect) {
        CHECK(pt.coverage == 1.0);
        CHECK(*pt.accuracy == 1.0);
    }
    CHECK_THROWS_AS(coverage_accuracy_curve(p, y, std::vector<double>{0.4}), ConfigError);
}

TEST_CASE("default thresholds include 0.97 and coverage never rises") {
    const auto t = default_curve_thresholds();
    CHECK(std::find(t.begin(), t.end(), 0.97) != t.end());
    CHECK(t.front() == 0.5);
    Rng rng(1);
    std::vector<double> p;
    std::vector<int> y;
    for (int i = 0; i < 500; ++i) {
        p.push_back(rng.uniform());
        y.push_back(rng.bernoulli(0.5));
    }
    const auto curve = coverage_accuracy_curve(p, y, t);
    for (std::size_t k = 1; k < curve.size(); ++k) CHECK(curve[k].coverage <= curve[k - 1].coverage);
}

TEST_CASE("stratified folds are disjoint, complete and balanced") {
    std::vector<int> y(103, 0);
    for (std::size_t i = 0; i < y.size(); i += 3) y[i] = 1;
    Rng rng(5);
    const auto folds = stratified_folds(y, 10, rng);
    std::vector<int> seen(y.size(), 0);
    const double rate = std::count(y.begin(), y.end(), 1) / static_cast<double>(y.size());
    for (const auto& f : folds) {
        std::size_t pos = 0;
        for (auto i : f) {
            ++seen[i];
            pos += static_cast<std::size_t>(y[i]);
        }
        CHECK(std::abs(static_cast<double>(pos) - rate * static_cast<double>(f.size())) <= 1.0);
    }
    for (int s : seen) CHECK(s == 1);
    Rng again(5);
    CHECK_THROWS_AS(stratified_folds(std::vector<int>{0, 1}, 3, again), Error);
}

TEST_CASE("constant baseline reaches the majority rate and base-rate entropy") {
    const auto d = testdata::random_dataset(4, 120, 2);
    auto cfg = small_cv();
    const auto report = nested_cv(d, cfg, {constant_learner(FeatureSchema::anonymous(2))});
    const auto& m = report.model("Constant");
    // Fold sizes differ by at most one, so cell means sit close to the global rates.
    const double rate = static_cast<double>(d.positives()) / static_cast<double>(d.rows());
    const double majority = std::max(rate, 1.0 - rate);
    const double entropy = -(rate * std::log(rate) + (1 - rate) * std::log(1 - rate));
    CHECK(m.accuracy_mean == doctest::Approx(majority).epsilon(0.02));
    CHECK(m.log_loss_mean == doctest::Approx(entropy).epsilon(0.02));
}

TEST_CASE("constant baseline on a balanced set scores exactly ln 2") {
    std::vector<double> x;
    std::vector<int> y;
    for (int i = 0; i < 40; ++i) {
        x.push_back(i);
        y.push_back(i % 2);
    }
    CVConfig cfg;
    cfg.n_repeats = 1;
    cfg.n_outer_folds = 4;
    cfg.n_inner_folds = 2;
    const auto report = nested_cv(Dataset(1, x, y), cfg, {constant_learner(FeatureSchema::anonymous(1))});
    const auto& m = report.model("Constant");
    CHECK(m.log_loss_mean == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("nested CV shape, audit and determinism") {
    const auto d = testdata::random_dataset(6, 200, 3, 1.0);
    CVConfig cfg = small_cv();
    cfg.n_repeats = 5;
    cfg.n_outer_folds = 10;
    cfg.n_inner_folds = 2;
    cfg.grid.logistic_lambda = {0.1};
    cfg.grid.tree_min_leaf = {10};
    cfg.grid.boost_iterations = {10};
    const std::vector<ModelKind> kinds{ModelKind::LogisticL1, ModelKind::DecisionTree, ModelKind::LogitBoost,
                                       ModelKind::Ensemble};
    const auto a = nested_cv(examples(d), cfg, kinds, FeatureSchema::anonymous(3));
    CHECK(a.models.size() == 4);
    for (const auto& m : a.models) CHECK(m.cells.size() == 50);
    CHECK(a.audit.size() == 50);
    CHECK(a.leak_free());
    cfg.threads = 3;
    const auto b = nested_cv(examples(d), cfg, kinds, FeatureSchema::anonymous(3));
    CHECK(report_to_text(a) == report_to_text(b));
    CHECK(report_from_text(report_to_text(a)) == a);
}

TEST_CASE("hyperparameter selection prefers the better grid point") {
    const auto d = testdata::random_dataset(9, 200, 3, 0.2);
    HyperParamGrid grid;
    grid.logistic_lambda = {1000.0, 0.001};
    const auto learner = make_learner(ModelKind::LogisticL1, grid, FeatureSchema::anonymous(3));
    CHECK(select_hyperparameters(learner, d, 4, SelectionMetric::LogLoss, 1) == 1);
}

TEST_CASE("CV config validation") {
    CVConfig cfg;
    cfg.n_outer_folds = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CVConfig bad_grid;
    bad_grid.grid.logistic_lambda = {};
    CHECK_THROWS_AS(bad_grid.validate(), ConfigError);
}

TEST_CASE("single_item_partition") {
    using fixtures::order;
    SUBCASE("all single-item") {
        const std::vector<Order> orders{order("A", {{"X", 1}}), order("B", {{"Y", 1}})};
        const std::vector<SplitLabel> labels{{"A", 0, 1, 0}, {"B", 0, 1, 0}};
        const auto p = single_item_partition(orders, labels);
        CHECK(p.multi_item.empty());
        CHECK_FALSE(p.summary.evaluation_possible);
        CHECK(p.summary.single_item_share == 1.0);
    }
    SUBCASE("one line of quantity three is multi-item by default") {
        const std::vector<Order> orders{order("A", {{"X", 3}}), order("B", {{"Y", 1}, {"Z", 1}}),
                                        order("C", {{"Y", 1}})};
        const std::vector<SplitLabel> labels{{"A", 1, 2, 0}, {"B", 0, 1, 0}, {"C", 0, 1, 0}};
        const auto p = single_item_partition(orders, labels);
        CHECK(p.multi_item == std::vector<std::size_t>{0, 1});
        CHECK(p.summary.multi_item_split == 1);
        CHECK(p.summary.multi_item_split_share == 0.5);
        const auto one_line = single_item_partition(orders, labels, SingleItemCriterion::OneLine);
        CHECK(one_line.multi_item == std::vector<std::size_t>{1});
    }
    SUBCASE("misaligned labels") {
        CHECK_THROWS_AS(single_item_partition({order("A", {{"X", 1}})}, {{"B", 0, 1, 0}}), ShapeError);
    }
}
