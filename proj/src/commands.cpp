#include "shortcut/commands.hpp"

#include <algorithm>
#include <cstdio>

#include "shortcut/formats.hpp"
#include "shortcut/generator.hpp"
#include "shortcut/io.hpp"
#include "shortcut/model_io.hpp"

namespace shortcut {

namespace fs = std::filesystem;

fs::path CommandContext::network_path() const { return network.value_or(out_dir / config.paths.network); }
fs::path CommandContext::orders_path() const { return orders.value_or(out_dir / config.paths.orders); }
fs::path CommandContext::labels_path() const { return labels.value_or(out_dir / config.paths.labels); }
fs::path CommandContext::features_path() const { return features.value_or(out_dir / config.paths.features); }
fs::path CommandContext::models_dir() const { return out_dir / config.paths.models_dir; }
fs::path CommandContext::eval_dir() const { return out_dir / config.paths.eval_dir; }
fs::path CommandContext::route_dir() const { return out_dir / config.paths.route_dir; }

fs::path CommandContext::model_path() const {
    if (model) return *model;
    if (!config.router.model_path.empty()) return config.router.model_path;
    const auto& kinds = config.models;
    const bool ensemble = std::find(kinds.begin(), kinds.end(), ModelKind::Ensemble) != kinds.end();
    return models_dir() / (std::string(to_string(ensemble ? ModelKind::Ensemble : kinds.front())) + ".json");
}

namespace {

void note(const CommandContext& ctx, const std::string& line) {
    if (ctx.log) *ctx.log << line << '\n';
}

NetworkIndex load_network(const CommandContext& ctx) { return NetworkIndex(read_network(ctx.network_path())); }

std::string fixed(double value, int precision) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", precision, value);
    return buffer;
}

std::string pad(std::string text, std::size_t width) {
    if (text.size() < width) text.append(width - text.size(), ' ');
    return text;
}

FeatureSchema canonical_schema() {
    return {canonical_catalog().names(), canonical_catalog().version};
}

std::vector<LabeledExample> load_examples(const CommandContext& ctx) {
    const auto features = read_features(ctx.features_path());
    const auto labels = read_labels(ctx.labels_path());
    auto examples = multi_item_examples(features, labels, ctx.config.single_item);
    if (examples.empty()) throw Error("NO_MULTI_ITEM_ORDERS", "no multi-item orders to learn from");
    return examples;
}

} // namespace

std::vector<LabeledExample> multi_item_examples(const std::vector<FeatureVector>& features,
                                                const std::vector<SplitLabel>& labels,
                                                SingleItemCriterion criterion) {
    if (features.size() != labels.size()) throw ShapeError("features and labels differ in length");
    const auto& catalog = canonical_catalog();
    const auto lines = *catalog.index_of("num_lines");
    const auto quantity = *catalog.index_of("total_quantity");
    std::vector<LabeledExample> out;
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].order_id != labels[i].order_id)
            throw ShapeError("features row " + features[i].order_id + " is not aligned with label " + labels[i].order_id);
        const auto& x = features[i].values;
        const bool single = x[lines] == 1.0 && (criterion == SingleItemCriterion::OneLine || x[quantity] == 1.0);
        if (!single) out.push_back({features[i].order_id, x, labels[i].y});
    }
    return out;
}

void cmd_generate(const CommandContext& ctx) {
    const auto& cfg = ctx.config;
    auto network = generate_network(cfg.generator);
    const NetworkIndex index(network);
    const auto orders = generate_orders(cfg.generator, index, cfg.optimizer);
    io::write_file_atomic(ctx.out_dir / cfg.paths.network, network_to_text(network));
    io::write_file_atomic(ctx.out_dir / cfg.paths.orders, orders_to_text(orders));
    note(ctx, "generate: " + std::to_string(network.nodes.size()) + " nodes, " +
                  std::to_string(network.catalog.size()) + " items, " + std::to_string(orders.size()) + " orders");
}

PartitionSummary cmd_label(const CommandContext& ctx) {
    const auto& cfg = ctx.config;
    const auto network = load_network(ctx);
    const auto orders = read_orders(ctx.orders_path());
    const auto labels = label_orders(orders, network, cfg.optimizer, ctx.threads);
    const auto partition = single_item_partition(orders, labels, cfg.single_item);
    io::write_file_atomic(ctx.labels_path(), labels_to_text(labels));
    io::write_file_atomic(ctx.out_dir / cfg.paths.partition, partition_to_text(partition.summary, cfg.single_item));
    const auto& s = partition.summary;
    note(ctx, "label: " + std::to_string(labels.size()) + " orders, single-item share " + fixed(s.single_item_share, 4) +
                  ", multi-item not-split share " + fixed(s.multi_item_not_split_share, 4));
    return s;
}

void cmd_featurize(const CommandContext& ctx) {
    const auto network = load_network(ctx);
    const auto orders = read_orders(ctx.orders_path());
    const auto features = extract_all(orders, network, ctx.config.optimizer, ctx.threads);
    io::write_file_atomic(ctx.features_path(), features_to_text(features));
    note(ctx, "featurize: " + std::to_string(features.size()) + " rows x " +
                  std::to_string(canonical_catalog().size()) + " features");
}

std::vector<SplitModel> cmd_train(const CommandContext& ctx) {
    const auto& cfg = ctx.config;
    const auto data = Dataset::from_examples(load_examples(ctx));
    const auto schema = canonical_schema();
    const auto& kinds = cfg.models;
    const bool ensemble = std::find(kinds.begin(), kinds.end(), ModelKind::Ensemble) != kinds.end();

    std::vector<ModelKind> base;
    for (auto k : kinds)
        if (k != ModelKind::Ensemble && std::find(base.begin(), base.end(), k) == base.end()) base.push_back(k);
    if (ensemble)
        for (auto k : cfg.cv.ensemble_members)
            if (std::find(base.begin(), base.end(), k) == base.end()) base.push_back(k);

    std::vector<SplitModel> trained;
    std::map<ModelKind, std::size_t> position;
    for (auto k : base) {
        const auto learner = make_learner(k, cfg.cv.grid, schema);
        const auto chosen =
            select_hyperparameters(learner, data, cfg.cv.n_inner_folds, cfg.cv.selection_metric, cfg.cv.seed);
        position[k] = trained.size();
        trained.push_back(learner.fit(data, chosen));
        note(ctx, "train: " + learner.name + " fitted on " + std::to_string(data.rows()) + " multi-item orders");
    }
    if (ensemble) {
        std::vector<SplitModel> members;
        for (auto k : cfg.cv.ensemble_members) members.push_back(trained[position[k]]);
        trained.push_back(train_ensemble(std::move(members)));
    }

    std::vector<SplitModel> out;
    for (auto k : kinds) {
        const auto it = std::find_if(trained.begin(), trained.end(), [&](const SplitModel& m) { return m.kind() == k; });
        if (std::any_of(out.begin(), out.end(), [&](const SplitModel& m) { return m.kind() == k; })) continue;
        save_model(*it, ctx.models_dir() / (std::string(to_string(k)) + ".json"));
        out.push_back(*it);
    }
    return out;
}

EvalReport cmd_evaluate(const CommandContext& ctx) {
    const auto& cfg = ctx.config;
    const auto features = read_features(ctx.features_path());
    const auto labels = read_labels(ctx.labels_path());
    const auto examples = multi_item_examples(features, labels, cfg.single_item);
    if (examples.empty()) throw Error("NO_MULTI_ITEM_ORDERS", "no multi-item orders to evaluate on");

    auto cv = cfg.cv;
    cv.threads = ctx.threads;
    const auto report = nested_cv(examples, cv, cfg.models, canonical_schema());
    const auto dir = ctx.eval_dir();
    io::write_file_atomic(dir / "report.json", report_to_text(report));
    io::write_file_atomic(dir / "curves.csv", curves_to_text(report));
    io::write_file_atomic(dir / "importance.csv", importance_to_text(report));

    // Binned split rates over the same multi-item subset.
    std::vector<FeatureVector> multi_features;
    std::vector<SplitLabel> multi_labels;
    for (const auto& e : examples) {
        multi_features.push_back({e.order_id, e.x});
        multi_labels.push_back({e.order_id, e.y, 0, 0.0});
    }
    for (const auto& name : cfg.binned_features)
        io::write_file_atomic(dir / ("binned_" + name + ".csv"),
                              bins_to_text(name, binned_split_rates(multi_features, multi_labels, name, cfg.n_bins)));
    for (const auto& m : report.models)
        note(ctx, "evaluate: " + pad(m.name, 13) + " accuracy " + fixed(m.accuracy_mean, 4) + " +/- " +
                      fixed(m.accuracy_std, 4) + ", log loss " + fixed(m.log_loss_mean, 4) + " +/- " +
                      fixed(m.log_loss_std, 4));
    return report;
}

StreamSummary cmd_route(const CommandContext& ctx) {
    const auto& cfg = ctx.config;
    const auto network = load_network(ctx);
    const auto orders = read_orders(ctx.orders_path());
    const auto model = load_model(ctx.model_path());
    const auto result =
        simulate_stream(orders, network, model, cfg.router, cfg.optimizer, cfg.route_with_ground_truth, ctx.threads);
    io::write_file_atomic(ctx.route_dir() / "outcomes.csv", outcomes_to_text(result.outcomes));
    io::write_file_atomic(ctx.route_dir() / "summary.json", summary_to_text(result.summary));
    const auto& s = result.summary;
    std::string line = "route: " + std::to_string(s.n_routed) + " orders, shortcut coverage " +
                       fixed(s.shortcut_coverage, 4) + ", optimizer calls avoided " +
                       std::to_string(s.optimizer_invocations_avoided);
    if (s.shortcut_error_rate) line += ", shortcut error rate " + fixed(*s.shortcut_error_rate, 4);
    if (!s.errors.empty()) line += ", " + std::to_string(s.errors.size()) + " failed";
    note(ctx, line);
    return s;
}

std::string cmd_report(const CommandContext& ctx) {
    const auto& cfg = ctx.config;
    const auto eval_dir = ctx.eval_dir();
    const auto report = report_from_text(io::read_file(eval_dir / "report.json"), (eval_dir / "report.json").string());
    std::string out = "Order split prediction report\n=============================\n\n";

    const auto partition_path = ctx.out_dir / cfg.paths.partition;
    if (fs::exists(partition_path)) {
        const auto p = partition_from_text(io::read_file(partition_path), partition_path.string());
        out += "Orders\n------\n";
        out += "total orders              " + std::to_string(p.total) + "\n";
        out += "single-item orders        " + std::to_string(p.single_item) + " (" + fixed(100 * p.single_item_share, 2) +
               "%, excluded from learning)\n";
        out += "multi-item orders         " + std::to_string(p.multi_item) + "\n";
        out += "  split                   " + fixed(100 * p.multi_item_split_share, 2) + "%\n";
        out += "  not split               " + fixed(100 * p.multi_item_not_split_share, 2) + "%\n\n";
    }

    out += "Model performance\n-----------------\n";
    out += std::to_string(report.n_repeats) + " repeats x " + std::to_string(report.n_outer_folds) +
           " outer folds, hyperparameters chosen by " + std::to_string(report.n_inner_folds) + "-fold inner CV on " +
           std::string(to_string(report.selection_metric)) + "; " + std::to_string(report.n_examples) + " examples, " +
           std::to_string(report.n_positive) + " split\n\n";
    out += pad("model", 14) + pad("accuracy", 22) + "log loss\n";
    for (const auto& m : report.models)
        out += pad(m.name, 14) + pad(fixed(m.accuracy_mean, 4) + " +/- " + fixed(m.accuracy_std, 4), 22) +
               fixed(m.log_loss_mean, 4) + " +/- " + fixed(m.log_loss_std, 4) + "\n";

    out += "\nConfidence threshold vs coverage (recall) and accuracy on covered (precision)\n";
    out += "-----------------------------------------------------------------------------\n";
    out += pad("threshold", 11);
    for (const auto& m : report.models) out += pad(m.name, 22);
    out += "\n";
    for (double t : {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.97, 0.99}) {
        std::string row = pad(fixed(t, 3), 11);
        bool any = false;
        for (const auto& m : report.models) {
            const auto it = std::find_if(m.curve.begin(), m.curve.end(),
                                         [&](const CurvePoint& p) { return std::abs(p.threshold - t) < 1e-12; });
            if (it == m.curve.end()) {
                row += pad("-", 22);
                continue;
            }
            any = true;
            row += pad(fixed(it->coverage, 4) + " / " + (it->accuracy ? fixed(*it->accuracy, 4) : std::string("n/a")), 22);
        }
        if (any) out += row + "\n";
    }
    out += "(cells are coverage / accuracy on covered)\n";

    out += "\nSplit rate by feature bin\n-------------------------\n";
    for (const auto& name : cfg.binned_features) {
        const auto path = eval_dir / ("binned_" + name + ".csv");
        if (!fs::exists(path)) continue;
        const auto bins = bins_from_text(io::read_file(path), path.string());
        out += name + "\n";
        for (std::size_t b = 0; b < bins.size(); ++b) {
            const bool last = b + 1 == bins.size();
            out += "  [" + fixed(bins[b].lower, 3) + ", " + fixed(bins[b].upper, 3) + (last ? "]" : ")");
            out += "  n=" + std::to_string(bins[b].count) + "  split " +
                   (bins[b].split_fraction ? fixed(*bins[b].split_fraction, 3) : std::string("n/a")) + "\n";
        }
    }

    for (const auto& m : report.models) {
        if (m.name != "Ensemble" && !(report.models.size() == 1)) continue;
        out += "\nTop features (" + m.name + ")\n";
        for (std::size_t k = 0; k < std::min<std::size_t>(10, m.importance.size()); ++k)
            out += "  " + pad(m.importance[k].first, 40) + fixed(m.importance[k].second, 4) + "\n";
    }

    const auto tree_path = ctx.models_dir() / "DecisionTree.json";
    if (fs::exists(tree_path)) {
        auto rules = extract_rules(load_model(tree_path));
        std::stable_sort(rules.begin(), rules.end(), [](const Rule& a, const Rule& b) { return a.support > b.support; });
        out += "\nDecision tree rules (largest leaves first)\n------------------------------------------\n";
        for (std::size_t k = 0; k < std::min<std::size_t>(15, rules.size()); ++k) out += rules[k].text + "\n";
        if (rules.size() > 15) out += "(" + std::to_string(rules.size() - 15) + " more leaves)\n";
    }

    const auto summary_path = ctx.route_dir() / "summary.json";
    if (fs::exists(summary_path)) {
        const auto s = summary_from_text(io::read_file(summary_path), summary_path.string());
        out += "\nRouting at threshold " + fixed(cfg.router.threshold, 3) + "\n--------------------------\n";
        for (const auto& [route, count] : s.route_counts)
            out += "  " + pad(route, 20) + std::to_string(count) + " (" + fixed(100 * s.route_fractions.at(route), 2) + "%)\n";
        out += "  shortcut coverage of non-trivial orders  " + fixed(s.shortcut_coverage, 4) + "\n";
        out += "  optimizer invocations avoided            " + std::to_string(s.optimizer_invocations_avoided) + "\n";
        out += "  cost evaluations                         " + std::to_string(s.decide_cost_units);
        if (s.counterfactual_cost_units) out += " (all-optimizer: " + std::to_string(*s.counterfactual_cost_units) + ")";
        out += "\n";
        if (s.shortcut_error_rate) out += "  shortcut error rate                      " + fixed(*s.shortcut_error_rate, 4) + "\n";
        if (s.total_regret) out += "  total regret                             " + fixed(*s.total_regret, 4) + "\n";
        if (!s.errors.empty()) out += "  failed orders                            " + std::to_string(s.errors.size()) + "\n";
    }

    io::write_file_atomic(ctx.out_dir / cfg.paths.report, out);
    note(ctx, "report: wrote " + (ctx.out_dir / cfg.paths.report).string());
    return out;
}

void cmd_pipeline(const CommandContext& ctx) {
    cmd_generate(ctx);
    cmd_label(ctx);
    cmd_featurize(ctx);
    cmd_train(ctx);
    cmd_evaluate(ctx);
    cmd_route(ctx);
    cmd_report(ctx);
}

} // namespace shortcut
