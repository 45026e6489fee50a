#include "shortcut/config.hpp"

#include <set>

#include "json.hpp"
#include "shortcut/io.hpp"

namespace shortcut {

using nlohmann::ordered_json;

namespace {

// Reads known keys from one JSON object and rejects anything left over.
class Section {
public:
    Section(const ordered_json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) throw ConfigError(name_ + " must be an object");
    }

    template <class T>
    void get(const std::string& key, T& out) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) return;
        try {
            out = it->template get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(path(key) + " has the wrong type");
        }
    }

    template <class T>
    void range(const std::string& key, Range<T>& out) {
        std::vector<T> pair{out.min, out.max};
        get(key, pair);
        if (pair.size() != 2) throw ConfigError(path(key) + " must be a [min, max] pair");
        out = {pair[0], pair[1]};
    }

    std::optional<Section> child(const std::string& key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) return std::nullopt;
        return Section(*it, path(key));
    }

    void finish() const {
        for (const auto& [key, _] : j_.items())
            if (!seen_.count(key)) throw ConfigError("unknown configuration key " + path(key));
    }

private:
    std::string path(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

    const ordered_json& j_;
    std::string name_;
    std::set<std::string> seen_;
};

} // namespace

void RunConfig::set_seed(std::uint64_t value) {
    seed = value;
    generator.seed = value;
    cv.seed = value;
}

void RunConfig::validate() const {
    generator.validate();
    optimizer.validate();
    cv.validate();
    router.validate();
    if (feature_catalog_version != kCatalogVersion)
        throw ConfigError("feature_catalog_version '" + feature_catalog_version + "' is not supported (this build has '" +
                          std::string(kCatalogVersion) + "')");
    if (models.empty()) throw ConfigError("models must list at least one model kind");
    if (n_bins < 1) throw ConfigError("n_bins must be >= 1");
    for (const auto& name : binned_features)
        if (!canonical_catalog().index_of(name)) throw ConfigError("binned feature '" + name + "' is not in the catalog");
    const std::vector<std::string> all{paths.network,   paths.orders,   paths.labels,    paths.partition, paths.features,
                                       paths.models_dir, paths.eval_dir, paths.route_dir, paths.report};
    std::set<std::string> distinct;
    for (const auto& p : all) {
        if (p.empty()) throw ConfigError("paths must be non-empty");
        if (!distinct.insert(std::filesystem::path(p).lexically_normal().string()).second)
            throw ConfigError("path '" + p + "' is used for more than one artifact");
    }
}

RunConfig config_from_text(std::string_view text, const std::string& source) {
    std::string_view body = text;
    if (body.substr(0, 1) == "#") {
        const auto newline = body.find('\n');
        io::expect_header(body.substr(0, newline), source, "run-config", 1);
        body = newline == std::string_view::npos ? std::string_view{} : body.substr(newline + 1);
    }
    ordered_json j;
    try {
        j = ordered_json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(source, 1, std::string("malformed configuration: ") + e.what());
    }

    RunConfig c;
    Section root(j, "");
    std::uint64_t seed = c.seed;
    root.get("seed", seed);
    c.set_seed(seed);

    if (auto g = root.child("generator")) {
        auto& gc = c.generator;
        g->get("n_nodes", gc.n_nodes);
        g->get("store_fraction", gc.store_fraction);
        g->get("n_items", gc.n_items);
        g->get("sfs_eligible_fraction", gc.sfs_eligible_fraction);
        g->range("item_weight_range", gc.item_weight_range);
        g->range("item_price_range", gc.item_price_range);
        g->get("n_orders", gc.n_orders);
        g->get("items_per_order_mean", gc.items_per_order_mean);
        g->get("single_item_order_fraction", gc.single_item_order_fraction);
        g->get("quantity_distribution", gc.quantity_distribution);
        g->get("inventory_density", gc.inventory_density);
        g->get("fc_inventory_density", gc.fc_inventory_density);
        g->range("inventory_level_range", gc.inventory_level_range);
        g->get("clearance_probability", gc.clearance_probability);
        g->range("clearance_saving_range", gc.clearance_saving_range);
        g->range("fixed_cost_range", gc.fixed_cost_range);
        g->range("unit_rate_range", gc.unit_rate_range);
        g->get("plane_size", gc.plane_size);
        g->get("max_lines", gc.max_lines);
        g->finish();
    }
    if (auto o = root.child("optimizer")) {
        o->get("w_clearance", c.optimizer.w_clearance);
        o->get("candidate_prefilter_k", c.optimizer.candidate_prefilter_k);
        o->get("max_split_nodes", c.optimizer.max_split_nodes);
        o->finish();
    }
    root.get("feature_catalog_version", c.feature_catalog_version);
    if (auto grid = root.child("grid")) {
        grid->get("logistic_lambda", c.cv.grid.logistic_lambda);
        grid->get("tree_min_leaf", c.cv.grid.tree_min_leaf);
        grid->get("boost_iterations", c.cv.grid.boost_iterations);
        grid->get("boost_shrinkage", c.cv.grid.boost_shrinkage);
        grid->finish();
    }
    if (auto cv = root.child("cv")) {
        cv->get("n_repeats", c.cv.n_repeats);
        cv->get("n_outer_folds", c.cv.n_outer_folds);
        cv->get("n_inner_folds", c.cv.n_inner_folds);
        std::string metric(to_string(c.cv.selection_metric));
        cv->get("selection_metric", metric);
        c.cv.selection_metric = selection_metric_from_string(metric);
        cv->get("curve_thresholds", c.cv.curve_thresholds);
        std::vector<std::string> members;
        for (auto k : c.cv.ensemble_members) members.emplace_back(to_string(k));
        cv->get("ensemble_members", members);
        c.cv.ensemble_members.clear();
        for (const auto& m : members) {
            try {
                c.cv.ensemble_members.push_back(model_kind_from_string(m));
            } catch (const Error& e) {
                throw ConfigError(e.what());
            }
        }
        cv->finish();
    }
    std::vector<std::string> kinds;
    for (auto k : c.models) kinds.emplace_back(to_string(k));
    root.get("models", kinds);
    c.models.clear();
    for (const auto& k : kinds) {
        try {
            c.models.push_back(model_kind_from_string(k));
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
    }
    if (auto r = root.child("router")) {
        r->get("threshold", c.router.threshold);
        r->get("model_path", c.router.model_path);
        r->get("trivial_bypass", c.router.trivial_bypass);
        r->get("with_ground_truth", c.route_with_ground_truth);
        r->finish();
    }
    std::string criterion(to_string(c.single_item));
    root.get("single_item_criterion", criterion);
    c.single_item = single_item_criterion_from_string(criterion);
    root.get("binned_features", c.binned_features);
    root.get("n_bins", c.n_bins);
    if (auto p = root.child("paths")) {
        p->get("network", c.paths.network);
        p->get("orders", c.paths.orders);
        p->get("labels", c.paths.labels);
        p->get("partition", c.paths.partition);
        p->get("features", c.paths.features);
        p->get("models_dir", c.paths.models_dir);
        p->get("eval_dir", c.paths.eval_dir);
        p->get("route_dir", c.paths.route_dir);
        p->get("report", c.paths.report);
        p->finish();
    }
    root.finish();
    c.validate();
    return c;
}

std::string config_to_text(const RunConfig& c) {
    ordered_json j;
    j["seed"] = c.seed;
    const auto& g = c.generator;
    auto pair = [](const auto& r) { return ordered_json::array({r.min, r.max}); };
    j["generator"] = {{"n_nodes", g.n_nodes},
                      {"store_fraction", g.store_fraction},
                      {"n_items", g.n_items},
                      {"sfs_eligible_fraction", g.sfs_eligible_fraction},
                      {"item_weight_range", pair(g.item_weight_range)},
                      {"item_price_range", pair(g.item_price_range)},
                      {"n_orders", g.n_orders},
                      {"items_per_order_mean", g.items_per_order_mean},
                      {"single_item_order_fraction", g.single_item_order_fraction},
                      {"quantity_distribution", g.quantity_distribution},
                      {"inventory_density", g.inventory_density},
                      {"fc_inventory_density", g.fc_inventory_density},
                      {"inventory_level_range", pair(g.inventory_level_range)},
                      {"clearance_probability", g.clearance_probability},
                      {"clearance_saving_range", pair(g.clearance_saving_range)},
                      {"fixed_cost_range", pair(g.fixed_cost_range)},
                      {"unit_rate_range", pair(g.unit_rate_range)},
                      {"plane_size", g.plane_size},
                      {"max_lines", g.max_lines}};
    j["optimizer"] = {{"w_clearance", c.optimizer.w_clearance},
                      {"candidate_prefilter_k", c.optimizer.candidate_prefilter_k},
                      {"max_split_nodes", c.optimizer.max_split_nodes}};
    j["feature_catalog_version"] = c.feature_catalog_version;
    j["grid"] = {{"logistic_lambda", c.cv.grid.logistic_lambda},
                 {"tree_min_leaf", c.cv.grid.tree_min_leaf},
                 {"boost_iterations", c.cv.grid.boost_iterations},
                 {"boost_shrinkage", c.cv.grid.boost_shrinkage}};
    j["cv"] = {{"n_repeats", c.cv.n_repeats},
               {"n_outer_folds", c.cv.n_outer_folds},
               {"n_inner_folds", c.cv.n_inner_folds},
               {"selection_metric", std::string(to_string(c.cv.selection_metric))},
               {"curve_thresholds", c.cv.curve_thresholds}};
    std::vector<std::string> members;
    for (auto k : c.cv.ensemble_members) members.emplace_back(to_string(k));
    j["cv"]["ensemble_members"] = members;
    std::vector<std::string> kinds;
    for (auto k : c.models) kinds.emplace_back(to_string(k));
    j["models"] = kinds;
    j["router"] = {{"threshold", c.router.threshold},
                   {"model_path", c.router.model_path},
                   {"trivial_bypass", c.router.trivial_bypass},
                   {"with_ground_truth", c.route_with_ground_truth}};
    j["single_item_criterion"] = std::string(to_string(c.single_item));
    j["binned_features"] = c.binned_features;
    j["n_bins"] = c.n_bins;
    j["paths"] = {{"network", c.paths.network},     {"orders", c.paths.orders},
                  {"labels", c.paths.labels},       {"partition", c.paths.partition},
                  {"features", c.paths.features},   {"models_dir", c.paths.models_dir},
                  {"eval_dir", c.paths.eval_dir},   {"route_dir", c.paths.route_dir},
                  {"report", c.paths.report}};
    return io::header_line({"run-config", 1, {}}) + "\n" + j.dump(2) + "\n";
}

RunConfig load_config(const std::filesystem::path& path) {
    return config_from_text(io::read_file(path), path.string());
}

} // namespace shortcut
