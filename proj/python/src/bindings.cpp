#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "shortcut/commands.hpp"
#include "shortcut/config.hpp"
#include "shortcut/evaluation.hpp"
#include "shortcut/features.hpp"
#include "shortcut/formats.hpp"
#include "shortcut/generator.hpp"
#include "shortcut/model_io.hpp"
#include "shortcut/optimizer.hpp"
#include "shortcut/router.hpp"

namespace py = pybind11;
using namespace shortcut;

namespace {

RunConfig parse_config(const std::string& json) { return json.empty() ? RunConfig{} : config_from_text(json); }

Dataset to_dataset(const std::vector<std::vector<double>>& x, const std::vector<int>& y) {
    if (x.size() != y.size()) throw ShapeError("x and y differ in length");
    const std::size_t cols = x.empty() ? 0 : x.front().size();
    std::vector<double> values;
    values.reserve(x.size() * cols);
    for (const auto& row : x) {
        if (row.size() != cols) throw ShapeError("rows of x differ in width");
        values.insert(values.end(), row.begin(), row.end());
    }
    return Dataset(cols, std::move(values), y);
}

py::dict assignment_dict(const Assignment& a) {
    py::list allocations;
    for (const auto& x : a.allocations) allocations.append(py::make_tuple(x.item_id, x.node_id, x.quantity));
    py::dict d;
    d["allocations"] = allocations;
    d["objective"] = a.objective;
    d["shipping_cost"] = a.shipping_cost;
    d["clearance_savings"] = a.clearance_savings_total;
    d["nodes_used"] = a.nodes_used;
    return d;
}

py::dict curve_point_dict(const CurvePoint& p) {
    py::dict d;
    d["threshold"] = p.threshold;
    d["coverage"] = p.coverage;
    d["covered"] = p.covered;
    d["accuracy"] = p.accuracy ? py::cast(*p.accuracy) : py::none();
    return d;
}

} // namespace

PYBIND11_MODULE(_shortcut, m) {
    m.doc() = "Order split prediction and fulfillment optimizer shortcutting";

    py::register_exception<Error>(m, "ShortcutError", PyExc_RuntimeError);

    m.def("default_config", [] { return config_to_text(RunConfig{}); }, "Default run configuration as text.");
    m.def(
        "feature_names", [] { return canonical_catalog().names(); }, "Feature names in catalog order.");
    m.attr("catalog_version") = std::string(kCatalogVersion);

    m.def(
        "generate",
        [](const std::string& config) {
            const auto c = parse_config(config);
            const auto network = generate_network(c.generator);
            const auto orders = generate_orders(c.generator, NetworkIndex(network), c.optimizer);
            return py::make_tuple(network_to_text(network), orders_to_text(orders));
        },
        py::arg("config") = "", "Generate a network and order stream; returns (network_text, orders_text).");

    m.def(
        "solve",
        [](const std::string& network_text, const std::string& orders_text, const std::string& config) {
            const auto c = parse_config(config);
            const NetworkIndex index(network_from_text(network_text));
            py::list out;
            for (const auto& order : orders_from_text(orders_text)) {
                auto d = assignment_dict(solve_full(order, index, c.optimizer));
                d["order_id"] = order.order_id;
                const auto single = solve_no_split(order, index, c.optimizer);
                d["no_split_objective"] = single ? py::cast(single->objective) : py::none();
                out.append(d);
            }
            return out;
        },
        py::arg("network_text"), py::arg("orders_text"), py::arg("config") = "",
        "Exact optimum and best single-node objective for every order.");

    m.def(
        "label",
        [](const std::string& network_text, const std::string& orders_text, const std::string& config,
           std::size_t threads) {
            const auto c = parse_config(config);
            const NetworkIndex index(network_from_text(network_text));
            return labels_to_text(label_orders(orders_from_text(orders_text), index, c.optimizer, threads));
        },
        py::arg("network_text"), py::arg("orders_text"), py::arg("config") = "", py::arg("threads") = 1);

    m.def(
        "featurize",
        [](const std::string& network_text, const std::string& orders_text, const std::string& config,
           std::size_t threads) {
            const auto c = parse_config(config);
            const NetworkIndex index(network_from_text(network_text));
            return features_to_text(extract_all(orders_from_text(orders_text), index, c.optimizer, threads));
        },
        py::arg("network_text"), py::arg("orders_text"), py::arg("config") = "", py::arg("threads") = 1);

    m.def(
        "read_features",
        [](const std::string& text) {
            std::vector<std::string> ids;
            std::vector<std::vector<double>> rows;
            for (auto& f : features_from_text(text)) {
                ids.push_back(f.order_id);
                rows.push_back(std::move(f.values));
            }
            return py::make_tuple(ids, rows);
        },
        py::arg("text"), "Parse a features file into (order_ids, rows).");

    m.def(
        "read_labels",
        [](const std::string& text) {
            std::vector<std::string> ids;
            std::vector<int> y;
            for (const auto& l : labels_from_text(text)) {
                ids.push_back(l.order_id);
                y.push_back(l.y);
            }
            return py::make_tuple(ids, y);
        },
        py::arg("text"), "Parse a labels file into (order_ids, y).");

    m.def(
        "accuracy",
        [](const std::vector<double>& p, const std::vector<int>& y) { return accuracy(p, y); }, py::arg("p"),
        py::arg("y"));
    m.def(
        "log_loss",
        [](const std::vector<double>& p, const std::vector<int>& y) { return log_loss(p, y); }, py::arg("p"),
        py::arg("y"));
    m.def(
        "coverage_accuracy_curve",
        [](const std::vector<double>& p, const std::vector<int>& y, std::optional<std::vector<double>> thresholds) {
            const auto t = thresholds ? *thresholds : default_curve_thresholds();
            py::list out;
            for (const auto& point : coverage_accuracy_curve(p, y, t)) out.append(curve_point_dict(point));
            return out;
        },
        py::arg("p"), py::arg("y"), py::arg("thresholds") = py::none());

    m.def(
        "train",
        [](const std::string& kind, const std::vector<std::vector<double>>& x, const std::vector<int>& y,
           const std::map<std::string, double>& params, std::optional<std::vector<std::string>> names) {
            const auto data = to_dataset(x, y);
            FeatureSchema schema = FeatureSchema::anonymous(data.cols());
            if (names) {
                if (names->size() != data.cols()) throw ShapeError("feature names do not match the columns of x");
                schema.names = *names;
                if (*names == canonical_catalog().names()) schema.catalog_version = std::string(kCatalogVersion);
            }
            auto get = [&](const char* key, double fallback) {
                const auto it = params.find(key);
                return it == params.end() ? fallback : it->second;
            };
            SplitModel model;
            switch (model_kind_from_string(kind)) {
            case ModelKind::LogisticL1: model = train_logistic_l1(data, get("lambda", 1.0), schema); break;
            case ModelKind::DecisionTree:
                model = train_decision_tree(data, static_cast<std::size_t>(get("min_leaf", 20)), schema);
                break;
            case ModelKind::LogitBoost:
                model = train_logitboost(data, static_cast<std::size_t>(get("n_iters", 100)), get("shrinkage", 0.1),
                                         schema);
                break;
            case ModelKind::Ensemble:
                model = train_ensemble(
                    {train_decision_tree(data, static_cast<std::size_t>(get("min_leaf", 20)), schema),
                     train_logitboost(data, static_cast<std::size_t>(get("n_iters", 100)), get("shrinkage", 0.1),
                                      schema)});
                break;
            }
            return model_to_text(model);
        },
        py::arg("kind"), py::arg("x"), py::arg("y"), py::arg("params") = std::map<std::string, double>{},
        py::arg("feature_names") = py::none(), "Train one model; returns the serialized model text.");

    m.def(
        "predict",
        [](const std::string& model_text, const std::vector<std::vector<double>>& x) {
            const auto model = model_from_text(model_text);
            std::vector<double> out;
            out.reserve(x.size());
            for (const auto& row : x) out.push_back(predict(model, row));
            return out;
        },
        py::arg("model_text"), py::arg("x"));

    m.def(
        "feature_importance", [](const std::string& model_text) { return feature_importance(model_from_text(model_text)); },
        py::arg("model_text"));

    m.def(
        "extract_rules",
        [](const std::string& model_text) {
            std::vector<std::string> out;
            for (const auto& r : extract_rules(model_from_text(model_text))) out.push_back(r.text);
            return out;
        },
        py::arg("model_text"));

    m.def(
        "nested_cv",
        [](const std::vector<std::vector<double>>& x, const std::vector<int>& y, const std::string& config,
           std::vector<std::string> kinds) {
            const auto c = parse_config(config);
            std::vector<LabeledExample> data;
            for (std::size_t i = 0; i < x.size(); ++i) data.push_back({std::to_string(i), x[i], y.at(i)});
            std::vector<ModelKind> parsed;
            for (const auto& k : kinds) parsed.push_back(model_kind_from_string(k));
            const auto cols = x.empty() ? 0 : x.front().size();
            return report_to_text(nested_cv(data, c.cv, parsed, FeatureSchema::anonymous(cols)));
        },
        py::arg("x"), py::arg("y"), py::arg("config") = "",
        py::arg("kinds") = std::vector<std::string>{"LogisticL1", "DecisionTree", "LogitBoost", "Ensemble"},
        "Repeated nested cross-validation; returns the report text.");

    m.def(
        "route",
        [](const std::string& network_text, const std::string& orders_text, const std::string& model_text,
           double threshold, bool trivial_bypass, bool with_ground_truth, const std::string& config) {
            const auto c = parse_config(config);
            const NetworkIndex index(network_from_text(network_text));
            RouterConfig rc = c.router;
            rc.threshold = threshold;
            rc.trivial_bypass = trivial_bypass;
            rc.validate();
            const auto result = simulate_stream(orders_from_text(orders_text), index, model_from_text(model_text), rc,
                                                c.optimizer, with_ground_truth);
            return py::make_tuple(outcomes_to_text(result.outcomes), summary_to_text(result.summary));
        },
        py::arg("network_text"), py::arg("orders_text"), py::arg("model_text"), py::arg("threshold") = 0.97,
        py::arg("trivial_bypass") = true, py::arg("with_ground_truth") = true, py::arg("config") = "",
        "Route an order stream; returns (outcomes_text, summary_text).");

    m.def(
        "run_pipeline",
        [](const std::filesystem::path& out_dir, const std::string& config, std::size_t threads) {
            CommandContext ctx;
            ctx.config = parse_config(config);
            ctx.out_dir = out_dir;
            ctx.threads = threads;
            py::gil_scoped_release release;
            cmd_pipeline(ctx);
        },
        py::arg("out_dir"), py::arg("config") = "", py::arg("threads") = 1,
        "Run generate, label, featurize, train, evaluate, route and report into out_dir.");
}
