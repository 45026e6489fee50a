#include <algorithm>
#include <charconv>
#include <numeric>

#include "model_internal.hpp"
#include "shortcut/models.hpp"

namespace shortcut {

std::string_view to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::LogisticL1: return "LogisticL1";
    case ModelKind::DecisionTree: return "DecisionTree";
    case ModelKind::LogitBoost: return "LogitBoost";
    case ModelKind::Ensemble: return "Ensemble";
    }
    return "Unknown";
}

ModelKind model_kind_from_string(std::string_view text) {
    for (auto kind : {ModelKind::LogisticL1, ModelKind::DecisionTree, ModelKind::LogitBoost, ModelKind::Ensemble})
        if (to_string(kind) == text) return kind;
    throw ModelError("UNKNOWN_MODEL_KIND", "unknown model kind '" + std::string(text) + "'");
}

FeatureSchema FeatureSchema::anonymous(std::size_t cols) {
    FeatureSchema schema;
    for (std::size_t j = 0; j < cols; ++j) schema.names.push_back("x" + std::to_string(j));
    schema.catalog_version = "anonymous";
    return schema;
}

SplitModel::SplitModel(Params params, std::vector<std::string> feature_names, std::string catalog_version,
                       Standardization standardization, std::map<std::string, double> hyperparameters,
                       std::map<std::string, std::string> metadata)
    : params_(std::move(params)), feature_names_(std::move(feature_names)),
      catalog_version_(std::move(catalog_version)), standardization_(std::move(standardization)),
      hyperparameters_(std::move(hyperparameters)), metadata_(std::move(metadata)) {}

ModelKind SplitModel::kind() const {
    switch (params_.index()) {
    case 0: return ModelKind::LogisticL1;
    case 1: return ModelKind::DecisionTree;
    case 2: return ModelKind::LogitBoost;
    default: return ModelKind::Ensemble;
    }
}

SplitModel train_ensemble(std::vector<SplitModel> members) {
    if (members.empty()) throw ModelError("EMPTY_ENSEMBLE", "an ensemble needs at least one member");
    const auto& first = members.front();
    for (const auto& m : members)
        if (m.catalog_version() != first.catalog_version() || m.feature_names() != first.feature_names())
            throw ModelError("CATALOG_MISMATCH", "ensemble members were trained on different feature catalogs");
    auto names = first.feature_names();
    auto version = first.catalog_version();
    auto standardization = first.standardization();
    std::map<std::string, double> hyper{{"members", static_cast<double>(members.size())}};
    return SplitModel(EnsembleParams{std::move(members)}, std::move(names), std::move(version),
                      std::move(standardization), std::move(hyper), {{"mixing", "unweighted mean"}});
}

namespace {

double boost_score(const BoostParams& params, std::span<const double> x, std::size_t n_stumps) {
    double f = params.base_score;
    const std::size_t count = std::min(n_stumps, params.stumps.size());
    for (std::size_t m = 0; m < count; ++m) {
        const auto& s = params.stumps[m];
        if (s.feature < 0)
            f += s.left_value;
        else
            f += x[static_cast<std::size_t>(s.feature)] < s.threshold ? s.left_value : s.right_value;
    }
    return f;
}

double raw_predict(const SplitModel& model, std::span<const double> x) {
    switch (model.kind()) {
    case ModelKind::LogisticL1: {
        const auto& params = model.logistic();
        const auto& s = model.standardization();
        double z = params.intercept;
        for (std::size_t j = 0; j < x.size(); ++j)
            if (params.weights[j] != 0.0) z += params.weights[j] * s.apply(j, x[j]);
        return detail::sigmoid(z);
    }
    case ModelKind::DecisionTree: {
        const auto& nodes = model.tree().nodes;
        std::size_t id = 0;
        while (!nodes[id].is_leaf())
            id = static_cast<std::size_t>(x[static_cast<std::size_t>(nodes[id].feature)] < nodes[id].threshold
                                              ? nodes[id].left
                                              : nodes[id].right);
        return nodes[id].probability;
    }
    case ModelKind::LogitBoost:
        return detail::sigmoid(boost_score(model.boost(), x, model.boost().stumps.size()));
    case ModelKind::Ensemble: {
        const auto& members = model.ensemble().members;
        double total = 0.0;
        for (const auto& m : members) total += predict(m, x);
        return total / static_cast<double>(members.size());
    }
    }
    return 0.5;
}

} // namespace

double predict(const SplitModel& model, std::span<const double> x) {
    if (x.size() != model.feature_names().size())
        throw ModelError("CATALOG_MISMATCH", "feature vector has " + std::to_string(x.size()) +
                                                 " values; model expects " +
                                                 std::to_string(model.feature_names().size()));
    return detail::clamp_probability(raw_predict(model, x));
}

double predict_boost_prefix(const SplitModel& model, std::span<const double> x, std::size_t n_stumps) {
    return detail::clamp_probability(detail::sigmoid(boost_score(model.boost(), x, n_stumps)));
}

std::vector<double> predict_all(const SplitModel& model, const Dataset& data) {
    std::vector<double> out(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) out[i] = predict(model, data.row(i));
    return out;
}

namespace {

std::vector<double> raw_importance(const SplitModel& model) {
    const std::size_t p = model.feature_names().size();
    std::vector<double> imp(p, 0.0);
    switch (model.kind()) {
    case ModelKind::LogisticL1:
        for (std::size_t j = 0; j < p; ++j) imp[j] = std::abs(model.logistic().weights[j]);
        break;
    case ModelKind::DecisionTree:
        for (const auto& node : model.tree().nodes)
            if (!node.is_leaf()) imp[static_cast<std::size_t>(node.feature)] += node.impurity_decrease;
        break;
    case ModelKind::LogitBoost:
        for (const auto& s : model.boost().stumps)
            if (s.feature >= 0) imp[static_cast<std::size_t>(s.feature)] += std::max(0.0, s.gain);
        break;
    case ModelKind::Ensemble: {
        const auto& members = model.ensemble().members;
        for (const auto& m : members) {
            const auto member = raw_importance(m);
            const double total = std::accumulate(member.begin(), member.end(), 0.0);
            if (total > 0.0)
                for (std::size_t j = 0; j < p; ++j) imp[j] += member[j] / total;
        }
        for (auto& v : imp) v /= static_cast<double>(members.size());
        break;
    }
    }
    const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (total > 0.0)
        for (auto& v : imp) v /= total;
    return imp;
}

std::string format_number(double value) {
    char buffer[64];
    auto result = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 6);
    return std::string(buffer, result.ptr);
}

} // namespace

std::vector<std::pair<std::string, double>> feature_importance(const SplitModel& model) {
    const auto imp = raw_importance(model);
    std::vector<std::size_t> order(imp.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return imp[a] > imp[b]; });
    std::vector<std::pair<std::string, double>> out;
    for (auto j : order) out.emplace_back(model.feature_names()[j], imp[j]);
    return out;
}

std::vector<Rule> extract_rules(const SplitModel& model) {
    if (model.kind() != ModelKind::DecisionTree)
        throw ModelError("WRONG_MODEL_KIND", "rules can only be extracted from a DecisionTree model");
    const auto& nodes = model.tree().nodes;
    const auto& names = model.feature_names();
    std::vector<Rule> rules;
    std::vector<std::string> path;

    auto walk = [&](auto&& self, int id) -> void {
        const auto& node = nodes[static_cast<std::size_t>(id)];
        if (node.is_leaf()) {
            Rule rule;
            rule.conditions = path;
            rule.probability = node.probability;
            rule.support = node.count;
            std::string text = "if ";
            if (path.empty()) text += "true";
            for (std::size_t k = 0; k < path.size(); ++k) text += (k ? " and " : "") + path[k];
            text += " then p_split=" + format_number(node.probability) + " (support=" + std::to_string(node.count) + ")";
            rule.text = std::move(text);
            rules.push_back(std::move(rule));
            return;
        }
        const auto& name = names[static_cast<std::size_t>(node.feature)];
        path.push_back(name + " < " + format_number(node.threshold));
        self(self, node.left);
        path.back() = name + " >= " + format_number(node.threshold);
        self(self, node.right);
        path.pop_back();
    };
    if (!nodes.empty()) walk(walk, 0);
    return rules;
}

} // namespace shortcut
