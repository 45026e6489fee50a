#include "shortcut/model_io.hpp"

#include <algorithm>

#include "json.hpp"

#include "shortcut/io.hpp"

namespace shortcut {

using nlohmann::ordered_json;

namespace {

ordered_json encode(const SplitModel& model) {
    ordered_json j;
    j["kind"] = std::string(to_string(model.kind()));
    j["catalog_version"] = model.catalog_version();
    j["feature_names"] = model.feature_names();
    j["hyperparameters"] = model.hyperparameters();
    j["metadata"] = model.metadata();
    j["standardization"] = {{"mean", model.standardization().mean}, {"scale", model.standardization().scale}};

    ordered_json params;
    switch (model.kind()) {
    case ModelKind::LogisticL1:
        params["weights"] = model.logistic().weights;
        params["intercept"] = model.logistic().intercept;
        params["iterations"] = model.logistic().iterations;
        break;
    case ModelKind::DecisionTree: {
        params["nodes"] = ordered_json::array();
        for (const auto& n : model.tree().nodes)
            params["nodes"].push_back({{"feature", n.feature},
                                       {"threshold", n.threshold},
                                       {"left", n.left},
                                       {"right", n.right},
                                       {"probability", n.probability},
                                       {"count", n.count},
                                       {"positives", n.positives},
                                       {"impurity_decrease", n.impurity_decrease}});
        break;
    }
    case ModelKind::LogitBoost: {
        params["base_score"] = model.boost().base_score;
        params["stumps"] = ordered_json::array();
        for (const auto& s : model.boost().stumps)
            params["stumps"].push_back({{"feature", s.feature},
                                        {"threshold", s.threshold},
                                        {"left_value", s.left_value},
                                        {"right_value", s.right_value},
                                        {"gain", s.gain}});
        break;
    }
    case ModelKind::Ensemble:
        params["members"] = ordered_json::array();
        for (const auto& m : model.ensemble().members) params["members"].push_back(encode(m));
        break;
    }
    j["parameters"] = std::move(params);
    return j;
}

SplitModel decode(const ordered_json& j) {
    const auto kind = model_kind_from_string(j.at("kind").get<std::string>());
    Standardization standardization;
    standardization.mean = j.at("standardization").at("mean").get<std::vector<double>>();
    standardization.scale = j.at("standardization").at("scale").get<std::vector<double>>();
    const auto& p = j.at("parameters");

    SplitModel::Params params;
    switch (kind) {
    case ModelKind::LogisticL1: {
        LogisticParams lp;
        lp.weights = p.at("weights").get<std::vector<double>>();
        lp.intercept = p.at("intercept").get<double>();
        lp.iterations = p.at("iterations").get<std::size_t>();
        params = std::move(lp);
        break;
    }
    case ModelKind::DecisionTree: {
        TreeParams tp;
        for (const auto& n : p.at("nodes")) {
            TreeNode node;
            node.feature = n.at("feature").get<int>();
            node.threshold = n.at("threshold").get<double>();
            node.left = n.at("left").get<int>();
            node.right = n.at("right").get<int>();
            node.probability = n.at("probability").get<double>();
            node.count = n.at("count").get<std::int64_t>();
            node.positives = n.at("positives").get<std::int64_t>();
            node.impurity_decrease = n.at("impurity_decrease").get<double>();
            tp.nodes.push_back(node);
        }
        params = std::move(tp);
        break;
    }
    case ModelKind::LogitBoost: {
        BoostParams bp;
        bp.base_score = p.at("base_score").get<double>();
        for (const auto& s : p.at("stumps")) {
            Stump stump;
            stump.feature = s.at("feature").get<int>();
            stump.threshold = s.at("threshold").get<double>();
            stump.left_value = s.at("left_value").get<double>();
            stump.right_value = s.at("right_value").get<double>();
            stump.gain = s.at("gain").get<double>();
            bp.stumps.push_back(stump);
        }
        params = std::move(bp);
        break;
    }
    case ModelKind::Ensemble: {
        EnsembleParams ep;
        for (const auto& m : p.at("members")) ep.members.push_back(decode(m));
        params = std::move(ep);
        break;
    }
    }
    return SplitModel(std::move(params), j.at("feature_names").get<std::vector<std::string>>(),
                      j.at("catalog_version").get<std::string>(), std::move(standardization),
                      j.at("hyperparameters").get<std::map<std::string, double>>(),
                      j.at("metadata").get<std::map<std::string, std::string>>());
}

void check_structure(const SplitModel& model, const std::string& source) {
    const std::size_t p = model.feature_names().size();
    auto fail = [&](const std::string& what) { throw ParseError(source, 2, "inconsistent model: " + what); };
    if (model.standardization().mean.size() != p || model.standardization().scale.size() != p)
        fail("standardization length");
    switch (model.kind()) {
    case ModelKind::LogisticL1:
        if (model.logistic().weights.size() != p) fail("weight count");
        break;
    case ModelKind::DecisionTree: {
        const auto& nodes = model.tree().nodes;
        if (nodes.empty()) fail("empty tree");
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto& n = nodes[i];
            if (n.is_leaf()) continue;
            if (static_cast<std::size_t>(n.feature) >= p) fail("split feature out of range");
            // Children always follow their parent in preorder.
            if (n.left <= static_cast<int>(i) || n.right <= static_cast<int>(i) ||
                n.left >= static_cast<int>(nodes.size()) || n.right >= static_cast<int>(nodes.size()))
                fail("child index out of range");
        }
        break;
    }
    case ModelKind::LogitBoost:
        for (const auto& s : model.boost().stumps)
            if (s.feature >= static_cast<int>(p)) fail("stump feature out of range");
        break;
    case ModelKind::Ensemble:
        if (model.ensemble().members.empty()) fail("ensemble without members");
        for (const auto& m : model.ensemble().members) check_structure(m, source);
        break;
    }
}

} // namespace

std::string model_to_text(const SplitModel& model) {
    io::FileHeader header{"model", kModelFormatVersion,
                          {{"catalog", model.catalog_version()}, {"kind", std::string(to_string(model.kind()))}}};
    return io::header_line(header) + "\n" + encode(model).dump(1) + "\n";
}

SplitModel model_from_text(std::string_view text, const std::string& source) {
    const auto newline = text.find('\n');
    if (newline == std::string_view::npos) throw ParseError(source, 1, "truncated model file");
    const auto header = io::expect_header(text.substr(0, newline), source, "model", kModelFormatVersion);
    const auto body = text.substr(newline + 1);
    ordered_json j;
    try {
        j = ordered_json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        const auto offset = std::min<std::size_t>(e.byte, body.size());
        const auto line = 2 + static_cast<std::size_t>(std::count(body.begin(), body.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
        throw ParseError(source, line, "malformed model body");
    }
    try {
        SplitModel model = decode(j);
        if (auto it = header.attributes.find("catalog"); it != header.attributes.end() && it->second != model.catalog_version())
            throw VersionError(source + ": header catalog does not match the model body");
        check_structure(model, source);
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source, 2, std::string("model body is missing fields: ") + e.what());
    }
}

void save_model(const SplitModel& model, const std::filesystem::path& path) {
    io::write_file_atomic(path, model_to_text(model));
}

SplitModel load_model(const std::filesystem::path& path) {
    return model_from_text(io::read_file(path), path.string());
}

} // namespace shortcut
