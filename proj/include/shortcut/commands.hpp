#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "shortcut/config.hpp"
#include "shortcut/evaluation.hpp"
#include "shortcut/router.hpp"

namespace shortcut {

// Shared by every command. Inputs default to the run directory's file names
// from the config; the optional overrides point elsewhere.
struct CommandContext {
    RunConfig config;
    std::filesystem::path out_dir = ".";
    std::size_t threads = 1;
    std::ostream* log = nullptr;  // progress lines; null for quiet

    std::optional<std::filesystem::path> network;
    std::optional<std::filesystem::path> orders;
    std::optional<std::filesystem::path> labels;
    std::optional<std::filesystem::path> features;
    std::optional<std::filesystem::path> model;

    std::filesystem::path network_path() const;
    std::filesystem::path orders_path() const;
    std::filesystem::path labels_path() const;
    std::filesystem::path features_path() const;
    std::filesystem::path models_dir() const;
    std::filesystem::path eval_dir() const;
    std::filesystem::path route_dir() const;
    std::filesystem::path model_path() const;
};

void cmd_generate(const CommandContext& ctx);
PartitionSummary cmd_label(const CommandContext& ctx);
void cmd_featurize(const CommandContext& ctx);
std::vector<SplitModel> cmd_train(const CommandContext& ctx);
EvalReport cmd_evaluate(const CommandContext& ctx);
StreamSummary cmd_route(const CommandContext& ctx);
std::string cmd_report(const CommandContext& ctx);
// generate, label, featurize, train, evaluate, route, report.
void cmd_pipeline(const CommandContext& ctx);

// Multi-item examples from aligned features and labels, judged by the
// num_lines and total_quantity features.
std::vector<LabeledExample> multi_item_examples(const std::vector<FeatureVector>& features,
                                                const std::vector<SplitLabel>& labels,
                                                SingleItemCriterion criterion);

} // namespace shortcut
