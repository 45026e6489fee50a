#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "shortcut/evaluation.hpp"
#include "shortcut/generator.hpp"
#include "shortcut/models.hpp"
#include "shortcut/optimizer.hpp"
#include "shortcut/router.hpp"

namespace shortcut {

// File names inside a run directory.
struct RunPaths {
    std::string network = "network.csv";
    std::string orders = "orders.csv";
    std::string labels = "labels.csv";
    std::string partition = "partition.json";
    std::string features = "features.csv";
    std::string models_dir = "models";
    std::string eval_dir = "eval";
    std::string route_dir = "route";
    std::string report = "report.txt";

    friend bool operator==(const RunPaths&, const RunPaths&) = default;
};

struct RunConfig {
    // Global seed; copied into the generator and cross-validation sections.
    std::uint64_t seed = 42;
    GeneratorConfig generator;
    OptimizerConfig optimizer;
    std::string feature_catalog_version{kCatalogVersion};
    CVConfig cv;
    std::vector<ModelKind> models{ModelKind::LogisticL1, ModelKind::DecisionTree, ModelKind::LogitBoost,
                                  ModelKind::Ensemble};
    RouterConfig router;
    bool route_with_ground_truth = true;
    SingleItemCriterion single_item = SingleItemCriterion::OneLineQtyOne;
    std::vector<std::string> binned_features{"total_quantity", "frac_sfs_eligible_lines", "num_candidate_nodes",
                                             "min_shipping_distance"};
    std::size_t n_bins = 10;
    RunPaths paths;

    void set_seed(std::uint64_t value);
    void validate() const;
};

// JSON body, optionally preceded by a "# format=run-config version=1" line.
// Missing keys keep their defaults; unknown keys are rejected.
RunConfig config_from_text(std::string_view text, const std::string& source = "<memory>");
std::string config_to_text(const RunConfig& config);
RunConfig load_config(const std::filesystem::path& path);

} // namespace shortcut
