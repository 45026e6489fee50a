#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shortcut/domain.hpp"
#include "shortcut/optimizer.hpp"

namespace shortcut {

enum class FeatureLevel { Order, ItemAgg, NodeAgg, ItemNodeAgg };

std::string_view to_string(FeatureLevel level);

struct FeatureDescriptor {
    std::string name;
    FeatureLevel level;
    std::string description;
};

struct FeatureCatalog {
    std::string version;
    std::vector<FeatureDescriptor> features;

    std::size_t size() const { return features.size(); }
    std::optional<std::size_t> index_of(std::string_view name) const;
    std::vector<std::string> names() const;
};

inline constexpr std::string_view kCatalogVersion = "order-features-v1";

const FeatureCatalog& canonical_catalog();

struct FeatureVector {
    std::string order_id;
    std::vector<double> values;  // positional, catalog order

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// Pre-decision features; uses the network, the candidate set and one pass of
// single-node cost evaluations, never the full solver.
FeatureVector extract_features(const Order& order, const NetworkIndex& network, const CandidateSet& candidates,
                               const OptimizerConfig& config = {});

std::vector<FeatureVector> extract_all(const std::vector<Order>& orders, const NetworkIndex& network,
                                       const OptimizerConfig& config, std::size_t threads = 1);

struct BinRate {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
    std::optional<double> split_fraction;  // absent for empty bins
};

// Equal-width bins over the observed range of one feature, with the empirical
// split rate per bin. The last bin is closed on the right.
std::vector<BinRate> binned_split_rates(const std::vector<FeatureVector>& features,
                                        const std::vector<SplitLabel>& labels, std::string_view feature_name,
                                        std::size_t n_bins, const FeatureCatalog& catalog = canonical_catalog());

} // namespace shortcut
