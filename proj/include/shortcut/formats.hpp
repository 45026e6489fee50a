#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "shortcut/domain.hpp"
#include "shortcut/evaluation.hpp"
#include "shortcut/features.hpp"
#include "shortcut/router.hpp"

namespace shortcut {

// Every text format starts with "# format=<name> version=<n>" followed by a
// column header row. Readers report the failing line number.

// One file for the whole network; the `record` column says which fields are
// populated: item, node, or stock (inventory and optional clearance saving).
std::string network_to_text(const FulfillmentNetwork& network);
FulfillmentNetwork network_from_text(std::string_view text, const std::string& source = "<memory>");

// order_id,dest_x,dest_y,lines where lines is "item:qty;item:qty".
std::string orders_to_text(const std::vector<Order>& orders);
std::vector<Order> orders_from_text(std::string_view text, const std::string& source = "<memory>");

std::string labels_to_text(const std::vector<SplitLabel>& labels);
std::vector<SplitLabel> labels_from_text(std::string_view text, const std::string& source = "<memory>");

// The header carries the catalog version; columns must match the catalog.
std::string features_to_text(const std::vector<FeatureVector>& features,
                             const FeatureCatalog& catalog = canonical_catalog());
std::vector<FeatureVector> features_from_text(std::string_view text, const std::string& source = "<memory>",
                                              const FeatureCatalog& catalog = canonical_catalog());

// allocations column: "item@node:qty;..."
std::string outcomes_to_text(const std::vector<RoutingOutcome>& outcomes);
std::vector<RoutingOutcome> outcomes_from_text(std::string_view text, const std::string& source = "<memory>");

// Wall time is left out so the file is reproducible.
std::string summary_to_text(const StreamSummary& summary);
StreamSummary summary_from_text(std::string_view text, const std::string& source = "<memory>");

std::string bins_to_text(std::string_view feature, const std::vector<BinRate>& bins);
std::vector<BinRate> bins_from_text(std::string_view text, const std::string& source = "<memory>");

std::string curves_to_text(const EvalReport& report);
std::string importance_to_text(const EvalReport& report);

std::string partition_to_text(const PartitionSummary& summary, SingleItemCriterion criterion);
PartitionSummary partition_from_text(std::string_view text, const std::string& source = "<memory>");

// Path-based readers: MISSING_FILE when absent, PARSE with line numbers.
FulfillmentNetwork read_network(const std::filesystem::path& path);
std::vector<Order> read_orders(const std::filesystem::path& path);
std::vector<SplitLabel> read_labels(const std::filesystem::path& path);
std::vector<FeatureVector> read_features(const std::filesystem::path& path);

} // namespace shortcut
