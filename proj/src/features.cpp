#include "shortcut/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shortcut/parallel.hpp"

namespace shortcut {

std::string_view to_string(FeatureLevel level) {
    switch (level) {
    case FeatureLevel::Order: return "order";
    case FeatureLevel::ItemAgg: return "item-agg";
    case FeatureLevel::NodeAgg: return "node-agg";
    case FeatureLevel::ItemNodeAgg: return "item-node-agg";
    }
    return "unknown";
}

std::optional<std::size_t> FeatureCatalog::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < features.size(); ++i)
        if (features[i].name == name) return i;
    return std::nullopt;
}

std::vector<std::string> FeatureCatalog::names() const {
    std::vector<std::string> out;
    for (const auto& f : features) out.push_back(f.name);
    return out;
}

namespace {

enum Feature : std::size_t {
    kNumLines,
    kTotalQuantity,
    kNumDistinctItems,
    kTotalWeight,
    kTotalPrice,
    kFracSfsLines,
    kFracSfsQuantity,
    kMinUnitWeight,
    kMaxUnitWeight,
    kMeanUnitWeight,
    kMinUnitPrice,
    kMaxUnitPrice,
    kMeanUnitPrice,
    kMaxLineQuantity,
    kNumCandidates,
    kFracStoreCandidates,
    kMinDistance,
    kMeanDistance,
    kFracFullInventory,
    kMaxPossibleSavings,
    kMaxPerItemSavingsFullInv,
    kBestNoSplitCost,
    kBestNoSplitCostPerItem,
    kSumMinPerItemCost,
    kSplitSavingBound,
    kNoSplitFeasible,
    kFeatureCount
};

FeatureCatalog build_catalog() {
    using L = FeatureLevel;
    FeatureCatalog c;
    c.version = std::string(kCatalogVersion);
    c.features = {
        {"num_lines", L::Order, "number of order lines"},
        {"total_quantity", L::Order, "total units ordered"},
        {"num_distinct_items", L::Order, "distinct item ids in the order"},
        {"total_weight", L::Order, "sum of quantity x unit weight"},
        {"total_price", L::Order, "sum of quantity x unit price"},
        {"frac_sfs_eligible_lines", L::Order, "share of lines whose item may ship from store"},
        {"frac_sfs_eligible_quantity", L::Order, "share of units whose item may ship from store"},
        {"min_unit_weight", L::ItemAgg, "lightest item unit weight"},
        {"max_unit_weight", L::ItemAgg, "heaviest item unit weight"},
        {"mean_unit_weight", L::ItemAgg, "mean unit weight over lines"},
        {"min_unit_price", L::ItemAgg, "cheapest item unit price"},
        {"max_unit_price", L::ItemAgg, "most expensive item unit price"},
        {"mean_unit_price", L::ItemAgg, "mean unit price over lines"},
        {"max_line_quantity", L::ItemAgg, "largest single-line quantity"},
        {"num_candidate_nodes", L::NodeAgg, "size of the candidate node set"},
        {"frac_store_candidates", L::NodeAgg, "share of candidates that are stores"},
        {"min_shipping_distance", L::NodeAgg, "closest candidate distance to the destination"},
        {"mean_shipping_distance", L::NodeAgg, "mean candidate distance to the destination"},
        {"frac_nodes_full_inventory", L::ItemNodeAgg, "share of candidates holding every line in full"},
        {"max_possible_clearance_savings", L::ItemNodeAgg,
         "sum over lines of quantity x best per-unit clearance saving among candidates"},
        {"max_per_item_clearance_savings_full_inv", L::ItemNodeAgg,
         "best per-line clearance saving restricted to candidates holding the full order"},
        {"best_no_split_cost", L::ItemNodeAgg, "lowest single-node objective; sentinel when none is feasible"},
        {"best_no_split_cost_per_item", L::ItemNodeAgg, "best_no_split_cost divided by num_lines"},
        {"sum_min_per_item_cost", L::ItemNodeAgg,
         "sum over lines of the cheapest single shipment of that line, fixed cost included"},
        {"split_saving_bound", L::ItemNodeAgg, "best_no_split_cost minus sum_min_per_item_cost"},
        {"no_split_feasible", L::ItemNodeAgg, "1 when some candidate holds the full order"},
    };
    return c;
}

} // namespace

const FeatureCatalog& canonical_catalog() {
    static const FeatureCatalog catalog = build_catalog();
    return catalog;
}

FeatureVector extract_features(const Order& order, const NetworkIndex& network, const CandidateSet& candidates,
                               const OptimizerConfig& config) {
    const auto items = resolve_order_items(order, network);
    const std::size_t lines = items.size();
    const double w = config.w_clearance;
    std::vector<double> v(kFeatureCount, 0.0);

    double total_weight = 0.0;
    double total_quantity = 0.0;
    double sfs_lines = 0.0;
    double sfs_quantity = 0.0;
    double min_w = std::numeric_limits<double>::infinity(), max_w = 0.0, sum_w = 0.0;
    double min_p = std::numeric_limits<double>::infinity(), max_p = 0.0, sum_p = 0.0;
    double total_price = 0.0;
    int max_qty = 0;
    for (std::size_t l = 0; l < lines; ++l) {
        const auto& item = network.item(items[l]);
        const int q = order.lines[l].quantity;
        total_quantity += q;
        total_weight += item.weight * q;
        total_price += item.price * q;
        if (item.sfs_eligible) {
            sfs_lines += 1.0;
            sfs_quantity += q;
        }
        min_w = std::min(min_w, item.weight);
        max_w = std::max(max_w, item.weight);
        sum_w += item.weight;
        min_p = std::min(min_p, item.price);
        max_p = std::max(max_p, item.price);
        sum_p += item.price;
        max_qty = std::max(max_qty, q);
    }
    const double n_lines = static_cast<double>(lines);
    v[kNumLines] = n_lines;
    v[kTotalQuantity] = total_quantity;
    v[kNumDistinctItems] = n_lines;
    v[kTotalWeight] = total_weight;
    v[kTotalPrice] = total_price;
    v[kFracSfsLines] = sfs_lines / n_lines;
    v[kFracSfsQuantity] = sfs_quantity / total_quantity;
    v[kMinUnitWeight] = min_w;
    v[kMaxUnitWeight] = max_w;
    v[kMeanUnitWeight] = sum_w / n_lines;
    v[kMinUnitPrice] = min_p;
    v[kMaxUnitPrice] = max_p;
    v[kMeanUnitPrice] = sum_p / n_lines;
    v[kMaxLineQuantity] = max_qty;

    const auto& cands = candidates.node_indices;
    const double n_cands = static_cast<double>(cands.size());
    v[kNumCandidates] = n_cands;

    double stores = 0.0, min_d = std::numeric_limits<double>::infinity(), sum_d = 0.0;
    double full_count = 0.0;
    double best_full = std::numeric_limits<double>::infinity();
    double worst_any = -std::numeric_limits<double>::infinity();
    double best_full_savings = 0.0;
    std::vector<double> best_saving(lines, 0.0);
    std::vector<double> best_line_cost(lines, std::numeric_limits<double>::infinity());

    for (auto n : cands) {
        const Node& node = network.node(n);
        const double dist = shipping_distance(node, order.destination);
        if (node.kind == NodeKind::Store) stores += 1.0;
        min_d = std::min(min_d, dist);
        sum_d += dist;

        bool full = true;
        double savings = 0.0;
        for (std::size_t l = 0; l < lines; ++l) {
            const int q = order.lines[l].quantity;
            const auto inv = network.inventory(items[l], n);
            const double s = network.saving(items[l], n);
            savings += s * q;
            if (inv < q) full = false;
            if (inv > 0) {
                best_saving[l] = std::max(best_saving[l], s);
                const double line_weight = network.item(items[l]).weight * q;
                const double line_cost = shipment_cost(node, order.destination, line_weight) - w * s * q;
                best_line_cost[l] = std::min(best_line_cost[l], line_cost);
            }
        }
        const double single = shipment_cost(node, order.destination, total_weight) - w * savings;
        worst_any = std::max(worst_any, single);
        if (full) {
            full_count += 1.0;
            best_full = std::min(best_full, single);
            best_full_savings = std::max(best_full_savings, savings / n_lines);
        }
    }
    if (!cands.empty()) {
        v[kFracStoreCandidates] = stores / n_cands;
        v[kMinDistance] = min_d;
        v[kMeanDistance] = sum_d / n_cands;
        v[kFracFullInventory] = full_count / n_cands;
    }
    double max_possible = 0.0;
    double sum_min_line = 0.0;
    for (std::size_t l = 0; l < lines; ++l) {
        max_possible += best_saving[l] * order.lines[l].quantity;
        if (std::isfinite(best_line_cost[l])) sum_min_line += best_line_cost[l];
    }
    v[kMaxPossibleSavings] = max_possible;
    v[kMaxPerItemSavingsFullInv] = best_full_savings;
    const bool feasible = full_count > 0.0;
    const double best = feasible ? best_full : (cands.empty() ? 0.0 : 2.0 * std::max(worst_any, 0.0));
    v[kBestNoSplitCost] = best;
    v[kBestNoSplitCostPerItem] = best / n_lines;
    v[kSumMinPerItemCost] = sum_min_line;
    v[kSplitSavingBound] = best - sum_min_line;
    v[kNoSplitFeasible] = feasible ? 1.0 : 0.0;

    return {order.order_id, std::move(v)};
}

std::vector<FeatureVector> extract_all(const std::vector<Order>& orders, const NetworkIndex& network,
                                       const OptimizerConfig& config, std::size_t threads) {
    std::vector<FeatureVector> out(orders.size());
    parallel_for(orders.size(), threads, [&](std::size_t i) {
        out[i] = extract_features(orders[i], network, candidate_nodes(orders[i], network, config), config);
    });
    return out;
}

std::vector<BinRate> binned_split_rates(const std::vector<FeatureVector>& features,
                                        const std::vector<SplitLabel>& labels, std::string_view feature_name,
                                        std::size_t n_bins, const FeatureCatalog& catalog) {
    const auto column = catalog.index_of(feature_name);
    if (!column) throw Error("UNKNOWN_FEATURE", "feature '" + std::string(feature_name) + "' is not in the catalog");
    if (n_bins < 1) throw ConfigError("n_bins must be >= 1");
    if (features.size() != labels.size()) throw ShapeError("features and labels differ in length");
    for (std::size_t i = 0; i < features.size(); ++i)
        if (features[i].order_id != labels[i].order_id)
            throw ShapeError("features and labels are not aligned at row " + std::to_string(i));

    std::vector<BinRate> bins(n_bins);
    if (features.empty()) return bins;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& f : features) {
        lo = std::min(lo, f.values.at(*column));
        hi = std::max(hi, f.values.at(*column));
    }
    const double width = (hi - lo) / static_cast<double>(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
        bins[b].lower = lo + width * static_cast<double>(b);
        bins[b].upper = b + 1 == n_bins ? hi : lo + width * static_cast<double>(b + 1);
    }
    std::vector<std::size_t> splits(n_bins, 0);
    for (std::size_t i = 0; i < features.size(); ++i) {
        const double x = features[i].values[*column];
        std::size_t b = width > 0.0 ? static_cast<std::size_t>((x - lo) / width) : 0;
        b = std::min(b, n_bins - 1);
        ++bins[b].count;
        splits[b] += labels[i].y ? 1 : 0;
    }
    for (std::size_t b = 0; b < n_bins; ++b)
        if (bins[b].count > 0)
            bins[b].split_fraction = static_cast<double>(splits[b]) / static_cast<double>(bins[b].count);
    return bins;
}

} // namespace shortcut
