#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shortcut/domain.hpp"

namespace shortcut {

struct OptimizerConfig {
    double w_clearance = 1.0;
    std::size_t candidate_prefilter_k = 30;
    // 0 means "number of order lines".
    std::size_t max_split_nodes = 0;

    void validate() const;
    std::size_t split_limit(const Order& order) const;
};

struct CandidateSet {
    std::string order_id;
    std::vector<std::string> node_ids;
    std::vector<std::size_t> node_indices;  // parallel to node_ids
};

// Work counter: one unit per candidate-node cost evaluation (single-node scan)
// or per subset visited by the branch-and-bound search.
struct SolveStats {
    std::uint64_t cost_evaluations = 0;
};

CandidateSet candidate_nodes(const Order& order, const NetworkIndex& network, const OptimizerConfig& config);

// Exact minimizer of shipping - w_clearance * savings over assignments that use
// at most split_limit distinct candidate nodes. Among equal objectives, fewer
// nodes win, then the lexicographically smallest sorted node_id sequence.
Assignment solve_full(const Order& order, const NetworkIndex& network, const OptimizerConfig& config,
                      SolveStats* stats = nullptr);
Assignment solve_full(const Order& order, const NetworkIndex& network, const OptimizerConfig& config,
                      const CandidateSet& candidates, SolveStats* stats = nullptr);

// Linear scan for the best single node holding the full order; nullopt when
// no candidate can ship everything alone.
std::optional<Assignment> solve_no_split(const Order& order, const NetworkIndex& network,
                                         const OptimizerConfig& config, SolveStats* stats = nullptr);
std::optional<Assignment> solve_no_split(const Order& order, const NetworkIndex& network,
                                         const OptimizerConfig& config, const CandidateSet& candidates,
                                         SolveStats* stats = nullptr);

SplitLabel make_label(const Order& order, const Assignment& assignment);

std::vector<SplitLabel> label_orders(const std::vector<Order>& orders, const NetworkIndex& network,
                                     const OptimizerConfig& config, std::size_t threads = 1);

} // namespace shortcut
