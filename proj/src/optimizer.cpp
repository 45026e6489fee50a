#include "shortcut/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "shortcut/parallel.hpp"

namespace shortcut {

void OptimizerConfig::validate() const {
    if (!(w_clearance >= 0.0) || !std::isfinite(w_clearance))
        throw ConfigError("optimizer.w_clearance must be a finite value >= 0");
    if (candidate_prefilter_k < 1) throw ConfigError("optimizer.candidate_prefilter_k must be >= 1");
}

std::size_t OptimizerConfig::split_limit(const Order& order) const {
    return max_split_nodes == 0 ? std::max<std::size_t>(1, order.lines.size()) : max_split_nodes;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-order precomputation over the candidate list.
struct Instance {
    const Order* order = nullptr;
    const NetworkIndex* network = nullptr;
    double w = 1.0;
    std::size_t lines = 0;
    std::size_t cands = 0;
    std::vector<int> qty;                    // [line]
    std::vector<double> weight;              // [line]
    std::vector<std::size_t> node;           // [cand] network node index
    std::vector<std::size_t> rank;           // [cand] node_id order
    std::vector<double> fixed;               // [cand]
    std::vector<double> rate_dist;           // [cand] unit_rate * distance
    std::vector<std::int64_t> inv;           // [line * cands + cand]
    std::vector<double> saving;              // [line * cands + cand]
    std::vector<double> unit_cost;           // [line * cands + cand]
    std::vector<std::vector<std::size_t>> by_cost;  // per line, cands by (unit_cost, rank)

    Instance(const Order& o, const NetworkIndex& net, double w_clearance, const std::vector<std::size_t>& items,
             const std::vector<std::size_t>& candidate_nodes)
        : order(&o), network(&net), w(w_clearance), lines(o.lines.size()), cands(candidate_nodes.size()) {
        for (std::size_t l = 0; l < lines; ++l) {
            qty.push_back(o.lines[l].quantity);
            weight.push_back(net.item(items[l]).weight);
        }
        for (auto n : candidate_nodes) {
            const Node& nd = net.node(n);
            node.push_back(n);
            rank.push_back(net.node_rank(n));
            fixed.push_back(nd.fixed_shipment_cost);
            rate_dist.push_back(nd.unit_rate * shipping_distance(nd, o.destination));
        }
        inv.resize(lines * cands);
        saving.resize(lines * cands);
        unit_cost.resize(lines * cands);
        by_cost.resize(lines);
        for (std::size_t l = 0; l < lines; ++l) {
            for (std::size_t c = 0; c < cands; ++c) {
                inv[l * cands + c] = net.inventory(items[l], node[c]);
                saving[l * cands + c] = net.saving(items[l], node[c]);
                unit_cost[l * cands + c] = rate_dist[c] * weight[l] - w * saving[l * cands + c];
            }
            auto& order_l = by_cost[l];
            order_l.resize(cands);
            std::iota(order_l.begin(), order_l.end(), std::size_t{0});
            std::sort(order_l.begin(), order_l.end(), [&](std::size_t a, std::size_t b) {
                const double ca = unit_cost[l * cands + a];
                const double cb = unit_cost[l * cands + b];
                if (ca != cb) return ca < cb;
                return rank[a] < rank[b];
            });
        }
    }
};

struct Piece {
    std::size_t line;
    std::size_t cand;
    int quantity;
};

// Objective accumulated exactly the way make_assignment does: pieces in
// (line, node_id) order, shipments summed in node_id order.
double canonical_objective(const Instance& in, std::vector<Piece>& pieces) {
    std::sort(pieces.begin(), pieces.end(), [&](const Piece& a, const Piece& b) {
        if (a.line != b.line) return a.line < b.line;
        return in.rank[a.cand] < in.rank[b.cand];
    });
    // Small linear map from cand to accumulated weight, kept in rank order.
    std::vector<std::pair<std::size_t, double>> node_weight;
    double savings = 0.0;
    for (const auto& p : pieces) {
        auto it = std::find_if(node_weight.begin(), node_weight.end(),
                               [&](const auto& e) { return e.first == p.cand; });
        if (it == node_weight.end()) {
            node_weight.emplace_back(p.cand, 0.0);
            it = std::prev(node_weight.end());
        }
        it->second += in.weight[p.line] * p.quantity;
        savings += in.saving[p.line * in.cands + p.cand] * p.quantity;
    }
    std::sort(node_weight.begin(), node_weight.end(),
              [&](const auto& a, const auto& b) { return in.rank[a.first] < in.rank[b.first]; });
    double shipping = 0.0;
    for (const auto& [cand, weight] : node_weight)
        shipping += shipment_cost(in.network->node(in.node[cand]), in.order->destination, weight);
    return shipping - in.w * savings;
}

Assignment to_assignment(const Instance& in, const std::vector<Piece>& pieces) {
    std::vector<Allocation> allocations;
    allocations.reserve(pieces.size());
    for (const auto& p : pieces)
        allocations.push_back({in.order->lines[p.line].item_id, in.network->node(in.node[p.cand]).node_id, p.quantity});
    return make_assignment(*in.order, *in.network, std::move(allocations), in.w);
}

struct Solution {
    double objective = kInf;
    std::vector<std::size_t> ranks;  // sorted ascending
    std::vector<Piece> pieces;

    bool valid() const { return !pieces.empty(); }
};

// Strict "a beats b" under the prefer-fewer-nodes, then smallest-id tie-break.
bool better(double obj_a, const std::vector<std::size_t>& ranks_a, const Solution& b) {
    if (!b.valid()) return true;
    if (obj_a != b.objective) return obj_a < b.objective;
    if (ranks_a.size() != b.ranks.size()) return ranks_a.size() < b.ranks.size();
    return ranks_a < b.ranks;
}

class BranchAndBound {
public:
    BranchAndBound(const Instance& in, std::size_t limit, Solution incumbent, std::uint64_t& evaluations)
        : in_(in), limit_(limit), best_(std::move(incumbent)), evaluations_(evaluations), in_set_(in.cands, 0),
          amortized_(in.lines * in.cands), by_amortized_(in.lines) {
        // Open nodes are charged their fixed cost spread over the most units
        // they could serve, which never exceeds what a solution pays.
        for (std::size_t c = 0; c < in.cands; ++c) {
            std::int64_t servable = 0;
            for (std::size_t l = 0; l < in.lines; ++l)
                servable += std::min<std::int64_t>(in.inv[l * in.cands + c], in.qty[l]);
            const double share = servable > 0 ? in.fixed[c] / static_cast<double>(servable) : 0.0;
            for (std::size_t l = 0; l < in.lines; ++l)
                amortized_[l * in.cands + c] = in.unit_cost[l * in.cands + c] + share;
        }
        for (std::size_t l = 0; l < in.lines; ++l) {
            auto& order_l = by_amortized_[l];
            order_l.resize(in.cands);
            std::iota(order_l.begin(), order_l.end(), std::size_t{0});
            std::sort(order_l.begin(), order_l.end(), [&](std::size_t a, std::size_t b) {
                const double ca = amortized_[l * in.cands + a];
                const double cb = amortized_[l * in.cands + b];
                if (ca != cb) return ca < cb;
                return in.rank[a] < in.rank[b];
            });
        }
    }

    Solution run() {
        std::vector<std::size_t> chosen;
        search(0, chosen);
        return std::move(best_);
    }

private:
    // Greedy fill over the chosen nodes only. Returns false when some line
    // stays short. `used` receives how many chosen nodes ship something.
    bool fill_chosen(std::vector<Piece>& pieces, std::size_t& used) const {
        bool feasible = true;
        std::vector<char> ships(in_.cands, 0);
        used = 0;
        for (std::size_t l = 0; l < in_.lines; ++l) {
            int remaining = in_.qty[l];
            for (auto c : in_.by_cost[l]) {
                if (remaining == 0) break;
                if (!in_set_[c]) continue;
                const auto avail = in_.inv[l * in_.cands + c];
                if (avail <= 0) continue;
                const int take = static_cast<int>(std::min<std::int64_t>(avail, remaining));
                remaining -= take;
                pieces.push_back({l, c, take});
                if (!ships[c]) ships[c] = 1, ++used;
            }
            if (remaining > 0) feasible = false;
        }
        return feasible;
    }

    // Lower bound on any solution in the subtree: chosen nodes at plain unit
    // cost, open nodes (index > last) at amortized cost, merged greedily.
    double subtree_bound(std::size_t last, bool can_grow) const {
        double total = fixed_sum_;
        for (std::size_t l = 0; l < in_.lines; ++l) {
            const auto& plain = in_.by_cost[l];
            const auto& amort = by_amortized_[l];
            std::size_t i = 0;
            std::size_t j = 0;
            int remaining = in_.qty[l];
            while (remaining > 0) {
                while (i < plain.size() && (!in_set_[plain[i]] || in_.inv[l * in_.cands + plain[i]] <= 0)) ++i;
                if (can_grow)
                    while (j < amort.size() && (amort[j] <= last || in_.inv[l * in_.cands + amort[j]] <= 0)) ++j;
                const bool has_plain = i < plain.size();
                const bool has_open = can_grow && j < amort.size();
                if (!has_plain && !has_open) return kInf;
                double cost;
                std::int64_t avail;
                if (has_plain && (!has_open || in_.unit_cost[l * in_.cands + plain[i]] <= amortized_[l * in_.cands + amort[j]])) {
                    cost = in_.unit_cost[l * in_.cands + plain[i]];
                    avail = in_.inv[l * in_.cands + plain[i]];
                    ++i;
                } else {
                    cost = amortized_[l * in_.cands + amort[j]];
                    avail = in_.inv[l * in_.cands + amort[j]];
                    ++j;
                }
                const int take = static_cast<int>(std::min<std::int64_t>(avail, remaining));
                remaining -= take;
                total += take * cost;
            }
        }
        return total;
    }

    void search(std::size_t start, std::vector<std::size_t>& chosen) {
        if (chosen.size() >= limit_) return;
        for (std::size_t j = start; j < in_.cands; ++j) {
            chosen.push_back(j);
            in_set_[j] = 1;
            fixed_sum_ += in_.fixed[j];
            ++evaluations_;
            visit(j, chosen);
            fixed_sum_ -= in_.fixed[j];
            in_set_[j] = 0;
            chosen.pop_back();
        }
    }

    void visit(std::size_t last, std::vector<std::size_t>& chosen) {
        std::vector<Piece> pieces;
        std::size_t used = 0;
        const bool feasible = fill_chosen(pieces, used);
        // A node idle under the greedy fill stays idle in every superset, and
        // subsets with an idle node are covered by smaller subsets.
        if (used < chosen.size()) return;

        const bool can_grow = chosen.size() < limit_ && last + 1 < in_.cands;
        const double bound = subtree_bound(last, can_grow);
        if (bound == kInf) return;
        if (best_.valid() && bound > best_.objective + slack(best_.objective)) return;

        if (feasible) {
            const double objective = canonical_objective(in_, pieces);
            std::vector<std::size_t> ranks;
            for (auto c : chosen) ranks.push_back(in_.rank[c]);
            std::sort(ranks.begin(), ranks.end());
            if (better(objective, ranks, best_)) {
                best_.objective = objective;
                best_.ranks = std::move(ranks);
                best_.pieces = std::move(pieces);
            }
        }
        if (can_grow) search(last + 1, chosen);
    }

    static double slack(double value) { return 1e-9 * (1.0 + std::abs(value)); }

    const Instance& in_;
    std::size_t limit_;
    Solution best_;
    std::uint64_t& evaluations_;
    std::vector<char> in_set_;
    std::vector<double> amortized_;
    std::vector<std::vector<std::size_t>> by_amortized_;
    double fixed_sum_ = 0.0;
};

std::optional<Solution> best_single(const Instance& in, std::uint64_t& evaluations) {
    std::optional<Solution> best;
    for (std::size_t c = 0; c < in.cands; ++c) {
        ++evaluations;
        bool full = true;
        for (std::size_t l = 0; l < in.lines && full; ++l) full = in.inv[l * in.cands + c] >= in.qty[l];
        if (!full) continue;
        std::vector<Piece> pieces;
        for (std::size_t l = 0; l < in.lines; ++l) pieces.push_back({l, c, in.qty[l]});
        const double objective = canonical_objective(in, pieces);
        std::vector<std::size_t> ranks{in.rank[c]};
        if (!best || better(objective, ranks, *best)) best = Solution{objective, std::move(ranks), std::move(pieces)};
    }
    return best;
}

} // namespace

CandidateSet candidate_nodes(const Order& order, const NetworkIndex& network, const OptimizerConfig& config) {
    config.validate();
    const auto items = resolve_order_items(order, network);

    std::vector<std::size_t> stocking;
    for (auto item : items) {
        const auto& nodes = network.stocking_nodes(item);
        stocking.insert(stocking.end(), nodes.begin(), nodes.end());
    }
    std::sort(stocking.begin(), stocking.end());
    stocking.erase(std::unique(stocking.begin(), stocking.end()), stocking.end());
    if (stocking.empty()) throw InfeasibleOrderError(order.order_id, "no node stocks any ordered item");

    struct Ranked {
        bool feasible;
        double score;
        std::size_t rank;
        std::size_t node;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(stocking.size());
    for (auto n : stocking) {
        const Node& nd = network.node(n);
        bool feasible = true;
        for (std::size_t l = 0; l < items.size() && feasible; ++l)
            feasible = network.inventory(items[l], n) >= order.lines[l].quantity;
        double score;
        if (feasible) {
            double weight = 0.0;
            double savings = 0.0;
            for (std::size_t l = 0; l < items.size(); ++l) {
                weight += network.item(items[l]).weight * order.lines[l].quantity;
                savings += network.saving(items[l], n) * order.lines[l].quantity;
            }
            score = shipment_cost(nd, order.destination, weight) - config.w_clearance * savings;
        } else {
            score = nd.unit_rate * shipping_distance(nd, order.destination);
        }
        ranked.push_back({feasible, score, network.node_rank(n), n});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.feasible != b.feasible) return a.feasible;
        if (a.score != b.score) return a.score < b.score;
        return a.rank < b.rank;
    });
    if (ranked.size() > config.candidate_prefilter_k) ranked.resize(config.candidate_prefilter_k);

    CandidateSet out;
    out.order_id = order.order_id;
    for (const auto& r : ranked) {
        out.node_indices.push_back(r.node);
        out.node_ids.push_back(network.node(r.node).node_id);
    }
    return out;
}

Assignment solve_full(const Order& order, const NetworkIndex& network, const OptimizerConfig& config,
                      SolveStats* stats) {
    return solve_full(order, network, config, candidate_nodes(order, network, config), stats);
}

Assignment solve_full(const Order& order, const NetworkIndex& network, const OptimizerConfig& config,
                      const CandidateSet& candidates, SolveStats* stats) {
    config.validate();
    const auto items = resolve_order_items(order, network);
    const Instance in(order, network, config.w_clearance, items, candidates.node_indices);

    std::uint64_t evaluations = 0;
    auto seed = best_single(in, evaluations);
    BranchAndBound search(in, config.split_limit(order), seed ? std::move(*seed) : Solution{}, evaluations);
    Solution best = search.run();
    if (stats) stats->cost_evaluations += evaluations;
    if (!best.valid())
        throw InfeasibleOrderError(order.order_id, "no feasible assignment within the candidate set");
    return to_assignment(in, best.pieces);
}

std::optional<Assignment> solve_no_split(const Order& order, const NetworkIndex& network,
                                         const OptimizerConfig& config, SolveStats* stats) {
    return solve_no_split(order, network, config, candidate_nodes(order, network, config), stats);
}

std::optional<Assignment> solve_no_split(const Order& order, const NetworkIndex& network,
                                         const OptimizerConfig& config, const CandidateSet& candidates,
                                         SolveStats* stats) {
    config.validate();
    const auto items = resolve_order_items(order, network);
    const Instance in(order, network, config.w_clearance, items, candidates.node_indices);
    std::uint64_t evaluations = 0;
    auto best = best_single(in, evaluations);
    if (stats) stats->cost_evaluations += evaluations;
    if (!best) return std::nullopt;
    return to_assignment(in, best->pieces);
}

SplitLabel make_label(const Order& order, const Assignment& assignment) {
    return {order.order_id, assignment.nodes_used > 1 ? 1 : 0, assignment.nodes_used, assignment.objective};
}

std::vector<SplitLabel> label_orders(const std::vector<Order>& orders, const NetworkIndex& network,
                                     const OptimizerConfig& config, std::size_t threads) {
    config.validate();
    std::vector<SplitLabel> labels(orders.size());
    parallel_for(orders.size(), threads, [&](std::size_t i) {
        labels[i] = make_label(orders[i], solve_full(orders[i], network, config));
    });
    return labels;
}

} // namespace shortcut
