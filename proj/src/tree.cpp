#include <algorithm>
#include <cstdint>
#include <numeric>

#include "model_internal.hpp"
#include "shortcut/models.hpp"

namespace shortcut {

namespace {

class TreeBuilder {
public:
    TreeBuilder(const Dataset& data, std::size_t min_leaf)
        : n_(data.rows()), p_(data.cols()), min_leaf_(std::max<std::size_t>(1, min_leaf)), x_(n_ * p_),
          y_(data.labels()), order_(p_ * n_), scratch_(n_), goes_left_(n_, 0) {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < p_; ++j) x_[j * n_ + i] = data.at(i, j);
        // Each feature keeps its samples sorted by value; every tree node owns
        // the same contiguous range in all feature orders.
        for (std::size_t j = 0; j < p_; ++j) {
            auto* order = order_.data() + j * n_;
            std::iota(order, order + n_, std::uint32_t{0});
            const double* col = x_.data() + j * n_;
            std::stable_sort(order, order + n_, [col](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
        }
    }

    TreeParams build() {
        TreeParams tree;
        grow(tree, 0, n_);
        return tree;
    }

private:
    struct Split {
        bool found = false;
        std::size_t feature = 0;
        double threshold = 0.0;
        double gain = 0.0;
        std::size_t left_count = 0;
    };

    static double purity(double pos, double count) {
        const double neg = count - pos;
        return (pos * pos + neg * neg) / count;
    }

    Split best_split(std::size_t begin, std::size_t end, std::int64_t positives) const {
        Split best;
        const double count = static_cast<double>(end - begin);
        const double parent = purity(static_cast<double>(positives), count);
        for (std::size_t j = 0; j < p_; ++j) {
            const auto* order = order_.data() + j * n_;
            const double* col = x_.data() + j * n_;
            double left_pos = 0.0;
            for (std::size_t k = begin; k + 1 < end; ++k) {
                left_pos += y_[order[k]];
                const std::size_t left_n = k - begin + 1;
                const std::size_t right_n = end - k - 1;
                if (left_n < min_leaf_) continue;
                if (right_n < min_leaf_) break;
                const double a = col[order[k]];
                const double b = col[order[k + 1]];
                if (!(a < b)) continue;
                const double ln = static_cast<double>(left_n);
                const double rn = static_cast<double>(right_n);
                const double gain = purity(left_pos, ln) + purity(static_cast<double>(positives) - left_pos, rn) - parent;
                if (!best.found || gain > best.gain) {
                    double threshold = 0.5 * (a + b);
                    if (!(threshold > a)) threshold = b;
                    best = {true, j, threshold, gain, left_n};
                }
            }
        }
        return best;
    }

    int grow(TreeParams& tree, std::size_t begin, std::size_t end) {
        std::int64_t positives = 0;
        const auto* any_order = order_.data();
        for (std::size_t k = begin; k < end; ++k) positives += y_[any_order[k]];
        const auto count = static_cast<std::int64_t>(end - begin);

        const int id = static_cast<int>(tree.nodes.size());
        TreeNode node;
        node.count = count;
        node.positives = positives;
        node.probability = (static_cast<double>(positives) + 1.0) / (static_cast<double>(count) + 2.0);
        tree.nodes.push_back(node);

        const bool pure = positives == 0 || positives == count;
        if (pure || end - begin < 2 * min_leaf_) return id;
        const Split split = best_split(begin, end, positives);
        // Zero-gain splits are kept: an impure node with a separable pair of
        // values is always split, so min_leaf = 1 reproduces any consistent set.
        if (!split.found) return id;

        const double* col = x_.data() + split.feature * n_;
        for (std::size_t k = begin; k < end; ++k) {
            const auto i = order_[split.feature * n_ + k];
            goes_left_[i] = col[i] < split.threshold ? 1 : 0;
        }
        for (std::size_t j = 0; j < p_; ++j) {
            auto* order = order_.data() + j * n_;
            std::size_t left = begin;
            std::size_t right = 0;
            for (std::size_t k = begin; k < end; ++k) {
                const auto i = order[k];
                if (goes_left_[i])
                    order[left++] = i;
                else
                    scratch_[right++] = i;
            }
            std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(right), order + left);
        }
        const std::size_t mid = begin + split.left_count;

        tree.nodes[id].feature = static_cast<int>(split.feature);
        tree.nodes[id].threshold = split.threshold;
        tree.nodes[id].impurity_decrease = std::max(0.0, split.gain);
        const int left_id = grow(tree, begin, mid);
        const int right_id = grow(tree, mid, end);
        tree.nodes[id].left = left_id;
        tree.nodes[id].right = right_id;
        return id;
    }

    std::size_t n_;
    std::size_t p_;
    std::size_t min_leaf_;
    std::vector<double> x_;  // column-major
    std::vector<int> y_;
    std::vector<std::uint32_t> order_;
    std::vector<std::uint32_t> scratch_;
    std::vector<char> goes_left_;
};

} // namespace

SplitModel train_decision_tree(const Dataset& data, std::size_t min_leaf, const FeatureSchema& schema) {
    if (data.rows() < 1) throw TrainingError("decision tree needs at least one example");
    detail::check_schema(schema, data.cols());
    TreeBuilder builder(data, min_leaf);
    return SplitModel(builder.build(), schema.names, schema.catalog_version, Standardization::fit(data),
                      {{"min_leaf", static_cast<double>(min_leaf)}}, {{"criterion", "gini"}, {"leaf", "laplace"}});
}

std::size_t tree_depth(const TreeParams& tree) {
    if (tree.nodes.empty()) return 0;
    std::size_t deepest = 0;
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [id, depth] = stack.back();
        stack.pop_back();
        const auto& node = tree.nodes[static_cast<std::size_t>(id)];
        deepest = std::max(deepest, depth);
        if (!node.is_leaf()) {
            stack.emplace_back(node.left, depth + 1);
            stack.emplace_back(node.right, depth + 1);
        }
    }
    return deepest;
}

std::size_t leaf_count(const TreeParams& tree) {
    return static_cast<std::size_t>(
        std::count_if(tree.nodes.begin(), tree.nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

} // namespace shortcut
