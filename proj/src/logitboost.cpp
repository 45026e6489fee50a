#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "model_internal.hpp"
#include "shortcut/models.hpp"

namespace shortcut {

namespace {

double mean_log_loss(const std::vector<double>& score, const std::vector<int>& y) {
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) total += detail::softplus(score[i]) - y[i] * score[i];
    return total / static_cast<double>(y.size());
}

// Weighted least-squares stump fitting over presorted feature columns.
class StumpFitter {
public:
    explicit StumpFitter(const Dataset& data) : n_(data.rows()), p_(data.cols()), x_(n_ * p_), order_(n_ * p_) {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < p_; ++j) x_[j * n_ + i] = data.at(i, j);
        for (std::size_t j = 0; j < p_; ++j) {
            auto* order = order_.data() + j * n_;
            std::iota(order, order + n_, std::uint32_t{0});
            const double* col = x_.data() + j * n_;
            std::stable_sort(order, order + n_, [col](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
        }
    }

    Stump fit(const std::vector<double>& w, const std::vector<double>& z) const {
        double total_w = 0.0;
        double total_wz = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            total_w += w[i];
            total_wz += w[i] * z[i];
        }
        const double base = total_wz * total_wz / total_w;
        Stump best;
        best.left_value = best.right_value = total_wz / total_w;
        bool found = false;
        for (std::size_t j = 0; j < p_; ++j) {
            const auto* order = order_.data() + j * n_;
            const double* col = x_.data() + j * n_;
            double left_w = 0.0;
            double left_wz = 0.0;
            for (std::size_t k = 0; k + 1 < n_; ++k) {
                const auto i = order[k];
                left_w += w[i];
                left_wz += w[i] * z[i];
                const double a = col[i];
                const double b = col[order[k + 1]];
                if (!(a < b)) continue;
                const double right_w = total_w - left_w;
                const double right_wz = total_wz - left_wz;
                if (!(left_w > 0.0) || !(right_w > 0.0)) continue;
                const double gain = left_wz * left_wz / left_w + right_wz * right_wz / right_w - base;
                if (!found || gain > best.gain) {
                    found = true;
                    double threshold = 0.5 * (a + b);
                    if (!(threshold > a)) threshold = b;
                    best.feature = static_cast<int>(j);
                    best.threshold = threshold;
                    best.left_value = left_wz / left_w;
                    best.right_value = right_wz / right_w;
                    best.gain = gain;
                }
            }
        }
        if (!found) best.gain = 0.0;
        return best;
    }

    double evaluate(const Stump& stump, std::size_t i) const {
        if (stump.feature < 0) return stump.left_value;
        return x_[static_cast<std::size_t>(stump.feature) * n_ + i] < stump.threshold ? stump.left_value
                                                                                      : stump.right_value;
    }

private:
    std::size_t n_;
    std::size_t p_;
    std::vector<double> x_;  // column-major
    std::vector<std::uint32_t> order_;
};

} // namespace

SplitModel train_logitboost(const Dataset& data, std::size_t n_iters, double shrinkage, const FeatureSchema& schema,
                            const BoostOptions& options, BoostTrace* trace) {
    if (!data.has_both_classes()) throw TrainingError("LogitBoost needs examples from both classes");
    if (!(shrinkage > 0.0 && shrinkage <= 1.0)) throw ConfigError("shrinkage must lie in (0, 1]");
    detail::check_schema(schema, data.cols());

    const std::size_t n = data.rows();
    const auto& y = data.labels();
    const double base_rate = static_cast<double>(data.positives()) / static_cast<double>(n);

    BoostParams params;
    params.base_score = std::log(base_rate / (1.0 - base_rate));
    std::vector<double> score(n, params.base_score);
    double loss = mean_log_loss(score, y);
    if (trace) {
        trace->clear();
        trace->push_back(loss);
    }

    const StumpFitter fitter(data);
    std::vector<double> w(n), z(n), step_values(n), candidate(n);
    for (std::size_t m = 0; m < n_iters; ++m) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = detail::sigmoid(score[i]);
            w[i] = std::max(p * (1.0 - p), options.weight_floor);
            z[i] = std::clamp((y[i] - p) / w[i], -options.response_clip, options.response_clip);
        }
        Stump stump = fitter.fit(w, z);
        for (std::size_t i = 0; i < n; ++i) step_values[i] = fitter.evaluate(stump, i);

        // Shrunken Newton step, halved until the training loss does not rise.
        double step = shrinkage;
        double new_loss = loss;
        bool accepted = false;
        for (int halvings = 0; halvings < 40; ++halvings, step *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) candidate[i] = score[i] + step * step_values[i];
            new_loss = mean_log_loss(candidate, y);
            if (new_loss <= loss) {
                accepted = true;
                break;
            }
        }
        if (accepted) {
            score.swap(candidate);
            loss = new_loss;
            stump.left_value *= step;
            stump.right_value *= step;
        } else {
            stump.left_value = stump.right_value = 0.0;
            stump.gain = 0.0;
        }
        params.stumps.push_back(stump);
        if (trace) trace->push_back(loss);
    }

    return SplitModel(std::move(params), schema.names, schema.catalog_version, Standardization::fit(data),
                      {{"n_iters", static_cast<double>(n_iters)}, {"shrinkage", shrinkage}},
                      {{"probability_convention", "p = sigmoid(F)"},
                       {"stabilization", "w >= 1e-6, z clipped to [-4, 4], step halved on loss increase"}});
}

} // namespace shortcut
