#include <algorithm>
#include <cmath>

#include "model_internal.hpp"
#include "shortcut/models.hpp"

namespace shortcut {

Standardization Standardization::fit(const Dataset& data) {
    Standardization s;
    const std::size_t n = data.rows();
    const std::size_t p = data.cols();
    s.mean.assign(p, 0.0);
    s.scale.assign(p, 1.0);
    if (n == 0) return s;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) s.mean[j] += data.at(i, j);
    for (auto& m : s.mean) m /= static_cast<double>(n);
    std::vector<double> var(p, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            const double d = data.at(i, j) - s.mean[j];
            var[j] += d * d;
        }
    for (std::size_t j = 0; j < p; ++j) {
        const double sd = std::sqrt(var[j] / static_cast<double>(n));
        s.scale[j] = sd > 0.0 ? sd : 1.0;
    }
    return s;
}

LogisticProblem::LogisticProblem(const Dataset& data, const Standardization& standardization)
    : cols_(data.cols()), x_(data.rows() * data.cols()), labels_(data.labels()) {
    for (std::size_t i = 0; i < data.rows(); ++i)
        for (std::size_t j = 0; j < cols_; ++j) x_[i * cols_ + j] = standardization.apply(j, data.at(i, j));
}

double LogisticProblem::value_and_gradient(std::span<const double> params, std::vector<double>* gradient) const {
    if (params.size() != dimension()) throw ShapeError("logistic parameter vector has the wrong length");
    const double b = params[cols_];
    if (gradient) gradient->assign(dimension(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        const double* row = x_.data() + i * cols_;
        double z = b;
        for (std::size_t j = 0; j < cols_; ++j) z += params[j] * row[j];
        const double y = labels_[i];
        total += detail::softplus(z) - y * z;
        if (gradient) {
            const double r = detail::sigmoid(z) - y;
            auto& g = *gradient;
            for (std::size_t j = 0; j < cols_; ++j) g[j] += r * row[j];
            g[cols_] += r;
        }
    }
    return total;
}

double LogisticProblem::smooth_value(std::span<const double> params) const {
    return value_and_gradient(params, nullptr);
}

std::vector<double> LogisticProblem::smooth_gradient(std::span<const double> params) const {
    std::vector<double> g;
    value_and_gradient(params, &g);
    return g;
}

double LogisticProblem::objective(std::span<const double> params, double lambda) const {
    double l1 = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) l1 += std::abs(params[j]);
    return smooth_value(params) + lambda * l1;
}

namespace {

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

} // namespace

SplitModel train_logistic_l1(const Dataset& data, double lambda, const FeatureSchema& schema,
                             const LogisticOptions& options, const LogisticParams* warm_start) {
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
    if (data.rows() < 2 || !data.has_both_classes())
        throw TrainingError("logistic regression needs at least two examples from both classes");
    detail::check_schema(schema, data.cols());

    const auto standardization = Standardization::fit(data);
    const LogisticProblem problem(data, standardization);
    const std::size_t p = data.cols();
    const double n = static_cast<double>(data.rows());

    std::vector<double> theta(p + 1, 0.0);
    if (warm_start && warm_start->weights.size() == p) {
        std::copy(warm_start->weights.begin(), warm_start->weights.end(), theta.begin());
        theta[p] = warm_start->intercept;
    } else {
        const double base = static_cast<double>(data.positives()) / n;
        theta[p] = std::log(base / (1.0 - base));
    }

    // Accelerated proximal gradient with backtracking and function-value
    // restart; every accepted step decreases the objective.
    double objective = problem.objective(theta, lambda);
    std::vector<double> point = theta;
    std::vector<double> previous = theta;
    std::vector<double> gradient;
    std::vector<double> candidate(p + 1);
    double momentum = 1.0;
    double lipschitz = 0.25 * n;
    std::size_t iteration = 0;
    bool restarted = false;

    for (; iteration < options.max_iterations; ++iteration) {
        const double f_point = problem.value_and_gradient(point, &gradient);
        double f_candidate = 0.0;
        for (int tries = 0; tries < 100; ++tries) {
            for (std::size_t j = 0; j < p; ++j)
                candidate[j] = soft_threshold(point[j] - gradient[j] / lipschitz, lambda / lipschitz);
            candidate[p] = point[p] - gradient[p] / lipschitz;
            f_candidate = problem.smooth_value(candidate);
            double linear = 0.0;
            double distance = 0.0;
            for (std::size_t j = 0; j <= p; ++j) {
                const double d = candidate[j] - point[j];
                linear += gradient[j] * d;
                distance += d * d;
            }
            if (f_candidate <= f_point + linear + 0.5 * lipschitz * distance + 1e-12 * std::abs(f_point)) break;
            lipschitz *= 2.0;
        }
        double l1 = 0.0;
        for (std::size_t j = 0; j < p; ++j) l1 += std::abs(candidate[j]);
        const double f_new = f_candidate + lambda * l1;

        if (f_new > objective) {
            if (restarted) break;  // plain step from the iterate made no progress
            point = theta;
            momentum = 1.0;
            restarted = true;
            continue;
        }
        restarted = false;
        const double decrease = objective - f_new;
        previous = theta;
        theta = candidate;
        objective = f_new;
        if (decrease < options.tolerance * (1.0 + std::abs(objective))) {
            ++iteration;
            break;
        }
        const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        const double beta = (momentum - 1.0) / next_momentum;
        for (std::size_t j = 0; j <= p; ++j) point[j] = theta[j] + beta * (theta[j] - previous[j]);
        momentum = next_momentum;
        lipschitz *= 0.9;
    }

    LogisticParams params;
    params.weights.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(p));
    params.intercept = theta[p];
    params.iterations = iteration;
    return SplitModel(std::move(params), schema.names, schema.catalog_version, standardization,
                      {{"lambda", lambda}}, {{"solver", "accelerated proximal gradient"}});
}

} // namespace shortcut
