#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "shortcut/models.hpp"

namespace shortcut::detail {

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
inline double softplus(double z) {
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

inline double clamp_probability(double p) {
    return std::clamp(p, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
}

inline void check_schema(const FeatureSchema& schema, std::size_t cols) {
    if (schema.names.size() != cols)
        throw ShapeError("feature schema has " + std::to_string(schema.names.size()) + " names for " +
                         std::to_string(cols) + " columns");
}

} // namespace shortcut::detail
