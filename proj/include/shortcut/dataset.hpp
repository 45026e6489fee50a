#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "shortcut/errors.hpp"

namespace shortcut {

struct LabeledExample {
    std::string order_id;
    std::vector<double> x;
    int y = 0;
};

// Dense row-major design matrix with binary labels.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::size_t cols, std::vector<double> values, std::vector<int> labels);

    static Dataset from_examples(const std::vector<LabeledExample>& examples);

    std::size_t rows() const { return labels_.size(); }
    std::size_t cols() const { return cols_; }

    std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }
    double at(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
    int label(std::size_t i) const { return labels_[i]; }
    const std::vector<int>& labels() const { return labels_; }

    std::size_t positives() const;
    bool has_both_classes() const;

    Dataset subset(const std::vector<std::size_t>& rows) const;

private:
    std::size_t cols_ = 0;
    std::vector<double> values_;
    std::vector<int> labels_;
};

} // namespace shortcut
