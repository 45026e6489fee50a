#include "shortcut/dataset.hpp"

#include <cmath>

namespace shortcut {

Dataset::Dataset(std::size_t cols, std::vector<double> values, std::vector<int> labels)
    : cols_(cols), values_(std::move(values)), labels_(std::move(labels)) {
    if (values_.size() != cols_ * labels_.size()) throw ShapeError("design matrix size does not match rows x cols");
    for (double v : values_)
        if (!std::isfinite(v)) throw ShapeError("design matrix contains a non-finite value");
    for (int y : labels_)
        if (y != 0 && y != 1) throw ShapeError("labels must be 0 or 1");
}

Dataset Dataset::from_examples(const std::vector<LabeledExample>& examples) {
    if (examples.empty()) return {};
    const std::size_t cols = examples.front().x.size();
    std::vector<double> values;
    std::vector<int> labels;
    values.reserve(cols * examples.size());
    for (const auto& e : examples) {
        if (e.x.size() != cols) throw ShapeError("example " + e.order_id + " has the wrong feature count");
        values.insert(values.end(), e.x.begin(), e.x.end());
        labels.push_back(e.y);
    }
    return Dataset(cols, std::move(values), std::move(labels));
}

std::size_t Dataset::positives() const {
    std::size_t n = 0;
    for (int y : labels_) n += static_cast<std::size_t>(y);
    return n;
}

bool Dataset::has_both_classes() const {
    const auto pos = positives();
    return pos > 0 && pos < rows();
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
    Dataset out;
    out.cols_ = cols_;
    out.values_.reserve(rows.size() * cols_);
    out.labels_.reserve(rows.size());
    for (auto r : rows) {
        auto src = row(r);
        out.values_.insert(out.values_.end(), src.begin(), src.end());
        out.labels_.push_back(labels_[r]);
    }
    return out;
}

} // namespace shortcut
