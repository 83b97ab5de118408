#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mldas/errors.hpp"
#include "mldas/matrix.hpp"
#include "mldas/rng.hpp"

namespace mldas {

enum class SplitCriterion { Gini, Entropy, Mse, Poisson };

inline std::string criterion_name(SplitCriterion c) {
    switch (c) {
        case SplitCriterion::Gini: return "gini";
        case SplitCriterion::Entropy: return "entropy";
        case SplitCriterion::Mse: return "mse";
        case SplitCriterion::Poisson: return "poisson";
    }
    return "?";
}

inline SplitCriterion criterion_from_name(const std::string& name) {
    if (name == "gini") return SplitCriterion::Gini;
    if (name == "entropy") return SplitCriterion::Entropy;
    if (name == "mse") return SplitCriterion::Mse;
    if (name == "poisson") return SplitCriterion::Poisson;
    throw ArgumentError("unknown split criterion: " + name);
}

namespace detail {

// Sufficient statistics for every supported criterion. With binary class
// labels the label sum doubles as the positive-class count.
struct NodeStats {
    double n = 0.0;
    double sum = 0.0;
    double sum_sq = 0.0;
    double sum_ylogy = 0.0;  // sum of y*ln(y), 0 for y = 0

    void add(double y) {
        n += 1.0;
        sum += y;
        sum_sq += y * y;
        if (y > 0.0) sum_ylogy += y * std::log(y);
    }
    void remove(double y) {
        n -= 1.0;
        sum -= y;
        sum_sq -= y * y;
        if (y > 0.0) sum_ylogy -= y * std::log(y);
    }
};

inline double impurity(SplitCriterion criterion, const NodeStats& s) {
    if (s.n <= 0.0) return 0.0;
    const double mean = s.sum / s.n;
    switch (criterion) {
        case SplitCriterion::Gini:
            return 2.0 * mean * (1.0 - mean);
        case SplitCriterion::Entropy: {
            double h = 0.0;
            if (mean > 0.0) h -= mean * std::log2(mean);
            if (mean < 1.0) h -= (1.0 - mean) * std::log2(1.0 - mean);
            return h;
        }
        case SplitCriterion::Mse: {
            const double v = s.sum_sq / s.n - mean * mean;
            return v > 0.0 ? v : 0.0;
        }
        case SplitCriterion::Poisson: {
            // Half Poisson deviance per sample; a zero-mean node is pure.
            if (mean <= 0.0) return 0.0;
            const double d = (s.sum_ylogy - s.sum * std::log(mean)) / s.n;
            return d > 0.0 ? d : 0.0;
        }
    }
    return 0.0;
}

}  // namespace detail

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;  // majority class (classifier) or mean (regressor)
    double n_samples = 0.0;
    double impurity = 0.0;

    bool operator==(const TreeNode&) const = default;
};

/// CART tree grown by exhaustive threshold scan. Splits maximize the
/// weighted impurity decrease; thresholds sit at midpoints between adjacent
/// distinct sorted values; ties break toward the lowest feature index, then
/// the lowest threshold, so training is deterministic and invariant to row
/// order.
class DecisionTree {
  public:
    DecisionTree() = default;
    DecisionTree(SplitCriterion criterion, int min_samples_split, int max_depth, bool classifier)
        : criterion_(criterion),
          min_samples_split_(min_samples_split),
          max_depth_(max_depth),
          classifier_(classifier) {}

    /// max_features = 0 trains on all features; forest trees pass the
    /// per-split candidate count plus their private RNG.
    void fit(const Matrix& x, std::span<const double> y, std::size_t max_features = 0,
             Rng* rng = nullptr) {
        if (x.rows == 0 || x.rows != y.size()) throw TrainingError("decision tree: empty training set");
        n_features_ = x.cols;
        nodes_.clear();
        std::vector<std::size_t> indices(x.rows);
        for (std::size_t i = 0; i < x.rows; ++i) indices[i] = i;
        build(x, y, indices, 0, x.rows, 0, max_features, rng);
    }

    double predict_row(const double* row) const {
        std::size_t node = 0;
        while (nodes_[node].feature >= 0) {
            const TreeNode& nd = nodes_[node];
            node = std::size_t(row[nd.feature] <= nd.threshold ? nd.left : nd.right);
        }
        return nodes_[node].value;
    }

    std::vector<double> predict(const Matrix& x) const {
        if (x.cols != n_features_) {
            throw ArgumentError("decision tree: feature arity mismatch (" + std::to_string(x.cols) +
                                " vs " + std::to_string(n_features_) + ")");
        }
        std::vector<double> out(x.rows, 0.0);
        for (std::size_t r = 0; r < x.rows; ++r) out[r] = predict_row(x.row(r));
        return out;
    }

    /// Per-feature sum of weighted impurity decreases, unnormalized.
    std::vector<double> raw_importance() const {
        std::vector<double> imp(n_features_, 0.0);
        if (nodes_.empty()) return imp;
        const double n_root = nodes_[0].n_samples;
        for (const TreeNode& nd : nodes_) {
            if (nd.feature < 0) continue;
            const TreeNode& l = nodes_[std::size_t(nd.left)];
            const TreeNode& r = nodes_[std::size_t(nd.right)];
            const double decrease =
                nd.impurity - (l.n_samples / nd.n_samples) * l.impurity -
                (r.n_samples / nd.n_samples) * r.impurity;
            imp[std::size_t(nd.feature)] += (nd.n_samples / n_root) * decrease;
        }
        return imp;
    }

    const std::vector<TreeNode>& nodes() const { return nodes_; }
    std::vector<TreeNode>& mutable_nodes() { return nodes_; }
    SplitCriterion criterion() const { return criterion_; }
    std::size_t feature_count() const { return n_features_; }
    void set_feature_count(std::size_t n) { n_features_ = n; }
    bool is_classifier() const { return classifier_; }

    bool operator==(const DecisionTree& other) const { return nodes_ == other.nodes_; }

  private:
    std::int32_t build(const Matrix& x, std::span<const double> y, std::vector<std::size_t>& indices,
                       std::size_t begin, std::size_t end, int depth, std::size_t max_features,
                       Rng* rng) {
        detail::NodeStats stats;
        for (std::size_t i = begin; i < end; ++i) stats.add(y[indices[i]]);

        TreeNode node;
        node.n_samples = stats.n;
        node.impurity = detail::impurity(criterion_, stats);
        node.value = leaf_value(stats);

        const std::size_t n = end - begin;
        const bool depth_capped = max_depth_ > 0 && depth >= max_depth_;
        if (node.impurity <= 1e-15 || n < std::size_t(min_samples_split_) || depth_capped) {
            nodes_.push_back(node);
            return std::int32_t(nodes_.size() - 1);
        }

        const Split best = find_best_split(x, y, indices, begin, end, stats, max_features, rng);
        if (best.feature < 0) {
            nodes_.push_back(node);
            return std::int32_t(nodes_.size() - 1);
        }

        node.feature = best.feature;
        node.threshold = best.threshold;
        const std::int32_t self = std::int32_t(nodes_.size());
        nodes_.push_back(node);

        auto mid_it = std::partition(indices.begin() + std::ptrdiff_t(begin),
                                     indices.begin() + std::ptrdiff_t(end), [&](std::size_t idx) {
                                         return x.at(idx, std::size_t(best.feature)) <= best.threshold;
                                     });
        const std::size_t mid = std::size_t(mid_it - indices.begin());
        nodes_[std::size_t(self)].left = build(x, y, indices, begin, mid, depth + 1, max_features, rng);
        nodes_[std::size_t(self)].right = build(x, y, indices, mid, end, depth + 1, max_features, rng);
        return self;
    }

    struct Split {
        std::int32_t feature = -1;
        double threshold = 0.0;
        double reduction = -1.0;
    };

    Split find_best_split(const Matrix& x, std::span<const double> y,
                          const std::vector<std::size_t>& indices, std::size_t begin, std::size_t end,
                          const detail::NodeStats& parent, std::size_t max_features, Rng* rng) {
        const std::size_t n = end - begin;
        std::vector<std::size_t> features;
        if (max_features > 0 && max_features < n_features_ && rng != nullptr) {
            features = sample_features(max_features, rng);
        } else {
            features.resize(n_features_);
            for (std::size_t f = 0; f < n_features_; ++f) features[f] = f;
        }

        Split best;
        const double parent_impurity = detail::impurity(criterion_, parent);
        std::vector<std::pair<double, double>> column(n);  // (feature value, label)
        for (std::size_t f : features) {
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t idx = indices[begin + i];
                column[i] = {x.at(idx, f), y[idx]};
            }
            std::sort(column.begin(), column.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (column.front().first == column.back().first) continue;

            detail::NodeStats left;
            detail::NodeStats right = parent;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                left.add(column[i].second);
                right.remove(column[i].second);
                if (column[i].first == column[i + 1].first) continue;
                // impure nodes split on the best candidate even at zero
                // gain; recursion still terminates because both sides of a
                // distinct-value boundary are nonempty
                const double reduction = parent_impurity -
                                         (left.n / parent.n) * detail::impurity(criterion_, left) -
                                         (right.n / parent.n) * detail::impurity(criterion_, right);
                double threshold = column[i].first + (column[i + 1].first - column[i].first) / 2.0;
                // midpoint of adjacent representable values can round up
                if (!(threshold < column[i + 1].first)) threshold = column[i].first;
                const bool better =
                    reduction > best.reduction ||
                    (reduction == best.reduction &&
                     (std::int32_t(f) < best.feature ||
                      (std::int32_t(f) == best.feature && threshold < best.threshold)));
                if (best.feature < 0 || better) {
                    best.feature = std::int32_t(f);
                    best.threshold = threshold;
                    best.reduction = reduction;
                }
            }
        }
        return best;
    }

    std::vector<std::size_t> sample_features(std::size_t count, Rng* rng) const {
        std::vector<std::size_t> pool(n_features_);
        for (std::size_t f = 0; f < n_features_; ++f) pool[f] = f;
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t j = i + std::size_t(rng->below(std::uint64_t(n_features_ - i)));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(count);
        std::sort(pool.begin(), pool.end());  // scan order fixed for tie-breaking
        return pool;
    }

    double leaf_value(const detail::NodeStats& stats) const {
        if (!classifier_) return stats.n > 0.0 ? stats.sum / stats.n : 0.0;
        // majority class; exact tie resolves to class 0
        return stats.sum > stats.n - stats.sum ? 1.0 : 0.0;
    }

    SplitCriterion criterion_ = SplitCriterion::Gini;
    int min_samples_split_ = 2;
    int max_depth_ = 0;  // 0 = unbounded
    bool classifier_ = true;
    std::size_t n_features_ = 0;
    std::vector<TreeNode> nodes_;
};

}  // namespace mldas
