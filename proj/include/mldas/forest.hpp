#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "mldas/matrix.hpp"
#include "mldas/rng.hpp"
#include "mldas/tree.hpp"

namespace mldas {

/// Bagged CART classifier: n_estimators trees on bootstrap samples with
/// ceil(sqrt(p)) candidate features per split, majority vote. Tree i draws
/// its bootstrap and split candidates from a seed derived from (seed, i),
/// so refits under the same seed are identical.
class RandomForest {
  public:
    RandomForest() = default;
    RandomForest(SplitCriterion criterion, int n_estimators, int min_samples_split = 2)
        : criterion_(criterion), n_estimators_(n_estimators), min_samples_split_(min_samples_split) {}

    void fit(const Matrix& x, std::span<const double> y, std::uint64_t seed) {
        if (x.rows == 0 || x.rows != y.size()) throw TrainingError("random forest: empty training set");
        trees_.clear();
        trees_.reserve(std::size_t(n_estimators_));
        const auto max_features = std::size_t(std::ceil(std::sqrt(double(x.cols))));
        for (int t = 0; t < n_estimators_; ++t) {
            Rng rng(mix_seed(seed, std::uint64_t(t)));
            std::vector<std::size_t> sample(x.rows);
            for (std::size_t i = 0; i < x.rows; ++i) sample[i] = std::size_t(rng.below(x.rows));
            Matrix boot = x.take_rows(sample);
            std::vector<double> boot_y(x.rows);
            for (std::size_t i = 0; i < x.rows; ++i) boot_y[i] = y[sample[i]];
            DecisionTree tree(criterion_, min_samples_split_, 0, /*classifier=*/true);
            tree.fit(boot, boot_y, max_features, &rng);
            trees_.push_back(std::move(tree));
        }
    }

    double predict_row(const double* row) const {
        int votes_one = 0;
        for (const DecisionTree& tree : trees_) {
            if (tree.predict_row(row) >= 0.5) ++votes_one;
        }
        // exact tie resolves to class 0
        return 2 * votes_one > int(trees_.size()) ? 1.0 : 0.0;
    }

    std::vector<double> predict(const Matrix& x) const {
        if (trees_.empty()) throw ArgumentError("random forest: not fitted");
        if (x.cols != trees_.front().feature_count()) {
            throw ArgumentError("random forest: feature arity mismatch");
        }
        std::vector<double> out(x.rows, 0.0);
        for (std::size_t r = 0; r < x.rows; ++r) out[r] = predict_row(x.row(r));
        return out;
    }

    /// Mean of the per-tree raw importances, normalized to sum to one.
    std::vector<double> importance() const {
        if (trees_.empty()) throw ArgumentError("random forest: not fitted");
        std::vector<double> total(trees_.front().feature_count(), 0.0);
        for (const DecisionTree& tree : trees_) {
            const std::vector<double> raw = tree.raw_importance();
            for (std::size_t f = 0; f < raw.size(); ++f) total[f] += raw[f];
        }
        double sum = 0.0;
        for (double v : total) sum += v;
        if (sum > 0.0) {
            for (double& v : total) v /= sum;
        }
        return total;
    }

    const std::vector<DecisionTree>& trees() const { return trees_; }
    std::vector<DecisionTree>& mutable_trees() { return trees_; }
    SplitCriterion criterion() const { return criterion_; }
    int n_estimators() const { return n_estimators_; }

  private:
    SplitCriterion criterion_ = SplitCriterion::Gini;
    int n_estimators_ = 10;
    int min_samples_split_ = 2;
    std::vector<DecisionTree> trees_;
};

}  // namespace mldas
