#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <future>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "mldas/errors.hpp"
#include "mldas/matrix.hpp"
#include "mldas/metrics.hpp"
#include "mldas/model.hpp"

namespace mldas {

struct CvResult {
    std::vector<double> fold_rmse;  // k * seeds entries, fold-major per seed
    double mean = 0.0;
    double stddev = 0.0;  // population
};

/// 10-fold cross-validation over contiguous chronological folds, repeated
/// across `seeds` RNG seeds. Seeds only move stochastic models; the folds
/// themselves are fixed by row order.
inline CvResult kfold_cv(ModelKind kind, const Hyperparams& params, const Matrix& x,
                         std::span<const double> y, int k = 10, int seeds = 3,
                         std::uint64_t base_seed = 0) {
    if (k <= 0 || std::size_t(k) > x.rows) {
        throw ArgumentError("kfold_cv: k = " + std::to_string(k) + " exceeds " +
                            std::to_string(x.rows) + " rows");
    }
    CvResult result;
    for (int s = 0; s < seeds; ++s) {
        const std::uint64_t seed = mix_seed(base_seed, std::uint64_t(s));
        for (int fold = 0; fold < k; ++fold) {
            const std::size_t lo = x.rows * std::size_t(fold) / std::size_t(k);
            const std::size_t hi = x.rows * std::size_t(fold + 1) / std::size_t(k);

            Matrix train_x(x.rows - (hi - lo), x.cols);
            train_x.column_names = x.column_names;
            std::vector<double> train_y;
            train_y.reserve(x.rows - (hi - lo));
            std::size_t out_row = 0;
            for (std::size_t r = 0; r < x.rows; ++r) {
                if (r >= lo && r < hi) continue;
                std::copy(x.row(r), x.row(r) + x.cols,
                          train_x.data.begin() + std::ptrdiff_t(out_row * x.cols));
                train_y.push_back(y[r]);
                ++out_row;
            }
            Matrix val_x = x.slice(lo, hi);
            std::vector<double> val_y(y.begin() + std::ptrdiff_t(lo), y.begin() + std::ptrdiff_t(hi));

            const TrainedModel model = train(kind, params, train_x, train_y, seed);
            const std::vector<double> pred = predict(model, val_x);
            result.fold_rmse.push_back(rmse(pred, val_y));
        }
    }
    double sum = 0.0;
    for (double v : result.fold_rmse) sum += v;
    result.mean = sum / double(result.fold_rmse.size());
    double ss = 0.0;
    for (double v : result.fold_rmse) ss += (v - result.mean) * (v - result.mean);
    result.stddev = std::sqrt(ss / double(result.fold_rmse.size()));
    return result;
}

/// The searched hyperparameter grid for one model kind, in reporting order.
inline std::vector<Hyperparams> hyperparam_grid(ModelKind kind) {
    std::vector<Hyperparams> grid;
    switch (kind) {
        case ModelKind::DecisionTreeClassifier:
            for (const char* crit : {"gini", "entropy"}) {
                for (int mss : {2, 3, 4}) {
                    Hyperparams p;
                    p.criterion = crit;
                    p.min_samples_split = mss;
                    grid.push_back(p);
                }
            }
            break;
        case ModelKind::DecisionTreeRegressor:
            for (const char* crit : {"mse", "poisson"}) {
                for (int mss : {2, 3}) {
                    for (int depth : {2, 3, 4}) {
                        Hyperparams p;
                        p.criterion = crit;
                        p.min_samples_split = mss;
                        p.max_depth = depth;
                        grid.push_back(p);
                    }
                }
            }
            break;
        case ModelKind::RandomForestClassifier:
            for (const char* crit : {"gini", "entropy"}) {
                for (int est : {2, 5, 10}) {
                    Hyperparams p;
                    p.criterion = crit;
                    p.n_estimators = est;
                    grid.push_back(p);
                }
            }
            break;
        case ModelKind::LinearRegression:
            for (bool fit : {true, false}) {
                for (bool norm : {true, false}) {
                    Hyperparams p;
                    p.fit_intercept = fit;
                    p.normalize = norm;
                    grid.push_back(p);
                }
            }
            break;
    }
    return grid;
}

struct GridEntry {
    Hyperparams params;
    double mean_cv_rmse = 0.0;
    double std_cv_rmse = 0.0;
};

struct GridSearchResult {
    Hyperparams best;
    std::vector<GridEntry> table;
};

namespace detail {

// Parsimony key for exact CV-RMSE ties: fewer estimators, then shallower
// depth (0 = unbounded counts as deepest), then first-listed criterion,
// then smaller min_samples_split.
inline std::tuple<int, int, int, int> parsimony_key(const Hyperparams& p) {
    const int depth = p.max_depth == 0 ? 1 << 20 : p.max_depth;
    int crit_rank = 0;
    if (p.criterion == "entropy" || p.criterion == "poisson") crit_rank = 1;
    return {p.n_estimators, depth, crit_rank, p.min_samples_split};
}

}  // namespace detail

/// Evaluates every grid combination with 10-fold CV (single seed; only the
/// forest is stochastic) and returns the argmin plus the full table.
inline GridSearchResult grid_search(ModelKind kind, const std::vector<Hyperparams>& grid,
                                    const Matrix& x, std::span<const double> y, int k = 10,
                                    std::uint64_t base_seed = 0) {
    if (grid.empty()) throw ArgumentError("grid_search: empty grid");
    GridSearchResult result;
    result.table.resize(grid.size());

    std::vector<std::future<CvResult>> jobs;
    jobs.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        jobs.push_back(std::async(std::launch::async, [&, i] {
            return kfold_cv(kind, grid[i], x, y, k, /*seeds=*/1, base_seed);
        }));
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const CvResult cv = jobs[i].get();
        result.table[i] = {grid[i], cv.mean, cv.stddev};
    }

    std::size_t best_index = 0;
    for (std::size_t i = 1; i < result.table.size(); ++i) {
        const double cur = result.table[i].mean_cv_rmse;
        const double best = result.table[best_index].mean_cv_rmse;
        if (cur < best || (cur == best && detail::parsimony_key(result.table[i].params) <
                                              detail::parsimony_key(result.table[best_index].params))) {
            best_index = i;
        }
    }
    result.best = result.table[best_index].params;
    return result;
}

/// Mean decrease in impurity per feature, normalized to sum to one.
/// Defined for the tree-based classifiers only.
inline std::vector<double> gini_importance(const TrainedModel& model) {
    if (model.kind == ModelKind::RandomForestClassifier) {
        return std::get<RandomForest>(model.fitted).importance();
    }
    if (model.kind == ModelKind::DecisionTreeClassifier) {
        std::vector<double> imp = std::get<DecisionTree>(model.fitted).raw_importance();
        double sum = 0.0;
        for (double v : imp) sum += v;
        if (sum > 0.0) {
            for (double& v : imp) v /= sum;
        }
        return imp;
    }
    throw ArgumentError("gini_importance: model is not a tree-based classifier");
}

struct LatencyResult {
    double train_time = 0.0;  // seconds, median over repetitions
    double pred_time = 0.0;
};

/// Median wall-clock training and prediction time on fixed data.
inline LatencyResult measure_latency(ModelKind kind, const Hyperparams& params, const Matrix& train_x,
                                     std::span<const double> train_y, const Matrix& eval_x,
                                     int repetitions = 5, std::uint64_t seed = 0) {
    if (train_x.rows == 0 || eval_x.rows == 0) throw ArgumentError("measure_latency: empty sets");
    if (repetitions < 1) throw ArgumentError("measure_latency: repetitions must be >= 1");
    using clock = std::chrono::steady_clock;
    std::vector<double> train_times, pred_times;
    for (int rep = 0; rep < repetitions; ++rep) {
        const auto t0 = clock::now();
        const TrainedModel model = train(kind, params, train_x, train_y, seed);
        const auto t1 = clock::now();
        volatile double sink = predict(model, eval_x).back();
        (void)sink;
        const auto t2 = clock::now();
        train_times.push_back(std::chrono::duration<double>(t1 - t0).count());
        pred_times.push_back(std::chrono::duration<double>(t2 - t1).count());
    }
    auto median = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        const std::size_t mid = v.size() / 2;
        return v.size() % 2 == 1 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
    };
    return {median(train_times), median(pred_times)};
}

}  // namespace mldas
