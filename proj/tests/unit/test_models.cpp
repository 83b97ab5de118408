#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mldas/model.hpp"
#include "mldas/rng.hpp"

using namespace mldas;

namespace {

Matrix single_column(const std::vector<double>& values) {
    Matrix x(values.size(), 1);
    x.column_names = {"x"};
    for (std::size_t i = 0; i < values.size(); ++i) x.at(i, 0) = values[i];
    return x;
}

// Best training accuracy achievable by any depth<=2 threshold tree over
// binary features, by exhaustive enumeration of cell partitions.
double best_depth2_accuracy(const Matrix& x, const std::vector<double>& y) {
    const std::size_t n = x.rows;
    double best = 0.0;
    auto majority_correct = [&](const std::vector<std::size_t>& idx) {
        std::size_t ones = 0;
        for (std::size_t i : idx) ones += y[i] == 1.0 ? 1 : 0;
        return double(std::max(ones, idx.size() - ones));
    };
    // depth 0
    {
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        best = std::max(best, majority_correct(all) / double(n));
    }
    // depth 1 and 2: root feature f, child features g_left/g_right
    for (std::size_t f = 0; f < x.cols; ++f) {
        std::vector<std::size_t> lo, hi;
        for (std::size_t i = 0; i < n; ++i) (x.at(i, f) <= 0.5 ? lo : hi).push_back(i);
        // depth 1
        best = std::max(best, (majority_correct(lo) + majority_correct(hi)) / double(n));
        // depth 2 over every child-feature pair
        for (std::size_t gl = 0; gl < x.cols; ++gl) {
            std::vector<std::size_t> ll, lh;
            for (std::size_t i : lo) (x.at(i, gl) <= 0.5 ? ll : lh).push_back(i);
            const double left_correct = majority_correct(ll) + majority_correct(lh);
            for (std::size_t gr = 0; gr < x.cols; ++gr) {
                std::vector<std::size_t> rl, rh;
                for (std::size_t i : hi) (x.at(i, gr) <= 0.5 ? rl : rh).push_back(i);
                const double total = left_correct + majority_correct(rl) + majority_correct(rh);
                best = std::max(best, total / double(n));
            }
        }
    }
    return best;
}

}  // namespace

TEST_CASE("separable one-feature data needs exactly one split") {
    std::vector<double> xs, ys;
    Rng rng(1);
    for (int i = 0; i < 40; ++i) {
        const double v = rng.uniform(-10, 10);
        xs.push_back(v);
        ys.push_back(v < 0 ? 0.0 : 1.0);
    }
    const Matrix x = single_column(xs);
    const TrainedModel model = train(ModelKind::DecisionTreeClassifier, default_params(ModelKind::DecisionTreeClassifier), x, ys);
    const auto& tree = std::get<DecisionTree>(model.fitted);
    CHECK(tree.nodes().size() == 3);  // root + two pure leaves

    const std::vector<double> pred = predict(model, x);
    CHECK(pred == ys);
}

TEST_CASE("random forest holds exactly n_estimators trees") {
    Rng rng(2);
    Matrix x(60, 2);
    std::vector<double> y;
    for (std::size_t i = 0; i < 60; ++i) {
        x.at(i, 0) = rng.uniform(0, 1);
        x.at(i, 1) = rng.uniform(0, 1);
        y.push_back(x.at(i, 0) > 0.5 ? 1.0 : 0.0);
    }
    Hyperparams p = default_params(ModelKind::RandomForestClassifier);
    p.n_estimators = 5;
    p.criterion = "entropy";
    const TrainedModel model = train(ModelKind::RandomForestClassifier, p, x, y, 7);
    CHECK(std::get<RandomForest>(model.fitted).trees().size() == 5);
}

TEST_CASE("linear regression recovers y = 2x + 1 exactly") {
    std::vector<double> xs, ys;
    for (int i = 0; i < 20; ++i) {
        xs.push_back(double(i) * 0.5 - 3.0);
        ys.push_back(2.0 * xs.back() + 1.0);
    }
    const Matrix x = single_column(xs);
    const TrainedModel model = train(ModelKind::LinearRegression, default_params(ModelKind::LinearRegression), x, ys);
    const auto& linear = std::get<LinearModel>(model.fitted);
    CHECK(std::abs(linear.weights()[0] - 2.0) < 1e-9);
    CHECK(std::abs(linear.intercept() - 1.0) < 1e-9);
}

TEST_CASE("classification cutoff maps 0.5 and above to class 1") {
    TrainedModel model;
    CHECK(classify_value(model, 0.49) == 0.0);
    CHECK(classify_value(model, 0.51) == 1.0);
    CHECK(classify_value(model, 0.5) == 1.0);
}

TEST_CASE("classify equals predict for tree classifiers") {
    Rng rng(3);
    Matrix x(80, 3);
    std::vector<double> y;
    for (std::size_t i = 0; i < 80; ++i) {
        for (std::size_t c = 0; c < 3; ++c) x.at(i, c) = rng.uniform(0, 1);
        y.push_back(x.at(i, 1) > 0.6 ? 1.0 : 0.0);
    }
    for (ModelKind kind : {ModelKind::DecisionTreeClassifier, ModelKind::RandomForestClassifier}) {
        const TrainedModel model = train(kind, default_params(kind), x, y, 5);
        CHECK(classify(model, x) == predict(model, x));
    }
}

TEST_CASE("decision tree training is invariant to row order") {
    Rng rng(4);
    Matrix x(100, 3);
    std::vector<double> y;
    for (std::size_t i = 0; i < 100; ++i) {
        for (std::size_t c = 0; c < 3; ++c) x.at(i, c) = rng.range(0, 9);
        y.push_back((x.at(i, 0) + x.at(i, 2) > 9) ? 1.0 : 0.0);
    }
    DecisionTree base(SplitCriterion::Gini, 2, 0, true);
    base.fit(x, y);

    std::vector<std::size_t> perm(100);
    for (std::size_t i = 0; i < 100; ++i) perm[i] = i;
    for (int round = 0; round < 5; ++round) {
        rng.shuffle(perm);
        Matrix shuffled = x.take_rows(perm);
        std::vector<double> sy(100);
        for (std::size_t i = 0; i < 100; ++i) sy[i] = y[perm[i]];
        DecisionTree other(SplitCriterion::Gini, 2, 0, true);
        other.fit(shuffled, sy);
        CHECK(base == other);
    }
}

TEST_CASE("normalize on and off agree on full-rank noiseless data") {
    Rng rng(6);
    Matrix x(50, 3);
    std::vector<double> y;
    for (std::size_t i = 0; i < 50; ++i) {
        x.at(i, 0) = rng.uniform(0, 100);
        x.at(i, 1) = rng.uniform(-5, 5);
        x.at(i, 2) = rng.uniform(1000, 2000);
        y.push_back(0.3 * x.at(i, 0) - 2.0 * x.at(i, 1) + 0.001 * x.at(i, 2) + 4.0);
    }
    Hyperparams plain = default_params(ModelKind::LinearRegression);
    Hyperparams normed = plain;
    normed.normalize = true;
    const TrainedModel a = train(ModelKind::LinearRegression, plain, x, y);
    const TrainedModel b = train(ModelKind::LinearRegression, normed, x, y);
    const std::vector<double> pa = predict(a, x);
    const std::vector<double> pb = predict(b, x);
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i] == Catch::Approx(pb[i]).margin(1e-6));
}

TEST_CASE("decision tree matches the exhaustive depth-2 oracle on binary data") {
    Rng rng(8);
    for (int round = 0; round < 200; ++round) {
        const std::size_t n = rng.below(11) + 2;
        Matrix x(n, 2);
        std::vector<double> y;
        bool has0 = false, has1 = false;
        for (std::size_t i = 0; i < n; ++i) {
            x.at(i, 0) = double(rng.below(2));
            x.at(i, 1) = double(rng.below(2));
            y.push_back(double(rng.below(2)));
            (y.back() == 0.0 ? has0 : has1) = true;
        }
        if (!has0 || !has1) continue;
        DecisionTree tree(SplitCriterion::Gini, 2, 0, true);
        tree.fit(x, y);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (tree.predict_row(x.row(i)) == y[i]) ++correct;
        }
        CHECK(double(correct) / double(n) == Catch::Approx(best_depth2_accuracy(x, y)));
    }
}

TEST_CASE("poisson criterion handles pure-zero nodes") {
    std::vector<double> xs{1, 2, 3, 4, 5, 6}, ys{0, 0, 0, 1, 1, 1};
    const Matrix x = single_column(xs);
    Hyperparams p = default_params(ModelKind::DecisionTreeRegressor);
    p.criterion = "poisson";
    const TrainedModel model = train(ModelKind::DecisionTreeRegressor, p, x, ys);
    CHECK(predict(model, x) == ys);
}

TEST_CASE("regressor respects max_depth") {
    Rng rng(9);
    Matrix x(200, 2);
    std::vector<double> y;
    for (std::size_t i = 0; i < 200; ++i) {
        x.at(i, 0) = rng.uniform(0, 1);
        x.at(i, 1) = rng.uniform(0, 1);
        y.push_back(rng.chance(0.5) ? 1.0 : 0.0);
    }
    Hyperparams p = default_params(ModelKind::DecisionTreeRegressor);
    p.max_depth = 2;
    const TrainedModel model = train(ModelKind::DecisionTreeRegressor, p, x, y);
    const auto& tree = std::get<DecisionTree>(model.fitted);
    CHECK(tree.nodes().size() <= 7);  // depth-2 tree has at most 7 nodes
}

TEST_CASE("training errors on degenerate inputs") {
    Matrix constant(4, 1);
    for (std::size_t i = 0; i < 4; ++i) constant.at(i, 0) = 3.0;
    std::vector<double> y{0, 1, 0, 1};
    CHECK_THROWS_AS(train(ModelKind::DecisionTreeClassifier, Hyperparams{}, constant, y), TrainingError);

    Matrix one_row(1, 1);
    std::vector<double> y1{0};
    CHECK_THROWS_AS(train(ModelKind::LinearRegression, Hyperparams{}, one_row, y1), TrainingError);

    Matrix x(4, 1);
    for (std::size_t i = 0; i < 4; ++i) x.at(i, 0) = double(i);
    std::vector<double> same{1, 1, 1, 1};
    CHECK_THROWS_AS(train(ModelKind::DecisionTreeClassifier, Hyperparams{}, x, same), TrainingError);
}

TEST_CASE("predict rejects arity mismatch") {
    std::vector<double> xs{0, 1, 2, 3}, ys{0, 0, 1, 1};
    const Matrix x = single_column(xs);
    const TrainedModel model = train(ModelKind::DecisionTreeClassifier, Hyperparams{}, x, ys);
    Matrix wide(2, 3);
    CHECK_THROWS_AS(predict(model, wide), ArgumentError);
}

TEST_CASE("model serialization round trips exactly") {
    Rng rng(10);
    Matrix x(120, 4);
    std::vector<double> y;
    for (std::size_t i = 0; i < 120; ++i) {
        for (std::size_t c = 0; c < 4; ++c) x.at(i, c) = rng.uniform(-3, 3);
        y.push_back(x.at(i, 2) + 0.1 * x.at(i, 0) > 0 ? 1.0 : 0.0);
    }
    x.column_names = {"a", "b", "c", "d"};

    for (ModelKind kind : {ModelKind::DecisionTreeClassifier, ModelKind::DecisionTreeRegressor,
                           ModelKind::RandomForestClassifier, ModelKind::LinearRegression}) {
        Hyperparams p = default_params(kind);
        if (kind == ModelKind::LinearRegression) p.normalize = true;
        const TrainedModel model = train(kind, p, x, y, 13);
        const nlohmann::json j = model_to_json(model);
        const TrainedModel restored = model_from_json(nlohmann::json::parse(j.dump()));
        CHECK(predict(restored, x) == predict(model, x));
        CHECK(restored.feature_names == model.feature_names);
        CHECK(restored.params == model.params);
    }
}
