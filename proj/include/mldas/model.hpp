#pragma once

#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mldas/errors.hpp"
#include "mldas/forest.hpp"
#include "mldas/linear.hpp"
#include "mldas/matrix.hpp"
#include "mldas/metrics.hpp"
#include "mldas/tree.hpp"

namespace mldas {

enum class ModelKind {
    DecisionTreeClassifier = 0,
    DecisionTreeRegressor = 1,
    RandomForestClassifier = 2,
    LinearRegression = 3,
};

inline const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::DecisionTreeClassifier: return "DecisionTreeClassifier";
        case ModelKind::DecisionTreeRegressor: return "DecisionTreeRegressor";
        case ModelKind::RandomForestClassifier: return "RandomForestClassifier";
        case ModelKind::LinearRegression: return "LinearRegression";
    }
    return "?";
}

inline ModelKind model_kind_from_name(const std::string& name) {
    if (name == "DecisionTreeClassifier") return ModelKind::DecisionTreeClassifier;
    if (name == "DecisionTreeRegressor") return ModelKind::DecisionTreeRegressor;
    if (name == "RandomForestClassifier") return ModelKind::RandomForestClassifier;
    if (name == "LinearRegression") return ModelKind::LinearRegression;
    throw ArgumentError("unknown model kind: " + name);
}

constexpr std::size_t kModelKindCount = 4;

/// Union of the per-kind hyperparameters; each kind reads its own fields.
struct Hyperparams {
    std::string criterion = "gini";  // gini/entropy for classifiers, mse/poisson for the regressor
    int min_samples_split = 2;
    int max_depth = 0;  // 0 = unbounded
    int n_estimators = 10;
    bool fit_intercept = true;
    bool normalize = false;

    bool operator==(const Hyperparams&) const = default;
};

inline Hyperparams default_params(ModelKind kind) {
    Hyperparams p;
    switch (kind) {
        case ModelKind::DecisionTreeClassifier:
            p.criterion = "gini";
            p.min_samples_split = 2;
            break;
        case ModelKind::DecisionTreeRegressor:
            p.criterion = "mse";
            p.min_samples_split = 2;
            p.max_depth = 0;
            break;
        case ModelKind::RandomForestClassifier:
            p.criterion = "gini";
            p.n_estimators = 2;
            break;
        case ModelKind::LinearRegression:
            p.fit_intercept = true;
            p.normalize = false;
            break;
    }
    return p;
}

inline std::string params_to_string(ModelKind kind, const Hyperparams& p) {
    switch (kind) {
        case ModelKind::DecisionTreeClassifier:
            return "criterion=" + p.criterion + ";min_samples_split=" + std::to_string(p.min_samples_split);
        case ModelKind::DecisionTreeRegressor:
            return "criterion=" + p.criterion + ";min_samples_split=" + std::to_string(p.min_samples_split) +
                   ";max_depth=" + (p.max_depth == 0 ? std::string("None") : std::to_string(p.max_depth));
        case ModelKind::RandomForestClassifier:
            return "criterion=" + p.criterion + ";n_estimators=" + std::to_string(p.n_estimators);
        case ModelKind::LinearRegression:
            return std::string("fit_intercept=") + (p.fit_intercept ? "True" : "False") +
                   ";normalize=" + (p.normalize ? "True" : "False");
    }
    return "?";
}

/// A fitted model of any of the four candidate kinds.
struct TrainedModel {
    ModelKind kind = ModelKind::DecisionTreeClassifier;
    Hyperparams params;
    std::vector<std::string> feature_names;
    double class_threshold = 0.5;  // cutoff applied to continuous outputs
    std::variant<DecisionTree, RandomForest, LinearModel> fitted;
};

/// Trains one model. Stochastic kinds derive their randomness from `seed`.
inline TrainedModel train(ModelKind kind, const Hyperparams& params, const Matrix& x,
                          std::span<const double> y, std::uint64_t seed = 0) {
    if (x.rows < 2) throw TrainingError("training needs at least 2 rows");
    if (x.rows != y.size()) throw TrainingError("feature/label row mismatch");
    bool constant_only = true;
    for (std::size_t c = 0; c < x.cols && constant_only; ++c) {
        for (std::size_t r = 1; r < x.rows; ++r) {
            if (x.at(r, c) != x.at(0, c)) {
                constant_only = false;
                break;
            }
        }
    }
    if (x.cols == 0 || constant_only) throw TrainingError("degenerate training matrix: constant columns only");

    const bool is_classifier =
        kind == ModelKind::DecisionTreeClassifier || kind == ModelKind::RandomForestClassifier;
    if (is_classifier) {
        bool has0 = false, has1 = false;
        for (double v : y) {
            if (v == 0.0) has0 = true;
            else if (v == 1.0) has1 = true;
            else throw TrainingError("classifier labels must be 0 or 1");
        }
        if (!has0 || !has1) throw TrainingError("classifier training needs both classes present");
    }

    TrainedModel model;
    model.kind = kind;
    model.params = params;
    model.feature_names = x.column_names;
    switch (kind) {
        case ModelKind::DecisionTreeClassifier: {
            DecisionTree tree(criterion_from_name(params.criterion), params.min_samples_split, 0, true);
            tree.fit(x, y);
            model.fitted = std::move(tree);
            break;
        }
        case ModelKind::DecisionTreeRegressor: {
            DecisionTree tree(criterion_from_name(params.criterion), params.min_samples_split,
                              params.max_depth, false);
            tree.fit(x, y);
            model.fitted = std::move(tree);
            break;
        }
        case ModelKind::RandomForestClassifier: {
            RandomForest forest(criterion_from_name(params.criterion), params.n_estimators,
                                params.min_samples_split);
            forest.fit(x, y, seed);
            model.fitted = std::move(forest);
            break;
        }
        case ModelKind::LinearRegression: {
            LinearModel linear(params.fit_intercept, params.normalize);
            linear.fit(x, y);
            model.fitted = std::move(linear);
            break;
        }
    }
    return model;
}

/// Raw outputs: {0,1} for classifiers, continuous for the regression kinds.
inline std::vector<double> predict(const TrainedModel& model, const Matrix& x) {
    return std::visit([&](const auto& fitted) { return fitted.predict(x); }, model.fitted);
}

inline double classify_value(const TrainedModel& model, double raw) {
    return raw >= model.class_threshold ? 1.0 : 0.0;
}

/// Applies the 0.5 cutoff so every kind emits comparable {0,1} classes.
inline std::vector<double> classify(const TrainedModel& model, const Matrix& x) {
    std::vector<double> out = predict(model, x);
    for (double& v : out) v = classify_value(model, v);
    return out;
}

/// Full detection report on a labeled set. The rmse field uses the raw
/// pre-cutoff outputs for regression kinds and class outputs for
/// classifiers; the confusion fields always use the cutoff classes.
inline EvalReport evaluate(const TrainedModel& model, const Matrix& x, std::span<const double> y) {
    if (x.rows == 0) throw ArgumentError("evaluate: empty test set");
    const std::vector<double> raw = predict(model, x);
    std::vector<double> classes(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) classes[i] = classify_value(model, raw[i]);
    EvalReport report = confusion_report(classes, y);
    report.rmse = rmse(raw, y);
    return report;
}

// --- serialization ---------------------------------------------------------

namespace detail {

inline nlohmann::json tree_to_json(const DecisionTree& tree) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const TreeNode& nd : tree.nodes()) {
        nodes.push_back({{"f", nd.feature},
                         {"t", nd.threshold},
                         {"l", nd.left},
                         {"r", nd.right},
                         {"v", nd.value},
                         {"n", nd.n_samples},
                         {"i", nd.impurity}});
    }
    return {{"criterion", criterion_name(tree.criterion())},
            {"classifier", tree.is_classifier()},
            {"n_features", tree.feature_count()},
            {"nodes", std::move(nodes)}};
}

inline DecisionTree tree_from_json(const nlohmann::json& j) {
    DecisionTree tree(criterion_from_name(j.at("criterion").get<std::string>()), 2, 0,
                      j.at("classifier").get<bool>());
    tree.set_feature_count(j.at("n_features").get<std::size_t>());
    auto& nodes = tree.mutable_nodes();
    for (const auto& nj : j.at("nodes")) {
        TreeNode nd;
        nd.feature = nj.at("f").get<std::int32_t>();
        nd.threshold = nj.at("t").get<double>();
        nd.left = nj.at("l").get<std::int32_t>();
        nd.right = nj.at("r").get<std::int32_t>();
        nd.value = nj.at("v").get<double>();
        nd.n_samples = nj.at("n").get<double>();
        nd.impurity = nj.at("i").get<double>();
        nodes.push_back(nd);
    }
    return tree;
}

}  // namespace detail

/// Model wire format, version 1. Doubles survive the round trip exactly
/// (shortest round-trip decimal encoding on both sides).
inline nlohmann::json model_to_json(const TrainedModel& model) {
    nlohmann::json j;
    j["kind"] = model_kind_name(model.kind);
    j["params"] = {{"criterion", model.params.criterion},
                   {"min_samples_split", model.params.min_samples_split},
                   {"max_depth", model.params.max_depth},
                   {"n_estimators", model.params.n_estimators},
                   {"fit_intercept", model.params.fit_intercept},
                   {"normalize", model.params.normalize}};
    j["feature_names"] = model.feature_names;
    j["class_threshold"] = model.class_threshold;
    switch (model.kind) {
        case ModelKind::DecisionTreeClassifier:
        case ModelKind::DecisionTreeRegressor:
            j["tree"] = detail::tree_to_json(std::get<DecisionTree>(model.fitted));
            break;
        case ModelKind::RandomForestClassifier: {
            const RandomForest& forest = std::get<RandomForest>(model.fitted);
            nlohmann::json trees = nlohmann::json::array();
            for (const DecisionTree& tree : forest.trees()) trees.push_back(detail::tree_to_json(tree));
            j["forest"] = {{"criterion", criterion_name(forest.criterion())},
                           {"n_estimators", forest.n_estimators()},
                           {"trees", std::move(trees)}};
            break;
        }
        case ModelKind::LinearRegression: {
            const LinearModel& linear = std::get<LinearModel>(model.fitted);
            j["linear"] = {{"weights", linear.weights()},
                           {"intercept", linear.intercept()},
                           {"means", linear.means()},
                           {"scales", linear.scales()},
                           {"fit_intercept", linear.fit_intercept()},
                           {"normalize", linear.normalized()}};
            break;
        }
    }
    return j;
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
    TrainedModel model;
    model.kind = model_kind_from_name(j.at("kind").get<std::string>());
    const auto& pj = j.at("params");
    model.params.criterion = pj.at("criterion").get<std::string>();
    model.params.min_samples_split = pj.at("min_samples_split").get<int>();
    model.params.max_depth = pj.at("max_depth").get<int>();
    model.params.n_estimators = pj.at("n_estimators").get<int>();
    model.params.fit_intercept = pj.at("fit_intercept").get<bool>();
    model.params.normalize = pj.at("normalize").get<bool>();
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.class_threshold = j.at("class_threshold").get<double>();
    switch (model.kind) {
        case ModelKind::DecisionTreeClassifier:
        case ModelKind::DecisionTreeRegressor:
            model.fitted = detail::tree_from_json(j.at("tree"));
            break;
        case ModelKind::RandomForestClassifier: {
            const auto& fj = j.at("forest");
            RandomForest forest(criterion_from_name(fj.at("criterion").get<std::string>()),
                                fj.at("n_estimators").get<int>());
            for (const auto& tj : fj.at("trees")) {
                forest.mutable_trees().push_back(detail::tree_from_json(tj));
            }
            model.fitted = std::move(forest);
            break;
        }
        case ModelKind::LinearRegression: {
            const auto& lj = j.at("linear");
            LinearModel linear;
            linear.restore(lj.at("weights").get<std::vector<double>>(), lj.at("intercept").get<double>(),
                           lj.at("means").get<std::vector<double>>(),
                           lj.at("scales").get<std::vector<double>>(),
                           lj.at("fit_intercept").get<bool>(), lj.at("normalize").get<bool>());
            model.fitted = std::move(linear);
            break;
        }
    }
    return model;
}

}  // namespace mldas
