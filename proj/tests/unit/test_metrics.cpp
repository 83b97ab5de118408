#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mldas/metrics.hpp"
#include "mldas/rng.hpp"

using namespace mldas;

namespace {

// Independent oracle: accumulate in long double, plain loop.
double rmse_oracle(const std::vector<double>& h, const std::vector<double>& y) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const long double d = (long double)h[i] - (long double)y[i];
        acc += d * d;
    }
    return double(std::sqrt(acc / (long double)h.size()));
}

}  // namespace

TEST_CASE("rmse hand-computed values") {
    std::vector<double> a{1, 1, 1}, b{0, 0, 0};
    CHECK(rmse(a, b) == 1.0);
    CHECK(rmse(a, a) == 0.0);
    std::vector<double> h{1, 0, 1}, y{1, 0, 0};
    CHECK(rmse(h, y) == Catch::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("rmse argument errors") {
    std::vector<double> a{1, 2}, b{1};
    CHECK_THROWS_AS(rmse(a, b), ArgumentError);
    std::vector<double> empty;
    CHECK_THROWS_AS(rmse(empty, empty), ArgumentError);
}

TEST_CASE("rmse is symmetric and zero iff equal") {
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        const std::size_t n = rng.below(50) + 1;
        std::vector<double> h(n), y(n);
        for (std::size_t j = 0; j < n; ++j) {
            h[j] = rng.uniform(-10, 10);
            y[j] = rng.uniform(-10, 10);
        }
        CHECK(rmse(h, y) == rmse(y, h));
        CHECK(rmse(h, h) == 0.0);
        if (h != y) CHECK(rmse(h, y) > 0.0);
    }
}

TEST_CASE("rmse matches the brute-force oracle") {
    Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = rng.below(50) + 1;
        std::vector<double> h(n), y(n);
        for (std::size_t j = 0; j < n; ++j) {
            h[j] = rng.uniform(-5, 5);
            y[j] = rng.uniform(-5, 5);
        }
        CHECK(rmse(h, y) == Catch::Approx(rmse_oracle(h, y)).margin(1e-12));
    }
}

TEST_CASE("confusion report from hand-built counts") {
    // tp=9, fp=1, tn=9, fn=1
    std::vector<double> pred, truth;
    for (int i = 0; i < 9; ++i) { pred.push_back(1); truth.push_back(1); }
    pred.push_back(1); truth.push_back(0);
    for (int i = 0; i < 9; ++i) { pred.push_back(0); truth.push_back(0); }
    pred.push_back(0); truth.push_back(1);

    const EvalReport r = confusion_report(pred, truth);
    CHECK(r.tp == 9);
    CHECK(r.fp == 1);
    CHECK(r.tn == 9);
    CHECK(r.fn == 1);
    CHECK(r.precision == Catch::Approx(0.9));
    CHECK(r.recall == Catch::Approx(0.9));
    CHECK(r.f1 == Catch::Approx(0.9));
    CHECK(r.fpr == Catch::Approx(0.1));
    CHECK(r.accuracy == Catch::Approx(0.9));
}

TEST_CASE("degenerate 0/0 conventions") {
    std::vector<double> pred{0, 0, 0}, truth{0, 0, 0};
    const EvalReport r = confusion_report(pred, truth);
    CHECK(r.recall == 0.0);
    CHECK(r.precision == 0.0);
    CHECK(r.f1 == 0.0);
    CHECK(r.fpr == 0.0);
    CHECK(r.accuracy == 1.0);
}

TEST_CASE("confusion identities hold on random data") {
    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = rng.below(200) + 1;
        std::vector<double> pred(n), truth(n);
        for (std::size_t j = 0; j < n; ++j) {
            pred[j] = rng.chance(0.4) ? 1.0 : 0.0;
            truth[j] = rng.chance(0.5) ? 1.0 : 0.0;
        }
        const EvalReport r = confusion_report(pred, truth);
        CHECK(r.tp + r.fp + r.tn + r.fn == std::int64_t(n));
        CHECK(r.accuracy == Catch::Approx(double(r.tp + r.tn) / double(n)));
    }
}
