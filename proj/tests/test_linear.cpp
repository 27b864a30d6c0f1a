#include <doctest.h>

#include <cmath>

#include "cropml/linalg.hpp"
#include "cropml/models.hpp"
#include "cropml/rng.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace cropml;

TEST_CASE("two points on a line are interpolated exactly") {
    Matrix X(2, 1);
    X(0, 0) = 0.0;
    X(1, 0) = 1.0;
    LinearModel m = fit_linear(X, {1.0, 3.0});
    REQUIRE(m.weights.size() == 2);
    CHECK(m.weights[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.weights[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(m.rank == 2);
}

TEST_CASE("constant target fits intercept only") {
    rng::Xoshiro256ss gen(5);
    Matrix X(12, 4);
    for (std::size_t r = 0; r < X.rows(); ++r)
        for (std::size_t c = 0; c < X.cols(); ++c) X(r, c) = test::gaussian(gen);
    LinearModel m = fit_linear(X, std::vector<double>(12, 6.25));
    CHECK(m.weights[0] == doctest::Approx(6.25).epsilon(1e-9));
    for (std::size_t c = 1; c < m.weights.size(); ++c)
        CHECK(std::abs(m.weights[c]) < 1e-9);
}

TEST_CASE("weights match the normal-equation oracle on random systems") {
    rng::Xoshiro256ss gen(31);
    for (int trial = 0; trial < 50; ++trial) {
        Matrix X(20, 6);
        std::vector<double> y(20);
        for (std::size_t r = 0; r < 20; ++r) {
            for (std::size_t c = 0; c < 6; ++c) X(r, c) = test::gaussian(gen);
            y[r] = test::gaussian(gen) * 3.0;
        }
        LinearModel m = fit_linear(X, y);
        auto expected = test::oracle::normal_equation_weights(X, y);
        REQUIRE(m.weights.size() == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i)
            CHECK(std::abs(m.weights[i] - expected[i]) <= 1e-8);
    }
}

TEST_CASE("residuals are orthogonal to every design column") {
    rng::Xoshiro256ss gen(77);
    for (int trial = 0; trial < 10; ++trial) {
        std::size_t n = 8 + gen.uniform(40);
        Matrix X(n, 6);
        std::vector<double> y(n);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < 6; ++c) X(r, c) = test::gaussian(gen);
            y[r] = 100.0 * test::gaussian(gen);
        }
        LinearModel m = fit_linear(X, y);

        std::vector<double> residual(n);
        double y_norm = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            double pred = m.weights[0];
            for (std::size_t c = 0; c < 6; ++c) pred += m.weights[c + 1] * X(r, c);
            residual[r] = y[r] - pred;
            y_norm += y[r] * y[r];
        }
        y_norm = std::sqrt(y_norm);

        for (std::size_t c = 0; c < 7; ++c) {
            double dot = 0.0;
            for (std::size_t r = 0; r < n; ++r)
                dot += (c == 0 ? 1.0 : X(r, c - 1)) * residual[r];
            CHECK(std::abs(dot) <= 1e-6 * y_norm);
        }
    }
}

TEST_CASE("duplicated columns resolve to the minimum-norm solution") {
    // X = [x | x]: y = 2x + 1 has a one-parameter solution family; the
    // minimum-norm member splits the slope evenly.
    Matrix X(6, 2);
    std::vector<double> y(6);
    for (std::size_t r = 0; r < 6; ++r) {
        double x = static_cast<double>(r);
        X(r, 0) = x;
        X(r, 1) = x;
        y[r] = 2.0 * x + 1.0;
    }
    LinearModel m = fit_linear(X, y);
    CHECK(m.rank == 2);
    CHECK(m.weights.size() == 3);
    CHECK(m.weights[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(m.weights[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(m.weights[2] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("rank-deficient solution agrees with the ridge limit") {
    rng::Xoshiro256ss gen(13);
    Matrix X(15, 4);
    std::vector<double> y(15);
    for (std::size_t r = 0; r < 15; ++r) {
        double a = test::gaussian(gen);
        double b = test::gaussian(gen);
        X(r, 0) = a;
        X(r, 1) = b;
        X(r, 2) = a + b;       // exactly dependent
        X(r, 3) = 2.0 * a - b; // exactly dependent
        y[r] = 3.0 * a - b + 0.01 * test::gaussian(gen);
    }
    LinearModel m = fit_linear(X, y);
    CHECK(m.rank == 3); // intercept + two independent directions

    // Ridge oracle: (D^T D + eps I)^-1 D^T y with a tiny eps approximates
    // the pseudoinverse solution.
    const std::size_t p = 5;
    auto design = [&](std::size_t r, std::size_t c) {
        return c == 0 ? 1.0 : X(r, c - 1);
    };
    std::vector<std::vector<double>> M(p, std::vector<double>(p, 0.0));
    std::vector<double> rhs(p, 0.0);
    for (std::size_t r = 0; r < X.rows(); ++r)
        for (std::size_t a = 0; a < p; ++a) {
            rhs[a] += design(r, a) * y[r];
            for (std::size_t b = 0; b < p; ++b)
                M[a][b] += design(r, a) * design(r, b);
        }
    for (std::size_t d = 0; d < p; ++d) M[d][d] += 1e-9;
    auto ridge = test::oracle::solve_dense(M, rhs);
    for (std::size_t i = 0; i < p; ++i)
        CHECK(m.weights[i] == doctest::Approx(ridge[i]).epsilon(1e-4));
}

TEST_CASE("linear predict is the dot product with intercept") {
    TrainedModel model;
    model.feature_names = feature_names();
    LinearModel payload;
    payload.weights = {1, 2, 0, 0, 0, 0, 0};
    payload.rank = 7;
    model.spec.kind = ModelKind::linear;
    model.payload = payload;

    Matrix X(1, 6);
    X(0, 0) = 3.0;
    auto pred = predict(model, X);
    REQUIRE(pred.size() == 1);
    CHECK(pred[0] == 7.0);
}

TEST_CASE("predict on an empty matrix returns an empty vector") {
    TrainedModel model;
    model.feature_names = feature_names();
    model.spec.kind = ModelKind::linear;
    model.payload = LinearModel{{0, 0, 0, 0, 0, 0, 0}, 7};
    CHECK(predict(model, Matrix()).empty());
}
