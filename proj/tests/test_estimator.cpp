#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kspec/bounds.hpp"
#include "kspec/errors.hpp"
#include "kspec/estimator.hpp"
#include "test_support.hpp"

using namespace kspec;
using namespace kspec::estimator;
using doctest::Approx;

TEST_CASE("jordan_witness examples") {
    CHECK(jordan_witness(2.0) == Matrix{{1.0, 1.5}, {0.0, 1.0}});
    const Matrix j3 = jordan_witness(3.0);
    CHECK(std::abs(j3(0, 1) - 8.0 / 3.0) <= 1e-15);
    CHECK(spectral_norm(j3) == Approx(3.0).epsilon(1e-12));
    for (double R : {1.5, 2.0, 3.0, 10.0}) {
        const Matrix j = jordan_witness(R);
        CHECK(std::abs(spectral_norm(j) - R) <= 1e-12 * R);
        CHECK(std::abs(spectral_norm(inverse(j)) - R) <= 1e-12 * R);
    }
    CHECK(spectral_norm(jordan_witness(1.0 + 1e-9) - Matrix::identity(2)) <= 1e-8);
}

TEST_CASE("random_admissible examples") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Matrix a1 = random_admissible(1, 2.0, seed);
        CHECK(std::abs(a1(0, 0)) > 0.5);
        CHECK(std::abs(a1(0, 0)) < 2.0);
        const Matrix a = random_admissible(1 + seed % 6, 2.0, seed);
        CHECK(spectral_norm(a) <= 2.0);
        CHECK(spectral_norm(inverse(a)) <= 2.0);
    }
    CHECK(random_admissible(4, 2.0, 7) == random_admissible(4, 2.0, 7));
    CHECK_FALSE(random_admissible(4, 2.0, 7) == random_admissible(4, 2.0, 8));
    CHECK(trial_seed(1, 0) != trial_seed(1, 1));
    CHECK(trial_seed(1, 5) == trial_seed(1, 5));
}

TEST_CASE("ratio examples") {
    const Matrix a = random_admissible(3, 2.0, 1);
    CHECK(ratio(a, 2.0, RationalFunction::constant({0.3, -2.0})).ratio == Approx(1.0).epsilon(1e-14));

    const double eps = 0.01;
    const std::vector<double> d{2.0 * (1.0 - eps), 1.0};
    const auto r = ratio(Matrix::diagonal(std::span<const double>(d)), 2.0, RationalFunction::laurent(1, {1.0}));
    CHECK(r.ratio == Approx(1.0 - eps).epsilon(1e-12));
    CHECK(r.certified);
    CHECK(r.samples == kCertifySamples);

    CHECK_THROWS_AS(ratio(Matrix::identity(2) * 3.0, 2.0, RationalFunction::constant(1.0)), AdmissibilityError);
    CHECK_THROWS_AS(ratio(a, 2.0, RationalFunction({1.0}, {-1.0, 1.0})), PoleInRegion);
}

TEST_CASE("extremal_derivative: degree-1 closed form") {
    // With f(1) = 0 and f'(1) = 1 the degree-1 family is s z + (1 - 2s) + (s - 1)/z.
    // Convexity plus the symmetries z -> conj(z) and z -> 1/z put the optimum at
    // s = 1/2, f = (z - 1/z)/2, with value 2R/(R² + 1).
    for (double R : {1.5, 2.0, 4.0}) {
        const auto e = extremal_derivative(R, 1, 1024);
        const double closed = 2.0 * R / (R * R + 1.0);
        CHECK(e.value > 0.0);
        CHECK(e.value <= closed * (1.0 + 1e-9));
        CHECK(e.value == Approx(closed).epsilon(1e-6));
    }
    // Direct scan over real s confirms the closed form at R = 2.
    double best = 0.0;
    for (int k = 0; k <= 200; ++k) {
        const double s = 0.3 + 0.4 * k / 200.0;
        const auto f = RationalFunction::laurent(-1, {s - 1.0, 1.0 - 2.0 * s, s});
        best = std::max(best, 1.0 / sup_norm_annulus(f, 2.0));
    }
    CHECK(best == Approx(0.8).epsilon(1e-12));
}

TEST_CASE("extremal_derivative approaches the Caratheodory value") {
    const auto e = extremal_derivative(2.0, 12, 2048);
    CHECK(e.converged);
    CHECK(e.value >= 1.118);
    CHECK(e.value <= bounds::caratheodory_product(2.0) + 5e-3);
    CHECK(e.value <= e.upper_estimate * (1.0 + 1e-9));
    CHECK(std::abs(e.f.value(1.0)) <= 1e-9);
    CHECK(std::abs(e.f.derivative(1.0) - 1.0) <= 1e-9);
    // The truncated extremal realizes the simple lower bound on the witness.
    const double t0 = 2.0 - 0.5;
    const auto r = ratio(jordan_witness(2.0), 2.0, e.f);
    CHECK(r.ratio >= 1.6);
    CHECK(r.ratio >= t0 * e.value * (1.0 - 1e-9));
}

TEST_CASE("maximize_ratio on the identity") {
    const auto s = maximize_ratio(Matrix::identity(2), 2.0, 4, 5000, 1);
    CHECK(s.best.ratio >= 0.999);
    CHECK(s.best.ratio <= 1.0 + 1e-9);
    CHECK_THROWS_AS(maximize_ratio(Matrix::identity(2), 2.0, 4, 0, 1), InvalidInput);
    CHECK_THROWS_AS(maximize_ratio(Matrix::identity(2), 2.0, 0, 100, 1), InvalidInput);
}

TEST_CASE("property: maximize_ratio is monotone in budget") {
    const Matrix a = random_admissible(3, 2.0, 11);
    double prev = 0.0;
    for (long budget : {500L, 2000L, 8000L, 30000L}) {
        const auto s = maximize_ratio(a, 2.0, 4, budget, 3);
        CHECK(s.best.ratio >= prev);
        CHECK(s.evaluations <= budget);
        CHECK(s.best.ratio <= bounds::thm1_upper(2.0) + 1e-6);
        prev = s.best.ratio;
    }
}

TEST_CASE("property: maximize_ratio is monotone in degree when converged") {
    const Matrix a = jordan_witness(1.5);
    double prev = 0.0;
    for (int degree : {1, 2, 4, 6}) {
        const auto s = maximize_ratio(a, 1.5, degree, 400000, 5);
        REQUIRE(s.converged);
        CHECK(s.best.ratio >= prev - 1e-6);
        prev = std::max(prev, s.best.ratio);
    }
}

TEST_CASE("property: the witness beats the simple lower bound") {
    for (double R : {1.5, 2.0, 3.0}) {
        const auto s = maximize_ratio(jordan_witness(R), R, 8, 100000, 1);
        CHECK(s.best.ratio > bounds::lower_simple(R));
        CHECK(s.best.ratio <= bounds::thm1_upper(R) + 1e-6);
    }
}

TEST_CASE("property: ratio invariances") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = random_admissible(3, 2.0, 200 + trial);
        const auto f = random_laurent(4, 2.0, rng);
        const double base = ratio(a, 2.0, f).ratio;
        CHECK(ratio(a, 2.0, f.scaled(4.0)).ratio == base);
        CHECK(std::abs(ratio(a, 2.0, f.scaled({0.3, -1.7})).ratio - base) <= 1e-12 * base);
        const Matrix v = random_unitary(3, rng);
        CHECK(std::abs(ratio(v * a * v.adjoint(), 2.0, f).ratio - base) <= 1e-10 * base);
        CHECK(base <= bounds::thm1_upper(2.0) + 1e-6);
    }
}

TEST_CASE("complete_ratio examples") {
    std::mt19937_64 rng(14);
    const Matrix a = random_admissible(2, 2.0, 3);
    const auto f = random_laurent(3, 2.0, rng);
    const double base = ratio(a, 2.0, f).ratio;
    CHECK(complete_ratio(a, 2.0, MatrixRationalFunction(1, {f})) == Approx(base).epsilon(1e-12));
    const auto zero = RationalFunction::constant(0.0);
    CHECK(complete_ratio(a, 2.0, MatrixRationalFunction(2, {f, zero, zero, f})) == Approx(base).epsilon(1e-9));
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix b = random_admissible(2, 2.0, 300 + trial);
        std::vector<RationalFunction> entries;
        for (int k = 0; k < 4; ++k) entries.push_back(random_laurent(3, 2.0, rng));
        CHECK(complete_ratio(b, 2.0, MatrixRationalFunction(2, entries), 4096) <= bounds::thm1_upper(2.0) + 1e-6);
    }
}
