#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kspec/minimax.hpp"

using namespace kspec;
using doctest::Approx;

namespace {

// Monomials z^0..z^{m-1} sampled at S points of the unit circle.
SampleBasis circle_monomials(std::size_t S, std::size_t m) {
    SampleBasis b{S, m, std::vector<cplx>(S * m)};
    for (std::size_t j = 0; j < S; ++j) {
        const cplx z = std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(S));
        cplx p = 1.0;
        for (std::size_t k = 0; k < m; ++k, p *= z) b.values[j * m + k] = p;
    }
    return b;
}

}  // namespace

TEST_CASE("monic polynomial of least sup norm on the circle is z^n") {
    // min ‖c0 + c1 z + z²‖ on |z| = 1 equals 1.
    const auto b = circle_monomials(256, 3);
    const std::vector<std::vector<cplx>> cons{{0.0, 0.0, 1.0}};
    const std::vector<cplx> rhs{1.0};
    const auto res = constrained_minimax(b, cons, rhs);
    CHECK(res.converged);
    CHECK(res.max_error == Approx(1.0).epsilon(1e-7));
    CHECK(res.lower_bound <= res.max_error);
    CHECK(std::abs(res.coeffs[0]) <= 1e-5);
    CHECK(std::abs(res.coeffs[2] - 1.0) <= 1e-12);
}

TEST_CASE("interpolation constraint at an interior point") {
    // min ‖c0 + c1 z‖ on the circle with value 1 at z = 1/2 is 1 (c0 = 1, c1 = 0),
    // by the maximum principle.
    const auto b = circle_monomials(512, 2);
    const std::vector<std::vector<cplx>> cons{{1.0, 0.5}};
    const std::vector<cplx> rhs{1.0};
    const auto res = constrained_minimax(b, cons, rhs);
    CHECK(res.converged);
    CHECK(res.max_error == Approx(1.0).epsilon(1e-7));
    CHECK(res.lower_bound <= res.max_error);
    CHECK(res.lower_bound >= 1.0 - 1e-6);
}

TEST_CASE("gap bookkeeping") {
    const auto b = circle_monomials(128, 4);
    const std::vector<std::vector<cplx>> cons{{1.0, 1.0, 1.0, 1.0}, {0.0, 1.0, 2.0, 3.0}};
    const std::vector<cplx> rhs{0.0, 1.0};
    MinimaxOptions loose;
    loose.relative_gap = 1e-3;
    const auto coarse = constrained_minimax(b, cons, rhs, loose);
    const auto fine = constrained_minimax(b, cons, rhs);
    CHECK(coarse.converged);
    CHECK(fine.converged);
    CHECK(coarse.max_error - coarse.lower_bound <= 1e-3 * coarse.max_error);
    CHECK(fine.lower_bound <= fine.max_error);
    CHECK(fine.max_error <= coarse.max_error + 1e-12);
    CHECK(fine.lower_bound <= coarse.max_error);
    CHECK(coarse.lower_bound <= fine.max_error);
    MinimaxOptions capped;
    capped.max_iterations = 2;
    const auto early = constrained_minimax(b, cons, rhs, capped);
    CHECK_FALSE(early.converged);
    CHECK(early.lower_bound <= fine.max_error + 1e-12);
}
