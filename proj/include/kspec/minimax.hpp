#pragma once

#include <span>
#include <vector>

#include "kspec/linalg.hpp"

namespace kspec {

/// Values of m basis functions at S sample points, row-major S×m.
struct SampleBasis {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<cplx> values;

    cplx operator()(std::size_t j, std::size_t k) const { return values[j * cols + k]; }
    std::vector<cplx> apply(std::span<const cplx> coeffs) const;
};

struct MinimaxOptions {
    /// Cap on Newton steps across all barrier stages.
    int max_iterations = 400;
    /// Stop when (upper - lower)/upper falls below this.
    double relative_gap = 1e-8;
};

struct MinimaxResult {
    std::vector<cplx> coeffs;
    /// max_j |(B c)_j| of the returned coefficients (an upper bound on the optimum).
    double max_error = 0.0;
    /// Weighted least-squares error for the barrier weights, a lower bound on the optimum.
    double lower_bound = 0.0;
    int iterations = 0;
    bool converged = false;
};

/**
 * Complex discrete Chebyshev problem with linear equality constraints,
 *
 *     minimize max_j |(B c)_j|  subject to  C c = d.
 *
 * The constraints are eliminated, and the remaining problem
 * min t s.t. |e_j| ≤ t is solved as a second-order cone program by a
 * log-barrier Newton method. The barrier weights 1/(t² - |e_j|²) define a
 * weighted least-squares problem whose optimal value is a certified lower
 * bound. `constraints` holds the p rows of C, each of length m.
 */
MinimaxResult constrained_minimax(const SampleBasis& basis, std::span<const std::vector<cplx>> constraints,
                                  std::span<const cplx> rhs, const MinimaxOptions& options = {});

}  // namespace kspec
