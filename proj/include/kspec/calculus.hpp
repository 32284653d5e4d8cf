#pragma once

#include <functional>
#include <vector>

#include "kspec/linalg.hpp"
#include "kspec/ratfun.hpp"

namespace kspec {

/// Periodic trapezoid settings: start at `nodes`, double until successive
/// results differ by at most `tol` in spectral norm.
struct QuadratureConfig {
    int nodes = 64;
    double tol = 1e-10;
    int max_nodes = 8192;

    void validate() const;
};

struct QuadratureResult {
    Matrix value;
    int nodes = 0;
    double last_delta = 0.0;
};

/// ∫₀^{2π} g(θ) dθ by the periodic trapezoid rule with node doubling.
/// Throws QuadratureFailure when max_nodes is reached without convergence.
QuadratureResult periodic_trapezoid(const std::function<Matrix(double)>& g, const QuadratureConfig& q);

inline constexpr double kDefaultMargin = 1e-6;

/**
 * Operator together with the annulus X(1/R, R) it is studied on.
 *
 * Construction enforces strict admissibility: ‖A‖ and ‖A⁻¹‖ are both at most
 * R(1 - margin). Equality cases are handled by the caller, by shrinking A or
 * growing R.
 */
class AnnulusContext {
public:
    static AnnulusContext make(Matrix a, double R, double margin = kDefaultMargin);

    double R() const { return R_; }
    double r() const { return 1.0 / R_; }
    double margin() const { return margin_; }
    std::size_t dim() const { return a_.size(); }

    const Matrix& a() const { return a_; }
    const Matrix& a_inv() const { return a_inv_; }
    const Matrix& a_adj() const { return a_adj_; }
    /// (A*)⁻¹
    const Matrix& a_adj_inv() const { return a_adj_inv_; }
    const PolarFactors& polar() const { return polar_; }

    double norm() const { return norm_; }
    double inverse_norm() const { return inv_norm_; }

private:
    AnnulusContext(Matrix a, double R, double margin);

    double R_;
    double margin_;
    Matrix a_, a_inv_, a_adj_, a_adj_inv_;
    PolarFactors polar_;
    double norm_ = 0.0;
    double inv_norm_ = 0.0;
};

/// μ(θ, B) = (1/4π)[(1 + e^{-iθ} r B)(1 - e^{-iθ} r B)⁻¹ + adjoint].
Matrix kernel_mu(const AnnulusContext& ctx, double theta, const Matrix& b);

/// M(θ, A*) = 2π/(R² - r²) · (R² + r² - (e^{iθ} A*)⁻¹ - e^{iθ} A*).
Matrix kernel_M(const AnnulusContext& ctx, double theta);

/// Lower bound for Re M(θ, A*) built from the unitary polar factor U of A.
Matrix kernel_N(const AnnulusContext& ctx, double theta);

/**
 * Three-integral representation of f(A): the two outer boundary circles
 * weighted by μ(θ, A) and μ(-θ, A⁻¹), minus the unit circle weighted by
 * M(θ, A*)⁻¹ (the two outer terms alone give 2I for f ≡ 1).
 *
 * Kernel values at the quadrature nodes do not depend on f, so one instance
 * caches them and can represent many functions for the same context.
 */
class RepresentationQuadrature {
public:
    RepresentationQuadrature(const AnnulusContext& ctx, QuadratureConfig q);

    QuadratureResult integrate(const RationalFunction& f);

    const AnnulusContext& context() const { return ctx_; }

private:
    struct NodeKernels {
        Matrix outer;   // μ(θ, A)
        Matrix inner;   // μ(-θ, A⁻¹)
        Matrix middle;  // M(θ, A*)⁻¹
    };

    void ensure_level(int nodes);
    Matrix level_sum(const RationalFunction& f, int nodes) const;

    const AnnulusContext& ctx_;
    QuadratureConfig q_;
    int cached_nodes_ = 0;
    std::vector<NodeKernels> kernels_;
};

Matrix represent(const AnnulusContext& ctx, const RationalFunction& f, const QuadratureConfig& q = {});

/// ∫₀^{2π} μ(θ, A) dθ (outer = true) or ∫₀^{2π} μ(-θ, A⁻¹) dθ; both equal I.
QuadratureResult integrate_mu(const AnnulusContext& ctx, bool outer, const QuadratureConfig& q = {});

/// ∫₀^{2π} (Re M(θ, A*))⁻¹ dθ; throws PositivityError if Re M is not positive definite.
QuadratureResult integrate_re_M_inverse(const AnnulusContext& ctx, const QuadratureConfig& q = {});

/// K = 2 + ‖∫₀^{2π} (Re M(θ, A*))⁻¹ dθ‖.
double k_formula(const AnnulusContext& ctx, const QuadratureConfig& q = {});

}  // namespace kspec
