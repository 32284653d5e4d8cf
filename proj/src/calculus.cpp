#include "kspec/calculus.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "kspec/errors.hpp"

namespace kspec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

void QuadratureConfig::validate() const {
    if (nodes < 64 || !is_power_of_two(nodes))
        throw InvalidInput("quadrature nodes must be a power of two, at least 64");
    if (!(tol > 0.0)) throw InvalidInput("quadrature tolerance must be positive");
    if (max_nodes < nodes) throw InvalidInput("max_nodes must be at least the initial node count");
}

QuadratureResult periodic_trapezoid(const std::function<Matrix(double)>& g, const QuadratureConfig& q) {
    q.validate();
    int n = q.nodes;
    Matrix sum = g(0.0);
    for (int k = 1; k < n; ++k) sum += g(kTwoPi * k / n);
    Matrix estimate = sum * cplx(kTwoPi / n);
    double delta = 0.0;
    while (2 * n <= q.max_nodes) {
        for (int k = 1; k < 2 * n; k += 2) sum += g(kTwoPi * k / (2 * n));
        n *= 2;
        Matrix next = sum * cplx(kTwoPi / n);
        delta = spectral_norm(next - estimate);
        estimate = std::move(next);
        if (delta <= q.tol) return {std::move(estimate), n, delta};
    }
    throw QuadratureFailure("periodic trapezoid did not converge within " + std::to_string(q.max_nodes) +
                                " nodes (last delta " + std::to_string(delta) + ")",
                            delta);
}

// ---------------------------------------------------------------- AnnulusContext

AnnulusContext::AnnulusContext(Matrix a, double R, double margin)
    : R_(R), margin_(margin), a_(std::move(a)) {}

AnnulusContext AnnulusContext::make(Matrix a, double R, double margin) {
    if (!(R > 1.0) || !std::isfinite(R)) throw DomainError("annulus radius R must exceed 1");
    if (!(margin >= 0.0 && margin < 1.0)) throw DomainError("margin must lie in [0, 1)");
    if (!a.all_finite()) throw InvalidInput("matrix has non-finite entries");
    AnnulusContext ctx(std::move(a), R, margin);
    const double bound = R * (1.0 - margin);
    ctx.norm_ = spectral_norm(ctx.a_);
    try {
        ctx.a_inv_ = inverse(ctx.a_);
    } catch (const SingularMatrix&) {
        throw AdmissibilityError("operator is not invertible", ctx.norm_,
                                 std::numeric_limits<double>::infinity(), R);
    }
    ctx.inv_norm_ = spectral_norm(ctx.a_inv_);
    if (ctx.norm_ > bound || ctx.inv_norm_ > bound)
        throw AdmissibilityError("operator is not admissible: need ||A|| and ||A^-1|| <= R(1 - margin)",
                                 ctx.norm_, ctx.inv_norm_, R);
    ctx.a_adj_ = ctx.a_.adjoint();
    ctx.a_adj_inv_ = ctx.a_inv_.adjoint();
    ctx.polar_ = polar_decompose(ctx.a_);
    return ctx;
}

// ---------------------------------------------------------------- kernels

Matrix kernel_mu(const AnnulusContext& ctx, double theta, const Matrix& b) {
    const std::size_t n = b.size();
    if (n != ctx.dim()) throw InvalidInput("kernel argument has the wrong dimension");
    // (1 + x)(1 - x)⁻¹ = -1 + 2(1 - x)⁻¹
    const cplx w = std::polar(ctx.r(), -theta);
    Matrix resolvent;
    try {
        resolvent = inverse(Matrix::identity(n) - b * w);
    } catch (const SingularMatrix&) {
        throw AdmissibilityError("1 - e^{-i theta} r B is singular", spectral_norm(b), 0.0, ctx.R());
    }
    Matrix mu = resolvent + resolvent.adjoint();
    for (std::size_t i = 0; i < n; ++i) mu(i, i) -= 1.0;
    mu *= cplx(1.0 / kTwoPi);
    return mu.hermitian_part();
}

Matrix kernel_M(const AnnulusContext& ctx, double theta) {
    const double R = ctx.R(), r = ctx.r();
    const cplx e = std::polar(1.0, theta);
    Matrix m = Matrix::identity(ctx.dim()) * cplx(R * R + r * r);
    m.add_scaled(ctx.a_adj_inv(), -std::conj(e));
    m.add_scaled(ctx.a_adj(), -e);
    m *= cplx(kTwoPi / (R * R - r * r));
    return m;
}

Matrix kernel_N(const AnnulusContext& ctx, double theta) {
    const double R = ctx.R(), r = ctx.r();
    const std::size_t n = ctx.dim();
    const cplx e = std::polar(1.0, theta);
    const Matrix& u = ctx.polar().unitary;
    const double w = (R + r + 2.0) / 4.0;
    Matrix m = Matrix::identity(n) * cplx(R * R + r * r - R - r + 2.0 * w);
    m.add_scaled(u.adjoint(), -w * e);
    m.add_scaled(u, -w * std::conj(e));
    m *= cplx(kTwoPi / (R * R - r * r));
    return m.hermitian_part();
}

// ---------------------------------------------------------------- representation

RepresentationQuadrature::RepresentationQuadrature(const AnnulusContext& ctx, QuadratureConfig q)
    : ctx_(ctx), q_(q) {
    q_.validate();
}

void RepresentationQuadrature::ensure_level(int nodes) {
    if (nodes <= cached_nodes_) return;
    auto node = [&](double theta) {
        return NodeKernels{kernel_mu(ctx_, theta, ctx_.a()), kernel_mu(ctx_, -theta, ctx_.a_inv()),
                           inverse(kernel_M(ctx_, theta))};
    };
    std::vector<NodeKernels> next;
    next.reserve(static_cast<std::size_t>(nodes));
    if (cached_nodes_ == 0) {
        for (int k = 0; k < nodes; ++k) next.push_back(node(kTwoPi * k / nodes));
    } else {
        // Levels only ever double, so old nodes are the even indices of the new level.
        const int step = nodes / cached_nodes_;
        for (int k = 0; k < nodes; ++k) {
            if (k % step == 0)
                next.push_back(std::move(kernels_[static_cast<std::size_t>(k / step)]));
            else
                next.push_back(node(kTwoPi * k / nodes));
        }
    }
    kernels_ = std::move(next);
    cached_nodes_ = nodes;
}

Matrix RepresentationQuadrature::level_sum(const RationalFunction& f, int nodes) const {
    const double R = ctx_.R(), r = ctx_.r();
    const int step = cached_nodes_ / nodes;
    Matrix sum(ctx_.dim());
    for (int k = 0; k < nodes; ++k) {
        const double theta = kTwoPi * k / nodes;
        const cplx e = std::polar(1.0, theta);
        const auto& kern = kernels_[static_cast<std::size_t>(k * step)];
        sum.add_scaled(kern.outer, f.value(R * e));
        sum.add_scaled(kern.inner, f.value(r * e));
        // The unit-circle term enters with a minus sign: f ≡ 1 must give I,
        // and the two μ integrals already contribute 2I.
        sum.add_scaled(kern.middle, -f.value(e));
    }
    return sum * cplx(kTwoPi / nodes);
}

QuadratureResult RepresentationQuadrature::integrate(const RationalFunction& f) {
    if (f.has_pole_in_annulus(ctx_.R())) throw PoleInRegion("f has a pole in the closed annulus");
    int n = q_.nodes;
    ensure_level(n);
    Matrix estimate = level_sum(f, n);
    double delta = 0.0;
    while (2 * n <= q_.max_nodes) {
        n *= 2;
        ensure_level(n);
        Matrix next = level_sum(f, n);
        delta = spectral_norm(next - estimate);
        estimate = std::move(next);
        if (delta <= q_.tol) return {std::move(estimate), n, delta};
    }
    throw QuadratureFailure("representation formula did not converge within " +
                                std::to_string(q_.max_nodes) + " nodes (last delta " +
                                std::to_string(delta) + ")",
                            delta);
}

Matrix represent(const AnnulusContext& ctx, const RationalFunction& f, const QuadratureConfig& q) {
    RepresentationQuadrature quad(ctx, q);
    return quad.integrate(f).value;
}

QuadratureResult integrate_mu(const AnnulusContext& ctx, bool outer, const QuadratureConfig& q) {
    if (outer) return periodic_trapezoid([&](double t) { return kernel_mu(ctx, t, ctx.a()); }, q);
    return periodic_trapezoid([&](double t) { return kernel_mu(ctx, -t, ctx.a_inv()); }, q);
}

QuadratureResult integrate_re_M_inverse(const AnnulusContext& ctx, const QuadratureConfig& q) {
    return periodic_trapezoid(
        [&](double theta) {
            const Matrix re_m = kernel_M(ctx, theta).hermitian_part();
            const double min_eig = hermitian_part_min_eig(re_m);
            if (!(min_eig > 0.0))
                throw PositivityError("Re M(theta, A*) is not positive definite at theta = " +
                                      std::to_string(theta));
            return inverse(re_m).hermitian_part();
        },
        q);
}

double k_formula(const AnnulusContext& ctx, const QuadratureConfig& q) {
    return 2.0 + spectral_norm(integrate_re_M_inverse(ctx, q).value);
}

}  // namespace kspec
