#include "kspec/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "kspec/errors.hpp"

namespace kspec {

std::vector<cplx> SampleBasis::apply(std::span<const cplx> coeffs) const {
    if (coeffs.size() != cols) throw InvalidInput("coefficient count does not match basis");
    std::vector<cplx> out(rows);
    for (std::size_t j = 0; j < rows; ++j) {
        cplx s = 0.0;
        const cplx* row = &values[j * cols];
        for (std::size_t k = 0; k < cols; ++k) s += row[k] * coeffs[k];
        out[j] = s;
    }
    return out;
}

namespace {

// c = c0 + Z y after Gauss-Jordan elimination of C with complete pivoting.
struct Elimination {
    std::vector<std::size_t> pivots;
    std::vector<std::size_t> free;
    std::vector<std::vector<cplx>> reduced;  // rows of C after elimination (unit pivot columns)
    std::vector<cplx> rhs;

    Elimination(std::span<const std::vector<cplx>> c, std::span<const cplx> d, std::size_t m)
        : reduced(c.begin(), c.end()), rhs(d.begin(), d.end()) {
        const std::size_t p = reduced.size();
        std::vector<bool> used(m, false);
        for (std::size_t r = 0; r < p; ++r) {
            std::size_t bi = r, bj = 0;
            double best = -1.0;
            for (std::size_t i = r; i < p; ++i)
                for (std::size_t j = 0; j < m; ++j)
                    if (!used[j] && std::abs(reduced[i][j]) > best) {
                        best = std::abs(reduced[i][j]);
                        bi = i;
                        bj = j;
                    }
            if (best <= 0.0) throw InvalidInput("constraints are linearly dependent");
            std::swap(reduced[r], reduced[bi]);
            std::swap(rhs[r], rhs[bi]);
            const cplx piv = reduced[r][bj];
            for (auto& v : reduced[r]) v /= piv;
            rhs[r] /= piv;
            for (std::size_t i = 0; i < p; ++i) {
                if (i == r) continue;
                const cplx f = reduced[i][bj];
                if (f == cplx(0.0)) continue;
                for (std::size_t j = 0; j < m; ++j) reduced[i][j] -= f * reduced[r][j];
                rhs[i] -= f * rhs[r];
            }
            used[bj] = true;
            pivots.push_back(bj);
        }
        for (std::size_t j = 0; j < m; ++j)
            if (!used[j]) free.push_back(j);
    }

    std::vector<cplx> expand(std::span<const cplx> y, std::size_t m) const {
        std::vector<cplx> c(m, 0.0);
        for (std::size_t f = 0; f < free.size(); ++f) c[free[f]] = y[f];
        for (std::size_t r = 0; r < pivots.size(); ++r) {
            cplx v = rhs[r];
            for (std::size_t f = 0; f < free.size(); ++f) v -= reduced[r][free[f]] * y[f];
            c[pivots[r]] = v;
        }
        return c;
    }
};

}  // namespace

namespace {

// Residual e = h + G y in complex form, and its real split e = a + B x with
// x = (Re y_0, Im y_0, Re y_1, ...).
struct Residual {
    std::size_t S = 0, nf = 0;
    std::vector<cplx> h, g;  // g is S×nf, row-major

    cplx at(std::size_t j, std::span<const double> x) const {
        cplx v = h[j];
        const cplx* row = &g[j * nf];
        for (std::size_t f = 0; f < nf; ++f) v += row[f] * cplx(x[2 * f], x[2 * f + 1]);
        return v;
    }
};

// In-place Cholesky of a real symmetric positive definite matrix (lower
// triangle used); false when a pivot is not positive.
bool cholesky(std::vector<double>& a, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
        if (!(d > 0.0)) return false;
        d = std::sqrt(d);
        a[j * n + j] = d;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) v -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = v / d;
        }
    }
    return true;
}

void cholesky_solve(const std::vector<double>& l, std::size_t n, std::vector<double>& b) {
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k) v -= l[i * n + k] * b[k];
        b[i] = v / l[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double v = b[i];
        for (std::size_t k = i + 1; k < n; ++k) v -= l[k * n + i] * b[k];
        b[i] = v / l[i * n + i];
    }
}

// Minimizer of Σ w_j |e_j|² (w normalized to sum 1) and the attained value.
struct WeightedFit {
    std::vector<double> x;
    double value = 0.0;
};

std::optional<WeightedFit> weighted_fit(const Residual& r, std::span<const double> w) {
    const std::size_t nf = r.nf;
    Matrix normal(nf);
    std::vector<cplx> b(nf, 0.0);
    for (std::size_t j = 0; j < r.S; ++j) {
        if (w[j] == 0.0) continue;
        const cplx* row = &r.g[j * nf];
        for (std::size_t p = 0; p < nf; ++p) {
            const cplx cp = w[j] * std::conj(row[p]);
            b[p] -= cp * r.h[j];
            for (std::size_t q = p; q < nf; ++q) normal(p, q) += cp * row[q];
        }
    }
    for (std::size_t p = 0; p < nf; ++p)
        for (std::size_t q = 0; q < p; ++q) normal(p, q) = std::conj(normal(q, p));
    std::vector<cplx> y;
    try {
        y = solve(normal, std::span<const cplx>(b));
    } catch (const SingularMatrix&) {
        return std::nullopt;
    }
    WeightedFit out;
    out.x.resize(2 * nf);
    for (std::size_t f = 0; f < nf; ++f) {
        out.x[2 * f] = y[f].real();
        out.x[2 * f + 1] = y[f].imag();
    }
    double v = 0.0;
    for (std::size_t j = 0; j < r.S; ++j)
        if (w[j] != 0.0) v += w[j] * std::norm(r.at(j, out.x));
    out.value = std::sqrt(v);
    return out;
}

}  // namespace

MinimaxResult constrained_minimax(const SampleBasis& basis, std::span<const std::vector<cplx>> constraints,
                                  std::span<const cplx> rhs, const MinimaxOptions& options) {
    const std::size_t S = basis.rows, m = basis.cols;
    if (S == 0) throw InvalidInput("no sample points");
    if (constraints.size() != rhs.size()) throw InvalidInput("constraint and rhs counts differ");
    for (const auto& row : constraints)
        if (row.size() != m) throw InvalidInput("constraint row length does not match basis");
    if (constraints.size() >= m) throw InvalidInput("too many constraints for the basis");

    const Elimination elim(constraints, rhs, m);
    Residual res;
    res.S = S;
    res.nf = elim.free.size();
    const std::size_t nf = res.nf;
    res.h.assign(S, 0.0);
    res.g.assign(S * nf, 0.0);
    for (std::size_t j = 0; j < S; ++j) {
        cplx hj = 0.0;
        for (std::size_t r = 0; r < elim.pivots.size(); ++r) hj += elim.rhs[r] * basis(j, elim.pivots[r]);
        res.h[j] = hj;
        for (std::size_t f = 0; f < nf; ++f) {
            cplx v = basis(j, elim.free[f]);
            for (std::size_t r = 0; r < elim.pivots.size(); ++r)
                v -= elim.reduced[r][elim.free[f]] * basis(j, elim.pivots[r]);
            res.g[j * nf + f] = v;
        }
    }
    // Column scaling for conditioning.
    std::vector<double> scale(nf, 1.0);
    for (std::size_t f = 0; f < nf; ++f) {
        double s = 0.0;
        for (std::size_t j = 0; j < S; ++j) s += std::norm(res.g[j * nf + f]);
        if (s > 0.0) scale[f] = std::sqrt(s / static_cast<double>(S));
        for (std::size_t j = 0; j < S; ++j) res.g[j * nf + f] /= scale[f];
    }

    MinimaxResult best;
    best.max_error = std::numeric_limits<double>::infinity();
    auto record = [&](std::span<const double> x) {
        double mx = 0.0;
        for (std::size_t j = 0; j < S; ++j) mx = std::max(mx, std::abs(res.at(j, x)));
        if (mx < best.max_error) {
            std::vector<cplx> y(nf);
            for (std::size_t f = 0; f < nf; ++f) y[f] = cplx(x[2 * f], x[2 * f + 1]) / scale[f];
            best.coeffs = elim.expand(y, m);
            best.max_error = mx;
        }
        return mx;
    };
    auto gap_closed = [&] {
        return best.max_error - best.lower_bound <= options.relative_gap * best.max_error;
    };

    // Least squares start, which is also the first lower bound.
    std::vector<double> w(S, 1.0 / static_cast<double>(S));
    auto fit = weighted_fit(res, w);
    if (!fit) throw PrecisionError("least-squares start is singular");
    std::vector<double> x = fit->x;
    best.lower_bound = fit->value;
    double t = record(x);
    if (nf == 0 || gap_closed() || !(t > 0.0)) {
        best.converged = true;
        return best;
    }
    t *= 1.5;

    const std::size_t N = 2 * nf + 1;
    const double nu = 2.0 * static_cast<double>(S);
    double tau = nu / t;
    std::vector<double> u1(S), u2(S), H(N * N), grad(N), dir(N), xt(2 * nf);

    // Change of the barrier objective τt - Σ log(t² - |e_j|²) when moving to
    // (xv, tv), summed termwise so small decreases stay visible; +inf
    // outside the cone.
    std::vector<double> slack(S);
    auto objective_change = [&](std::span<const double> xv, double tv) {
        if (!(tv > 0.0)) return std::numeric_limits<double>::infinity();
        double f = tau * (tv - t);
        const double t2 = tv * tv;
        for (std::size_t j = 0; j < S; ++j) {
            const double sj = t2 - std::norm(res.at(j, xv));
            if (!(sj > 0.0)) return std::numeric_limits<double>::infinity();
            f -= std::log(sj / slack[j]);
        }
        return f;
    };
    int steps = 0;
    bool stalled = false;
    while (steps < options.max_iterations && !stalled) {
        // Centering by damped Newton.
        for (int inner = 0; inner < 100 && steps < options.max_iterations; ++inner) {
            ++steps;
            std::fill(H.begin(), H.end(), 0.0);
            std::fill(grad.begin(), grad.end(), 0.0);
            grad[N - 1] = tau;
            const double t2 = t * t;
            std::vector<double> b1(2 * nf), b2(2 * nf), q(2 * nf);
            for (std::size_t j = 0; j < S; ++j) {
                const cplx e = res.at(j, x);
                const double s = t2 - std::norm(e);
                slack[j] = s;
                const cplx* row = &res.g[j * nf];
                for (std::size_t f = 0; f < nf; ++f) {
                    b1[2 * f] = row[f].real();
                    b1[2 * f + 1] = -row[f].imag();
                    b2[2 * f] = row[f].imag();
                    b2[2 * f + 1] = row[f].real();
                }
                const double c1 = 2.0 / s, c2 = 4.0 / (s * s);
                for (std::size_t p = 0; p < 2 * nf; ++p) {
                    q[p] = e.real() * b1[p] + e.imag() * b2[p];
                    grad[p] += c1 * q[p];
                }
                grad[N - 1] -= c1 * t;
                for (std::size_t p = 0; p < 2 * nf; ++p) {
                    double* hrow = &H[p * N];
                    const double a1 = c1 * b1[p], a2 = c1 * b2[p], a3 = c2 * q[p];
                    for (std::size_t k = p; k < 2 * nf; ++k) hrow[k] += a1 * b1[k] + a2 * b2[k] + a3 * q[k];
                    hrow[N - 1] -= c2 * t * q[p];
                }
                H[N * N - 1] += -c1 + c2 * t2;
            }
            for (std::size_t p = 0; p < N; ++p)
                for (std::size_t k = 0; k < p; ++k) H[p * N + k] = H[k * N + p];
            double diag_max = 0.0;
            for (std::size_t p = 0; p < N; ++p) diag_max = std::max(diag_max, H[p * N + p]);
            std::vector<double> L;
            double ridge = 0.0;
            for (int attempt = 0; attempt < 8; ++attempt) {
                L = H;
                for (std::size_t p = 0; p < N; ++p) L[p * N + p] += ridge;
                if (cholesky(L, N)) break;
                L.clear();
                ridge = ridge == 0.0 ? 1e-14 * diag_max : ridge * 100.0;
            }
            if (L.empty()) break;
            for (std::size_t p = 0; p < N; ++p) dir[p] = -grad[p];
            cholesky_solve(L, N, dir);
            double decrement = 0.0;
            for (std::size_t p = 0; p < N; ++p) decrement -= grad[p] * dir[p];
            if (decrement / 2.0 <= 1e-9) break;

            double alpha = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
                for (std::size_t p = 0; p < 2 * nf; ++p) xt[p] = x[p] + alpha * dir[p];
                const double tt = t + alpha * dir[N - 1];
                if (objective_change(xt, tt) <= -0.25 * alpha * decrement) {
                    x = xt;
                    t = tt;
                    moved = true;
                    break;
                }
            }
            if (!moved) {
                // Rounding limits further progress; a tiny decrement still means centered.
                stalled = decrement > 1e-6;
                break;
            }
        }
        record(x);

        // Barrier weights give a weighted least-squares lower bound.
        const double t2 = t * t;
        double total = 0.0;
        for (std::size_t j = 0; j < S; ++j) {
            w[j] = 1.0 / (t2 - std::norm(res.at(j, x)));
            total += w[j];
        }
        for (auto& v : w) v /= total;
        if (auto lb = weighted_fit(res, w)) {
            best.lower_bound = std::max(best.lower_bound, lb->value);
            record(lb->x);
        }
        if (gap_closed()) {
            best.converged = true;
            break;
        }
        if (nu / tau < 1e-14 * t) break;
        tau *= 10.0;
    }
    best.iterations = steps;
    return best;
}

}  // namespace kspec
