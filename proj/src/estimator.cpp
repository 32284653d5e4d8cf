#include "kspec/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "kspec/errors.hpp"
#include "kspec/minimax.hpp"

namespace kspec::estimator {

namespace {

constexpr double kAdmissibleSlack = 1e-9;
constexpr double kSlackThreshold = 1e-6;

void require_radius(double R) {
    if (!(R > 1.0) || !std::isfinite(R)) throw DomainError("R must be a finite number above 1");
}

void require_admissible(const Matrix& a, double R) {
    if (a.size() == 0) throw InvalidInput("empty matrix");
    if (!a.all_finite()) throw InvalidInput("matrix has non-finite entries");
    const double norm = spectral_norm(a);
    const double inv_norm = spectral_norm(inverse(a));
    if (norm > R * (1.0 + kAdmissibleSlack) || inv_norm > R * (1.0 + kAdmissibleSlack))
        throw AdmissibilityError("operator is not admissible for the annulus", norm, inv_norm, R);
}

cplx gaussian(std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    const double re = nd(rng);
    const double im = nd(rng);
    return {re, im};
}

// Scaled Laurent basis z^k / R^{|k|}, k = -degree..degree.
double basis_scale(int k, double R) { return std::pow(R, -std::abs(k)); }

RationalFunction from_scaled(std::span<const cplx> c, int degree, double R) {
    std::vector<cplx> coeffs(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) coeffs[i] = c[i] * basis_scale(static_cast<int>(i) - degree, R);
    return RationalFunction::laurent(-degree, std::move(coeffs));
}

SampleBasis boundary_basis(int degree, double R, int samples) {
    const std::size_t m = static_cast<std::size_t>(2 * degree + 1);
    SampleBasis b;
    b.rows = 2 * static_cast<std::size_t>(samples);
    b.cols = m;
    b.values.resize(b.rows * m);
    const double h = 2.0 * std::numbers::pi / samples;
    for (int circle = 0; circle < 2; ++circle) {
        const double rho = circle == 0 ? R : 1.0 / R;
        for (int j = 0; j < samples; ++j) {
            const cplx z = std::polar(rho, j * h);
            const std::size_t row = static_cast<std::size_t>(circle * samples + j);
            for (std::size_t i = 0; i < m; ++i) {
                const int k = static_cast<int>(i) - degree;
                b.values[row * m + i] = std::pow(z, k) * basis_scale(k, R);
            }
        }
    }
    return b;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

Matrix jordan_witness(double R) {
    require_radius(R);
    return Matrix{{1.0, R - 1.0 / R}, {0.0, 1.0}};
}

Matrix random_unitary(std::size_t n, std::mt19937_64& rng) {
    if (n == 0) throw InvalidInput("dimension must be positive");
    Matrix q(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q(i, j) = gaussian(rng);
    // Modified Gram-Schmidt on columns, twice for orthogonality to rounding.
    for (std::size_t j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t p = 0; p < j; ++p) {
                cplx dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += std::conj(q(i, p)) * q(i, j);
                for (std::size_t i = 0; i < n; ++i) q(i, j) -= dot * q(i, p);
            }
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm += std::norm(q(i, j));
        norm = std::sqrt(norm);
        if (!(norm > 1e-12)) throw PrecisionError("degenerate Gaussian sample");
        for (std::size_t i = 0; i < n; ++i) q(i, j) /= norm;
    }
    return q;
}

Matrix random_admissible(std::size_t n, double R, std::uint64_t seed) {
    require_radius(R);
    if (n == 0) throw InvalidInput("dimension must be positive");
    constexpr double delta = 1e-3;
    std::mt19937_64 rng(splitmix64(seed));
    const Matrix u = random_unitary(n, rng);
    const Matrix w = random_unitary(n, rng);
    std::uniform_real_distribution<double> ud((1.0 + delta) / R, (1.0 - delta) * R);
    std::vector<double> g(n);
    for (auto& v : g) v = ud(rng);
    const Matrix gmat = w * Matrix::diagonal(std::span<const double>(g)) * w.adjoint();
    return u * gmat;
}

RationalFunction random_laurent(int degree, double R, std::mt19937_64& rng) {
    if (degree < 0) throw InvalidInput("degree must be non-negative");
    std::vector<cplx> c(static_cast<std::size_t>(2 * degree + 1));
    for (auto& v : c) v = gaussian(rng);
    return from_scaled(c, degree, R);
}

RatioResult ratio(const Matrix& a, double R, const RationalFunction& f, int samples) {
    require_radius(R);
    require_admissible(a, R);
    const BoundarySup sup = boundary_sup(f, R, samples);
    if (!(sup.value > 0.0)) throw InvalidInput("function vanishes on the boundary");
    const double op = spectral_norm(eval_matrix(f, a));
    RatioResult out;
    out.ratio = op / sup.value;
    out.f = f;
    out.samples = samples;
    out.sampling_slack = (sup.value - sup.best_sample) / sup.value;
    out.quadrature_residual = 0.0;
    out.certified = out.sampling_slack < kSlackThreshold;
    return out;
}

namespace {

// Candidate bookkeeping for one search: budget accounting and the running
// best over certified checkpoints.
class Search {
public:
    Search(const Matrix& a, double R, int degree, long budget, const SearchOptions& opt)
        : a_(a), R_(R), degree_(degree), budget_(budget), opt_(opt),
          m_(static_cast<std::size_t>(2 * degree + 1)),
          basis_(boundary_basis(degree, R, opt.search_samples)),
          convex_basis_(boundary_basis(degree, R, opt.convex_samples)) {
        const std::size_t n = a.size();
        const Matrix a_inv = inverse(a);
        powers_.assign(m_, Matrix::identity(n));
        for (int k = 1; k <= degree; ++k) {
            powers_[static_cast<std::size_t>(degree + k)] = powers_[static_cast<std::size_t>(degree + k - 1)] * a;
            powers_[static_cast<std::size_t>(degree - k)] = powers_[static_cast<std::size_t>(degree - k + 1)] * a_inv;
        }
        for (int k = -degree; k <= degree; ++k) powers_[static_cast<std::size_t>(degree + k)] *= basis_scale(k, R);
    }

    bool charge(long cost) {
        if (used_ + cost > budget_) {
            exhausted_ = true;
            return false;
        }
        used_ += cost;
        return true;
    }

    long used() const { return used_; }
    bool exhausted() const { return exhausted_; }

    struct State {
        std::vector<cplx> c;
        std::vector<cplx> values;  // f at the search samples
        Matrix op;                 // f(A)
        double fnorm = 0.0;
        double opnorm = 0.0;
        double ratio() const { return opnorm / fnorm; }
    };

    State make_state(std::vector<cplx> c) const {
        State s;
        s.values = basis_.apply(c);
        s.op = Matrix(a_.size());
        for (std::size_t i = 0; i < m_; ++i) s.op.add_scaled(powers_[i], c[i]);
        s.c = std::move(c);
        refresh_norms(s);
        return s;
    }

    static void refresh_norms(State& s) {
        double mx = 0.0;
        for (const cplx& v : s.values) mx = std::max(mx, std::abs(v));
        s.fnorm = mx;
        s.opnorm = spectral_norm(s.op);
    }

    // Rescale so the sampled sup norm is 1.
    static void normalize(State& s) {
        if (!(s.fnorm > 0.0)) return;
        const double inv = 1.0 / s.fnorm;
        for (auto& v : s.c) v *= inv;
        for (auto& v : s.values) v *= inv;
        s.op *= inv;
        s.opnorm *= inv;
        s.fnorm = 1.0;
    }

    // Ratio after c_i += delta, without modifying s.
    double trial_ratio(const State& s, std::size_t i, cplx delta) {
        const std::size_t rows = basis_.rows;
        double mx = 0.0;
        for (std::size_t j = 0; j < rows; ++j) mx = std::max(mx, std::norm(s.values[j] + delta * basis_(j, i)));
        Matrix op = s.op;
        op.add_scaled(powers_[i], delta);
        const double fn = std::sqrt(mx);
        return fn > 0.0 ? spectral_norm(op) / fn : 0.0;
    }

    void apply_step(State& s, std::size_t i, cplx delta) {
        s.c[i] += delta;
        for (std::size_t j = 0; j < basis_.rows; ++j) s.values[j] += delta * basis_(j, i);
        s.op.add_scaled(powers_[i], delta);
        refresh_norms(s);
        normalize(s);
    }

    // Convex step: minimize the sampled sup norm subject to u*f(A)v = 1 for
    // the current top singular pair. Returns nullopt when the budget is out.
    std::optional<State> convex_step(const State& s) {
        if (!charge(opt_.convex_step_cost)) return std::nullopt;
        const SingularTriple top = top_singular_triple(s.op);
        std::vector<cplx> w(m_);
        const std::size_t n = a_.size();
        for (std::size_t i = 0; i < m_; ++i) {
            cplx acc = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                cplx row = 0.0;
                for (std::size_t q = 0; q < n; ++q) row += powers_[i](r, q) * top.right[q];
                acc += std::conj(top.left[r]) * row;
            }
            w[i] = acc;
        }
        double wmax = 0.0;
        for (const cplx& v : w) wmax = std::max(wmax, std::abs(v));
        if (!(wmax > 0.0)) return s;
        const std::vector<std::vector<cplx>> constraints{w};
        const std::vector<cplx> rhs{1.0};
        MinimaxOptions mo;
        mo.relative_gap = 1e-6;
        MinimaxResult mm;
        try {
            mm = constrained_minimax(convex_basis_, constraints, rhs, mo);
        } catch (const Error&) {
            return s;
        }
        State next = make_state(std::move(mm.coeffs));
        normalize(next);
        return next;
    }

    // Checkpoint: certify when the sampled ratio beats the certified best.
    void checkpoint(const State& s) {
        if (!(s.ratio() > best_.ratio)) return;
        RatioResult r;
        try {
            r = ratio(a_, R_, from_scaled(s.c, degree_, R_), opt_.certify_samples);
        } catch (const Error&) {
            return;
        }
        if (r.ratio > best_.ratio || !have_best_) {
            best_ = std::move(r);
            have_best_ = true;
        }
    }

    bool have_best() const { return have_best_; }
    const RatioResult& best() const { return best_; }
    std::size_t coefficient_count() const { return m_; }

private:
    const Matrix& a_;
    double R_;
    int degree_;
    long budget_;
    SearchOptions opt_;
    std::size_t m_;
    SampleBasis basis_;
    SampleBasis convex_basis_;
    std::vector<Matrix> powers_;
    long used_ = 0;
    bool exhausted_ = false;
    RatioResult best_;
    bool have_best_ = false;
};

constexpr int kMaxRounds = 12;
constexpr int kSweepsPerPhase = 40;
constexpr double kInitialStep = 0.05;
constexpr double kMinStep = 1e-7;
constexpr double kRoundGain = 1e-7;

// One start. Returns false when the budget ran out.
bool run_start(Search& search, std::uint64_t seed, int degree, long per_start_cap) {
    std::mt19937_64 rng(seed);
    std::vector<cplx> c(static_cast<std::size_t>(2 * degree + 1));
    for (auto& v : c) v = gaussian(rng);
    if (!search.charge(1)) return false;
    Search::State s = search.make_state(std::move(c));
    Search::normalize(s);
    search.checkpoint(s);

    const long start_used = search.used();
    const std::size_t m = search.coefficient_count();
    const cplx directions[2] = {1.0, cplx(0.0, 1.0)};

    for (int round = 0; round < kMaxRounds; ++round) {
        const double before = s.ratio();
        auto next = search.convex_step(s);
        if (!next) return false;
        if (next->ratio() > s.ratio()) s = std::move(*next);
        search.checkpoint(s);

        double step = kInitialStep;
        for (int sweep = 0; sweep < kSweepsPerPhase && step >= kMinStep; ++sweep) {
            bool improved = false;
            for (std::size_t i = 0; i < m; ++i) {
                for (const cplx dir : directions) {
                    for (const double sign : {1.0, -1.0}) {
                        if (!search.charge(1)) return false;
                        const cplx delta = sign * step * dir;
                        if (search.trial_ratio(s, i, delta) > s.ratio()) {
                            search.apply_step(s, i, delta);
                            improved = true;
                            break;
                        }
                    }
                }
            }
            if (!improved) step *= 0.25;
        }
        search.checkpoint(s);

        if (s.ratio() - before <= kRoundGain * s.ratio()) break;
        if (search.used() - start_used >= per_start_cap) break;
    }
    return true;
}

}  // namespace

SearchResult maximize_ratio(const Matrix& a, double R, int degree, long budget, std::uint64_t seed,
                            const SearchOptions& options) {
    require_radius(R);
    if (degree < 1) throw InvalidInput("degree must be at least 1");
    if (budget <= 0) throw InvalidInput("budget must be positive");
    if (options.max_starts < 1 || options.convex_step_cost < 1 || options.convex_samples < 64)
        throw InvalidInput("search options must be positive");
    require_admissible(a, R);

    Search search(a, R, degree, budget, options);
    bool finished = true;
    for (int start = 0; start < options.max_starts; ++start) {
        if (!run_start(search, trial_seed(seed, static_cast<std::uint64_t>(start)), degree, options.per_start_cap)) {
            finished = false;
            break;
        }
    }
    if (!search.have_best()) throw PrecisionError("no candidate could be certified");
    SearchResult out;
    out.best = search.best();
    out.converged = finished && !search.exhausted();
    out.evaluations = search.used();
    out.seed = seed;
    return out;
}

ExtremalResult extremal_derivative(double R, int degree, int samples, int max_iterations) {
    require_radius(R);
    if (degree < 1) throw InvalidInput("degree must be at least 1");
    if (samples < 64) throw InvalidInput("at least 64 boundary samples are required");
    if (max_iterations < 1) throw InvalidInput("iteration cap must be positive");
    const std::size_t m = static_cast<std::size_t>(2 * degree + 1);
    std::vector<cplx> value_row(m), slope_row(m);
    for (std::size_t i = 0; i < m; ++i) {
        const int k = static_cast<int>(i) - degree;
        value_row[i] = basis_scale(k, R);
        slope_row[i] = static_cast<double>(k) * basis_scale(k, R);
    }
    const std::vector<std::vector<cplx>> constraints{value_row, slope_row};
    const std::vector<cplx> rhs{0.0, 1.0};
    MinimaxOptions mo;
    mo.max_iterations = max_iterations;
    const MinimaxResult mm = constrained_minimax(boundary_basis(degree, R, samples), constraints, rhs, mo);

    ExtremalResult out;
    out.f = from_scaled(mm.coeffs, degree, R);
    const double sup = sup_norm_annulus(out.f, R, kCertifySamples);
    out.value = std::abs(out.f.derivative(1.0)) / sup;
    out.upper_estimate = mm.lower_bound > 0.0 ? 1.0 / mm.lower_bound : std::numeric_limits<double>::infinity();
    out.converged = mm.converged;
    out.iterations = mm.iterations;
    return out;
}

double complete_ratio(const Matrix& a, double R, const MatrixRationalFunction& F, int samples) {
    require_radius(R);
    require_admissible(a, R);
    const std::size_t n = a.size(), d = F.dim();
    const double sup = sup_norm_annulus(F, R, samples);
    if (!(sup > 0.0)) throw InvalidInput("function vanishes on the boundary");
    Matrix block(n * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const Matrix v = eval_matrix(F(i, j), a);
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t q = 0; q < n; ++q) block(i * n + r, j * n + q) = v(r, q);
        }
    return spectral_norm(block) / sup;
}

}  // namespace kspec::estimator
