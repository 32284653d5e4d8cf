#include "kspec/ratfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kspec/errors.hpp"

namespace kspec {

namespace {

constexpr double kPoleDistance = 1e-12;

void trim(std::vector<cplx>& c) {
    while (c.size() > 1 && c.back() == cplx(0.0)) c.pop_back();
}

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

cplx horner(const std::vector<cplx>& c, cplx z) {
    cplx acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
}

cplx horner_derivative(const std::vector<cplx>& c, cplx z) {
    cplx acc = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) acc = acc * z + static_cast<double>(k) * c[k];
    return acc;
}

cplx ipow(cplx z, int k) {
    if (k < 0) return 1.0 / ipow(z, -k);
    cplx result = 1.0, base = z;
    while (k > 0) {
        if (k & 1) result *= base;
        base *= base;
        k >>= 1;
    }
    return result;
}

Matrix matrix_horner(const std::vector<cplx>& c, const Matrix& a) {
    const std::size_t n = a.size();
    Matrix acc(n);
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * a;
        for (std::size_t i = 0; i < n; ++i) acc(i, i) += *it;
    }
    return acc;
}

Matrix matrix_power(const Matrix& a, int k) {
    Matrix result = Matrix::identity(a.size());
    Matrix base = a;
    while (k > 0) {
        if (k & 1) result = result * base;
        base = base * base;
        k >>= 1;
    }
    return result;
}

std::vector<cplx> convolve(const std::vector<cplx>& x, const std::vector<cplx>& y) {
    std::vector<cplx> out(x.size() + y.size() - 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
    return out;
}

void check_sampling(double R, int samples) {
    if (!(R > 1.0) || !std::isfinite(R)) throw DomainError("annulus radius R must exceed 1");
    if (samples < 64) throw InvalidInput("at least 64 boundary samples are required");
}

// Max over both boundary circles of `magnitude(z)`. The top sampled peaks are
// located by golden section and evaluated on a fixed angular lattice.
template <class F>
BoundarySup boundary_max(F&& magnitude, double R, int samples) {
    constexpr int kRefinedPeaks = 4;
    constexpr double kGolden = 0.6180339887498949;
    constexpr double kLattice = 2.0 * std::numbers::pi / 16777216.0;
    const double h = 2.0 * std::numbers::pi / samples;
    double best_refined = 0.0;
    double best_sample = 0.0;
    std::vector<double> vals(static_cast<std::size_t>(samples));
    for (const double rho : {R, 1.0 / R}) {
        auto at = [&](double theta) { return magnitude(std::polar(rho, theta)); };
        for (int j = 0; j < samples; ++j) vals[j] = at(j * h);
        std::vector<int> peaks;
        for (int j = 0; j < samples; ++j) {
            const double prev = vals[(j + samples - 1) % samples];
            const double next = vals[(j + 1) % samples];
            if (vals[j] >= prev && vals[j] >= next) peaks.push_back(j);
        }
        const auto top = std::min<std::size_t>(kRefinedPeaks, peaks.size());
        std::partial_sort(peaks.begin(), peaks.begin() + static_cast<std::ptrdiff_t>(top), peaks.end(),
                          [&](int x, int y) { return vals[x] != vals[y] ? vals[x] > vals[y] : x < y; });
        for (std::size_t p = 0; p < top; ++p) {
            const int j = peaks[p];
            best_sample = std::max(best_sample, vals[j]);
            double lo = (j - 1) * h, hi = (j + 1) * h;
            double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
            double f1 = at(x1), f2 = at(x2);
            for (int it = 0; it < 40; ++it) {
                if (f1 >= f2) {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - kGolden * (hi - lo);
                    f1 = at(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + kGolden * (hi - lo);
                    f2 = at(x2);
                }
            }
            // Report values on a fixed lattice only, so the result does not
            // depend on `samples`; the lattice is far coarser than the
            // rounding-noise plateau around the peak.
            const long long k = std::llround(0.5 * (lo + hi) / kLattice);
            const double local = std::max({at(static_cast<double>(k - 1) * kLattice),
                                           at(static_cast<double>(k) * kLattice),
                                           at(static_cast<double>(k + 1) * kLattice)});
            best_refined = std::max(best_refined, local);
        }
        for (const double v : vals) best_sample = std::max(best_sample, v);
    }
    return {std::max(best_refined, best_sample), best_sample};
}

}  // namespace

// ---------------------------------------------------------------- RationalFunction

RationalFunction::RationalFunction(std::vector<cplx> numerator, std::vector<cplx> denominator,
                                   int laurent_low)
    : num_(std::move(numerator)), den_(std::move(denominator)), low_(laurent_low) {
    if (num_.empty()) num_.push_back(0.0);
    if (den_.empty()) throw InvalidInput("denominator coefficient list is empty");
    for (const auto& v : num_)
        if (!finite(v)) throw InvalidInput("numerator coefficients must be finite");
    for (const auto& v : den_)
        if (!finite(v)) throw InvalidInput("denominator coefficients must be finite");
    trim(num_);
    trim(den_);
    if (den_.size() == 1 && den_[0] == cplx(0.0)) throw InvalidInput("denominator is identically zero");
    // Normalize a constant denominator into the numerator.
    if (den_.size() == 1 && den_[0] != cplx(1.0)) {
        for (auto& v : num_) v /= den_[0];
        den_[0] = 1.0;
    }
    auto poles = std::make_shared<std::vector<cplx>>(polynomial_roots(den_));
    if (low_ < 0) poles->push_back(0.0);
    poles_ = std::move(poles);
}

bool RationalFunction::has_pole_in_annulus(double R) const {
    const double r = 1.0 / R;
    return std::any_of(poles_->begin(), poles_->end(), [&](cplx p) {
        const double m = std::abs(p);
        return m >= r * (1.0 - 1e-12) && m <= R * (1.0 + 1e-12);
    });
}

cplx RationalFunction::value(cplx z) const {
    cplx v = horner(num_, z);
    if (!denominator_is_one()) v /= horner(den_, z);
    if (low_ != 0) v *= ipow(z, low_);
    return v;
}

cplx RationalFunction::derivative(cplx z) const {
    // f = z^low · p / q
    const cplx p = horner(num_, z);
    const cplx dp = horner_derivative(num_, z);
    const cplx q = horner(den_, z);
    const cplx dq = horner_derivative(den_, z);
    const cplx ratio = p / q;
    const cplx dratio = (dp * q - p * dq) / (q * q);
    if (low_ == 0) return dratio;
    return static_cast<double>(low_) * ipow(z, low_ - 1) * ratio + ipow(z, low_) * dratio;
}

RationalFunction RationalFunction::operator*(const RationalFunction& other) const {
    return RationalFunction(convolve(num_, other.num_), convolve(den_, other.den_), low_ + other.low_);
}

RationalFunction RationalFunction::scaled(cplx s) const {
    std::vector<cplx> num = num_;
    for (auto& v : num) v *= s;
    return RationalFunction(std::move(num), den_, low_);
}

// ---------------------------------------------------------------- MatrixRationalFunction

MatrixRationalFunction::MatrixRationalFunction(std::size_t dim, std::vector<RationalFunction> entries)
    : dim_(dim), entries_(std::move(entries)) {
    if (dim_ == 0 || entries_.size() != dim_ * dim_)
        throw InvalidInput("matrix rational function needs dim*dim entries");
}

Matrix MatrixRationalFunction::value(cplx z) const {
    Matrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j).value(z);
    return m;
}

bool MatrixRationalFunction::has_pole_in_annulus(double R) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const RationalFunction& f) { return f.has_pole_in_annulus(R); });
}

// ---------------------------------------------------------------- free functions

std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs) {
    std::vector<cplx> c = coeffs;
    trim(c);
    const std::size_t deg = c.size() - 1;
    if (deg == 0) return {};
    if (deg == 1) return {-c[0] / c[1]};
    // Monic
    const cplx lead = c.back();
    for (auto& v : c) v /= lead;
    double bound = 0.0;
    for (std::size_t k = 0; k < deg; ++k) bound = std::max(bound, std::abs(c[k]));
    bound += 1.0;

    std::vector<cplx> z(deg);
    for (std::size_t k = 0; k < deg; ++k)
        z[k] = std::polar(0.5 * bound, 2.0 * std::numbers::pi * (k + 0.25) / static_cast<double>(deg));

    for (int it = 0; it < 500; ++it) {
        double max_step = 0.0;
        for (std::size_t k = 0; k < deg; ++k) {
            const cplx p = horner(c, z[k]);
            const cplx dp = horner_derivative(c, z[k]);
            if (p == cplx(0.0)) continue;
            const cplx ratio = p / dp;
            cplx sum = 0.0;
            for (std::size_t j = 0; j < deg; ++j)
                if (j != k) sum += 1.0 / (z[k] - z[j]);
            const cplx step = ratio / (1.0 - ratio * sum);
            z[k] -= step;
            max_step = std::max(max_step, std::abs(step) / std::max(1.0, std::abs(z[k])));
        }
        if (max_step < 1e-15) break;
    }
    return z;
}

cplx eval_scalar(const RationalFunction& f, cplx z) {
    if (!finite(z)) throw InvalidInput("evaluation point must be finite");
    for (const auto& p : f.poles())
        if (std::abs(z - p) <= kPoleDistance) throw PoleError("evaluation point is at a pole");
    return f.value(z);
}

Matrix eval_matrix(const RationalFunction& f, const Matrix& a) {
    Matrix result = matrix_horner(f.numerator(), a);
    if (!f.denominator_is_one()) {
        const Matrix q = matrix_horner(f.denominator(), a);
        try {
            result = result * inverse(q);
        } catch (const SingularMatrix&) {
            throw PoleMeetsSpectrum("q(A) is singular: a pole of f lies in the spectrum of A");
        }
    }
    const int low = f.laurent_low();
    if (low > 0) {
        result = matrix_power(a, low) * result;
    } else if (low < 0) {
        Matrix a_inv;
        try {
            a_inv = inverse(a);
        } catch (const SingularMatrix&) {
            throw PoleMeetsSpectrum("A is singular but f has a pole at 0");
        }
        result = matrix_power(a_inv, -low) * result;
    }
    return result;
}

cplx derivative_at(const RationalFunction& f, cplx z) {
    if (!finite(z)) throw InvalidInput("evaluation point must be finite");
    for (const auto& p : f.poles())
        if (std::abs(z - p) <= kPoleDistance) throw PoleError("derivative requested at a pole");
    return f.derivative(z);
}

BoundarySup boundary_sup(const RationalFunction& f, double R, int samples) {
    check_sampling(R, samples);
    if (f.has_pole_in_annulus(R)) throw PoleInRegion("f has a pole in the closed annulus");
    return boundary_max([&](cplx z) { return std::abs(f.value(z)); }, R, samples);
}

double sup_norm_annulus(const RationalFunction& f, double R, int samples) {
    return boundary_sup(f, R, samples).value;
}

double sup_norm_annulus(const MatrixRationalFunction& f, double R, int samples) {
    check_sampling(R, samples);
    if (f.has_pole_in_annulus(R)) throw PoleInRegion("an entry has a pole in the closed annulus");
    if (f.dim() == 1) return sup_norm_annulus(f(0, 0), R, samples);
    return boundary_max([&](cplx z) { return spectral_norm(f.value(z)); }, R, samples).value;
}

}  // namespace kspec
