#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kspec/errors.hpp"
#include "kspec/linalg.hpp"

namespace kspec {

/// Point of the Riemann sphere. Infinity is a flag, never a floating-point value.
struct SpherePoint {
    cplx z{0.0};
    bool infinite = false;

    static SpherePoint at(cplx z) { return {z, false}; }
    static SpherePoint infinity() { return {cplx(0.0), true}; }
};

enum class DiskKind { Disk, Codisk, HalfPlane };

/**
 * Closed disk of the Riemann sphere,
 *
 *     { z : a|z|² + 2 Re(conj(b) z) + c ≤ 0 },
 *
 * i.e. the set where the Hermitian form [[a, b], [conj(b), c]] is
 * non-positive on (z, 1). a > 0 is an ordinary disk, a < 0 the exterior of
 * one (∞ included), a = 0 a half-plane (∞ on the boundary).
 *
 * Coefficients are scaled so that max(|a|, |b|, |c|) = 1.
 */
class SphereDisk {
public:
    /// Validates |b|² - ac > 0 and normalizes.
    SphereDisk(double a, cplx b, double c);

    /// { |z - center| ≤ radius }
    static SphereDisk disk(cplx center, double radius);
    /// { |z - center| ≥ radius } ∪ {∞}
    static SphereDisk codisk(cplx center, double radius);
    /// { Re(e^{-iω} z) ≤ offset }
    static SphereDisk half_plane(double omega, double offset);

    double a() const { return a_; }
    cplx b() const { return b_; }
    double c() const { return c_; }

    DiskKind kind() const;
    /// |b|² - ac, positive.
    double discriminant() const;

    /// Center and radius of the boundary circle (Disk / Codisk only).
    cplx center() const;
    double radius() const;
    /// For half-planes: the region is { Re(e^{-iω} z) ≤ offset }.
    double angle() const;
    double offset() const;

    /// Value of the Hermitian form at a finite point.
    double form(cplx z) const;
    bool contains(const SpherePoint& p, double slack = 0.0) const;

    /// Hermitian coefficient matrix [[a, b], [conj(b), c]].
    Matrix hermitian() const;
    static SphereDisk from_hermitian(const Matrix& h);

private:
    double a_;
    cplx b_;
    double c_;
};

/// z ↦ (m11 z + m12) / (m21 z + m22), stored with det = 1.
class MoebiusMap {
public:
    MoebiusMap(cplx m11, cplx m12, cplx m21, cplx m22);

    static MoebiusMap identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static MoebiusMap from_matrix(const Matrix& m);

    cplx m11() const { return m_[0]; }
    cplx m12() const { return m_[1]; }
    cplx m21() const { return m_[2]; }
    cplx m22() const { return m_[3]; }

    Matrix matrix() const;
    MoebiusMap inverse() const;
    /// (this ∘ other)(z) = this(other(z))
    MoebiusMap compose(const MoebiusMap& other) const;

    SpherePoint apply(const SpherePoint& p) const;
    SpherePoint apply(cplx z) const { return apply(SpherePoint::at(z)); }

    /// m(a) = (m11 a + m12)(m21 a + m22)⁻¹ for an operator a.
    Matrix apply(const Matrix& a) const;

private:
    std::array<cplx, 4> m_;
};

SphereDisk apply_map(const MoebiusMap& m, const SphereDisk& d);

enum class CaseLabel {
    Singleton,
    Circline,
    SectorOrStrip,
    Lens,
    Ring,
    Tangent,
    Nested,
    Identical,
    Empty,
};

std::string_view to_string(CaseLabel label);

struct Classification {
    CaseLabel label;
    std::vector<SpherePoint> boundary_points;
    std::optional<MoebiusMap> canonical_map;
    std::optional<double> canonical_R;
};

class AmbiguousClassification : public Error {
public:
    AmbiguousClassification(const std::string& what, CaseLabel first, CaseLabel second)
        : Error(what), first_(first), second_(second) {}
    CaseLabel first() const { return first_; }
    CaseLabel second() const { return second_; }

private:
    CaseLabel first_;
    CaseLabel second_;
};

inline constexpr double kDefaultGeometryTol = 1e-9;

/**
 * Cosine of the angle between the two oriented boundary circlines,
 *
 *     I = (a1 c2 + a2 c1 - 2 Re(b1 conj(b2))) / (2 sqrt(D1 D2)).
 *
 * |I| < 1: two crossings; |I| = 1: tangent; |I| > 1: disjoint boundaries.
 * Invariant under Möbius maps applied to both disks.
 */
double inversive_product(const SphereDisk& d1, const SphereDisk& d2);

/// Number of common boundary points on the sphere: 0, 1, 2, or -1 for infinitely many.
int boundary_intersection_count(const SphereDisk& d1, const SphereDisk& d2,
                                double tol = kDefaultGeometryTol);

Classification classify(const SphereDisk& d1, const SphereDisk& d2,
                        double tol = kDefaultGeometryTol);

struct AnnulusNormalization {
    MoebiusMap map;
    double R;
};

/// Map sending d1 to {|z| ≤ R} and d2 to {|z| ≥ 1/R}. Throws WrongCase unless the pair is a Ring.
AnnulusNormalization normalize_annulus(const SphereDisk& d1, const SphereDisk& d2);

struct SpectralCertificate {
    bool spectral = false;
    /// Exterior disk whose center is (numerically) an eigenvalue.
    bool singular_shift = false;
    double measured = 0.0;
    double threshold = 0.0;
};

/// von Neumann criterion for a disk, its exterior, or a half-plane.
SpectralCertificate certify_spectral_detail(const SphereDisk& d, const Matrix& a);

inline bool certify_spectral(const SphereDisk& d, const Matrix& a) {
    return certify_spectral_detail(d, a).spectral;
}

}  // namespace kspec
