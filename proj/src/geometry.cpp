#include "kspec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kspec {

namespace {

constexpr double kZeroCoefficient = 1e-15;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

double coefficient_distance(const SphereDisk& d1, const SphereDisk& d2, double sign) {
    return std::max({std::abs(d1.a() - sign * d2.a()), std::abs(d1.b() - sign * d2.b()),
                     std::abs(d1.c() - sign * d2.c())});
}

// Line { Re(conj(b) z) = -c/2 } intersected with the circle of `circle`.
std::vector<cplx> line_circle(cplx b, double c, const SphereDisk& circle) {
    const double bn = std::abs(b);
    const cplx n = b / bn;
    const cplx z0 = (-c / (2.0 * bn)) * n;
    const cplx dir = cplx(0.0, 1.0) * n;
    const cplx center = circle.center();
    const double rho = circle.radius();
    const cplx w = z0 - center;
    const double beta = (std::conj(dir) * w).real();
    const double disc = std::max(0.0, beta * beta - std::norm(w) + rho * rho);
    const double root = std::sqrt(disc);
    return {z0 + (-beta + root) * dir, z0 + (-beta - root) * dir};
}

// Common points of two crossing circlines (|I| < 1).
std::vector<SpherePoint> crossing_points(const SphereDisk& d1, const SphereDisk& d2) {
    if (d1.a() == 0.0 && d2.a() == 0.0) {
        // p x + q y = -c/2 for b = p + i q
        const double p1 = d1.b().real(), q1 = d1.b().imag();
        const double p2 = d2.b().real(), q2 = d2.b().imag();
        const double det = p1 * q2 - p2 * q1;
        const double r1 = -d1.c() / 2.0, r2 = -d2.c() / 2.0;
        const cplx z((r1 * q2 - r2 * q1) / det, (p1 * r2 - p2 * r1) / det);
        return {SpherePoint::at(z), SpherePoint::infinity()};
    }
    std::vector<cplx> pts;
    if (d1.a() == 0.0) {
        pts = line_circle(d1.b(), d1.c(), d2);
    } else if (d2.a() == 0.0) {
        pts = line_circle(d2.b(), d2.c(), d1);
    } else {
        // radical axis a2 H1 - a1 H2
        const cplx b = d2.a() * d1.b() - d1.a() * d2.b();
        const double c = d2.a() * d1.c() - d1.a() * d2.c();
        pts = line_circle(b, c, d1);
    }
    std::sort(pts.begin(), pts.end(), [](cplx u, cplx v) {
        return u.imag() != v.imag() ? u.imag() < v.imag() : u.real() < v.real();
    });
    return {SpherePoint::at(pts[0]), SpherePoint::at(pts[1])};
}

// Common point of two tangent circlines: null vector of the degenerate pencil member.
SpherePoint tangency_point(const SphereDisk& d1, const SphereDisk& d2) {
    const double p = d1.a() * d2.c() + d2.a() * d1.c() - 2.0 * (d1.b() * std::conj(d2.b())).real();
    const double s0 = -p / (2.0 * d2.discriminant());
    const double ka = d1.a() - s0 * d2.a();
    const cplx kb = d1.b() - s0 * d2.b();
    const double kc = d1.c() - s0 * d2.c();
    cplx v1, v2;
    if (ka * ka + std::norm(kb) >= kc * kc + std::norm(kb)) {
        v1 = kb;
        v2 = -ka;
    } else {
        v1 = kc;
        v2 = -std::conj(kb);
    }
    if (std::abs(v2) <= 1e-12 * std::abs(v1)) return SpherePoint::infinity();
    return SpherePoint::at(v1 / v2);
}

Classification tangent_case(const SphereDisk& d1, const SphereDisk& d2) {
    const SpherePoint lambda = tangency_point(d1, d2);
    const MoebiusMap to_infinity =
        lambda.infinite ? MoebiusMap::identity() : MoebiusMap(0.0, 1.0, 1.0, -lambda.z);
    const SphereDisk h1 = apply_map(to_infinity, d1);
    const SphereDisk h2 = apply_map(to_infinity, d2);
    const bool both_half_planes = d1.kind() == DiskKind::HalfPlane && d2.kind() == DiskKind::HalfPlane;

    const double same_direction = (h1.b() * std::conj(h2.b())).real();
    if (same_direction > 0.0) return {CaseLabel::Tangent, {lambda}, std::nullopt, std::nullopt};

    const double o1 = -h1.c() / (2.0 * std::abs(h1.b()));
    const double o2 = -h2.c() / (2.0 * std::abs(h2.b()));
    if (o1 + o2 > 0.0) {
        if (both_half_planes && lambda.infinite)
            return {CaseLabel::SectorOrStrip, {lambda}, std::nullopt, std::nullopt};
        return {CaseLabel::Tangent, {lambda}, std::nullopt, std::nullopt};
    }
    return {CaseLabel::Singleton, {lambda}, std::nullopt, std::nullopt};
}

Classification crossing_case(const SphereDisk& d1, const SphereDisk& d2) {
    auto pts = crossing_points(d1, d2);
    if (d1.kind() == DiskKind::HalfPlane && d2.kind() == DiskKind::HalfPlane)
        return {CaseLabel::SectorOrStrip, std::move(pts), std::nullopt, std::nullopt};
    const cplx l1 = pts[0].z;
    return {CaseLabel::Lens, std::move(pts), MoebiusMap(0.0, 1.0, -1.0, l1), std::nullopt};
}

// Both boundaries sent to circles centered at 0.
struct ConcentricFrame {
    MoebiusMap map;
    SphereDisk image1;
    SphereDisk image2;
};

ConcentricFrame concentric_frame(const SphereDisk& d1, const SphereDisk& d2) {
    // Reflection in a circline is z ↦ S(conj(z)) with S = [[-b, -c], [a, conj(b)]].
    auto reflection = [](const SphereDisk& d) {
        return std::array<cplx, 4>{-d.b(), -d.c(), d.a(), std::conj(d.b())};
    };
    const auto s1 = reflection(d1);
    const auto s2 = reflection(d2);
    // C = S2 · conj(S1): composition of the two reflections.
    const std::array<cplx, 4> c{
        s2[0] * std::conj(s1[0]) + s2[1] * std::conj(s1[2]),
        s2[0] * std::conj(s1[1]) + s2[1] * std::conj(s1[3]),
        s2[2] * std::conj(s1[0]) + s2[3] * std::conj(s1[2]),
        s2[2] * std::conj(s1[1]) + s2[3] * std::conj(s1[3]),
    };
    const cplx half_tr = 0.5 * (c[0] + c[3]);
    const cplx det = c[0] * c[3] - c[1] * c[2];
    const cplx root = std::sqrt(half_tr * half_tr - det);
    auto eigenvector = [&](cplx lambda) -> std::array<cplx, 2> {
        const std::array<cplx, 2> u{c[1], lambda - c[0]};
        const std::array<cplx, 2> w{lambda - c[3], c[2]};
        if (std::norm(u[0]) + std::norm(u[1]) >= std::norm(w[0]) + std::norm(w[1])) return u;
        return w;
    };
    const auto vq = eigenvector(half_tr + root);
    const auto vp = eigenvector(half_tr - root);
    // Columns [vq vp]; its inverse sends vq to ∞ and vp to 0.
    const MoebiusMap frame = MoebiusMap(vq[0], vp[0], vq[1], vp[1]).inverse();
    return {frame, apply_map(frame, d1), apply_map(frame, d2)};
}

Classification disjoint_case(const SphereDisk& d1, const SphereDisk& d2) {
    const auto frame = concentric_frame(d1, d2);
    const bool inner1 = frame.image1.a() > 0.0;
    const bool inner2 = frame.image2.a() > 0.0;
    if (inner1 == inner2) return {CaseLabel::Nested, {}, std::nullopt, std::nullopt};
    const SphereDisk& in = inner1 ? frame.image1 : frame.image2;
    const SphereDisk& out = inner1 ? frame.image2 : frame.image1;
    if (out.radius() < in.radius()) {
        const auto norm = normalize_annulus(d1, d2);
        return {CaseLabel::Ring, {}, norm.map, norm.R};
    }
    return {CaseLabel::Empty, {}, std::nullopt, std::nullopt};
}

}  // namespace

// ---------------------------------------------------------------- SphereDisk

SphereDisk::SphereDisk(double a, cplx b, double c) {
    if (!std::isfinite(a) || !finite(b) || !std::isfinite(c))
        throw InvalidInput("disk coefficients must be finite");
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
    if (scale == 0.0) throw InvalidInput("disk coefficients are all zero");
    a_ = a / scale;
    b_ = b / scale;
    c_ = c / scale;
    if (std::abs(a_) < kZeroCoefficient) a_ = 0.0;
    if (!(discriminant() > 0.0)) throw InvalidInput("disk has empty interior (|b|^2 - ac <= 0)");
}

SphereDisk SphereDisk::disk(cplx center, double radius) {
    if (!(radius > 0.0)) throw InvalidInput("disk radius must be positive");
    return {1.0, -center, std::norm(center) - radius * radius};
}

SphereDisk SphereDisk::codisk(cplx center, double radius) {
    if (!(radius > 0.0)) throw InvalidInput("disk radius must be positive");
    return {-1.0, center, radius * radius - std::norm(center)};
}

SphereDisk SphereDisk::half_plane(double omega, double offset) {
    return {0.0, std::polar(1.0, omega), -2.0 * offset};
}

DiskKind SphereDisk::kind() const {
    if (a_ > 0.0) return DiskKind::Disk;
    if (a_ < 0.0) return DiskKind::Codisk;
    return DiskKind::HalfPlane;
}

double SphereDisk::discriminant() const { return std::norm(b_) - a_ * c_; }

cplx SphereDisk::center() const {
    if (a_ == 0.0) throw InvalidInput("half-plane has no center");
    return -b_ / a_;
}

double SphereDisk::radius() const {
    if (a_ == 0.0) throw InvalidInput("half-plane has no radius");
    return std::sqrt(discriminant()) / std::abs(a_);
}

double SphereDisk::angle() const {
    if (a_ != 0.0) throw InvalidInput("not a half-plane");
    return std::arg(b_);
}

double SphereDisk::offset() const {
    if (a_ != 0.0) throw InvalidInput("not a half-plane");
    return -c_ / (2.0 * std::abs(b_));
}

double SphereDisk::form(cplx z) const {
    return a_ * std::norm(z) + 2.0 * (std::conj(b_) * z).real() + c_;
}

bool SphereDisk::contains(const SpherePoint& p, double slack) const {
    if (p.infinite) return a_ <= 0.0;
    return form(p.z) <= slack;
}

Matrix SphereDisk::hermitian() const { return Matrix{{a_, b_}, {std::conj(b_), c_}}; }

SphereDisk SphereDisk::from_hermitian(const Matrix& h) {
    if (h.size() != 2) throw InvalidInput("disk coefficient matrix must be 2x2");
    return {h(0, 0).real(), 0.5 * (h(0, 1) + std::conj(h(1, 0))), h(1, 1).real()};
}

// ---------------------------------------------------------------- MoebiusMap

MoebiusMap::MoebiusMap(cplx m11, cplx m12, cplx m21, cplx m22) : m_{m11, m12, m21, m22} {
    for (const auto& v : m_)
        if (!finite(v)) throw InvalidInput("Moebius coefficients must be finite");
    const double scale = std::max({std::abs(m11), std::abs(m12), std::abs(m21), std::abs(m22)});
    const cplx det = m11 * m22 - m12 * m21;
    if (scale == 0.0 || std::abs(det) < 1e-12 * scale * scale)
        throw InvalidInput("Moebius map is degenerate (determinant ~ 0)");
    const cplx s = std::sqrt(det);
    for (auto& v : m_) v /= s;
}

MoebiusMap MoebiusMap::from_matrix(const Matrix& m) {
    if (m.size() != 2) throw InvalidInput("Moebius coefficient matrix must be 2x2");
    return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
}

Matrix MoebiusMap::matrix() const { return Matrix{{m_[0], m_[1]}, {m_[2], m_[3]}}; }

MoebiusMap MoebiusMap::inverse() const { return {m_[3], -m_[1], -m_[2], m_[0]}; }

MoebiusMap MoebiusMap::compose(const MoebiusMap& o) const {
    return {m_[0] * o.m_[0] + m_[1] * o.m_[2], m_[0] * o.m_[1] + m_[1] * o.m_[3],
            m_[2] * o.m_[0] + m_[3] * o.m_[2], m_[2] * o.m_[1] + m_[3] * o.m_[3]};
}

SpherePoint MoebiusMap::apply(const SpherePoint& p) const {
    const cplx v1 = p.infinite ? cplx(1.0) : p.z;
    const cplx v2 = p.infinite ? cplx(0.0) : cplx(1.0);
    const cplx w1 = m_[0] * v1 + m_[1] * v2;
    const cplx w2 = m_[2] * v1 + m_[3] * v2;
    if (std::abs(w2) <= 1e-15 * std::abs(w1)) return SpherePoint::infinity();
    return SpherePoint::at(w1 / w2);
}

Matrix MoebiusMap::apply(const Matrix& a) const {
    const Matrix id = Matrix::identity(a.size());
    const Matrix num = a * m_[0] + id * m_[1];
    const Matrix den = a * m_[2] + id * m_[3];
    return num * kspec::inverse(den);
}

SphereDisk apply_map(const MoebiusMap& m, const SphereDisk& d) {
    const Matrix inv = m.inverse().matrix();
    return SphereDisk::from_hermitian(inv.adjoint() * d.hermitian() * inv);
}

// ---------------------------------------------------------------- classification

std::string_view to_string(CaseLabel label) {
    switch (label) {
        case CaseLabel::Singleton: return "Singleton";
        case CaseLabel::Circline: return "Circline";
        case CaseLabel::SectorOrStrip: return "SectorOrStrip";
        case CaseLabel::Lens: return "Lens";
        case CaseLabel::Ring: return "Ring";
        case CaseLabel::Tangent: return "Tangent";
        case CaseLabel::Nested: return "Nested";
        case CaseLabel::Identical: return "Identical";
        case CaseLabel::Empty: return "Empty";
    }
    return "?";
}

double inversive_product(const SphereDisk& d1, const SphereDisk& d2) {
    const double p = d1.a() * d2.c() + d2.a() * d1.c() - 2.0 * (d1.b() * std::conj(d2.b())).real();
    return p / (2.0 * std::sqrt(d1.discriminant() * d2.discriminant()));
}

int boundary_intersection_count(const SphereDisk& d1, const SphereDisk& d2, double tol) {
    if (coefficient_distance(d1, d2, 1.0) <= tol || coefficient_distance(d1, d2, -1.0) <= tol)
        return -1;
    const double inv = inversive_product(d1, d2);
    const double delta = std::abs(inv) - 1.0;
    if (std::abs(delta) <= tol) return 1;
    return delta < 0.0 ? 2 : 0;
}

Classification classify(const SphereDisk& d1, const SphereDisk& d2, double tol) {
    if (!(tol > 0.0)) throw InvalidInput("classification tolerance must be positive");
    if (coefficient_distance(d1, d2, 1.0) <= tol)
        return {CaseLabel::Identical, {}, std::nullopt, std::nullopt};
    if (coefficient_distance(d1, d2, -1.0) <= tol)
        return {CaseLabel::Circline, {}, std::nullopt, std::nullopt};

    const double inv = inversive_product(d1, d2);
    const double delta = std::abs(inv) - 1.0;
    auto generic = [&] { return delta < 0.0 ? crossing_case(d1, d2) : disjoint_case(d1, d2); };

    if (std::abs(delta) <= tol) return tangent_case(d1, d2);
    if (std::abs(delta) < 2.0 * tol) {
        const CaseLabel tangent = tangent_case(d1, d2).label;
        const CaseLabel other = generic().label;
        if (tangent != other)
            throw AmbiguousClassification("boundary circlines are within tolerance of tangency",
                                          tangent, other);
        return generic();
    }
    return generic();
}

AnnulusNormalization normalize_annulus(const SphereDisk& d1, const SphereDisk& d2) {
    if (std::abs(inversive_product(d1, d2)) <= 1.0 + kDefaultGeometryTol)
        throw WrongCase("disk boundaries are not disjoint; intersection is not a ring");
    const auto frame = concentric_frame(d1, d2);
    MoebiusMap map = frame.map;
    SphereDisk in = frame.image1;
    SphereDisk out = frame.image2;
    if (in.a() < 0.0) {
        const MoebiusMap flip(0.0, 1.0, 1.0, 0.0);
        map = flip.compose(map);
        in = apply_map(flip, in);
        out = apply_map(flip, out);
    }
    if (!(in.a() > 0.0 && out.a() < 0.0))
        throw WrongCase("disks are nested; intersection is not a ring");
    const double rho_in = in.radius();
    const double rho_out = out.radius();
    if (!(rho_out < rho_in)) throw WrongCase("disks do not overlap; intersection is not a ring");
    const double k = 1.0 / std::sqrt(rho_in * rho_out);
    map = MoebiusMap(k, 0.0, 0.0, 1.0).compose(map);
    return {map, std::sqrt(rho_in / rho_out)};
}

// ---------------------------------------------------------------- certification

SpectralCertificate certify_spectral_detail(const SphereDisk& d, const Matrix& a) {
    const std::size_t n = a.size();
    SpectralCertificate cert;
    auto slack = [](double threshold) { return 1e-10 * std::max(1.0, std::abs(threshold)); };
    switch (d.kind()) {
        case DiskKind::Disk: {
            const Matrix shifted = a - Matrix::identity(n) * d.center();
            cert.measured = spectral_norm(shifted);
            cert.threshold = d.radius();
            break;
        }
        case DiskKind::Codisk: {
            const Matrix shifted = a - Matrix::identity(n) * d.center();
            cert.threshold = 1.0 / d.radius();
            try {
                cert.measured = spectral_norm(inverse(shifted));
            } catch (const SingularMatrix&) {
                cert.singular_shift = true;
                cert.measured = std::numeric_limits<double>::infinity();
                return cert;
            }
            break;
        }
        case DiskKind::HalfPlane: {
            const cplx rot = std::polar(1.0, -d.angle());
            cert.measured = hermitian_part_max_eig(a * rot);
            cert.threshold = d.offset();
            break;
        }
    }
    cert.spectral = cert.measured <= cert.threshold + slack(cert.threshold);
    return cert;
}

}  // namespace kspec
