#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kspec/estimator.hpp"
#include "kspec/geometry.hpp"
#include "test_support.hpp"

using namespace kspec;
using doctest::Approx;

namespace {

double coeff_gap(const SphereDisk& x, const SphereDisk& y) {
    return std::max({std::abs(x.a() - y.a()), std::abs(x.b() - y.b()), std::abs(x.c() - y.c())});
}

bool near_point(const SpherePoint& p, cplx z, double tol = 1e-9) {
    return !p.infinite && std::abs(p.z - z) <= tol;
}

const SphereDisk kUpperHalf = SphereDisk::half_plane(-std::numbers::pi / 2, 0.0);  // Im z ≥ 0
const SphereDisk kLowerHalf = SphereDisk::half_plane(std::numbers::pi / 2, 0.0);   // Im z ≤ 0

}  // namespace

TEST_CASE("disk constructors and normalization") {
    const SphereDisk d = SphereDisk::disk({1.0, 2.0}, 3.0);
    CHECK(d.kind() == DiskKind::Disk);
    CHECK(std::max({std::abs(d.a()), std::abs(d.b()), std::abs(d.c())}) == Approx(1.0));
    CHECK(std::abs(d.center() - cplx(1.0, 2.0)) <= 1e-12);
    CHECK(d.radius() == Approx(3.0));
    CHECK(SphereDisk::codisk(0.0, 1.0).contains(SpherePoint::infinity()));
    CHECK_FALSE(SphereDisk::disk(0.0, 1.0).contains(SpherePoint::infinity()));
    CHECK(kLowerHalf.contains(SpherePoint::at({3.0, -1.0})));
    CHECK_FALSE(kLowerHalf.contains(SpherePoint::at({3.0, 1.0})));
    CHECK_THROWS_AS(SphereDisk(1.0, 0.0, 1.0), InvalidInput);
    CHECK_THROWS_AS(SphereDisk::disk(0.0, -1.0), InvalidInput);
}

TEST_CASE("classify: spec examples") {
    SUBCASE("external tangency is a singleton") {
        const auto c = classify(SphereDisk::disk(0.0, 1.0), SphereDisk::disk(2.0, 1.0));
        CHECK(c.label == CaseLabel::Singleton);
        REQUIRE(c.boundary_points.size() == 1);
        CHECK(near_point(c.boundary_points[0], 1.0));
    }
    SUBCASE("disk and its exterior share a circle") {
        CHECK(classify(SphereDisk::disk(0.0, 1.0), SphereDisk::codisk(0.0, 1.0)).label == CaseLabel::Circline);
    }
    SUBCASE("strip") {
        const auto c = classify(SphereDisk::half_plane(0.0, 1.0), SphereDisk::half_plane(std::numbers::pi, 1.0));
        CHECK(c.label == CaseLabel::SectorOrStrip);
    }
    SUBCASE("lens") {
        const auto c = classify(SphereDisk::disk(0.0, 1.0), SphereDisk::disk(1.0, 1.0));
        CHECK(c.label == CaseLabel::Lens);
        REQUIRE(c.boundary_points.size() == 2);
        const double h = std::sqrt(3.0) / 2;
        const bool order1 = near_point(c.boundary_points[0], {0.5, h}) && near_point(c.boundary_points[1], {0.5, -h});
        const bool order2 = near_point(c.boundary_points[1], {0.5, h}) && near_point(c.boundary_points[0], {0.5, -h});
        CHECK((order1 || order2));
        REQUIRE(c.canonical_map.has_value());
        // z ↦ 1/(λ₁ - z) sends λ₁ to ∞.
        CHECK(c.canonical_map->apply(c.boundary_points[0]).infinite);
    }
    SUBCASE("ring") {
        const auto c = classify(SphereDisk::disk(0.0, 2.0), SphereDisk::codisk(0.0, 0.5));
        CHECK(c.label == CaseLabel::Ring);
        CHECK(c.boundary_points.empty());
        REQUIRE(c.canonical_R.has_value());
        CHECK(*c.canonical_R == Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("internal tangency at the origin") {
        const auto c = classify(SphereDisk::disk({0.0, 1.0}, 1.0), kUpperHalf);
        CHECK(c.label == CaseLabel::Tangent);
        REQUIRE(c.boundary_points.size() == 1);
        CHECK(near_point(c.boundary_points[0], 0.0));
    }
    SUBCASE("disk above the axis and the lower half-plane touch only at 0") {
        const auto c = classify(SphereDisk::disk({0.0, 1.0}, 1.0), kLowerHalf);
        CHECK(c.label == CaseLabel::Singleton);
        REQUIRE(c.boundary_points.size() == 1);
        CHECK(near_point(c.boundary_points[0], 0.0));
    }
}

TEST_CASE("classify: extended labels") {
    const SphereDisk d = SphereDisk::disk(0.3, 1.7);
    CHECK(classify(d, d).label == CaseLabel::Identical);
    CHECK(classify(SphereDisk::disk(0.0, 3.0), SphereDisk::disk(0.5, 1.0)).label == CaseLabel::Nested);
    CHECK(classify(SphereDisk::disk(0.0, 1.0), SphereDisk::disk(5.0, 1.0)).label == CaseLabel::Empty);
    CHECK(classify(SphereDisk::codisk(0.0, 1.0), SphereDisk::codisk(5.0, 1.0)).label == CaseLabel::Ring);
    // Two half-planes crossing at a finite point give a sector.
    CHECK(classify(SphereDisk::half_plane(0.0, 0.0), kUpperHalf).label == CaseLabel::SectorOrStrip);
    CHECK_THROWS_AS(classify(d, d, 0.0), InvalidInput);
}

TEST_CASE("classify: ambiguity near tangency carries both labels") {
    const double tol = 1e-6;
    // Distance 2(1 + eps) between unit disks puts |I| - 1 ≈ 4 eps·(1 + eps) between tol and 2 tol.
    const double eps = 0.37e-6;
    try {
        (void)classify(SphereDisk::disk(0.0, 1.0), SphereDisk::disk(2.0 + 2.0 * eps, 1.0), tol);
        FAIL("expected AmbiguousClassification");
    } catch (const AmbiguousClassification& e) {
        CHECK(e.first() == CaseLabel::Singleton);
        CHECK(e.second() == CaseLabel::Empty);
    }
}

TEST_CASE("apply_map examples") {
    const SphereDisk d = SphereDisk::disk({0.5, -0.25}, 1.25);
    CHECK(coeff_gap(apply_map(MoebiusMap::identity(), d), d) <= 1e-15);

    const MoebiusMap inv(0.0, 1.0, 1.0, 0.0);
    CHECK(coeff_gap(apply_map(inv, SphereDisk::disk(0.0, 2.0)), SphereDisk::codisk(0.0, 0.5)) <= 1e-12);

    const MoebiusMap m(0.0, 1.0, -1.0, 1.0);  // 1/(1 - z)
    const SphereDisk image = apply_map(m, SphereDisk::disk(0.0, 1.0));
    // {Re z ≥ 1/2} = {Re(-z) ≤ -1/2}
    CHECK(coeff_gap(image, SphereDisk::half_plane(std::numbers::pi, -0.5)) <= 1e-12);
}

TEST_CASE("normalize_annulus examples") {
    SUBCASE("already canonical") {
        const auto n = normalize_annulus(SphereDisk::disk(0.0, 2.0), SphereDisk::codisk(0.0, 0.5));
        CHECK(n.R == Approx(2.0).epsilon(1e-12));
        // Identity up to rotation: |T(z)| = |z|.
        for (cplx z : {cplx(1.3, 0.2), cplx(-0.1, 0.9), cplx(0.0, -1.7)})
            CHECK(std::abs(n.map.apply(z).z) == Approx(std::abs(z)).epsilon(1e-12));
    }
    SUBCASE("scaling") {
        const auto n = normalize_annulus(SphereDisk::disk(0.0, 4.0), SphereDisk::codisk(0.0, 1.0));
        CHECK(n.R == Approx(2.0).epsilon(1e-12));
        for (cplx z : {cplx(1.3, 0.2), cplx(-3.1, 0.9)})
            CHECK(std::abs(n.map.apply(z).z) == Approx(std::abs(z) / 2).epsilon(1e-12));
    }
    SUBCASE("two unit circles at distance 5") {
        const SphereDisk d1 = SphereDisk::codisk(5.0, 1.0);
        const SphereDisk d2 = SphereDisk::codisk(0.0, 1.0);
        const auto n = normalize_annulus(d1, d2);
        // Oracle: |T| is constant on each boundary circle; the constants are R and 1/R.
        double lo1 = 1e300, hi1 = 0, lo2 = 1e300, hi2 = 0;
        for (int k = 0; k < 100; ++k) {
            const cplx e = std::polar(1.0, 2 * std::numbers::pi * k / 100);
            const double m1 = std::abs(n.map.apply(5.0 + e).z);
            const double m2 = std::abs(n.map.apply(e).z);
            lo1 = std::min(lo1, m1), hi1 = std::max(hi1, m1);
            lo2 = std::min(lo2, m2), hi2 = std::max(hi2, m2);
        }
        CHECK(hi1 - lo1 <= 1e-10 * hi1);
        CHECK(hi2 - lo2 <= 1e-10 * hi2);
        CHECK(std::sqrt(hi1 / hi2) == Approx(n.R).epsilon(1e-10));
        CHECK(hi1 * hi2 == Approx(1.0).epsilon(1e-10));
        // Symmetric points p, q = (5 ± √21)/2 go to 0 and ∞; |T| equals p and 1/p on the circles.
        CHECK(n.R == Approx((5.0 + std::sqrt(21.0)) / 2.0).epsilon(1e-12));
        const SpherePoint tp = n.map.apply((5.0 + std::sqrt(21.0)) / 2.0);
        const SpherePoint tq = n.map.apply((5.0 - std::sqrt(21.0)) / 2.0);
        const bool p_to_zero = !tp.infinite && std::abs(tp.z) <= 1e-9;
        const bool q_to_zero = !tq.infinite && std::abs(tq.z) <= 1e-9;
        CHECK((p_to_zero ? tq.infinite : (q_to_zero && tp.infinite)));
    }
    SUBCASE("non-ring input") {
        CHECK_THROWS_AS(normalize_annulus(SphereDisk::disk(0.0, 1.0), SphereDisk::disk(1.0, 1.0)), WrongCase);
        CHECK_THROWS_AS(normalize_annulus(SphereDisk::disk(0.0, 3.0), SphereDisk::disk(0.0, 1.0)), WrongCase);
        CHECK_THROWS_AS(normalize_annulus(SphereDisk::disk(0.0, 1.0), SphereDisk::disk(5.0, 1.0)), WrongCase);
    }
}

TEST_CASE("certify_spectral examples") {
    const std::vector<double> d{1.0, 1.5};
    CHECK(certify_spectral(SphereDisk::disk(0.0, 2.0), Matrix::diagonal(std::span<const double>(d))));
    CHECK(certify_spectral(SphereDisk::codisk(0.0, 0.5), Matrix{{1.0, 1.5}, {0.0, 1.0}}));
    CHECK_FALSE(certify_spectral(SphereDisk::half_plane(0.0, 0.0), Matrix{{-1.0, 3.0}, {0.0, -1.0}}));
    const auto singular = certify_spectral_detail(SphereDisk::codisk(1.0, 0.5), Matrix::identity(2));
    CHECK_FALSE(singular.spectral);
    CHECK(singular.singular_shift);
}

TEST_CASE("property: intersection count is Moebius invariant") {
    std::mt19937_64 rng(7);
    const std::vector<std::pair<SphereDisk, SphereDisk>> pairs{
        {SphereDisk::disk(0.0, 1.0), SphereDisk::disk(2.0, 1.0)},
        {SphereDisk::disk(0.0, 1.0), SphereDisk::codisk(0.0, 1.0)},
        {SphereDisk::disk(0.0, 1.0), SphereDisk::disk(1.0, 1.0)},
        {SphereDisk::disk(0.0, 2.0), SphereDisk::codisk(0.0, 0.5)},
        {SphereDisk::disk({0.0, 1.0}, 1.0), kUpperHalf},
    };
    for (int trial = 0; trial < 100; ++trial) {
        const MoebiusMap m = test::random_moebius(rng);
        for (const auto& [d1, d2] : pairs) {
            const int before = boundary_intersection_count(d1, d2);
            CHECK(boundary_intersection_count(apply_map(m, d1), apply_map(m, d2), 1e-7) == before);
        }
    }
}

TEST_CASE("property: ring modulus is Moebius invariant") {
    std::mt19937_64 rng(8);
    const SphereDisk d1 = SphereDisk::codisk(5.0, 1.0), d2 = SphereDisk::codisk(0.0, 1.0);
    const double R = normalize_annulus(d1, d2).R;
    for (int trial = 0; trial < 100; ++trial) {
        const MoebiusMap m = test::random_moebius(rng);
        CHECK(std::abs(normalize_annulus(apply_map(m, d1), apply_map(m, d2)).R - R) <= 1e-8 * R);
    }
}

TEST_CASE("property: map round trip") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        const MoebiusMap m = test::random_moebius(rng);
        const SphereDisk d = SphereDisk::disk(test::gauss(rng), 0.5 + std::abs(test::gauss(rng)));
        CHECK(coeff_gap(apply_map(m, apply_map(m.inverse(), d)), d) <= 1e-10);
    }
}

TEST_CASE("property: certification is unitarily invariant") {
    std::mt19937_64 rng(10);
    const std::vector<SphereDisk> disks{SphereDisk::disk({0.2, 0.1}, 2.5), SphereDisk::codisk({0.1, -0.3}, 0.4),
                                        SphereDisk::half_plane(0.7, 1.5)};
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix a = test::random_matrix(3, rng);
        const Matrix u = estimator::random_unitary(3, rng);
        const Matrix b = u * a * u.adjoint();
        for (const auto& d : disks) {
            const auto ca = certify_spectral_detail(d, a), cb = certify_spectral_detail(d, b);
            CHECK(std::abs(ca.measured - cb.measured) <= 1e-9 * std::max(1.0, std::abs(ca.measured)));
            if (std::abs(ca.measured - ca.threshold) > 1e-8) CHECK(ca.spectral == cb.spectral);
        }
    }
}
