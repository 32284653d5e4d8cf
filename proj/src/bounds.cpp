#include "kspec/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kspec/errors.hpp"

namespace kspec::bounds {

namespace {

void require_radius(double R) {
    if (!(R > 1.0) || !std::isfinite(R)) throw DomainError("R must be a finite number above 1");
}

constexpr long kMaxFactors = 1'000'000;

}  // namespace

double shields(double r, double R) {
    if (!(r > 0.0) || !(r < R) || !std::isfinite(R)) throw DomainError("shields bound needs 0 < r < R");
    return 2.0 + std::sqrt((R + r) / (R - r));
}

double j_closed(double R) {
    require_radius(R);
    return std::sqrt(1.0 + R / (R * R + R + 1.0));
}

double j_quadrature(double R, double phi, int nodes) {
    require_radius(R);
    if (nodes < 64) throw InvalidInput("need at least 64 quadrature nodes");
    const double r = 1.0 / R;
    const double base = R * R + r * r - R - r;
    const double w = (R + r + 2.0) / 4.0;
    double sum = 0.0;
    for (int k = 0; k < nodes; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / nodes;
        sum += 1.0 / (base + w * (2.0 - 2.0 * std::cos(theta - phi)));
    }
    // (R² - r²)/(2π) · (2π/nodes) · Σ
    return (R * R - r * r) * sum / nodes;
}

double thm1_upper(double R) {
    require_radius(R);
    // Near R = 1 the j term is the smaller one, so cancellation in shields() is harmless.
    return std::min(2.0 + j_closed(R), shields(1.0 / R, R));
}

double lower_simple(double R) {
    require_radius(R);
    return 2.0 / (1.0 + 1.0 / (R * R));
}

ProductValue annulus_product(double R, double tail_tol) {
    require_radius(R);
    if (!(tail_tol > 0.0)) throw InvalidInput("tail tolerance must be positive");
    const double t = std::log1p(R - 1.0);
    const double s2 = std::sinh(2.0 * t);
    // x_{n+1} ≤ R⁻⁸ x_n, and x_n ≤ 1/(4n²)
    const double q = std::exp(-8.0 * t);
    double log_sum = 0.0;
    for (long n = 1; n <= kMaxFactors; ++n) {
        const double sh = std::sinh(4.0 * static_cast<double>(n) * t);
        const double ratio = std::isfinite(sh) ? s2 / sh : 0.0;
        const double x = ratio * ratio;
        log_sum -= std::log1p(-x);
        // Σ_{m>n} -log(1 - x_m) ≤ (4/3) Σ_{m>n} x_m
        const double geometric = (4.0 / 3.0) * x * q / (1.0 - q);
        const double telescoping = 1.0 / (2.0 * (2.0 * static_cast<double>(n) + 1.0));
        const double tail = std::min(geometric, telescoping);
        if (tail <= tail_tol) return {std::exp(log_sum), n, tail};
    }
    throw PrecisionError("infinite product tail bound not reached within " + std::to_string(kMaxFactors) +
                         " factors");
}

double gamma_lower(double R, double tail_tol) {
    const auto prod = annulus_product(R, tail_tol);
    return lower_simple(R) * prod.value;
}

double caratheodory_product(double R, double tail_tol) {
    // γ(R) = (R - 1/R) · c(R), with R - 1/R = 2 sinh(log R)
    return gamma_lower(R, tail_tol) / (2.0 * std::sinh(std::log1p(R - 1.0)));
}

double caratheodory_factor_product(double R, int factors) {
    require_radius(R);
    double prod = 1.0;
    for (int n = 1; n <= factors; ++n) {
        const double num = -std::expm1(-8.0 * n * std::log(R));
        const double den = -std::expm1((4.0 - 8.0 * n) * std::log(R));
        prod *= (num / den) * (num / den);
    }
    return 2.0 / R * prod;
}

std::vector<BoundsRow> curve_table(std::span<const double> R_values, double tail_tol) {
    std::vector<BoundsRow> rows;
    rows.reserve(R_values.size());
    for (std::size_t i = 0; i < R_values.size(); ++i) {
        const double R = R_values[i];
        try {
            BoundsRow row{};
            row.R = R;
            row.lower_simple = lower_simple(R);
            row.gamma = gamma_lower(R, tail_tol);
            row.upper_new = 2.0 + j_closed(R);
            row.upper_shields = shields(1.0 / R, R);
            row.upper_min = std::min(row.upper_new, row.upper_shields);
            rows.push_back(row);
        } catch (const DomainError& e) {
            throw DomainError("R value at index " + std::to_string(i) + ": " + e.what());
        }
    }
    return rows;
}

}  // namespace kspec::bounds
