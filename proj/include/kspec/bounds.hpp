#pragma once

#include <span>
#include <vector>

namespace kspec::bounds {

/// Shields' constant 2 + sqrt((R + r)/(R - r)) for the annulus r ≤ |z| ≤ R.
double shields(double r, double R);

/// sqrt((R² + 2R + 1)/(R² + R + 1)), the value of ∫(N(θ))⁻¹dθ at any eigenphase of U.
double j_closed(double R);

/// J(e^{iφ}) by the periodic trapezoid rule on its defining integral.
double j_quadrature(double R, double phi, int nodes = 4096);

/// 2 + min(j_closed(R), sqrt((R² + 1)/(R² - 1))); never above 2 + 2/√3.
double thm1_upper(double R);

/// 2/(1 + R⁻²)
double lower_simple(double R);

/// ∏_{n≥1} (1 - x_n)⁻¹ with x_n = (sinh 2t / sinh 4nt)², t = log R.
struct ProductValue {
    double value;
    long factors;
    double tail_bound;  // bound on log(true) - log(value)
};
ProductValue annulus_product(double R, double tail_tol);

/// (2/R) ∏ ((1 - R^{-8n})/(1 - R^{4-8n}))², the infinitesimal Carathéodory
/// metric of the annulus at z = 1.
double caratheodory_product(double R, double tail_tol = 1e-14);

/// 2(1 - R⁻²) ∏ ((1 - R^{-8n})/(1 - R^{4-8n}))² = (R - 1/R)·caratheodory_product(R).
double gamma_lower(double R, double tail_tol = 1e-14);

/// (2/R) times the direct truncation of ∏ ((1 - R^{-8n})/(1 - R^{4-8n}))² to `factors` terms.
/// Only usable away from R = 1, where the factors approach 1 quickly.
double caratheodory_factor_product(double R, int factors);

struct BoundsRow {
    double R;
    double lower_simple;
    double gamma;
    double upper_new;
    double upper_shields;
    double upper_min;
};

std::vector<BoundsRow> curve_table(std::span<const double> R_values, double tail_tol = 1e-14);

}  // namespace kspec::bounds
