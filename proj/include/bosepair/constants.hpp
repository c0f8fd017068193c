#ifndef BOSEPAIR_CONSTANTS_HPP
#define BOSEPAIR_CONSTANTS_HPP

#include <cmath>
#include <limits>

namespace bosepair {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double sqrt_pi = 1.77245385090551603;

// Riemann zeta at the half-integer points that appear in Bose-gas
// thermodynamics.
inline constexpr double zeta_3_2 = 2.61237534868548834;
inline constexpr double zeta_5_2 = 1.34148725725091718;

// 4He presets: hbar^2/m in K*Angstrom^2, number density at SVP in 1/Angstrom^3.
inline constexpr double he4_hbar2_over_m = 12.1194;
inline constexpr double he4_density = 0.02185;

// ------------------------------------------------------------------
// Numerically safe exponential forms. All arguments u > 0 unless noted.
// ------------------------------------------------------------------

/// Bose factor 1/(e^u - 1).
inline double bose_n(double u) {
    return 1.0 / std::expm1(u);
}

/// coth(u) without loss for small u.
inline double coth(double u) {
    return 1.0 + 2.0 / std::expm1(2.0 * u);
}

/// 1/sinh(u), valid from denormal u up to u where it underflows to 0.
inline double inv_sinh(double u) {
    const double t = std::exp(-u);
    const double d = -std::expm1(-2.0 * u);
    return d > 0.0 ? 2.0 * t / d : std::numeric_limits<double>::infinity();
}

/// ln(1 - e^{-u}).
inline double log1mexp(double u) {
    if (u < 0.6931471805599453)
        return std::log(-std::expm1(-u));
    return std::log1p(-std::exp(-u));
}

/// ln tanh(u/2).
inline double log_tanh_half(double u) {
    return log1mexp(u) - std::log1p(std::exp(-u));
}

/// 1/cosh^2(u/2) without overflow.
inline double sech2_half(double u) {
    const double t = std::exp(-0.5 * u);
    const double r = 2.0 * t / (1.0 + t * t);
    return r * r;
}

// ------------------------------------------------------------------
// Bose-Einstein functions g_nu(z) = sum_{k>=1} z^k / k^nu on 0 <= z <= 1.
//
// Direct series for z <= 0.5; otherwise the expansion around z = 1 in
// powers of alpha = -ln z whose coefficients are zeta(nu - k).
// ------------------------------------------------------------------

namespace detail {

// zeta(5/2 - j), j = 0..25
inline constexpr double zeta_52_minus[26] = {
    1.34148725725091718,     2.61237534868548834,    -1.46035450880958681,
    -0.207886224977354566,   -0.0254852018898330359,  0.00851692877785033054,
    0.00444101133547943196,  -0.00309166924721583384, -0.0026714580198992246,
    0.00274676793953686876,  0.00326903957260022002,  -0.00441603287300488981,
    -0.00667217229646664076, 0.0111461224739428141,   0.0203969787159427921,
    -0.0405749674811945784,  -0.0871752559062172515,  0.201174049384226882,
    0.496271219912057608,    -1.30322925070511395,    -3.62975929977457413,
    10.6873270690219936,     33.1683257856946079,     -108.217475058776055,
    -370.3018783754786,      1326.04581174901563};

// offset: zeta(nu - k) = zeta_52_minus[offset + k]
inline double bose_g_series(double z, double nu) {
    double sum = 0.0, zk = 1.0;
    for (int k = 1; k <= 200; ++k) {
        zk *= z;
        const double term = zk / std::pow(static_cast<double>(k), nu);
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

inline double bose_g_near_one(double z, double gamma_term, int offset) {
    const double a = -std::log(z);
    double sum = gamma_term, t = 1.0;
    for (int k = 0; k + offset < 26; ++k) {
        sum += zeta_52_minus[offset + k] * t;
        t *= -a / (k + 1);
    }
    return sum;
}

} // namespace detail

/// g_{1/2}(z); diverges as z -> 1.
inline double bose_g12(double z) {
    if (z <= 0.0) return 0.0;
    if (z >= 1.0) return std::numeric_limits<double>::infinity();
    if (z <= 0.5) return detail::bose_g_series(z, 0.5);
    const double a = -std::log(z);
    return detail::bose_g_near_one(z, std::sqrt(pi / a), 2);
}

/// g_{3/2}(z); equals zeta(3/2) at z = 1.
inline double bose_g32(double z) {
    if (z <= 0.0) return 0.0;
    if (z >= 1.0) return zeta_3_2;
    if (z <= 0.5) return detail::bose_g_series(z, 1.5);
    const double a = -std::log(z);
    return detail::bose_g_near_one(z, -2.0 * sqrt_pi * std::sqrt(a), 1);
}

/// g_{5/2}(z); equals zeta(5/2) at z = 1.
inline double bose_g52(double z) {
    if (z <= 0.0) return 0.0;
    if (z >= 1.0) return zeta_5_2;
    if (z <= 0.5) return detail::bose_g_series(z, 2.5);
    const double a = -std::log(z);
    return detail::bose_g_near_one(z, (4.0 / 3.0) * sqrt_pi * a * std::sqrt(a), 0);
}

} // namespace bosepair

#endif
