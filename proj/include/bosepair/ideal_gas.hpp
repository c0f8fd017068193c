#ifndef BOSEPAIR_IDEAL_GAS_HPP
#define BOSEPAIR_IDEAL_GAS_HPP

#include <cmath>
#include <string>

#include "constants.hpp"
#include "errors.hpp"
#include "quadrature.hpp"
#include "system.hpp"

namespace bosepair {

/// T_c = 2 pi (hbar^2/m*) [rho / zeta(3/2)]^{2/3}
inline double critical_temperature(const SystemParams& p, double m_star_ratio) {
    if (!(m_star_ratio > 0.0))
        throw ValidationError("critical_temperature: m*/m must be positive");
    return 2.0 * pi * (p.hbar2_over_m / m_star_ratio) *
           std::pow(p.density / zeta_3_2, 2.0 / 3.0);
}

/// Fugacity from the particle-number normalisation rho lambda_T^3 = g_{3/2}(z0)
/// in the thermodynamic limit; z0 = 1 throughout the condensed phase.
inline double solve_fugacity(const SystemParams& p, double m_star_ratio) {
    if (!(p.temperature > 0.0))
        throw ValidationError("solve_fugacity: requires T > 0");
    const double lam = thermal_wavelength(p, m_star_ratio);
    const double target = p.density * lam * lam * lam;
    if (target >= zeta_3_2) return 1.0; // condensed
    // solve in a = -ln z to keep resolution near z = 1
    const double a_hi = -std::log(target) + 50.0;
    const double a = find_root(
        [&](double x) { return bose_g32(std::exp(-x)) - target; },
        RootSpec{0.0, a_hi, 1e-15, 200});
    return std::exp(-a);
}

/**
 * Reference ideal Bose gas with effective mass m* = m_star_ratio * m at the
 * temperature carried by `params`. m_star_star_ratio enters only where the
 * inverse-temperature derivative of m* matters; it equals m_star_ratio unless
 * a temperature-dependent m*(T) pipeline sets it.
 */
struct IdealGasState {
    SystemParams params;
    double m_star_ratio = 1.0;
    double m_star_star_ratio = 1.0;
    double z0 = 1.0;
    double t_c = 0.0;
    double condensate_fraction = 0.0;
    IntegrationSpec quad; // momentum-integral control

    double m_star() const { return params.mass * m_star_ratio; }
    double hbar2_over_mstar() const { return params.hbar2_over_m / m_star_ratio; }
    /// hbar^2 q^2 / 2m*
    double eps_star(double q) const { return 0.5 * hbar2_over_mstar() * q * q; }
    /// hbar^2 q^2 / 2m**
    double eps_star_star(double q) const {
        return 0.5 * (params.hbar2_over_m / m_star_star_ratio) * q * q;
    }
    bool condensed() const { return params.temperature <= t_c; }

    void validate() const {
        params.validate();
        if (!(m_star_ratio > 0.0) || !(m_star_star_ratio > 0.0))
            throw ValidationError("ideal gas: mass ratios must be positive");
        if (condensed()) {
            if (z0 != 1.0)
                throw ValidationError("ideal gas: z0 must be 1 below T_c");
        } else if (!(z0 > 0.0 && z0 < 1.0)) {
            throw ValidationError("ideal gas: z0 must lie in (0,1) above T_c");
        }
    }
};

inline IdealGasState make_ideal_gas(const SystemParams& params,
                                    double m_star_ratio = 1.0,
                                    IntegrationSpec quad =
                                        IntegrationSpec{1e-10, 1e-14, {}, 4000}) {
    IdealGasState s;
    s.params = params;
    s.m_star_ratio = m_star_ratio;
    s.m_star_star_ratio = m_star_ratio;
    s.quad = std::move(quad);
    s.t_c = critical_temperature(params, m_star_ratio);
    if (params.temperature <= s.t_c) {
        s.z0 = 1.0;
        s.condensate_fraction =
            1.0 - std::pow(params.temperature / s.t_c, 1.5);
    } else {
        s.z0 = solve_fugacity(params, m_star_ratio);
        s.condensate_fraction = 0.0;
    }
    s.validate();
    return s;
}

/// Mean occupation n_p = 1/(z0^{-1} e^{beta eps*_p} - 1), p > 0.
inline double occupation(double p, const IdealGasState& s) {
    if (!(p > 0.0)) throw ValidationError("occupation: requires p > 0");
    if (s.z0 > 1.0) throw ValidationError("occupation: z0 > 1 rejected");
    return 1.0 / std::expm1(s.params.beta() * s.eps_star(p) - std::log(s.z0));
}

/// d(ln z0)/d(beta) at fixed density and m*; zero in the condensed phase,
/// (3/(2 beta)) g_{3/2}(z0)/g_{1/2}(z0) above it (implicit differentiation of
/// the number normalisation). Vanishes from above as T -> T_c^+ because
/// g_{1/2} diverges.
inline double dlnz0_dbeta(const IdealGasState& s) {
    if (s.condensed()) return 0.0;
    return 1.5 * s.params.temperature * bose_g32(s.z0) / bose_g12(s.z0);
}

namespace detail {

// ln(1 - z e^{-u}) for u >= 0, 0 < z <= 1, via ln(1 - e^{-(u - ln z)})
inline double log1m_z_exp(double lnz, double u) { return log1mexp(u - lnz); }

// angular-averaged exchange kernel: ln |(1 - z e^{-b eps(p+q)}) / (1 - z e^{-b eps(p-q)})|
inline double exchange_log_kernel(const IdealGasState& s, double p, double q) {
    const double be = s.params.beta();
    const double lnz = std::log(s.z0);
    const double up = be * s.eps_star(p + q);
    const double um = be * s.eps_star(std::abs(p - q));
    return log1m_z_exp(lnz, up) - log1m_z_exp(lnz, um);
}

// wave numbers beyond this carry Boltzmann weight below 1e-300
inline double thermal_cutoff_exponent() { return 690.0; }

} // namespace detail

/**
 * Static structure factor of the reference ideal gas. Below T_c the
 * compressibility term coth(beta eps*_q / 2) is kept intact (its q -> 0
 * divergence is physical); above T_c the condensate terms are absent and the
 * fugacity enters the exchange integral.
 */
inline double s0(double q, const IdealGasState& s) {
    if (!(q > 0.0)) throw ValidationError("s0: requires q > 0");
    const double be = s.params.beta();
    const double pref =
        1.0 / (4.0 * pi * pi * s.params.density * q * be * s.hbar2_over_mstar());
    const double guard = detail::thermal_cutoff_exponent();

    if (s.condensed()) {
        auto f = [&](double p) -> double {
            const double u = be * s.eps_star(p);
            if (u > guard) return 0.0;
            return p * bose_n(u) * detail::exchange_log_kernel(s, p, q);
        };
        IntegrationSpec spec = s.quad;
        spec.singular_points = {q};
        const double ex =
            pref * integrate_to_infinity(f, 0.0, spec).value_or_throw("s0 exchange integral");
        const double y = 0.5 * be * s.eps_star(q);
        const double tfrac = std::pow(s.params.temperature / s.t_c, 1.5);
        return coth(y) - 2.0 * tfrac * bose_n(2.0 * y) + ex;
    }

    const double lnz = std::log(s.z0);
    auto f = [&](double p) -> double {
        const double u = be * s.eps_star(p) - lnz;
        if (u > guard) return 0.0;
        return p / std::expm1(u) * detail::exchange_log_kernel(s, p, q);
    };
    const double ex =
        pref * integrate_to_infinity(f, 0.0, s.quad).value_or_throw("s0 exchange integral");
    return 1.0 + ex;
}

/**
 * Inverse-temperature derivative of s0 at fixed density, including the
 * fugacity drift above T_c and the condensate-fraction drift below it.
 * m** replaces m* wherever d(beta eps*)/d(beta) appears.
 */
inline double ds0_dbeta(double q, const IdealGasState& s) {
    if (!(q > 0.0)) throw ValidationError("ds0_dbeta: requires q > 0");
    const double be = s.params.beta();
    const double guard = detail::thermal_cutoff_exponent();
    // (m*/m**) / (16 pi^2 rho q beta)
    const double prefd = (s.m_star_ratio / s.m_star_star_ratio) /
                         (16.0 * pi * pi * s.params.density * q * be);

    if (s.condensed()) {
        auto f = [&](double p) -> double {
            const double u = 0.5 * be * s.eps_star(p);
            if (u > 0.5 * guard) return 0.0;
            const double is = inv_sinh(u);
            return p * p * p * is * is * detail::exchange_log_kernel(s, p, q);
        };
        IntegrationSpec spec = s.quad;
        spec.singular_points = {q};
        const double ex = -prefd * integrate_to_infinity(f, 0.0, spec)
                                        .value_or_throw("ds0 exchange integral");
        const double t = s.params.temperature;
        const double tfrac = std::pow(t / s.t_c, 1.5);
        const double u = 0.5 * be * s.eps_star(q);
        const double is = inv_sinh(u);
        return 3.0 * t * tfrac * bose_n(2.0 * u) -
               0.5 * s.eps_star_star(q) * is * is * (1.0 - tfrac) + ex;
    }

    const double lnz = std::log(s.z0);
    const double dlnz = dlnz0_dbeta(s);
    const double h2ss = s.params.hbar2_over_m / s.m_star_star_ratio;
    auto f = [&](double p) -> double {
        const double u = 0.5 * (be * s.eps_star(p) - lnz);
        if (u > 0.5 * guard) return 0.0;
        const double is = inv_sinh(u);
        // p^3 (1 - dlnz/eps**) written without the 1/p^2 division
        const double weight = p * p * p - dlnz * 2.0 * p / h2ss;
        return weight * is * is * detail::exchange_log_kernel(s, p, q);
    };
    return -prefd *
           integrate_to_infinity(f, 0.0, s.quad).value_or_throw("ds0 exchange integral");
}

/**
 * ln Z0_N / N of the reference ideal gas: the grand-style mode sum evaluated
 * in the thermodynamic limit, Legendre-corrected back to fixed N,
 *   ln Z0_N / N = g_{5/2}(z0) / (rho lambda_T^3) - ln z0.
 * Below T_c the correction vanishes (z0 = 1) and the divergent q -> 0 mode
 * carries zero weight per particle.
 */
inline double ln_z0_ideal(const IdealGasState& s) {
    const double lam = thermal_wavelength(s.params, s.m_star_ratio);
    const double rl3 = s.params.density * lam * lam * lam;
    return bose_g52(s.z0) / rl3 - std::log(s.z0);
}

/// Internal energy per particle of the reference ideal gas,
/// (3/2) T g_{5/2}(z0) / (rho lambda_T^3); valid on both sides of T_c.
inline double ideal_energy_per_n(const IdealGasState& s) {
    const double lam = thermal_wavelength(s.params, s.m_star_ratio);
    const double rl3 = s.params.density * lam * lam * lam;
    return 1.5 * s.params.temperature * bose_g52(s.z0) / rl3;
}

} // namespace bosepair

#endif
