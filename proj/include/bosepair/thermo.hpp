#ifndef BOSEPAIR_THERMO_HPP
#define BOSEPAIR_THERMO_HPP

#include <cmath>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"
#include "ideal_gas.hpp"
#include "pair_theory.hpp"
#include "quadrature.hpp"
#include "system.hpp"
#include "tabulated.hpp"

namespace bosepair {

namespace detail {

// the q-integrals start here; the omitted [0, q_floor] mass is below 1e-20
// of any reported quantity (integrands vanish at least like q^2 ln q)
inline constexpr double q_floor = 1e-8;

// Per-q quantities shared by the partition function, energy and structure
// factor. E and alpha carry the bare mass; eps_s the reference mass m*.
struct PairPoint {
    double alpha, E, eps_s, eps_ss;
    double bE, bxs; // beta*E, beta*eps_s
    double g;       // alpha tanh(beta E/2) - tanh(beta eps*/2)
};

inline PairPoint pair_point(double q, const PairPotential& pot,
                            const SystemParams& p, const IdealGasState& ideal) {
    PairPoint k;
    k.alpha = alpha_q(q, pot, p);
    k.E = k.alpha * p.eps_free(q);
    k.eps_s = ideal.eps_star(q);
    k.eps_ss = ideal.eps_star_star(q);
    const double be = p.beta();
    k.bE = be * k.E;
    k.bxs = be * k.eps_s;
    k.g = k.alpha * std::tanh(0.5 * k.bE) - std::tanh(0.5 * k.bxs);
    return k;
}

} // namespace detail

/**
 * Temperature-dependent structure factor
 *   S(q) = S0(q) / [1 + S0(q) (alpha_q tanh(beta E/2) - tanh(beta eps_s/2))].
 * A non-positive denominator is surfaced as ThermoInstability, never clamped:
 * it marks where the pair approximation fails.
 */
inline double structure_factor(double q, const PairPotential& pot,
                               const SystemParams& p,
                               const IdealGasState& ideal) {
    const auto k = detail::pair_point(q, pot, p, ideal);
    const double S0 = s0(q, ideal);
    const double arg = 1.0 + S0 * k.g;
    if (!(arg > 0.0)) throw ThermoInstability(q, p.temperature);
    return S0 / arg;
}

/**
 * ln Z_N / N. The ideal-gas reference enters through ln_z0_ideal; the
 * interaction contributes the ground-state term and three mode sums taken to
 * the thermodynamic limit. Switch-off (nu = 0, m* = m) reproduces the ideal
 * value exactly: every integrand is then identically zero.
 */
inline double ln_partition(const PairPotential& pot, const SystemParams& p,
                           const IdealGasState& ideal, const QGrid& grid,
                           const IntegrationSpec& spec = {}) {
    if (!(p.temperature > 0.0))
        throw ValidationError("ln_partition: requires T > 0");
    auto integrand = [&](double q) -> double {
        const auto k = detail::pair_point(q, pot, p, ideal);
        const double t_occ = log1mexp(k.bxs) - log1mexp(k.bE);
        const double t_zp = 0.5 * (std::log(k.alpha) + log_tanh_half(k.bE) -
                                   log_tanh_half(k.bxs));
        double t_fl = 0.0;
        if (k.g != 0.0) {
            const double S0 = s0(q, ideal);
            const double arg = 1.0 + S0 * k.g;
            if (!(arg > 0.0)) throw ThermoInstability(q, p.temperature);
            t_fl = -0.5 * std::log(arg);
        }
        return q * q * (t_occ + t_zp + t_fl);
    };
    const double modes =
        integrate_to_infinity(integrand, detail::q_floor, spec)
            .value_or_throw("ln_partition mode sum") /
        (2.0 * pi * pi * p.density);
    const double e0 = ground_state_energy_per_n(pot, p, grid.q_max, spec);
    return ln_z0_ideal(ideal) - p.beta() * e0 + modes;
}

/**
 * Internal energy per particle: ground-state term, Bogoliubov quasiparticle
 * occupation, the ideal-gas occupation difference, the zero-point difference,
 * and the pair-fluctuation term driven by S0 and dS0/dbeta. Equals the exact
 * -d(ln Z_N)/d(beta) when m* is held fixed (then m** = m*).
 */
inline double energy_per_n(const PairPotential& pot, const SystemParams& p,
                           const IdealGasState& ideal, const QGrid& grid,
                           const IntegrationSpec& spec = {}) {
    const double guard = detail::thermal_cutoff_exponent();
    const double lnz = std::log(ideal.z0);
    auto integrand = [&](double q) -> double {
        const auto k = detail::pair_point(q, pot, p, ideal);
        const double t_bog = k.bE > guard ? 0.0 : k.E * bose_n(k.bE);
        const double n_z = k.bxs - lnz > guard ? 0.0 : 1.0 / std::expm1(k.bxs - lnz);
        const double n_1 = k.bxs > guard ? 0.0 : bose_n(k.bxs);
        const double t_occ = k.eps_ss * (n_z - n_1);
        const double t_zp =
            -0.5 * (k.E * inv_sinh(k.bE) - k.eps_ss * inv_sinh(k.bxs));
        const double bracket = k.alpha * k.E * sech2_half(k.bE) -
                               k.eps_ss * sech2_half(k.bxs);
        double t_fl = 0.0;
        if (k.g != 0.0 || bracket != 0.0) {
            const double S0 = s0(q, ideal);
            const double dS0 = ds0_dbeta(q, ideal);
            const double arg = 1.0 + S0 * k.g;
            if (!(arg > 0.0)) throw ThermoInstability(q, p.temperature);
            t_fl = 0.5 * (0.5 * S0 * bracket + dS0 * k.g) / arg;
        }
        return q * q * (t_bog + t_occ + t_zp + t_fl);
    };
    const double modes =
        integrate_to_infinity(integrand, detail::q_floor, spec)
            .value_or_throw("energy mode sum") /
        (2.0 * pi * pi * p.density);
    return ground_state_energy_per_n(pot, p, grid.q_max, spec) + modes;
}

/**
 * Mean potential energy per particle,
 *   <Phi>/N = rho nu0 / 2 + (1/(4 pi^2)) int q^2 nu_q [S(q) - 1] dq.
 */
inline double potential_energy_per_n(const PairPotential& pot,
                                     const SystemParams& p,
                                     const IdealGasState& ideal,
                                     const IntegrationSpec& spec = {}) {
    auto integrand = [&](double q) -> double {
        const double nu = pot(q);
        if (nu == 0.0) return 0.0;
        return q * q * nu * (structure_factor(q, pot, p, ideal) - 1.0);
    };
    const double modes = integrate_to_infinity(integrand, detail::q_floor, spec)
                             .value_or_throw("potential energy mode sum") /
                         (4.0 * pi * pi);
    return 0.5 * p.density * pot.nu0() + modes;
}

/// Per-temperature bundle of the headline outputs.
struct ThermoReport {
    double temperature = 0.0;
    double ln_z_per_n = 0.0;
    double free_energy_per_n = 0.0; // -T ln Z_N / N, exact by construction
    double energy_per_n = 0.0;
    double potential_per_n = 0.0;
    double kinetic_per_n = 0.0; // energy - potential, exact by construction
    TabulatedFunction s_of_q;
    double m_star_ratio = 1.0;
    double m_star_star_ratio = 1.0;
};

inline ThermoReport make_report(const PairPotential& pot, const SystemParams& p,
                                const IdealGasState& ideal, const QGrid& grid,
                                const IntegrationSpec& spec = {}) {
    ThermoReport r;
    r.temperature = p.temperature;
    r.m_star_ratio = ideal.m_star_ratio;
    r.m_star_star_ratio = ideal.m_star_star_ratio;
    r.ln_z_per_n = ln_partition(pot, p, ideal, grid, spec);
    r.free_energy_per_n = -p.temperature * r.ln_z_per_n;
    r.energy_per_n = energy_per_n(pot, p, ideal, grid, spec);
    r.potential_per_n = potential_energy_per_n(pot, p, ideal, spec);
    r.kinetic_per_n = r.energy_per_n - r.potential_per_n;
    std::vector<double> sv;
    sv.reserve(grid.nodes.size());
    for (double q : grid.nodes) sv.push_back(structure_factor(q, pot, p, ideal));
    r.s_of_q = TabulatedFunction(grid.nodes, std::move(sv));
    return r;
}

// ------------------------------------------------------------------
// Classical (random-phase approximation) reference forms, reached by the
// theory when hbar^2/m is scaled to zero. Used by the limit suites.
// ------------------------------------------------------------------

/// S_rpa(q) = 1 / (1 + beta rho nu_q)
inline double rpa_structure_factor(double q, const PairPotential& pot,
                                   const SystemParams& p) {
    const double d = 1.0 + p.beta() * p.density * pot(q);
    if (!(d > 0.0))
        throw NumericsError("rpa_structure_factor: non-positive denominator");
    return 1.0 / d;
}

/// Interaction part of ln Z_N / N in the RPA:
/// -beta rho nu0/2 - (1/(4 pi^2 rho)) int q^2 [ln(1 + beta rho nu_q) - beta rho nu_q] dq
inline double rpa_excess_ln_partition(const PairPotential& pot,
                                      const SystemParams& p,
                                      const IntegrationSpec& spec = {}) {
    const double brho = p.beta() * p.density;
    auto f = [&](double q) -> double {
        const double u = brho * pot(q);
        if (u == 0.0) return 0.0;
        if (!(1.0 + u > 0.0))
            throw NumericsError("rpa_excess_ln_partition: log argument <= 0");
        return q * q * (std::log1p(u) - u);
    };
    const double val = integrate_to_infinity(f, detail::q_floor, spec)
                           .value_or_throw("rpa excess ln Z");
    return -0.5 * p.beta() * p.density * pot.nu0() -
           val / (4.0 * pi * pi * p.density);
}

/// Classical energy per particle in the RPA:
/// (3/2) T + rho nu0/2 - (T/(4 pi^2 rho)) int q^2 (beta rho nu_q)^2/(1 + beta rho nu_q) dq
inline double rpa_energy_per_n(const PairPotential& pot, const SystemParams& p,
                               const IntegrationSpec& spec = {}) {
    const double brho = p.beta() * p.density;
    auto f = [&](double q) -> double {
        const double u = brho * pot(q);
        if (u == 0.0) return 0.0;
        return q * q * u * u / (1.0 + u);
    };
    const double val = integrate_to_infinity(f, detail::q_floor, spec)
                           .value_or_throw("rpa energy");
    return 1.5 * p.temperature + 0.5 * p.density * pot.nu0() -
           p.temperature * val / (4.0 * pi * pi * p.density);
}

/// Quasiparticle-gas energy per particle on top of the ground state,
/// (1/(2 pi^2 rho)) int q^2 E(q) / (e^{beta E(q)} - 1) dq.
inline double phonon_gas_energy_per_n(const PairPotential& pot,
                                      const SystemParams& p,
                                      const IntegrationSpec& spec = {}) {
    const double guard = detail::thermal_cutoff_exponent();
    const double be = p.beta();
    auto f = [&](double q) -> double {
        const double E = excitation_energy(q, pot, p);
        const double u = be * E;
        if (u > guard) return 0.0;
        return q * q * E * bose_n(u);
    };
    const double val =
        integrate_to_infinity(f, detail::q_floor, spec).value_or_throw("phonon gas");
    return val / (2.0 * pi * pi * p.density);
}

} // namespace bosepair

#endif
