#ifndef BOSEPAIR_EFFECTIVE_MASS_HPP
#define BOSEPAIR_EFFECTIVE_MASS_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"
#include "ideal_gas.hpp"
#include "pair_theory.hpp"
#include "quadrature.hpp"
#include "system.hpp"
#include "tabulated.hpp"

namespace bosepair {

enum class MassMethod { zero_t, classical, sewed, self_consistent };

inline const char* to_string(MassMethod m) {
    switch (m) {
    case MassMethod::zero_t: return "zero_t";
    case MassMethod::classical: return "classical";
    case MassMethod::sewed: return "sewed";
    case MassMethod::self_consistent: return "self_consistent";
    }
    return "?";
}

struct MassSolution {
    double m_star_ratio = 1.0; // m*/m >= 1 for any valid input
    MassMethod method = MassMethod::zero_t;
    double residual = 0.0; // closure residual of the defining equation
    int iterations = 0;
    bool converged = true;
    std::vector<double> history; // iterates (self-consistent method only)
};

namespace detail {

inline constexpr double q_floor_mass() { return 1e-8; }

// m/m* = 1 - (1/(6 pi^2 rho)) int q^2 kernel(q) dq; rejects kernel sums >= 1
inline double mass_from_kernel(const std::function<double(double)>& kernel,
                               const SystemParams& p, double a, double b,
                               const IntegrationSpec& spec) {
    auto f = [&](double q) { return q * q * kernel(q); };
    const double val = (b == std::numeric_limits<double>::infinity())
                           ? integrate_to_infinity(f, a, spec)
                                 .value_or_throw("effective-mass kernel")
                           : integrate(f, a, b, spec)
                                 .value_or_throw("effective-mass kernel");
    const double sum = val / (6.0 * pi * pi * p.density);
    if (sum >= 1.0) throw UnphysicalMass(sum);
    return 1.0 / (1.0 - sum);
}

} // namespace detail

/// Zero-temperature form written in the liquid structure factor:
/// m/m* = 1 - (1/(6 pi^2 rho)) int q^2 [S-1]^2/[S+1] dq, truncated at the
/// table edge (the kernel vanishes once S reaches 1).
inline double m_star_zero_t_of(const std::function<double(double)>& s_of_q,
                               const SystemParams& p, double q_max,
                               const IntegrationSpec& spec = {}) {
    auto kernel = [&](double q) {
        const double s = s_of_q(q);
        if (!(s > 0.0))
            throw ValidationError("m_star_zero_t: S(q) <= 0 at q = " +
                                  std::to_string(q));
        const double d = s - 1.0;
        return d * d / (s + 1.0);
    };
    return detail::mass_from_kernel(kernel, p, 0.0, q_max, spec);
}

inline double m_star_zero_t(const TabulatedFunction& s_of_q,
                            const SystemParams& p,
                            const IntegrationSpec& spec = {}) {
    return m_star_zero_t_of([&](double q) { return s_of_q(q); }, p,
                            s_of_q.q_max(), spec);
}

/// High-temperature form: m/m* = 1 - (1/(6 pi^2 rho)) int q^2 [S-1]^2 dq.
inline double m_star_classical_of(const std::function<double(double)>& s_of_q,
                                  const SystemParams& p, double q_max,
                                  const IntegrationSpec& spec = {}) {
    auto kernel = [&](double q) {
        const double s = s_of_q(q);
        if (!(s > 0.0))
            throw ValidationError("m_star_classical: S(q) <= 0 at q = " +
                                  std::to_string(q));
        const double d = s - 1.0;
        return d * d;
    };
    return detail::mass_from_kernel(kernel, p, 0.0, q_max, spec);
}

inline double m_star_classical(const TabulatedFunction& s_of_q,
                               const SystemParams& p,
                               const IntegrationSpec& spec = {}) {
    return m_star_classical_of([&](double q) { return s_of_q(q); }, p,
                               s_of_q.q_max(), spec);
}

/// Zero-temperature effective mass through the Bogoliubov factor:
/// m/m* = 1 - (1/(6 pi^2 rho)) int q^2 (alpha-1)^2/(alpha(alpha+1)) dq.
inline double m_star_zero_t_alpha(const PairPotential& pot,
                                  const SystemParams& p,
                                  const IntegrationSpec& spec = {}) {
    auto kernel = [&](double q) {
        const double a = alpha_q(q, pot, p);
        const double d = alpha_q_minus_one(q, pot, p);
        return d * d / (a * (a + 1.0));
    };
    return detail::mass_from_kernel(kernel, p, detail::q_floor_mass(),
                                    std::numeric_limits<double>::infinity(),
                                    spec);
}

/**
 * Impurity of mass M = mu * m coupled to the liquid through nu_bar.
 * zero_t mode: the quasiparticle-drag form, whose nu_bar = nu, M = m case is
 * the liquid's own zero-temperature formula. The general nu_bar enters
 * through delta_bar = 2 rho nu_bar / (eps_q (alpha+1)), which reduces to
 * alpha - 1 when nu_bar = nu and vanishes with nu_bar.
 * classical mode: M/M' = 1 - (1/(3N)) sum (beta rho nu_bar/(1+beta rho nu))^2.
 * Returns the renormalized-to-bare ratio of the impurity mass.
 */
inline double impurity_mass(double mu,
                            const std::function<double(double)>& nu_bar,
                            const PairPotential& pot, const SystemParams& p,
                            MassMethod mode, const IntegrationSpec& spec = {}) {
    if (!(mu > 0.0)) throw ValidationError("impurity_mass: M must be positive");
    if (mode == MassMethod::zero_t) {
        auto kernel = [&](double q) -> double {
            const double nb = nu_bar(q);
            if (nb == 0.0) return 0.0;
            const double a = alpha_q(q, pot, p);
            const double delta_bar =
                2.0 * p.density * nb / (p.eps_free(q) * (a + 1.0));
            const double denom = 1.0 + a * mu;
            const double bracket = 1.0 - (1.0 - mu) / denom;
            return delta_bar * delta_bar / (a * denom) * bracket * bracket;
        };
        return detail::mass_from_kernel(kernel, p, detail::q_floor_mass(),
                                        std::numeric_limits<double>::infinity(),
                                        spec);
    }
    if (mode == MassMethod::classical) {
        const double brho = p.beta() * p.density;
        auto kernel = [&](double q) -> double {
            const double nb = nu_bar(q);
            if (nb == 0.0) return 0.0;
            const double r = brho * nb / (1.0 + brho * pot(q));
            return r * r;
        };
        return detail::mass_from_kernel(kernel, p, detail::q_floor_mass(),
                                        std::numeric_limits<double>::infinity(),
                                        spec);
    }
    throw ValidationError("impurity_mass: mode must be zero_t or classical");
}

// ------------------------------------------------------------------
// Self-consistent m* from a measured S(q) at finite temperature.
//
// Data side:  L = int q^2 { 1/S(q) - alpha_q tanh[beta E(q)/2] } dq with
// alpha = 1/S and E = alpha eps_q from the zero-temperature inversion.
// Ideal side: R(m*) = int q^2 [1/S0(q; m*) - 1] dq
//                     + (m*/(beta hbar^2))^{3/2} sqrt(pi)(sqrt(2)-1) zeta(3/2).
// Since S0 depends on m*, iterate m* -> S0 -> m* with damping.
// ------------------------------------------------------------------

struct MassClosure {
    double lhs = 0.0;
    std::function<double(double)> ideal_integral; // I0(r)
    double zeta_coeff = 0.0;                      // sqrt(pi)(sqrt(2)-1) zeta(3/2)
    double beta_h2m = 0.0;                        // beta * hbar^2/m

    double zeta_term(double r) const {
        return zeta_coeff * std::pow(r / beta_h2m, 1.5);
    }
    double rhs(double r) const { return ideal_integral(r) + zeta_term(r); }
    double residual(double r) const { return std::abs(lhs - rhs(r)); }
    /// r' solving lhs - I0(r) = zeta_term(r')
    double next_ratio(double r) const {
        const double u = lhs - ideal_integral(r);
        if (!(u > 0.0))
            throw NumericsError("mass closure: no positive solution "
                                "(data side below ideal side)");
        return beta_h2m * std::pow(u / zeta_coeff, 2.0 / 3.0);
    }
};

inline MassClosure self_consistent_closure(const TabulatedFunction& s_exp,
                                           const SystemParams& p,
                                           const IntegrationSpec& spec = {}) {
    if (!(p.temperature > 0.0))
        throw ValidationError("mass closure: requires T > 0");
    const double be = p.beta();
    auto data_side = [&, be](double q) -> double {
        const double s = s_exp(q);
        if (!(s > 0.0))
            throw ValidationError("mass closure: S(q) <= 0 at q = " +
                                  std::to_string(q));
        const double a = 1.0 / s;
        const double bE2 = 0.5 * be * a * p.eps_free(q);
        return q * q * a * (1.0 - std::tanh(bE2));
    };
    MassClosure c;
    c.lhs = integrate_to_infinity(data_side, detail::q_floor_mass(), spec)
                .value_or_throw("mass closure data side");
    c.zeta_coeff = sqrt_pi * (std::sqrt(2.0) - 1.0) * zeta_3_2;
    c.beta_h2m = be * p.hbar2_over_m;
    c.ideal_integral = [p, spec](double r) {
        IntegrationSpec inner = spec;
        const IdealGasState st = make_ideal_gas(p, r, inner);
        auto f = [&](double q) { return q * q * (1.0 / s0(q, st) - 1.0); };
        return integrate_to_infinity(f, detail::q_floor_mass(), spec)
            .value_or_throw("mass closure ideal side");
    };
    return c;
}

struct SelfConsistentOptions {
    double damping = 0.5;
    double iterate_tol = 1e-10; // on m*/m
    int max_iter = 200;
    IntegrationSpec quad{1e-10, 1e-13, {}, 8000};
};

inline MassSolution
m_star_self_consistent(const TabulatedFunction& s_exp, const SystemParams& p,
                       const SelfConsistentOptions& opt = {}) {
    const MassClosure c = self_consistent_closure(s_exp, p, opt.quad);
    const double seed = m_star_zero_t(s_exp, p, opt.quad);
    const auto fp = fixed_point([&](double r) { return c.next_ratio(r); }, seed,
                                opt.damping, opt.iterate_tol, opt.max_iter);
    MassSolution sol;
    sol.m_star_ratio = fp.value;
    sol.method = MassMethod::self_consistent;
    sol.residual = c.residual(fp.value);
    sol.iterations = fp.iterations;
    sol.converged = fp.converged;
    sol.history = fp.history;
    return sol;
}

/// Smooth bridge between the zero-temperature and classical forms with
/// weight w(T) = 1 - e^{-T/T_ref}; monotone between the endpoint values.
inline double m_star_sewed(const TabulatedFunction& s_exp,
                           const SystemParams& p, double t_ref,
                           const IntegrationSpec& spec = {}) {
    if (!(t_ref > 0.0)) throw ValidationError("m_star_sewed: T_ref must be positive");
    const double r0 = m_star_zero_t(s_exp, p, spec);
    const double rc = m_star_classical(s_exp, p, spec);
    const double w = 1.0 - std::exp(-p.temperature / t_ref);
    return r0 + (rc - r0) * w;
}

} // namespace bosepair

#endif
