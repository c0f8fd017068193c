#ifndef BOSEPAIR_PAIR_THEORY_HPP
#define BOSEPAIR_PAIR_THEORY_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"
#include "quadrature.hpp"
#include "system.hpp"
#include "tabulated.hpp"

namespace bosepair {

/**
 * Fourier pair potential nu_q in K*Angstrom^3: an analytic model or a table,
 * plus the q = 0 component nu_0 which enters only the mean-field energy.
 */
class PairPotential {
public:
    PairPotential()
        : nu_([](double) { return 0.0; }), nu0_(0.0), kind_("zero") {}

    static PairPotential zero() { return PairPotential(); }

    /// nu_q = nu0 exp(-q^2 sigma^2)
    static PairPotential gaussian(double nu0, double sigma) {
        return PairPotential(
            [nu0, sigma](double q) { return nu0 * std::exp(-q * q * sigma * sigma); },
            nu0, "gaussian");
    }

    /// nu_q = nu0 / (1 + (q l)^2), the screened (Yukawa-type) form
    static PairPotential screened(double nu0, double screen_length) {
        return PairPotential(
            [nu0, screen_length](double q) {
                const double ql = q * screen_length;
                return nu0 / (1.0 + ql * ql);
            },
            nu0, "screened");
    }

    /// Tabulated nu_q; zero beyond the table (no interaction beyond the data).
    static PairPotential tabulated(TabulatedFunction nu, double nu0) {
        auto t = std::make_shared<TabulatedFunction>(std::move(nu));
        const double q_end = t->q_max();
        return PairPotential(
            [t, q_end](double q) { return q > q_end ? 0.0 : (*t)(q); }, nu0,
            "tabulated");
    }

    static PairPotential from_function(std::function<double(double)> nu,
                                       double nu0, std::string kind) {
        return PairPotential(std::move(nu), nu0, std::move(kind));
    }

    double operator()(double q) const { return nu_(q); }
    double nu0() const { return nu0_; }
    const std::string& kind() const { return kind_; }

private:
    PairPotential(std::function<double(double)> nu, double nu0, std::string kind)
        : nu_(std::move(nu)), nu0_(nu0), kind_(std::move(kind)) {}

    std::function<double(double)> nu_;
    double nu0_;
    std::string kind_;
};

// ------------------------------------------------------------------
// Bogoliubov factor and elementary excitation spectrum (bare mass m).
// ------------------------------------------------------------------

/// alpha_q = sqrt(1 + 2 rho nu_q / (hbar^2 q^2 / 2m)); throws if the radicand
/// is negative (unstable mode).
inline double alpha_q(double q, const PairPotential& pot,
                      const SystemParams& p) {
    const double x = p.eps_free(q);
    const double radicand = 1.0 + 2.0 * p.density * pot(q) / x;
    if (radicand < 0.0) throw StabilityViolation(q, radicand);
    return std::sqrt(radicand);
}

/// alpha_q - 1 without cancellation for weak coupling.
inline double alpha_q_minus_one(double q, const PairPotential& pot,
                                const SystemParams& p) {
    const double x = p.eps_free(q);
    const double a = alpha_q(q, pot, p);
    return 2.0 * p.density * pot(q) / (x * (a + 1.0));
}

/// E(q) = alpha_q * hbar^2 q^2 / 2m.
inline double excitation_energy(double q, const PairPotential& pot,
                                const SystemParams& p) {
    return alpha_q(q, pot, p) * p.eps_free(q);
}

/**
 * Ground-state energy per particle in the Bogoliubov approximation,
 *   E0/N = rho nu0 / 2 - (1/(2 pi^2 rho)) int_0^{q_max} q^2 (eps_q/4)(alpha_q - 1)^2 dq.
 * The kernel behaves like nu_q^2 at large q; a non-decaying kernel at the
 * truncation is rejected.
 */
inline double ground_state_energy_per_n(const PairPotential& pot,
                                        const SystemParams& p, double q_max,
                                        const IntegrationSpec& spec = {}) {
    auto f = [&](double q) {
        const double d = alpha_q_minus_one(q, pot, p);
        return q * q * 0.25 * p.eps_free(q) * d * d;
    };
    const double end_probe = std::abs(f(q_max));
    const double tail_probe = std::abs(f(1.5 * q_max));
    if (end_probe > 1e-300 && tail_probe >= 0.999 * end_probe)
        throw NumericsError("ground_state_energy: kernel does not decay at q_max");
    const double val =
        integrate(f, 0.0, q_max, spec).value_or_throw("ground_state_energy");
    return 0.5 * p.density * pot.nu0() - val / (2.0 * pi * pi * p.density);
}

/// Stability over a whole grid; throws at the first violating node.
inline void validate_stability(const PairPotential& pot, const SystemParams& p,
                               const QGrid& grid) {
    for (double q : grid.nodes) (void)alpha_q(q, pot, p);
}

struct SpectrumTable {
    QGrid grid;
    std::vector<double> alpha;
    std::vector<double> energy; // E(q) = alpha_q eps_q on every node
    double e0_per_n = 0.0;
};

inline SpectrumTable build_spectrum(const PairPotential& pot,
                                    const SystemParams& p, const QGrid& grid,
                                    const IntegrationSpec& spec = {}) {
    SpectrumTable t;
    t.grid = grid;
    t.alpha.reserve(grid.nodes.size());
    t.energy.reserve(grid.nodes.size());
    for (double q : grid.nodes) {
        const double a = alpha_q(q, pot, p);
        t.alpha.push_back(a);
        t.energy.push_back(a * p.eps_free(q));
    }
    t.e0_per_n = ground_state_energy_per_n(pot, p, grid.q_max, spec);
    return t;
}

// ------------------------------------------------------------------
// Pair-correlation coefficient functions at inverse temperature beta and
// reference mass m*. Both q-kernels vanish identically at switch-off
// (alpha = 1, m* = m).
// ------------------------------------------------------------------

/// c2 = (1/2)[alpha coth(beta E) - coth(beta eps*)],
/// assembled from alpha - 1 so switch-off gives an exact zero.
inline double c2_kernel(double alpha, double alpha_minus_one, double beta_E,
                        double beta_eps_star) {
    return 0.5 * (alpha_minus_one + 2.0 * (alpha * bose_n(2.0 * beta_E) -
                                           bose_n(2.0 * beta_eps_star)));
}

/// c1 = (1/2)[alpha / sinh(beta E) - 1 / sinh(beta eps*)]
inline double c1_kernel(double alpha, double beta_E, double beta_eps_star) {
    return 0.5 * (alpha * inv_sinh(beta_E) - inv_sinh(beta_eps_star));
}

struct CCoefficients {
    double c0_per_n = 0.0; // extensive coefficient, per particle
    TabulatedFunction c1;
    TabulatedFunction c2;
    double beta = 0.0;
    double m_star_ratio = 1.0;
};

inline CCoefficients c_coefficients(const PairPotential& pot,
                                    const SystemParams& p, double m_star_ratio,
                                    const QGrid& grid,
                                    const IntegrationSpec& spec = {}) {
    if (!(p.temperature > 0.0))
        throw ValidationError("c_coefficients: requires T > 0");
    const double be = p.beta();
    const double h2ms = p.hbar2_over_m / m_star_ratio;
    std::vector<double> c1v, c2v;
    c1v.reserve(grid.nodes.size());
    c2v.reserve(grid.nodes.size());
    for (double q : grid.nodes) {
        const double a = alpha_q(q, pot, p);
        const double am1 = alpha_q_minus_one(q, pot, p);
        // same evaluation order as eps_free so switch-off zeros are exact
        const double bE = be * (a * p.eps_free(q));
        const double bx = be * (0.5 * h2ms * q * q);
        c1v.push_back(c1_kernel(a, bE, bx));
        c2v.push_back(c2_kernel(a, am1, bE, bx));
    }
    // c0/N = -beta E0/N
    //        + (1/(4 pi^2 rho)) int q^2 [ln((1-e^{-2b eps*})/(1-e^{-2b E})) + ln alpha] dq
    auto f = [&](double q) {
        const double a = alpha_q(q, pot, p);
        const double bE = be * (a * p.eps_free(q));
        const double bx = be * (0.5 * h2ms * q * q);
        return q * q * (log1mexp(2.0 * bx) - log1mexp(2.0 * bE) + std::log(a));
    };
    const double mode_sum =
        integrate_to_infinity(f, 1e-8, spec).value_or_throw("c0 mode sum") /
        (4.0 * pi * pi * p.density);
    CCoefficients c;
    c.c0_per_n =
        -be * ground_state_energy_per_n(pot, p, grid.q_max, spec) + mode_sum;
    c.c1 = TabulatedFunction(grid.nodes, std::move(c1v));
    c.c2 = TabulatedFunction(grid.nodes, std::move(c2v));
    c.beta = be;
    c.m_star_ratio = m_star_ratio;
    return c;
}

// ------------------------------------------------------------------
// Structure-factor inversion: at T = 0 the theory gives S(q) = 1/alpha_q,
// so a measured S(q) fixes nu_q = (hbar^2 q^2 / 4 m rho)(1/S^2 - 1).
// ------------------------------------------------------------------

inline PairPotential invert_structure_factor(const TabulatedFunction& s_exp,
                                             const SystemParams& p) {
    const auto& qs = s_exp.grid().nodes;
    std::vector<double> nu(qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const double s = s_exp.values()[i];
        if (!(s > 0.0))
            throw ValidationError(
                "invert_structure_factor: S(q) <= 0 at node q = " +
                std::to_string(qs[i]));
        nu[i] = 0.5 * p.eps_free(qs[i]) / p.density * (1.0 / (s * s) - 1.0);
    }
    // nu0 := q -> 0 limit of nu_q, taken as the linear extrapolation through
    // the first two nodes; finite for a phonon-consistent S(q) ~ q.
    const double nu0 = nu[0] - (nu[1] - nu[0]) / (qs[1] - qs[0]) * qs[0];
    TabulatedFunction table(qs, std::move(nu), Extrapolation::constant(),
                            Extrapolation::constant());
    return PairPotential::tabulated(std::move(table), nu0);
}

} // namespace bosepair

#endif
