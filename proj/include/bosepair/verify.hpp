#ifndef BOSEPAIR_VERIFY_HPP
#define BOSEPAIR_VERIFY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "consistency.hpp"
#include "density_matrix.hpp"
#include "effective_mass.hpp"
#include "thermo.hpp"

namespace bosepair {

// ------------------------------------------------------------------
// Machine-checkable verification suites: limits, consistency,
// density-matrix, mass. Every check is "measured <= tolerance" with all
// state points pinned here, so repeated runs are byte-identical.
// ------------------------------------------------------------------

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks;

    bool all_pass() const {
        return std::all_of(checks.begin(), checks.end(),
                           [](const CheckResult& c) { return c.pass; });
    }
};

namespace detail {

inline void add_check(SuiteReport& r, std::string name, double measured,
                      double tolerance) {
    r.checks.push_back(
        {std::move(name), measured, tolerance, measured <= tolerance});
}

inline const IntegrationSpec verify_spec{1e-11, 1e-15, {}, 20000};
inline const IntegrationSpec verify_strict{1e-12, 1e-15, {}, 40000};

} // namespace detail

/**
 * Exact limiting cases: interaction switch-off reproduces the ideal gas,
 * T -> 0 reproduces the Bogoliubov theory, hbar -> 0 scaling converges to
 * the classical random-phase forms.
 */
inline SuiteReport run_limits_suite() {
    using detail::add_check;
    const auto& spec = detail::verify_spec;
    SuiteReport rep{"limits", 0, {}};
    const auto grid = QGrid::log_spaced();
    const auto p0 = SystemParams::he4(1.0);
    const double tc = critical_temperature(p0, 1.0);

    // switch-off across both phases
    {
        const auto pot = PairPotential::zero();
        double worst_s = 0.0, worst_e = 0.0, worst_z = 0.0;
        for (double f : {0.1, 0.3, 0.6, 0.9, 1.1, 1.5, 2.5, 4.0}) {
            const auto p = p0.with_temperature(f * tc);
            const auto ideal = make_ideal_gas(p, 1.0, spec);
            for (double q : {0.05, 0.1, 0.2, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.5, 8.0}) {
                const double s_full = structure_factor(q, pot, p, ideal);
                const double s_ref = s0(q, ideal);
                worst_s = std::max(worst_s, std::abs(s_full - s_ref) / s_ref);
            }
            const double e = energy_per_n(pot, p, ideal, grid, spec);
            const double e_ref = ideal_energy_per_n(ideal);
            worst_e = std::max(worst_e, std::abs(e - e_ref) / std::abs(e_ref));
            const double z = ln_partition(pot, p, ideal, grid, spec);
            worst_z = std::max(worst_z, std::abs(z - ln_z0_ideal(ideal)));
        }
        add_check(rep, "switch_off_structure_factor_rel", worst_s, 1e-12);
        add_check(rep, "switch_off_energy_rel", worst_e, 1e-8);
        add_check(rep, "switch_off_ln_partition_abs", worst_z, 1e-10);
    }

    // Bogoliubov limit at T = 1e-3 T_c, Gaussian model
    {
        const auto pot = PairPotential::gaussian(200.0, 1.0);
        const auto p = p0.with_temperature(1e-3 * tc);
        const auto ideal = make_ideal_gas(p, 1.0, spec);
        double sup = 0.0;
        for (double q : grid.nodes)
            sup = std::max(sup, std::abs(structure_factor(q, pot, p, ideal) -
                                         1.0 / alpha_q(q, pot, p)));
        add_check(rep, "bogoliubov_structure_factor_sup", sup, 1e-6);
        const double e = energy_per_n(pot, p, ideal, grid, spec);
        const double e0 = ground_state_energy_per_n(pot, p, grid.q_max, spec);
        const double ph = phonon_gas_energy_per_n(pot, p, spec);
        add_check(rep, "bogoliubov_energy_abs", std::abs(e - e0 - ph), 1e-9);
    }

    // classical random-phase limit under the hbar-scaling ladder
    {
        const auto pot = PairPotential::gaussian(40.0, 1.0);
        std::vector<double> devS, devE, devZx;
        double finS = 0.0, finE = 0.0, finZ = 0.0;
        for (double lam : {1.0, 0.3, 0.1, 0.03}) {
            const auto p = SystemParams::he4(25.0).with_hbar_scale(lam);
            const auto ideal = make_ideal_gas(p, 1.0, spec);
            double ds = 0.0;
            for (double q : {0.3, 0.6, 1.0, 1.5, 2.0, 3.0, 5.0}) {
                const double s = structure_factor(q, pot, p, ideal);
                const double sr = rpa_structure_factor(q, pot, p);
                ds = std::max(ds, std::abs(s - sr) / sr);
            }
            const double e = energy_per_n(pot, p, ideal, grid, spec);
            const double er = rpa_energy_per_n(pot, p, spec);
            const double z = ln_partition(pot, p, ideal, grid, spec);
            const double zr = ln_z0_ideal(ideal) + rpa_excess_ln_partition(pot, p, spec);
            devS.push_back(ds);
            devE.push_back(std::abs(e - er) / std::abs(er));
            devZx.push_back(std::abs((z - ln_z0_ideal(ideal)) -
                                     rpa_excess_ln_partition(pot, p, spec)));
            finS = ds;
            finE = devE.back();
            finZ = std::abs(z - zr) / std::abs(zr);
        }
        auto mono_violation = [](const std::vector<double>& v) {
            double worst = 0.0;
            for (std::size_t i = 1; i < v.size(); ++i)
                worst = std::max(worst, v[i] - v[i - 1]);
            return worst;
        };
        add_check(rep, "classical_s_monotone", mono_violation(devS), 0.0);
        add_check(rep, "classical_e_monotone", mono_violation(devE), 0.0);
        add_check(rep, "classical_lnz_monotone", mono_violation(devZx), 0.0);
        add_check(rep, "classical_s_final_rel", finS, 1e-3);
        add_check(rep, "classical_e_final_rel", finE, 1e-3);
        add_check(rep, "classical_lnz_final_rel", finZ, 1e-3);
    }
    return rep;
}

/**
 * Internal consistency: the energy formula against the finite-difference
 * derivative of ln Z (m* frozen), the structure-factor derivative against
 * its finite difference, the pair-mode cross-relations, and continuity of
 * the ideal structure factor across T_c.
 */
inline SuiteReport run_consistency_suite() {
    using detail::add_check;
    SuiteReport rep{"consistency", 0, {}};
    const auto p0 = SystemParams::he4(1.0);
    const double tc = critical_temperature(p0, 1.0);
    const auto grid = QGrid::log_spaced();
    const auto pot = PairPotential::gaussian(200.0, 1.0);

    {
        const auto& spec = detail::verify_strict;
        double worst = 0.0;
        for (double f : {0.6, 0.85, 1.5, 3.0}) {
            const auto p = p0.with_temperature(f * tc);
            const auto ideal = make_ideal_gas(p, 1.0, spec);
            const double e = energy_per_n(pot, p, ideal, grid, spec);
            const double be = p.beta(), db = 1e-5 * be;
            const auto pp = p0.with_temperature(1.0 / (be + db));
            const auto pm = p0.with_temperature(1.0 / (be - db));
            const double fd =
                -(ln_partition(pot, pp, make_ideal_gas(pp, 1.0, spec), grid, spec) -
                  ln_partition(pot, pm, make_ideal_gas(pm, 1.0, spec), grid, spec)) /
                (2.0 * db);
            worst = std::max(worst, std::abs(e - fd) / std::abs(fd));
        }
        add_check(rep, "energy_vs_dlnz_fd_rel", worst, 1e-5);
    }

    {
        const auto& spec = detail::verify_spec;
        double worst = 0.0;
        for (double f : {0.5, 0.8, 1.5, 3.0})
            for (double q : {0.3, 0.8, 1.5, 2.5}) {
                const auto s = make_ideal_gas(p0.with_temperature(f * tc), 1.0, spec);
                const double be = s.params.beta(), db = 1e-5 * be;
                const auto sp =
                    make_ideal_gas(p0.with_temperature(1.0 / (be + db)), 1.0, spec);
                const auto sm =
                    make_ideal_gas(p0.with_temperature(1.0 / (be - db)), 1.0, spec);
                const double fd = (s0(q, sp) - s0(q, sm)) / (2.0 * db);
                worst = std::max(worst, std::abs(ds0_dbeta(q, s) - fd) / std::abs(fd));
            }
        add_check(rep, "ds0_dbeta_vs_fd_rel", worst, 1e-5);
    }

    {
        // pair-mode cross-relations over an 8 x 8 (q, beta) lattice with a
        // non-trivial reference mass
        const double r_star = 1.25;
        double w1 = 0.0, w2 = 0.0, w3 = 0.0, w0 = 0.0;
        for (int iq = 0; iq < 8; ++iq) {
            const double q = 0.1 * std::pow(40.0, iq / 7.0);
            const double a = alpha_q(q, pot, p0);
            const double am1 = alpha_q_minus_one(q, pot, p0);
            const double e_q = a * p0.eps_free(q);
            for (int ib = 0; ib < 8; ++ib) {
                const double be = 1e-2 / e_q * std::pow(4000.0, ib / 7.0);
                const double bE = be * e_q;
                const double bx = be * p0.eps_free(q) / r_star;
                w1 = std::max(w1, consistency::relation1_residual(a, am1, bE, bx));
                w2 = std::max(w2, consistency::relation2_residual(a, am1, bE, bx));
                w3 = std::max(w3, consistency::relation3_residual(a, am1, bE, bx));
                w0 = std::max(w0, consistency::scalar_part_residual(a, am1, bE, bx));
            }
        }
        add_check(rep, "pair_mode_relation_1", w1, 1e-12);
        add_check(rep, "pair_mode_relation_2", w2, 1e-12);
        add_check(rep, "pair_mode_relation_3", w3, 1e-12);
        add_check(rep, "pair_mode_scalar_part", w0, 1e-12);
    }

    {
        const auto& spec = detail::verify_spec;
        double worst = 0.0;
        for (double q : {0.5, 1.0, 2.0}) {
            auto gap = [&](double eps) {
                const auto lo =
                    make_ideal_gas(p0.with_temperature(tc * (1.0 - eps)), 1.0, spec);
                const auto hi =
                    make_ideal_gas(p0.with_temperature(tc * (1.0 + eps)), 1.0, spec);
                return std::abs(s0(q, lo) - s0(q, hi));
            };
            const double d3 = gap(1e-3), d4 = gap(1e-4);
            worst = std::max(worst, std::abs((10.0 * d4 - d3) / 9.0));
        }
        add_check(rep, "s0_continuity_at_tc", worst, 1e-4);
    }
    return rep;
}

/**
 * Finite-N density-matrix laboratory: N = 3, single-shell potential,
 * seeded configuration pairs.
 */
inline SuiteReport run_density_matrix_suite(std::uint64_t seed) {
    using detail::add_check;
    SuiteReport rep{"density-matrix", seed, {}};
    const double box = 8.0, h2m = he4_hbar2_over_m;
    const auto modes = BoxModes::shells(box, 1);
    const int n_particles = 3, n_pairs = 20;

    auto draw_pairs = [&](std::uint64_t s) {
        std::mt19937_64 rng(s);
        std::vector<Configuration> out;
        for (int i = 0; i < 2 * n_pairs; ++i)
            out.push_back(random_configuration(n_particles, box, rng));
        return out;
    };
    const auto cfgs = draw_pairs(seed);

    // (a) switch-off exactness
    {
        const auto s = build_lab_spectrum(modes, {}, 0.0, h2m, n_particles, 1.0);
        double worst = 0.0;
        for (const auto& c : cfgs)
            worst = std::max(worst, std::abs(pair_factor_log(c, s, 0.7)));
        add_check(rep, "dm_switch_off_exact", worst, 0.0);
    }

    // (b) Hermiticity and permutation symmetry, bit-exact
    {
        const auto s = build_lab_spectrum(modes, {{1, 100.0}}, 30.0, h2m,
                                          n_particles, 1.0);
        double worst_h = 0.0, worst_p = 0.0;
        for (const auto& c : cfgs) {
            const auto v = density_matrix_log(c, s, 0.6);
            const auto w = density_matrix_log(c.swapped(), s, 0.6);
            worst_h = std::max(worst_h, std::abs(v.log_r - w.log_r));
            auto x = c.coords, xp = c.coords_primed;
            std::rotate(x.begin(), x.begin() + 1, x.end());
            std::swap(xp[0], xp[n_particles - 1]);
            const auto u = density_matrix_log(Configuration(x, xp, box), s, 0.6);
            worst_p = std::max(worst_p, std::abs(u.log_r - v.log_r));
        }
        add_check(rep, "dm_hermiticity_exact", worst_h, 0.0);
        add_check(rep, "dm_relabeling_exact", worst_p, 0.0);
    }

    // (c) classical diagonal ratios at hbar scale 1e-2
    {
        const double q1 = 2.0 * pi / box;
        const auto s = build_lab_spectrum(modes, {{1, 30.0 * std::exp(-q1 * q1)}},
                                          30.0, h2m * 1e-2, n_particles, 1.0);
        double worst = 0.0;
        for (int i = 0; i + 1 < 2 * n_pairs; i += 2) {
            const double dr = density_matrix_log(cfgs[i].diagonal(), s, 0.5).log_r -
                              density_matrix_log(cfgs[i + 1].diagonal(), s, 0.5).log_r;
            const double dphi = lab_potential_energy(cfgs[i].coords, s) -
                                lab_potential_energy(cfgs[i + 1].coords, s);
            worst = std::max(worst, std::abs(dr + 0.5 * dphi));
        }
        add_check(rep, "dm_classical_diagonal_ratio", worst, 1e-3);
    }

    // (d) ratio identity rebuilding the pair form
    {
        const auto s = build_lab_spectrum(modes, {{1, 100.0}}, 40.0, h2m,
                                          n_particles, 1.0);
        double worst = 0.0;
        for (const auto& c : cfgs) {
            const auto v = density_matrix_log(c, s, 0.8);
            const double rebuilt = v.log_r0 + penrose_feenberg_log(c, s, 0.8) -
                                   ideal_rho_rep_log(c, s, 0.8);
            worst = std::max(worst, std::abs(rebuilt - v.log_r));
        }
        add_check(rep, "dm_ratio_identity", worst, 1e-10);
    }

    // (e) ground-state factorisation at beta E_min = 30
    {
        const double q1 = 2.0 * pi / box;
        const double eps = 0.5 * h2m * q1 * q1;
        const double rho_box = n_particles / (box * box * box);
        const double nu = 0.22 * eps / rho_box; // alpha = 1.2 on the shell
        const auto s =
            build_lab_spectrum(modes, {{1, nu}}, 0.0, h2m, n_particles, 1.0);
        const double beta = 30.0 / s.energy.front();
        const double nlv = n_particles * std::log(box * box * box);
        double worst = 0.0;
        for (const auto& c : cfgs) {
            const double lhs = pair_factor_log(c, s, beta) + beta * s.e0_box;
            const double rhs = ground_state_log_psi(c.coords_primed, s) +
                               ground_state_log_psi(c.coords, s) + nlv;
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        add_check(rep, "dm_ground_state_factorisation", worst, 1e-6);
    }
    return rep;
}

/**
 * Effective-mass prescriptions: the reduction chain, the kernel ordering,
 * and the self-consistent closure on a measured structure factor at 2 K.
 */
inline SuiteReport run_mass_suite(const TabulatedFunction& s_exp) {
    using detail::add_check;
    const auto& spec = detail::verify_spec;
    SuiteReport rep{"mass", 0, {}};
    const auto p = SystemParams::he4(2.0);

    {
        const auto pot = PairPotential::gaussian(200.0, 1.0);
        const double r_imp = impurity_mass(
            1.0, [&](double q) { return pot(q); }, pot, p, MassMethod::zero_t, spec);
        const double r_alpha = m_star_zero_t_alpha(pot, p, spec);
        const double r_s = m_star_zero_t_of(
            [&](double q) { return 1.0 / alpha_q(q, pot, p); }, p,
            std::numeric_limits<double>::infinity(), spec);
        add_check(rep, "chain_impurity_vs_alpha_rel",
                  std::abs(r_imp - r_alpha) / r_alpha, 1e-12);
        add_check(rep, "chain_alpha_vs_structure_rel",
                  std::abs(r_alpha - r_s) / r_alpha, 1e-12);
    }

    {
        const double r0 = m_star_zero_t(s_exp, p, spec);
        const double rc = m_star_classical(s_exp, p, spec);
        add_check(rep, "mass_ordering_violation",
                  std::max(0.0, std::max(1.0 - r0, r0 - rc)), 0.0);
    }

    {
        const auto sol = m_star_self_consistent(s_exp, p);
        add_check(rep, "self_consistent_residual", sol.residual, 1e-8);
        add_check(rep, "self_consistent_iterations",
                  static_cast<double>(sol.iterations), 199.0);
        add_check(rep, "self_consistent_converged", sol.converged ? 0.0 : 1.0, 0.0);
        // residual decreases monotonically along the damped iteration
        const auto closure =
            self_consistent_closure(s_exp, p, SelfConsistentOptions{}.quad);
        double prev = 1e300, worst = 0.0;
        for (std::size_t k = 0; k < sol.history.size(); k += 5) {
            const double res = closure.residual(sol.history[k]);
            worst = std::max(worst, res - prev);
            prev = res;
        }
        add_check(rep, "self_consistent_monotone_residual", std::max(0.0, worst), 0.0);
    }
    return rep;
}

} // namespace bosepair

#endif
