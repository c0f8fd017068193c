#ifndef BOSEPAIR_DENSITY_MATRIX_HPP
#define BOSEPAIR_DENSITY_MATRIX_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"
#include "pair_theory.hpp"
#include "system.hpp"

namespace bosepair {

// ------------------------------------------------------------------
// Desk-scale evaluator: small N, explicit permutation sums, a periodic-box
// wave-vector lattice (components multiples of 2 pi / L). All mode sums here
// are finite sums, not thermodynamic-limit integrals. Absolute normalisation
// is not meaningful in this finite box; only configuration ratios and the
// factorisation structure are (and that is what the checks use).
// ------------------------------------------------------------------

/**
 * Two coordinate sets in a cubic box. Each set is sorted lexicographically on
 * construction: every evaluated quantity is a symmetric function of each set,
 * so the canonical order makes permutation symmetry exact in floating point.
 */
struct Configuration {
    int n = 0;
    double box_side = 0.0;
    std::vector<Vec3> coords, coords_primed;

    Configuration(std::vector<Vec3> x, std::vector<Vec3> x_primed, double l)
        : n(static_cast<int>(x.size())), box_side(l), coords(std::move(x)),
          coords_primed(std::move(x_primed)) {
        if (n < 1 || n > 8)
            throw ValidationError("configuration: need 1 <= n <= 8 particles");
        if (coords_primed.size() != coords.size())
            throw ValidationError("configuration: set sizes differ");
        if (!(box_side > 0.0))
            throw ValidationError("configuration: box side must be positive");
        for (const auto* set : {&coords, &coords_primed})
            for (const auto& r : *set)
                for (double c : r)
                    if (!(c >= 0.0 && c <= box_side))
                        throw ValidationError("configuration: position outside box");
        std::sort(coords.begin(), coords.end());
        std::sort(coords_primed.begin(), coords_primed.end());
    }

    Configuration swapped() const {
        return Configuration(coords_primed, coords, box_side);
    }
    Configuration diagonal() const {
        return Configuration(coords, coords, box_side);
    }
};

/// Box-commensurate wave vectors: integer triples n != 0 with |n|^2 <= n2_max,
/// one representative per +-q pair, in a deterministic order.
struct BoxModes {
    double box_side = 0.0;
    std::vector<std::array<int, 3>> half;

    static BoxModes shells(double l, int n2_max) {
        if (!(l > 0.0) || n2_max < 1)
            throw ValidationError("box modes: bad arguments");
        BoxModes m;
        m.box_side = l;
        const int nmax = static_cast<int>(std::sqrt(static_cast<double>(n2_max)));
        for (int a = -nmax; a <= nmax; ++a)
            for (int b = -nmax; b <= nmax; ++b)
                for (int c = -nmax; c <= nmax; ++c) {
                    const int n2 = a * a + b * b + c * c;
                    if (n2 == 0 || n2 > n2_max) continue;
                    const bool canonical =
                        (a > 0) || (a == 0 && b > 0) || (a == 0 && b == 0 && c > 0);
                    if (canonical) m.half.push_back({a, b, c});
                }
        std::sort(m.half.begin(), m.half.end());
        return m;
    }

    static BoxModes single_mode(double l, std::array<int, 3> n) {
        BoxModes m;
        m.box_side = l;
        m.half.push_back(n);
        return m;
    }

    Vec3 q_vec(const std::array<int, 3>& n) const {
        const double u = 2.0 * pi / box_side;
        return {u * n[0], u * n[1], u * n[2]};
    }
    double q_norm(const std::array<int, 3>& n) const {
        return 2.0 * pi / box_side *
               std::sqrt(static_cast<double>(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]));
    }
};

/**
 * Per-mode spectrum data for the box: Bogoliubov factor, excitation energy
 * (bare mass), reference kinetic energy (mass m*), and the finite-N
 * ground-state energy with the literal N(N-1)/2V mean-field term.
 */
struct LabSpectrum {
    BoxModes modes;
    int n_particles = 0;
    double hbar2_over_m = 0.0;
    double m_star_ratio = 1.0;
    double nu0 = 0.0;
    std::vector<double> q, nu, alpha, am1, eps_bare, eps_star, energy;
    double e0_box = 0.0;

    double volume() const {
        return modes.box_side * modes.box_side * modes.box_side;
    }
};

/// nu_by_n2 maps the squared integer shell index |n|^2 to nu (K*Angstrom^3);
/// modes absent from the map carry nu = 0.
inline LabSpectrum build_lab_spectrum(const BoxModes& modes,
                                      const std::map<int, double>& nu_by_n2,
                                      double nu0, double hbar2_over_m,
                                      int n_particles, double m_star_ratio) {
    if (n_particles < 1 || !(hbar2_over_m > 0.0) || !(m_star_ratio > 0.0))
        throw ValidationError("lab spectrum: bad arguments");
    LabSpectrum s;
    s.modes = modes;
    s.n_particles = n_particles;
    s.hbar2_over_m = hbar2_over_m;
    s.m_star_ratio = m_star_ratio;
    s.nu0 = nu0;
    const double rho = n_particles / (modes.box_side * modes.box_side *
                                      modes.box_side);
    for (const auto& n : modes.half) {
        const double qn = modes.q_norm(n);
        const int n2 = n[0] * n[0] + n[1] * n[1] + n[2] * n[2];
        const auto it = nu_by_n2.find(n2);
        const double nuq = it == nu_by_n2.end() ? 0.0 : it->second;
        const double eps = 0.5 * hbar2_over_m * qn * qn;
        const double radicand = 1.0 + 2.0 * rho * nuq / eps;
        if (radicand < 0.0) throw StabilityViolation(qn, radicand);
        const double a = std::sqrt(radicand);
        s.q.push_back(qn);
        s.nu.push_back(nuq);
        s.alpha.push_back(a);
        s.am1.push_back(2.0 * rho * nuq / (eps * (a + 1.0)));
        s.eps_bare.push_back(eps);
        s.eps_star.push_back(eps / m_star_ratio);
        s.energy.push_back(a * eps);
    }
    // E0 = N(N-1) nu0 / 2V - sum_q (eps_q/4)(alpha-1)^2, finite-N form;
    // the full-space mode sum is twice the half-space sum
    double zp = 0.0;
    for (std::size_t i = 0; i < s.q.size(); ++i)
        zp += 0.5 * s.eps_bare[i] * s.am1[i] * s.am1[i];
    s.e0_box = static_cast<double>(n_particles) * (n_particles - 1) * nu0 /
                   (2.0 * s.volume()) -
               zp;
    return s;
}

namespace detail {

// sorted-order log-sum-exp: bitwise invariant under permutations of `terms`
inline double log_sum_exp_sorted(std::vector<double> terms) {
    std::sort(terms.begin(), terms.end());
    const double m = terms.back();
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - m);
    return m + std::log(acc);
}

inline std::vector<std::complex<double>> mode_rhos(const LabSpectrum& s,
                                                   std::span<const Vec3> set) {
    std::vector<std::complex<double>> out;
    out.reserve(s.modes.half.size());
    for (const auto& n : s.modes.half) out.push_back(rho_q(set, s.modes.q_vec(n)));
    return out;
}

} // namespace detail

/**
 * Ideal-gas density matrix at mass m*: Gaussian permanent over all N!
 * pairings, evaluated in the log domain. Symmetric under x <-> x' and under
 * relabelling, bit-exactly (sorted log-sum-exp over the permutation terms).
 */
inline double ideal_dm_log(const Configuration& c, double hbar2_over_m,
                           double m_star_ratio, double beta) {
    if (!(beta > 0.0)) throw ValidationError("ideal_dm: requires beta > 0");
    const double h2ms = hbar2_over_m / m_star_ratio;
    const double spread = 2.0 * beta * h2ms; // Gaussian width^2 per axis
    std::vector<int> perm(c.n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> terms;
    terms.reserve(1);
    double log_nfact = 0.0;
    for (int k = 2; k <= c.n; ++k) log_nfact += std::log(static_cast<double>(k));
    std::array<double, 8> dist2{};
    do {
        for (int j = 0; j < c.n; ++j) {
            const Vec3& a = c.coords_primed[j];
            const Vec3& b = c.coords[perm[j]];
            const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
            dist2[j] = dx * dx + dy * dy + dz * dz;
        }
        // the pair-distance multiset is invariant under x <-> x'; summing it
        // in sorted order keeps Hermiticity exact in floating point
        std::sort(dist2.begin(), dist2.begin() + c.n);
        double s = 0.0;
        for (int j = 0; j < c.n; ++j) s += dist2[j];
        terms.push_back(-s / spread);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return 1.5 * c.n * std::log(1.0 / (pi * spread)) +
           detail::log_sum_exp_sorted(std::move(terms)) - log_nfact;
}

/**
 * Pair-correlation factor ln P_N: the scalar mode sum plus the rho-bilinear
 * terms. Identically zero when the interaction is switched off.
 */
inline double pair_factor_log(const Configuration& c, const LabSpectrum& s,
                              double beta) {
    const auto rho = detail::mode_rhos(s, c.coords);
    const auto rhop = detail::mode_rhos(s, c.coords_primed);
    double c0 = -beta * s.e0_box;
    double bilinear = 0.0;
    for (std::size_t i = 0; i < s.q.size(); ++i) {
        const double bE = beta * s.energy[i];
        const double bx = beta * s.eps_star[i];
        c0 += log1mexp(2.0 * bx) - log1mexp(2.0 * bE) + std::log(s.alpha[i]);
        const double cross =
            2.0 * (rhop[i].real() * rho[i].real() + rhop[i].imag() * rho[i].imag());
        const double diag = std::norm(rho[i]) + std::norm(rhop[i]);
        bilinear += c1_kernel(s.alpha[i], bE, bx) * cross -
                    c2_kernel(s.alpha[i], s.am1[i], bE, bx) * diag;
    }
    return c0 + bilinear;
}

struct DmValue {
    double log_r0 = 0.0;
    double log_p = 0.0;
    double log_r = 0.0; // log_r0 + log_p, exact by construction
};

inline DmValue density_matrix_log(const Configuration& c, const LabSpectrum& s,
                                  double beta) {
    DmValue v;
    v.log_r0 = ideal_dm_log(c, s.hbar2_over_m, s.m_star_ratio, beta);
    v.log_p = pair_factor_log(c, s, beta);
    v.log_r = v.log_r0 + v.log_p;
    return v;
}

/**
 * Low-temperature comparison form of the density matrix (Penrose; also
 * derived by Feenberg), in collective variables. Valid only as T -> 0.
 */
inline double penrose_feenberg_log(const Configuration& c, const LabSpectrum& s,
                                   double beta) {
    const auto rho = detail::mode_rhos(s, c.coords);
    const auto rhop = detail::mode_rhos(s, c.coords_primed);
    double out = -beta * s.e0_box;
    for (std::size_t i = 0; i < s.q.size(); ++i) {
        const double bE = beta * s.energy[i];
        const double a = s.alpha[i];
        const double diag = std::norm(rho[i]) + std::norm(rhop[i]);
        const double cross =
            2.0 * (rhop[i].real() * rho[i].real() + rhop[i].imag() * rho[i].imag());
        out += std::log(a) + log_tanh_half(bE) - 2.0 * log1mexp(bE);
        out += 0.5 * diag;
        out -= 0.5 * (a * coth(bE) * diag - a * inv_sinh(bE) * cross);
    }
    return out;
}

/// The alpha -> 1, bare-mass reduction of the same comparison form: an
/// explicit collective-variable expression for the ideal-gas density matrix.
inline double ideal_rho_rep_log(const Configuration& c, const LabSpectrum& s,
                                double beta) {
    const auto rho = detail::mode_rhos(s, c.coords);
    const auto rhop = detail::mode_rhos(s, c.coords_primed);
    double out = 0.0;
    for (std::size_t i = 0; i < s.q.size(); ++i) {
        const double bx = beta * s.eps_bare[i];
        const double diag = std::norm(rho[i]) + std::norm(rhop[i]);
        const double cross =
            2.0 * (rhop[i].real() * rho[i].real() + rhop[i].imag() * rho[i].imag());
        out += log_tanh_half(bx) - 2.0 * log1mexp(bx);
        out += 0.5 * diag;
        out -= 0.5 * (coth(bx) * diag - inv_sinh(bx) * cross);
    }
    return out;
}

/**
 * Ground-state wave function (Bogoliubov-Zubarev form), log value up to the
 * box normalisation -(N/2) ln V which is included here explicitly.
 */
inline double ground_state_log_psi(std::span<const Vec3> set,
                                   const LabSpectrum& s) {
    double out = -0.5 * s.n_particles * std::log(s.volume());
    for (std::size_t i = 0; i < s.q.size(); ++i) {
        const auto r = rho_q(set, s.modes.q_vec(s.modes.half[i]));
        out += 0.5 * std::log(s.alpha[i]) - 0.5 * s.am1[i] * std::norm(r);
    }
    return out;
}

/// Potential energy of a configuration in collective variables; exact for a
/// potential whose Fourier components live on the included modes.
inline double lab_potential_energy(std::span<const Vec3> set,
                                   const LabSpectrum& s) {
    const double n = static_cast<double>(s.n_particles);
    double phi = n * (n - 1.0) * s.nu0 / (2.0 * s.volume());
    for (std::size_t i = 0; i < s.q.size(); ++i) {
        if (s.nu[i] == 0.0) continue;
        const auto r = rho_q(set, s.modes.q_vec(s.modes.half[i]));
        phi += n / s.volume() * s.nu[i] * (std::norm(r) - 1.0);
    }
    return phi;
}

/// Deterministic uniform double in [0, 1) from the engine's top 53 bits.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline std::vector<Vec3> random_box_coords(int n, double l,
                                           std::mt19937_64& g) {
    std::vector<Vec3> out(n);
    for (auto& r : out)
        for (auto& c : r) c = uniform01(g) * l;
    return out;
}

inline Configuration random_configuration(int n, double l, std::mt19937_64& g) {
    auto a = random_box_coords(n, l, g);
    auto b = random_box_coords(n, l, g);
    return Configuration(std::move(a), std::move(b), l);
}

} // namespace bosepair

#endif
