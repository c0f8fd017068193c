#ifndef BOSEPAIR_SYSTEM_HPP
#define BOSEPAIR_SYSTEM_HPP

#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"

namespace bosepair {

using Vec3 = std::array<double, 3>;

/**
 * Global physical context. Units: energies in Kelvin (k_B = 1), lengths in
 * Angstrom, hbar = 1, so mass carries units 1/(K*Angstrom^2) and is the
 * reciprocal of hbar2_over_m.
 */
struct SystemParams {
    double mass;         // 1/(K*Angstrom^2)
    double density;      // Angstrom^-3
    double temperature;  // K
    double hbar2_over_m; // K*Angstrom^2

    static SystemParams make(double hbar2_over_m, double density,
                             double temperature) {
        SystemParams p{1.0 / hbar2_over_m, density, temperature, hbar2_over_m};
        p.validate();
        return p;
    }

    static SystemParams he4(double temperature) {
        return make(he4_hbar2_over_m, he4_density, temperature);
    }

    SystemParams with_temperature(double t) const {
        SystemParams p = *this;
        p.temperature = t;
        p.validate();
        return p;
    }

    /// Classical-limit knob: scales hbar^2 by `lam` at fixed physical mass,
    /// density and temperature. lam -> 0 drives the system classical.
    SystemParams with_hbar_scale(double lam) const {
        if (!(lam > 0.0))
            throw ValidationError("hbar scale must be positive");
        return make(hbar2_over_m * lam, density, temperature);
    }

    double beta() const { return 1.0 / temperature; }

    /// Free-particle kinetic energy hbar^2 q^2 / 2m (bare mass), in K.
    double eps_free(double q) const { return 0.5 * hbar2_over_m * q * q; }

    void validate() const {
        if (!(mass > 0.0)) throw ValidationError("mass must be positive");
        if (!(density > 0.0)) throw ValidationError("density must be positive");
        if (!(temperature >= 0.0))
            throw ValidationError("temperature must be non-negative");
        if (std::abs(mass * hbar2_over_m - 1.0) > 1e-12)
            throw ValidationError("mass inconsistent with hbar2_over_m");
    }
};

/// Thermal de Broglie wavelength for effective-mass ratio r = m*/m.
inline double thermal_wavelength(const SystemParams& p, double m_star_ratio) {
    return std::sqrt(2.0 * pi * p.beta() * p.hbar2_over_m / m_star_ratio);
}

/**
 * Strictly increasing wave-number grid, q > 0. The q = 0 mode is excluded
 * throughout; q_max is the truncation of tabulated input data.
 */
struct QGrid {
    std::vector<double> nodes;
    double q_max = 0.0;

    static QGrid log_spaced(double q_min = 0.02, double q_max = 8.0,
                            int n = 512) {
        if (!(q_min > 0.0) || !(q_max > q_min) || n < 2)
            throw ValidationError("bad q-grid bounds");
        QGrid g;
        g.nodes.resize(n);
        const double step = std::log(q_max / q_min) / (n - 1);
        for (int i = 0; i < n; ++i) g.nodes[i] = q_min * std::exp(step * i);
        g.nodes.back() = q_max; // exact endpoint
        g.q_max = q_max;
        g.validate();
        return g;
    }

    static QGrid from_nodes(std::vector<double> nodes) {
        QGrid g;
        g.nodes = std::move(nodes);
        g.q_max = g.nodes.empty() ? 0.0 : g.nodes.back();
        g.validate();
        return g;
    }

    void validate() const {
        if (nodes.size() < 2) throw ValidationError("q-grid needs >= 2 nodes");
        if (!(nodes.front() > 0.0))
            throw ValidationError("q-grid nodes must be positive");
        for (std::size_t i = 1; i < nodes.size(); ++i)
            if (!(nodes[i] > nodes[i - 1]))
                throw ValidationError("q-grid nodes must increase strictly");
    }
};

/// Collective density-fluctuation coordinate rho_q = N^{-1/2} sum_j e^{-i q.r_j}.
/// Satisfies rho_{-q} = conj(rho_q); the q = 0 mode is rejected.
inline std::complex<double> rho_q(std::span<const Vec3> coords, const Vec3& q) {
    if (coords.empty()) throw ValidationError("rho_q needs at least one particle");
    if (q[0] == 0.0 && q[1] == 0.0 && q[2] == 0.0)
        throw ValidationError("rho_q: the q = 0 mode is excluded");
    double re = 0.0, im = 0.0;
    for (const auto& r : coords) {
        const double phase = -(q[0] * r[0] + q[1] * r[1] + q[2] * r[2]);
        re += std::cos(phase);
        im += std::sin(phase);
    }
    const double norm = 1.0 / std::sqrt(static_cast<double>(coords.size()));
    return {re * norm, im * norm};
}

} // namespace bosepair

#endif
