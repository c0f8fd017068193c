#ifndef BOSEPAIR_CONSISTENCY_HPP
#define BOSEPAIR_CONSISTENCY_HPP

#include <cmath>

#include "constants.hpp"
#include "pair_theory.hpp"

namespace bosepair::consistency {

// Derivation intermediates used only by the verification suites: the closed
// solution of the pair-mode evolution equation and the three cross-relations
// it must satisfy against the assembled coefficient functions. Not part of
// the public physics surface.

/// Closed solution of the pair-mode coefficient at inverse temperature beta:
/// a2 = -((alpha-1)/2) (1 - e^{-2 beta E}) / (1 + ((alpha-1)/(alpha+1)) e^{-2 beta E}).
inline double a2_solution(double alpha, double beta_E) {
    const double w = std::exp(-2.0 * beta_E);
    return -0.5 * (alpha - 1.0) * (-std::expm1(-2.0 * beta_E)) /
           (1.0 + (alpha - 1.0) / (alpha + 1.0) * w);
}

struct CBarPair {
    double c1_bar, c2_bar;
};

/// c-bar assembly: the coefficient functions plus their ideal-gas reference
/// pieces at mass m*,
///   c1_bar = c1 + e^{-b eps*}/(1 - e^{-2 b eps*}) = c1 + 1/(2 sinh(b eps*)),
///   c2_bar = c2 + 1/(1 - e^{-2 b eps*})          = c2 + (1 + coth(b eps*))/2.
inline CBarPair assemble_cbar(double alpha, double alpha_minus_one,
                              double beta_E, double beta_eps_star) {
    CBarPair p;
    p.c1_bar = c1_kernel(alpha, beta_E, beta_eps_star) +
               0.5 * inv_sinh(beta_eps_star);
    p.c2_bar = c2_kernel(alpha, alpha_minus_one, beta_E, beta_eps_star) +
               0.5 * (1.0 + coth(beta_eps_star));
    return p;
}

/// Relation 1: (2 alpha/(alpha+1)) e^{-bE} / (1 + ((alpha-1)/(alpha+1)) e^{-2bE})
///             = c1_bar / c2_bar.
inline double relation1_residual(double alpha, double alpha_minus_one,
                                 double beta_E, double beta_eps_star) {
    const double w1 = std::exp(-beta_E);
    const double lhs = 2.0 * alpha / (alpha + 1.0) * w1 /
                       (1.0 + (alpha - 1.0) / (alpha + 1.0) * w1 * w1);
    const auto cb = assemble_cbar(alpha, alpha_minus_one, beta_E, beta_eps_star);
    const double rhs = cb.c1_bar / cb.c2_bar;
    return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
}

/// Relation 2 (the identity the theory must meet "for free"):
/// a2 = c1_bar^2/c2_bar - c2_bar + 1.
inline double relation2_residual(double alpha, double alpha_minus_one,
                                 double beta_E, double beta_eps_star) {
    const double lhs = a2_solution(alpha, beta_E);
    const auto cb = assemble_cbar(alpha, alpha_minus_one, beta_E, beta_eps_star);
    const double rhs = cb.c1_bar * cb.c1_bar / cb.c2_bar - cb.c2_bar + 1.0;
    return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
}

/// Relation 3 (equivalently: the multipliers of the squared generating
/// function agree): (1/(alpha+1))(1-e^{-2bE})/(1+((alpha-1)/(alpha+1))e^{-2bE})
///                  = 1/(2 c2_bar).
inline double relation3_residual(double alpha, double alpha_minus_one,
                                 double beta_E, double beta_eps_star) {
    const double w = std::exp(-2.0 * beta_E);
    const double lhs = (-std::expm1(-2.0 * beta_E)) / (alpha + 1.0) /
                       (1.0 + (alpha - 1.0) / (alpha + 1.0) * w);
    const auto cb = assemble_cbar(alpha, alpha_minus_one, beta_E, beta_eps_star);
    const double rhs = 0.5 / cb.c2_bar;
    return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
}

/// Scalar part: the generating-function-free piece of the mode constant must
/// match the closed solution,
///   -(1/2) ln[(1+((a-1)/(a+1))e^{-2bE})/(1+(a-1)/(a+1))]
///   = per-mode c0 - (1/2) ln[1 + (1-e^{-2b eps*}) c2].
inline double scalar_part_residual(double alpha, double alpha_minus_one,
                                   double beta_E, double beta_eps_star) {
    const double w = std::exp(-2.0 * beta_E);
    const double r = (alpha - 1.0) / (alpha + 1.0);
    const double lhs = -0.5 * std::log((1.0 + r * w) / (1.0 + r));
    const double c0_mode = 0.5 * (log1mexp(2.0 * beta_eps_star) -
                                  log1mexp(2.0 * beta_E) + std::log(alpha));
    const double c2 = c2_kernel(alpha, alpha_minus_one, beta_E, beta_eps_star);
    const double rhs =
        c0_mode - 0.5 * std::log1p((-std::expm1(-2.0 * beta_eps_star)) * c2);
    return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
}

} // namespace bosepair::consistency

#endif
