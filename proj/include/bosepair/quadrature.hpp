#ifndef BOSEPAIR_QUADRATURE_HPP
#define BOSEPAIR_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "errors.hpp"
#include "system.hpp"

namespace bosepair {

struct IntegrationSpec {
    double rel_tol = 1e-9;
    double abs_tol = 1e-14;
    std::vector<double> singular_points{}; // integrable interior singularities
    int max_subdivisions = 4000;

    IntegrationSpec with_tols(double rel, double abs) const {
        IntegrationSpec s = *this;
        s.rel_tol = rel;
        s.abs_tol = abs;
        return s;
    }
    IntegrationSpec with_singularities(std::vector<double> pts) const {
        IntegrationSpec s = *this;
        s.singular_points = std::move(pts);
        return s;
    }
};

struct IntegrationResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = false;

    double value_or_throw(const std::string& what) const {
        if (!converged) {
            char msg[160];
            std::snprintf(msg, sizeof msg,
                          "%s: integral tolerance not reached (best estimate "
                          "%.9e, error estimate %.3e)",
                          what.c_str(), value, error);
            throw NumericsError(msg);
        }
        return value;
    }
};

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule.
inline constexpr double gk_x[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double gk_wk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double gk_wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error, resabs;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fv[15];
    double resk = 0.0, resg = 0.0, resabs = 0.0;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * gk_x[i];
        fv[i] = f(c - dx);
        fv[14 - i] = f(c + dx);
        resk += gk_wk[i] * (fv[i] + fv[14 - i]);
        resabs += gk_wk[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
    }
    fv[7] = f(c);
    resk += gk_wk[7] * fv[7];
    resabs += gk_wk[7] * std::abs(fv[7]);
    for (int j = 0; j < 3; ++j)
        resg += gk_wg[j] * (fv[2 * j + 1] + fv[13 - 2 * j]);
    resg += gk_wg[3] * fv[7];

    const double reskh = 0.5 * resk;
    double resasc = gk_wk[7] * std::abs(fv[7] - reskh);
    for (int i = 0; i < 7; ++i)
        resasc += gk_wk[i] * (std::abs(fv[i] - reskh) + std::abs(fv[14 - i] - reskh));

    const double value = resk * h;
    double err = std::abs((resk - resg) * h);
    resasc *= std::abs(h);
    resabs *= std::abs(h);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps50 = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
    if (eps50 > std::numeric_limits<double>::min())
        err = std::max(err, eps50);
    return {a, b, value, err, resabs};
}

} // namespace detail

/**
 * Adaptive integration of f over [a, b]. Declared singular points are used
 * as initial subdivision boundaries; the rule never evaluates f at segment
 * endpoints, so integrable endpoint singularities are admissible.
 */
template <class F>
IntegrationResult integrate(const F& f, double a, double b,
                            const IntegrationSpec& spec = {}) {
    if (!(a < b)) throw ValidationError("integrate: requires a < b");
    if (!(spec.rel_tol > 0.0) || !(spec.abs_tol > 0.0))
        throw ValidationError("integrate: tolerances must be positive");

    std::vector<double> cuts{a};
    for (double s : spec.singular_points) {
        if (s < a || s > b)
            throw ValidationError("integrate: singular point outside interval");
        if (s > a && s < b) cuts.push_back(s);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<detail::Segment> heap;
    double total = 0.0, total_err = 0.0, total_resabs = 0.0;
    int evals = 0, splits = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto s = detail::gk15(f, cuts[i], cuts[i + 1]);
        evals += 15;
        total += s.value;
        total_err += s.error;
        total_resabs += s.resabs;
        heap.push(s);
    }

    // A signed integral cannot be resolved below the round-off of its
    // absolute mass; convergence acknowledges that floor while the reported
    // error estimate stays honest.
    auto tol = [&] {
        const double noise =
            60.0 * std::numeric_limits<double>::epsilon() * total_resabs;
        return std::max({spec.abs_tol, spec.rel_tol * std::abs(total), noise});
    };
    while (total_err > tol() && splits < spec.max_subdivisions && !heap.empty()) {
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // interval at floating-point resolution; keep its estimate
            total_err -= worst.error;
            total_err += worst.error * 1e-3;
            continue;
        }
        auto left = detail::gk15(f, worst.a, mid);
        auto right = detail::gk15(f, mid, worst.b);
        evals += 30;
        ++splits;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_resabs += left.resabs + right.resabs - worst.resabs;
        heap.push(left);
        heap.push(right);
    }

    return {total, total_err, evals, total_err <= tol()};
}

/**
 * Integration over [a, infinity) through the map q = a + t/(1-t). The
 * integrand must decay (physics integrands carry Bose/Boltzmann factors);
 * exact zeros short-circuit the Jacobian so no inf*0 arises in the tail.
 */
template <class F>
IntegrationResult integrate_to_infinity(const F& f, double a,
                                        const IntegrationSpec& spec = {}) {
    IntegrationSpec inner = spec;
    inner.singular_points.clear();
    for (double s : spec.singular_points) {
        if (s <= a) throw ValidationError("integrate: singular point outside interval");
        const double u = s - a;
        inner.singular_points.push_back(u / (1.0 + u));
    }
    auto g = [&](double t) -> double {
        const double om = 1.0 - t;
        const double u = t / om;
        if (!std::isfinite(u)) return 0.0;
        const double v = f(a + u);
        if (v == 0.0) return 0.0;
        return v / (om * om);
    };
    return integrate(g, 0.0, 1.0, inner);
}

// ------------------------------------------------------------------
// Bracketing root finder (Brent) and damped fixed-point iteration.
// ------------------------------------------------------------------

struct RootSpec {
    double lo, hi;
    double tol = 1e-13; // abscissa tolerance
    int max_iter = 200;
};

template <class F>
double find_root(const F& f, const RootSpec& spec) {
    if (!(spec.lo < spec.hi)) throw ValidationError("find_root: bad bracket");
    double a = spec.lo, b = spec.hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw NumericsError("find_root: no sign change over bracket [" +
                            std::to_string(a) + ", " + std::to_string(b) + "]");

    double c = a, fc = fa, d = b - a, e = d;
    for (int iter = 0; iter < spec.max_iter; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa; d = b - a; e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 =
            2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
            0.5 * spec.tol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            const double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q),
                                   std::abs(e * q))) {
                e = d; d = p / q;
            } else {
                d = xm; e = d;
            }
        } else {
            d = xm; e = d;
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

struct FixedPointResult {
    double value = 0.0;
    double residual = 0.0; // |x - g(x)| at return
    int iterations = 0;
    bool converged = false;
    std::vector<double> history; // iterates, starting with x0
};

template <class G>
FixedPointResult fixed_point(const G& g, double x0, double damping, double tol,
                             int max_iter) {
    if (!(damping > 0.0) || damping > 1.0)
        throw ValidationError("fixed_point: damping must lie in (0, 1]");
    FixedPointResult r;
    r.history.push_back(x0);
    double x = x0;
    for (int k = 1; k <= max_iter; ++k) {
        const double gx = g(x);
        r.residual = std::abs(gx - x);
        r.iterations = k;
        if (r.residual <= tol) {
            r.value = x;
            r.converged = true;
            return r;
        }
        x += damping * (gx - x);
        r.history.push_back(x);
    }
    r.value = x;
    return r;
}

// ------------------------------------------------------------------
// Thermodynamic-limit replacement of per-particle mode sums:
// (1/N) sum_{q != 0} f(q)  ->  (1/(2 pi^2 rho)) int_0^{q_max} q^2 f(q) dq
// ------------------------------------------------------------------

/**
 * Integrates q^2 f(q)/(2 pi^2 rho) over (0, q_max]. The tail beyond q_max is
 * probed at 1.25 and 1.5 q_max; a non-decaying q^2 f is rejected since the
 * thermodynamic-limit value would then not exist at this truncation.
 */
inline double sum_to_integral(const std::function<double(double)>& f,
                              const SystemParams& params, const QGrid& grid,
                              const IntegrationSpec& spec = {}) {
    auto g = [&](double q) {
        const double v = f(q);
        if (!std::isfinite(v))
            throw NumericsError("sum_to_integral: non-finite integrand at q = " +
                                std::to_string(q));
        return q * q * v;
    };
    const double qm = grid.q_max;
    const double t1 = std::abs(g(qm));
    const double t3 = std::abs(g(1.5 * qm));
    if (t1 > std::max(1e-300, spec.abs_tol) && t3 >= 0.999 * t1)
        throw NumericsError(
            "sum_to_integral: q^2 f(q) does not decay beyond q_max = " +
            std::to_string(qm) + " (tail sample " + std::to_string(t3) + ")");
    const double val = integrate(g, 0.0, qm, spec).value_or_throw("sum_to_integral");
    return val / (2.0 * pi * pi * params.density);
}

} // namespace bosepair

#endif
