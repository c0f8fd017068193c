#ifndef BOSEPAIR_TABULATED_HPP
#define BOSEPAIR_TABULATED_HPP

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "system.hpp"

namespace bosepair {

/// Out-of-range evaluation rule for a tabulated q-function.
struct Extrapolation {
    enum class Kind { constant_end, linear, power_tail };
    Kind kind = Kind::constant_end;
    double asymptote = 0.0; // power_tail: f -> asymptote + (f_end - asymptote)(q/q_end)^{-exponent}
    double exponent = 0.0;

    static Extrapolation constant() { return {Kind::constant_end, 0.0, 0.0}; }
    static Extrapolation linear() { return {Kind::linear, 0.0, 0.0}; }
    static Extrapolation power(double asymptote, double exponent) {
        return {Kind::power_tail, asymptote, exponent};
    }
};

/**
 * Strictly increasing abscissa table with monotonicity-preserving cubic
 * interpolation (Fritsch-Carlson slopes) and declared extrapolation rules.
 * Interpolated values never overshoot the neighbouring node values.
 */
class TabulatedFunction {
public:
    TabulatedFunction() = default;

    TabulatedFunction(std::vector<double> q, std::vector<double> v,
                      Extrapolation low = Extrapolation::linear(),
                      Extrapolation high = Extrapolation::constant())
        : grid_(QGrid::from_nodes(std::move(q))), values_(std::move(v)),
          low_(low), high_(high) {
        if (values_.size() != grid_.nodes.size())
            throw ValidationError("tabulated function: value/grid size mismatch");
        build_slopes();
    }

    double operator()(double q) const {
        const auto& x = grid_.nodes;
        if (q < x.front()) return extrapolate_low(q);
        if (q > x.back()) return extrapolate_high(q);
        const auto it = std::upper_bound(x.begin(), x.end(), q);
        std::size_t i = (it == x.begin()) ? 0 : (it - x.begin() - 1);
        if (i >= x.size() - 1) i = x.size() - 2;
        const double h = x[i + 1] - x[i], t = (q - x[i]) / h;
        const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        const double h10 = t * (1.0 - t) * (1.0 - t);
        const double h01 = t * t * (3.0 - 2.0 * t);
        const double h11 = t * t * (t - 1.0);
        return h00 * values_[i] + h10 * h * slope_[i] + h01 * values_[i + 1] +
               h11 * h * slope_[i + 1];
    }

    const QGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double q_min() const { return grid_.nodes.front(); }
    double q_max() const { return grid_.nodes.back(); }
    std::size_t size() const { return values_.size(); }
    const Extrapolation& low_policy() const { return low_; }
    const Extrapolation& high_policy() const { return high_; }

private:
    QGrid grid_;
    std::vector<double> values_;
    std::vector<double> slope_;
    Extrapolation low_, high_;

    void build_slopes() {
        const auto& x = grid_.nodes;
        const auto& y = values_;
        const std::size_t n = x.size();
        slope_.assign(n, 0.0);
        std::vector<double> h(n - 1), d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x[i + 1] - x[i];
            d[i] = (y[i + 1] - y[i]) / h[i];
        }
        if (n == 2) {
            slope_[0] = slope_[1] = d[0];
            return;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] == 0.0 || d[i] == 0.0 || (d[i - 1] > 0.0) != (d[i] > 0.0)) {
                slope_[i] = 0.0;
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                slope_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        slope_[0] = end_slope(h[0], h[1], d[0], d[1]);
        slope_[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    }

    // one-sided three-point estimate, clamped for monotonicity
    static double end_slope(double h0, double h1, double d0, double d1) {
        double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0.0) return 0.0;
        if (d0 * d1 < 0.0 && std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
        if (std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
        return m;
    }

    double extrapolate_low(double q) const {
        const auto& x = grid_.nodes;
        switch (low_.kind) {
        case Extrapolation::Kind::constant_end:
            return values_.front();
        case Extrapolation::Kind::linear: {
            const double s = (values_[1] - values_[0]) / (x[1] - x[0]);
            return values_[0] + s * (q - x[0]);
        }
        case Extrapolation::Kind::power_tail:
            return low_.asymptote +
                   (values_.front() - low_.asymptote) *
                       std::pow(q / x.front(), -low_.exponent);
        }
        return values_.front();
    }

    double extrapolate_high(double q) const {
        const auto& x = grid_.nodes;
        const std::size_t n = x.size();
        switch (high_.kind) {
        case Extrapolation::Kind::constant_end:
            return values_.back();
        case Extrapolation::Kind::linear: {
            const double s = (values_[n - 1] - values_[n - 2]) / (x[n - 1] - x[n - 2]);
            return values_.back() + s * (q - x.back());
        }
        case Extrapolation::Kind::power_tail:
            return high_.asymptote +
                   (values_.back() - high_.asymptote) *
                       std::pow(q / x.back(), -high_.exponent);
        }
        return values_.back();
    }
};

} // namespace bosepair

#endif
