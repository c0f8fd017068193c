#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "bosepair/quadrature.hpp"

using namespace bosepair;

namespace {

// brute-force trapezoid oracle for the thermal log-kernel integral
//   int_0^inf p/(e^{p^2}-1) ln|(1-e^{-(p+2)^2})/(1-e^{-(p-2)^2})| dp
// with the p = q point handled by symmetric exclusion of one grid cell plus
// its analytic logarithmic mass.
double log_kernel_oracle() {
    const long n = 10'000'000;
    const double pmax = 20.0, h = pmax / n, q = 2.0;
    double acc = 0.0;
    for (long i = 1; i < n; ++i) {
        const double p = i * h;
        if (std::abs(p - q) <= 0.5 * h) continue;
        const double num = std::log(-std::expm1(-(p + q) * (p + q)));
        const double den = std::log(-std::expm1(-(p - q) * (p - q)));
        acc += p / std::expm1(p * p) * (num - den);
    }
    double val = acc * h;
    // excluded cell: integrand ~ A ln|p-q| + smooth near p = q
    const double a_log = -2.0 * q / std::expm1(q * q);
    const double d = 0.5 * h;
    val += a_log * 2.0 * (d * std::log(d) - d);
    val += q / std::expm1(q * q) * std::log(-std::expm1(-16.0)) * 2.0 * d;
    return val;
}

// value computed by the oracle above (frozen; the oracle reproduces it)
constexpr double log_kernel_pinned = 0.5015861866497832;

} // namespace

TEST_CASE("integrate handles endpoint log singularity") {
    auto r = integrate([](double x) { return std::log(x); }, 0.0, 1.0,
                       IntegrationSpec{1e-12, 1e-14, {}, 4000});
    REQUIRE(r.converged);
    REQUIRE(r.value == Catch::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("integrate polynomial") {
    auto r = integrate([](double x) { return x * x; }, 0.0, 1.0);
    REQUIRE(r.converged);
    REQUIRE(r.value == Catch::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("semi-infinite thermal log-kernel integral matches trapezoid oracle") {
    const double oracle = log_kernel_oracle();
    REQUIRE(oracle == Catch::Approx(log_kernel_pinned).margin(1e-12));

    auto f = [](double p) -> double {
        if (p * p > 700.0) return 0.0;
        const double num = std::log(-std::expm1(-(p + 2.0) * (p + 2.0)));
        const double den = std::log(-std::expm1(-(p - 2.0) * (p - 2.0)));
        return p / std::expm1(p * p) * (num - den);
    };
    auto r = integrate_to_infinity(
        f, 0.0, IntegrationSpec{1e-12, 1e-15, {2.0}, 20000});
    REQUIRE(r.converged);
    // tolerance covers the oracle's own O(h^2 ln h) resolution error
    REQUIRE(r.value == Catch::Approx(log_kernel_pinned).margin(5e-7));
}

TEST_CASE("integrate is linear") {
    const IntegrationSpec spec{1e-11, 1e-15, {}, 4000};
    auto f = [](double x) { return std::exp(-x * x); };
    auto g = [](double x) { return 1.0 / (1.0 + x * x); };
    std::mt19937_64 rng(71);
    for (int k = 0; k < 10; ++k) {
        const double a = -2.0 + 4.0 * ((rng() >> 11) * 0x1.0p-53);
        const double b = -2.0 + 4.0 * ((rng() >> 11) * 0x1.0p-53);
        const double lhs =
            integrate([&](double x) { return a * f(x) + b * g(x); }, 0.0, 3.0, spec)
                .value_or_throw("lin");
        const double rhs = a * integrate(f, 0.0, 3.0, spec).value_or_throw("f") +
                           b * integrate(g, 0.0, 3.0, spec).value_or_throw("g");
        REQUIRE(lhs == Catch::Approx(rhs).margin(2e-11 * (1.0 + std::abs(lhs))));
    }
}

TEST_CASE("interval splitting reproduces the whole") {
    auto f = [](double x) { return std::sin(3.0 * x) * std::exp(-x); };
    const IntegrationSpec spec{1e-12, 1e-15, {}, 4000};
    const auto whole = integrate(f, 0.0, 4.0, spec);
    for (double c : {0.3, 1.0, 2.7, 3.9}) {
        const auto l = integrate(f, 0.0, c, spec);
        const auto r = integrate(f, c, 4.0, spec);
        REQUIRE(std::abs(l.value + r.value - whole.value) <=
                l.error + r.error + whole.error + 1e-15);
    }
}

TEST_CASE("integrate reports failure with best estimate") {
    auto r = integrate([](double x) { return 1.0 / x; }, 0.0, 1.0,
                       IntegrationSpec{1e-12, 1e-16, {}, 40});
    REQUIRE_FALSE(r.converged);
    REQUIRE_THROWS_AS(r.value_or_throw("diverging"), NumericsError);
}

TEST_CASE("singular point outside interval is rejected") {
    REQUIRE_THROWS_AS(integrate([](double x) { return x; }, 0.0, 1.0,
                                IntegrationSpec{1e-9, 1e-14, {2.0}, 100}),
                      ValidationError);
}

TEST_CASE("find_root on sqrt(2)") {
    const double r = find_root([](double x) { return x * x - 2.0; },
                               RootSpec{1.0, 2.0, 1e-14, 200});
    REQUIRE(r == Catch::Approx(std::sqrt(2.0)).margin(1e-12));
}

TEST_CASE("find_root with root at interior zero") {
    const double r =
        find_root([](double x) { return x; }, RootSpec{-1.0, 1.0, 1e-14, 200});
    REQUIRE(std::abs(r) <= 1e-12);
}

TEST_CASE("find_root rejects unbracketed input") {
    REQUIRE_THROWS_AS(find_root([](double x) { return 1.0 + x * x; },
                                RootSpec{0.0, 1.0, 1e-12, 100}),
                      NumericsError);
}

TEST_CASE("Bose-function inversion matches series-summation oracle") {
    // oracle: g_{3/2} by direct 1e4-term series, inverted by bisection
    auto g32_series = [](double z) {
        double s = 0.0;
        for (int k = 1; k <= 10000; ++k)
            s += std::pow(z, k) / (std::sqrt(static_cast<double>(k)) * k);
        return s;
    };
    const double target = 1.5;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g32_series(mid) < target ? lo : hi) = mid;
    }
    const double z_oracle = 0.5 * (lo + hi);

    const double z_impl = find_root(
        [&](double z) { return bose_g32(z) - target; }, RootSpec{0.0, 1.0, 1e-15, 200});
    REQUIRE(z_impl == Catch::Approx(z_oracle).margin(1e-10));
}

TEST_CASE("fixed_point converges and is seed-insensitive") {
    auto g = [](double x) { return std::cos(x); };
    const auto a = fixed_point(g, 0.2, 1.0, 1e-13, 500);
    const auto b = fixed_point(g, 1.3, 0.7, 1e-13, 500);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    REQUIRE(a.value == Catch::Approx(0.7390851332151607).margin(1e-12));
    REQUIRE(a.value == Catch::Approx(b.value).margin(1e-11));
    REQUIRE(a.history.size() == static_cast<std::size_t>(a.iterations));
}

TEST_CASE("fixed_point reports non-convergence with history") {
    auto g = [](double x) { return 2.0 * x + 1.0; };
    const auto r = fixed_point(g, 1.0, 1.0, 1e-10, 25);
    REQUIRE_FALSE(r.converged);
    REQUIRE(r.iterations == 25);
    REQUIRE(r.history.size() >= 25);
}

TEST_CASE("fixed_point validates damping") {
    REQUIRE_THROWS_AS(fixed_point([](double x) { return x; }, 0.0, 0.0, 1e-8, 10),
                      ValidationError);
}

// ----- sum_to_integral -----

TEST_CASE("sum_to_integral of a Gaussian matches the analytic moment") {
    const auto p = SystemParams::make(1.0, 1.0, 1.0);
    const auto grid = QGrid::log_spaced(0.02, 8.0, 64);
    const double v = sum_to_integral([](double q) { return std::exp(-q * q); },
                                     p, grid, IntegrationSpec{1e-11, 1e-15, {}, 4000});
    const double exact = (std::sqrt(pi) / 4.0) / (2.0 * pi * pi);
    REQUIRE(v == Catch::Approx(exact).epsilon(1e-9));
}

TEST_CASE("sum_to_integral of zero is zero") {
    const auto p = SystemParams::he4(2.0);
    const auto grid = QGrid::log_spaced();
    REQUIRE(sum_to_integral([](double) { return 0.0; }, p, grid) == 0.0);
}

TEST_CASE("sum_to_integral of a rational tail matches trapezoid oracle") {
    const auto p = SystemParams::make(1.0, 0.02185, 1.0);
    const auto grid = QGrid::log_spaced(0.02, 50.0, 64);
    // oracle: brute-force trapezoid over [0, q_max]
    const long n = 4'000'000;
    const double h = 50.0 / n;
    double acc = 0.0;
    for (long i = 1; i < n; ++i) {
        const double q = i * h;
        const double f = 1.0 / ((1.0 + q * q) * (1.0 + q * q));
        acc += q * q * f;
    }
    const double qn = 50.0;
    acc += 0.5 * (qn * qn / ((1.0 + qn * qn) * (1.0 + qn * qn)));
    const double oracle = acc * h / (2.0 * pi * pi * 0.02185);

    const double v = sum_to_integral(
        [](double q) { return 1.0 / ((1.0 + q * q) * (1.0 + q * q)); }, p, grid,
        IntegrationSpec{1e-12, 1e-15, {}, 8000});
    REQUIRE(v == Catch::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("sum_to_integral rejects non-finite samples with the offending q") {
    const auto p = SystemParams::he4(2.0);
    const auto grid = QGrid::log_spaced(0.02, 8.0, 16);
    auto bad = [](double q) {
        return q > 1.0 && q < 1.5 ? std::numeric_limits<double>::quiet_NaN() : 1e-3 * std::exp(-q);
    };
    try {
        sum_to_integral(bad, p, grid);
        FAIL("expected NumericsError");
    } catch (const NumericsError& e) {
        REQUIRE(std::string(e.what()).find("q = ") != std::string::npos);
    }
}

TEST_CASE("sum_to_integral rejects non-decaying tails") {
    const auto p = SystemParams::he4(2.0);
    const auto grid = QGrid::log_spaced(0.02, 8.0, 16);
    REQUIRE_THROWS_AS(sum_to_integral([](double) { return 1.0; }, p, grid),
                      NumericsError);
}

TEST_CASE("sum_to_integral is linear and monotone") {
    const auto p = SystemParams::he4(2.0);
    const auto grid = QGrid::log_spaced(0.02, 8.0, 32);
    const IntegrationSpec spec{1e-11, 1e-15, {}, 4000};
    auto f = [](double q) { return std::exp(-q); };
    auto g = [](double q) { return std::exp(-q) / (1.0 + q * q); };
    const double jf = sum_to_integral(f, p, grid, spec);
    const double jg = sum_to_integral(g, p, grid, spec);
    REQUIRE(jf >= jg); // f >= g pointwise
    std::mt19937_64 rng(123);
    for (int k = 0; k < 8; ++k) {
        const double a = -1.0 + 2.0 * ((rng() >> 11) * 0x1.0p-53);
        const double b = -1.0 + 2.0 * ((rng() >> 11) * 0x1.0p-53);
        const double lhs = sum_to_integral(
            [&](double q) { return a * f(q) + b * g(q); }, p, grid, spec);
        REQUIRE(lhs == Catch::Approx(a * jf + b * jg).margin(2e-11));
    }
}
