#include <catch2/catch_amalgamated.hpp>

#include "fracns/energy.hpp"
#include "fracns/model.hpp"
#include "support/oracles.hpp"

using namespace fracns;
using Catch::Approx;

TEST_CASE("pure power f and F match closed forms") {
    auto nl = Nonlinearity::pure_power(3.0, 1.0);
    CHECK(f_eval(nl, 2.0) == Approx(4.0));
    CHECK(F_eval(nl, 2.0) == Approx(8.0 / 3.0));
    CHECK(f_eval(nl, 0.0) == 0.0);
    CHECK(F_eval(nl, 0.0) == 0.0);
    for (double t : {0.1, 1.0, 10.0}) {
        CHECK(f_eval(nl, -t) == Approx(-f_eval(nl, t)));
        CHECK(F_eval(nl, -t) == Approx(F_eval(nl, t)));
    }

    auto frac = Nonlinearity::pure_power(2.5, 0.7);
    CHECK(f_eval(frac, 4.0) == Approx(0.7 * std::pow(4.0, 1.5)));
    CHECK(F_eval(frac, 4.0) == Approx(0.7 * std::pow(4.0, 2.5) / 2.5));
}

TEST_CASE("F is the primitive of f (quadrature oracle)") {
    auto check_primitive = [](const Nonlinearity& nl) {
        for (double t : {0.5, 2.0, 7.0}) {
            double quad = oracle::integrate([&](double x) { return f_eval(nl, x); }, 0.0, t);
            CHECK(oracle::rel_err(F_eval(nl, t), quad) < 1e-10);
        }
    };
    check_primitive(Nonlinearity::pure_power(2.5, 1.0));
    check_primitive(Nonlinearity::pure_power(3.4, 0.3));
    check_primitive(Nonlinearity::two_power(2.4, 3.2, 0.8, 0.5));
}

TEST_CASE("pure power satisfies t f(t) == q F(t) to roundoff") {
    auto nl = Nonlinearity::pure_power(2.5, 1.3);
    for (double t : {1e-6, 0.02, 1.0, 31.7, 1e5}) {
        double lhs = t * f_eval(nl, t);
        double rhs = nl.q * F_eval(nl, t);
        CHECK(oracle::rel_err(lhs, rhs) < 1e-14);
    }
}

TEST_CASE("nonlinearity construction validates parameters") {
    CHECK_THROWS_AS(Nonlinearity::pure_power(2.0), std::invalid_argument);
    CHECK_THROWS_AS(Nonlinearity::pure_power(1.5), std::invalid_argument);
    CHECK_THROWS_AS(Nonlinearity::pure_power(2.5, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(Nonlinearity::two_power(3.0, 2.5, 1.0, 1.0), std::invalid_argument);
    CHECK_NOTHROW(Nonlinearity::two_power(2.5, 2.5, 1.0, 0.0));
}

TEST_CASE("growth conditions accept the subcritical range") {
    // N = 1, s = 1/2: critical exponent is 4
    auto rep = check_growth_conditions(Nonlinearity::pure_power(2.5), 0.5, 1);
    CHECK(rep.p_bar == Approx(4.0));
    CHECK(rep.alpha == Approx(2.5));
    CHECK(rep.beta == Approx(2.5));
    CHECK(rep.passed());

    auto two = check_growth_conditions(Nonlinearity::two_power(2.4, 3.5, 1.0, 0.5), 0.5, 1);
    CHECK(two.passed());
    CHECK(two.alpha == Approx(2.4));
    CHECK(two.beta == Approx(3.5));
}

TEST_CASE("growth conditions reject critical and supercritical exponents") {
    auto super = check_growth_conditions(Nonlinearity::pure_power(4.5), 0.5, 1);
    CHECK_FALSE(super.passed());

    auto critical = check_growth_conditions(Nonlinearity::pure_power(4.0), 0.5, 1);
    CHECK_FALSE(critical.passed());

    auto off = check_growth_conditions(Nonlinearity::pure_power(2.5, 0.0), 0.5, 1);
    CHECK_FALSE(off.passed());

    auto upper_bad = check_growth_conditions(Nonlinearity::two_power(2.4, 4.2, 1.0, 0.5), 0.5, 1);
    CHECK_FALSE(upper_bad.passed());
}

TEST_CASE("passing growth conditions imply a subcritical interpolation exponent") {
    for (double s : {0.3, 0.5, 0.9}) {
        for (int dim : {1, 2}) {
            double q = 2.0 + 2.0 * s / dim;  // halfway to critical
            auto rep = check_growth_conditions(Nonlinearity::pure_power(q), s, dim);
            REQUIRE(rep.passed());
            CHECK(gns_exponent(rep.alpha, s, dim) < 1.0);
            CHECK(gns_exponent(rep.beta, s, dim) < 1.0);
        }
    }
}

TEST_CASE("default two-bump landscape satisfies A1 and A2") {
    PotentialSpec spec;
    spec.dim = 1;
    spec.centers = {{0.0, 0.0, 0.0}, {8.0, 0.0, 0.0}};
    auto rep = check_A1_A2(spec);
    for (const auto& c : rep.checks) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.passed);
    }
    CHECK(rep.passed());
}

TEST_CASE("unequal bump heights break the common-maximum condition") {
    PotentialSpec spec;
    spec.dim = 1;
    spec.centers = {{0.0, 0.0, 0.0}, {8.0, 0.0, 0.0}};
    // bump tops at 2 and 1.5: the second center no longer maximizes h
    spec.peak_scale = {1.0, 0.5};
    auto rep = check_A1_A2(spec);
    CHECK_FALSE(rep.passed());
    bool a1_failed = false;
    for (const auto& c : rep.checks)
        if (c.name == "A1_centers_maximize_h" && !c.passed) a1_failed = true;
    CHECK(a1_failed);
}

TEST_CASE("displaced well breaks the common-minimum condition") {
    PotentialSpec spec;
    spec.dim = 1;
    spec.centers = {{0.0, 0.0, 0.0}};
    spec.well_centers = {{3.0, 0.0, 0.0}};
    auto rep = check_A1_A2(spec);
    CHECK_FALSE(rep.passed());
    bool a2_failed = false;
    for (const auto& c : rep.checks)
        if (c.name == "A2_centers_minimize_V" && !c.passed) a2_failed = true;
    CHECK(a2_failed);
}

TEST_CASE("positive well depth is rejected") {
    PotentialSpec spec;
    spec.V_depth = 0.5;
    auto rep = check_A1_A2(spec);
    CHECK_FALSE(rep.passed());
}

TEST_CASE("potential shape validation") {
    PotentialSpec spec;
    spec.centers.clear();
    CHECK_THROWS_AS(spec.validate_shape(), std::invalid_argument);
    spec.centers = {{0, 0, 0}};
    spec.h_infinity = 0.0;
    CHECK_THROWS_AS(spec.validate_shape(), std::invalid_argument);
    spec.h_infinity = 1.0;
    spec.peak_scale = {1.0, 1.0};
    CHECK_THROWS_AS(spec.validate_shape(), std::invalid_argument);
}

TEST_CASE("sampling on the grid evaluates the slow variable") {
    PotentialSpec spec;
    spec.dim = 1;
    spec.centers = {{0.0, 0.0, 0.0}, {8.0, 0.0, 0.0}};
    Grid g = Grid::uniform(1, 64.0, 256);

    auto sampled = sample_on_grid(spec, g, 0.4);
    CHECK_FALSE(sampled.center_outside_box);
    double worst_V = 0.0, worst_h = 0.0;
    for (int j = 0; j < 256; ++j) {
        std::array<double, 3> x{0.4 * g.coord(0, j), 0.0, 0.0};
        worst_V = std::max(worst_V, std::abs(sampled.V[j] - spec.V_at(x)));
        worst_h = std::max(worst_h, std::abs(sampled.h[j] - spec.h_at(x)));
    }
    CHECK(worst_V == 0.0);
    CHECK(worst_h == 0.0);

    // h stays above the background, V stays nonpositive
    for (int j = 0; j < 256; ++j) {
        CHECK(sampled.h[j] >= spec.h_infinity - 1e-12);
        CHECK(sampled.V[j] <= 1e-12);
    }
}

TEST_CASE("vanishing eps freezes the coefficients at the origin values") {
    PotentialSpec spec;
    spec.dim = 1;
    spec.centers = {{0.0, 0.0, 0.0}, {8.0, 0.0, 0.0}};
    Grid g = Grid::uniform(1, 64.0, 128);
    auto sampled = sample_on_grid(spec, g, 1e-12);
    double h0 = spec.h_at({0, 0, 0});
    double V0 = spec.V_at({0, 0, 0});
    for (int j = 0; j < 128; ++j) {
        CHECK(std::abs(sampled.h[j] - h0) < 1e-9 * std::abs(h0));
        CHECK(std::abs(sampled.V[j] - V0) < 1e-9 * std::abs(V0));
    }
}

TEST_CASE("centers outside the rescaled box raise the flag") {
    PotentialSpec spec;
    spec.dim = 1;
    spec.centers = {{0.0, 0.0, 0.0}, {8.0, 0.0, 0.0}};
    Grid g = Grid::uniform(1, 64.0, 128);
    CHECK(sample_on_grid(spec, g, 0.05).center_outside_box);   // 8/0.05 = 160 > 32
    CHECK_FALSE(sample_on_grid(spec, g, 0.4).center_outside_box);  // 8/0.4 = 20 < 32
    CHECK_THROWS_AS(sample_on_grid(spec, g, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(sample_on_grid(spec, g, -0.1), std::invalid_argument);
}

TEST_CASE("critical exponent values") {
    CHECK(critical_exponent(0.5, 1) == Approx(4.0));
    CHECK(critical_exponent(1.0, 2) == Approx(4.0));
    CHECK(critical_exponent(0.75, 3) == Approx(3.0));
    CHECK_THROWS_AS(critical_exponent(0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(critical_exponent(0.5, 5), std::invalid_argument);
}
