#include <doctest.h>

#include <cmath>

#include "orbitlens/classifier.hpp"
#include "orbitlens/special_functions.hpp"

using namespace orbitlens;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("multiplicity from dimension") {
    CHECK(multiplicity_from_dimension(2.0 / 3.0) == 3);
    CHECK(multiplicity_from_dimension(0.0) == 1);
    CHECK(multiplicity_from_dimension(0.5) == 2);
    CHECK_THROWS(multiplicity_from_dimension(0.6));   // 2.5 fixed points do not exist
    CHECK_THROWS(multiplicity_from_dimension(1.2));
    // nondecreasing over the valid readings
    int prev = 0;
    for (double d = 0.0; d < 0.96; d += 0.002) {
        int mu;
        try {
            mu = multiplicity_from_dimension(d);
        } catch (const std::exception&) {
            continue;
        }
        CHECK(mu >= prev);
        prev = mu;
    }
}

TEST_CASE("hyperbolic subcase gauges") {
    // exponential and doubly exponential orbits leave very few points above
    // any modulus floor, so the stops are relaxed to widen the eps window
    auto sweep_of = [&](double (*f)(double), double x0, double floor) {
        StopCriteria stop;
        stop.min_modulus = floor;
        stop.min_distance = floor;
        OrbitSample o = real_orbit(f, x0, stop);
        SweepSpec spec;
        spec.lengths = true;
        spec.eps_max = 0.9 * valid_eps_max(o);
        spec.eps_min = 1.05 * valid_eps_min(o);
        spec.points_per_decade = 8;
        return sweep(o, spec);
    };
    // generator x/2: displacement f = x/2, strict case
    EpsSweep strict = sweep_of([](double x) { return 0.5 * x; }, 0.3, 1e-30);
    CHECK(hyperbolic_subcase(strict) == HyperbolicSubcase::strict);
    // generator x^2: displacement x - x^2, degenerate case
    EpsSweep degen = sweep_of([](double x) { return x - x * x; }, 0.5, 1e-130);
    CHECK(hyperbolic_subcase(degen) == HyperbolicSubcase::degenerate);
}

TEST_CASE("order readings") {
    auto sl = builtin_scale("saddle_loop", 8);
    CriticalOrderResult r4;
    r4.order = 4;
    OrderReading o4 = multiplicity_from_order(r4, sl);
    CHECK(o4.cyclicity_bound == 4);
    CHECK(o4.gauge == "x^2");
    CriticalOrderResult r3;
    r3.order = 3;
    OrderReading o3 = multiplicity_from_order(r3, sl);
    CHECK(o3.cyclicity_bound == 3);
    CHECK(o3.gauge == "x^2*l^1");
    auto pw = builtin_scale("power", 6);
    CriticalOrderResult r2;
    r2.order = 2;
    CHECK(multiplicity_from_order(r2, pw).multiplicity_bound == 2);
    CriticalOrderResult inf;
    inf.beyond_truncation = true;
    CHECK(multiplicity_from_order(inf, sl).inapplicable);
}

TEST_CASE("phi is finite and consistently evaluated") {
    for (int k = 2; k <= 8; ++k) {
        double v = phi(k);
        CHECK(std::isfinite(v));
        CHECK(v != 0.0);
    }
    CHECK_THROWS_AS(phi(1), std::domain_error);
    // monotone trend guard over k (regression reference values)
    CHECK(phi(2) == doctest::Approx(-30.830274).epsilon(1e-6));
    CHECK(phi(3) == doctest::Approx(-48.582393).epsilon(1e-6));
    CHECK(std::abs(phi(5)) > std::abs(phi(3)));
}

TEST_CASE("parabolic invariants invert the channel formulas exactly") {
    for (int k : {2, 3}) {
        for (cplx lambda : {cplx(0.0, 0.0), cplx(0.0, kPi / 2.0), cplx(1.0, 1.0)}) {
            for (double a1_abs : {1.0, 2.0}) {
                cplx nu = std::polar(1.0, 0.4 + k);
                FractalReport rep;
                rep.k = k;
                rep.minkowski_content = k1_magnitude(k, a1_abs);
                rep.directed_content = rep.minkowski_content * nu;
                rep.residual_content = kk1_from_lambda(k, a1_abs, lambda, nu);
                rep.have_residual = true;
                FormalInvariants inv = parabolic_invariants(rep);
                CHECK(inv.k == k);
                CHECK(std::abs(std::abs(inv.a1) - a1_abs) < 1e-10);
                CHECK(std::abs(inv.lambda - lambda) < 1e-9);
                // a1 phase consistency: nu_A^k (-k a1) has modulus |k a1|... the
                // inversion reproduces a1 with -nu^{-k} |a1|
                CHECK(std::abs(inv.a1 + std::pow(nu, -k) * a1_abs) < 1e-10);
            }
        }
    }
    FractalReport bad;
    bad.k = 1;
    CHECK_THROWS(parabolic_invariants(bad));
}

TEST_CASE("k1 invariants from the boundary-case coefficients") {
    // synthesize the report a model-class germ would produce
    for (cplx a1 : {cplx(1.0, 0.0), cplx(2.0, 0.0)}) {
        for (cplx one_minus : {cplx(0.0, 0.0), cplx(-1.0, 0.4)}) {
            FractalReport rep;
            rep.k = 1;
            rep.cm_log_coeff = kPi / (2.0 * a1);
            rep.area_log_coeff = kPi / 2.0 * one_minus.real();
            double pref = -5.0 * kPi / (4.0 * std::sqrt(2.0)) +
                          std::sqrt(kPi) / (4.0 * std::sqrt(2.0)) * gamma_fn(0.75) / gamma_fn(1.25);
            rep.cm_52_log_coeff =
                pref * std::sqrt(std::abs(a1)) / a1 * cplx(0.0, 1.0) * one_minus.imag();
            FormalInvariants inv = k1_invariants(rep);
            CHECK(std::abs(inv.a1 - a1) < 1e-12);
            cplx lambda_expect = cplx(0.0, 2.0 * kPi) * one_minus;
            CHECK(std::abs(inv.lambda - lambda_expect) < 1e-10);
        }
    }
}

TEST_CASE("holonomy invariants") {
    // q=2, d = 2/3 -> k q = 2, saddle k = 1
    FractalReport rep;
    rep.k = 2;
    rep.dim_b = 2.0 / 3.0;
    rep.minkowski_content = k1_magnitude(2, 1.0);
    cplx nu = std::polar(1.0, 0.3);
    rep.directed_content = rep.minkowski_content * nu;
    rep.residual_content = kk1_from_lambda(2, 1.0, cplx(1.0, 1.0), nu);
    rep.have_residual = true;
    HolonomyResult hr = holonomy_invariants(1, 2, rep);
    CHECK_FALSE(hr.linearizable);
    CHECK(hr.k == 1);
    CHECK(std::abs(hr.lambda - cplx(1.0, 1.0)) < 1e-9);

    FractalReport lin;
    lin.dim_b = 0.01;
    CHECK(holonomy_invariants(1, 2, lin).linearizable);

    // q = 1 reduces to parabolic_invariants
    HolonomyResult hq1 = holonomy_invariants(1, 1, rep);
    FormalInvariants pi2 = parabolic_invariants(rep);
    CHECK(hq1.k == pi2.k);
    CHECK(std::abs(hq1.lambda - pi2.lambda) < 1e-12);

    CHECK_THROWS(holonomy_invariants(2, 4, rep));  // (p,q) != 1
}

TEST_CASE("saddle loop tables") {
    CHECK(saddle_loop_dimension(3) == doctest::Approx(1.5));
    CHECK(saddle_loop_dimension(4) == doctest::Approx(1.5));
    CHECK(saddle_loop_dimension(1) == doctest::Approx(1.0));
    auto cs = cyclicity_set(1.5);
    CHECK(cs == std::vector<int>{3, 4});
    auto cs1 = cyclicity_set(1.0);
    CHECK(cs1 == std::vector<int>{1, 2});
    for (int m = 1; m <= 12; ++m) {
        auto set = cyclicity_set(saddle_loop_dimension(m));
        CHECK((set[0] == m || set[1] == m));
    }
}

TEST_CASE("hyperbola family dimension") {
    CHECK(hyperbola_family_dimension(0.5, 2.0) == doctest::Approx(1.5));
    CHECK(hyperbola_family_dimension(0.5, 1.0) == doctest::Approx(1.5));
    CHECK(hyperbola_family_dimension(0.0, 3.0) == doctest::Approx(1.0));
    CHECK_THROWS(hyperbola_family_dimension(1.0, 1.0));
}
