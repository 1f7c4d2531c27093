#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "orbitlens/orbit.hpp"

using namespace orbitlens;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("model orbit matches the closed form") {
    Germ m = Germ::model(16);
    StopCriteria stop;
    stop.max_points = 1'000'000;
    OrbitSample o = orbit(m, cplx(-0.1, 0.0), stop);
    REQUIRE(o.points() >= 999'000);
    double worst = 0.0;
    for (std::size_t n = 0; n < o.points(); n += 997) {
        double exact = -0.1 / (1.0 + 0.1 * static_cast<double>(n));
        worst = std::max(worst, std::abs(o.z[n].real() - exact) / std::abs(exact));
    }
    CHECK(worst < 1e-11);
    CHECK(o.n0 == 0);
}

TEST_CASE("hyperbolic orbit of z/2") {
    Germ g({cplx(0.5)});
    OrbitSample o = orbit(g, cplx(0.3, 0.0), {});
    for (std::size_t n = 0; n < std::min<std::size_t>(o.points(), 25); ++n)
        CHECK(std::abs(o.z[n].real() - 0.3 * std::pow(2.0, -static_cast<double>(n))) < 1e-15);
    // |z_n| <= C |a1 + delta|^n
    double c = 0.31;
    for (std::size_t n = 0; n < o.points(); ++n)
        CHECK(std::abs(o.z[n]) <= c * std::pow(0.51, static_cast<double>(n)));
}

TEST_CASE("z+z^2 orbit asymptotics: z_n n -> -1") {
    std::vector<cplx> c(16, 0.0);
    c[0] = 1.0;
    c[1] = 1.0;
    Germ g(c);
    StopCriteria stop;
    stop.max_points = 100'001;
    OrbitSample o = orbit(g, cplx(-0.05, 0.0), stop);
    std::size_t n = o.points() - 1;
    CHECK(std::abs(o.z[n] * static_cast<double>(n) - cplx(-1.0)) < 0.05);
}

TEST_CASE("attracting directions") {
    std::vector<cplx> a{cplx(1.0), cplx(-1.0)};
    auto d1 = attracting_directions(Germ(a));  // z - z^2: A = 1
    REQUIRE(d1.size() == 1);
    CHECK(std::abs(d1[0].a_full - cplx(1.0)) < 1e-14);

    auto d2 = attracting_directions(Germ::parse("1,1"));  // z + z^2: A = -1
    CHECK(std::abs(d2[0].a_full - cplx(-1.0)) < 1e-14);

    auto d3 = attracting_directions(Germ::parse("1,0,1"));  // z + z^3
    REQUIRE(d3.size() == 2);
    double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(d3[0].a_full - cplx(0.0, inv_sqrt2)) < 1e-14);
    CHECK(std::abs(d3[1].a_full - cplx(0.0, -inv_sqrt2)) < 1e-14);
    for (const auto& d : d3) {
        CHECK(std::abs(std::abs(d.nu) - 1.0) < 1e-14);
        cplx probe = std::pow(d.a_full, 2) * (-2.0);
        CHECK(std::abs(probe - 1.0) < 1e-12);
    }
}

TEST_CASE("petal membership") {
    Germ g = Germ::parse("1,1,0,0");
    PetalQuery q1 = petal_membership(g, cplx(-0.1, 0.0));
    CHECK(q1.attracted);
    CHECK(q1.verified);
    PetalQuery q2 = petal_membership(g, cplx(0.1, 0.0));
    CHECK_FALSE(q2.attracted);

    Germ h = Germ::parse("1,0,1,0,0");
    PetalQuery q3 = petal_membership(h, cplx(0.0, 0.1));
    CHECK(q3.attracted);
    CHECK(q3.verified);
    auto dirs = attracting_directions(h);
    CHECK(std::abs(dirs[static_cast<size_t>(q3.direction_index)].a_full -
                   cplx(0.0, 1.0 / std::sqrt(2.0))) < 1e-12);
}

TEST_CASE("inverse orbit closed forms and round trip") {
    Germ m = Germ::model(16);
    StopCriteria stop;
    stop.max_points = 2000;
    OrbitSample o = inverse_orbit(m, cplx(0.1, 0.0), stop);
    for (std::size_t n = 0; n < o.points(); n += 97) {
        double exact = 0.1 / (1.0 + 0.1 * static_cast<double>(n));
        CHECK(std::abs(o.z[n].real() - exact) < 1e-13);
    }

    // f = z + z^2 from the repelling side: self-consistency f(w_{n+1}) = w_n
    std::vector<cplx> c(16, 0.0);
    c[0] = 1.0;
    c[1] = 1.0;
    Germ g(c);
    stop.max_points = 500;
    OrbitSample io = inverse_orbit(g, cplx(0.05, 0.0), stop);
    for (std::size_t n = 0; n + 1 < io.points(); ++n)
        CHECK(std::abs(g.eval(io.z[n + 1]) - io.z[n]) < 1e-13);
}

TEST_CASE("orbit asymptotics check") {
    Germ m = Germ::model(16);
    StopCriteria stop;
    stop.max_points = 100'000;
    OrbitSample o = orbit(m, cplx(-0.1, 0.0), stop);
    AsymptoticsReport rep = orbit_asymptotics_check(o);
    CHECK(rep.parabolic_fit_ok);
    CHECK(std::abs(rep.fitted_direction - cplx(-1.0)) < 0.01);

    Germ h = Germ::parse("1,0,1,0,0,0,0,0");
    stop.max_points = 200'000;
    OrbitSample o2 = orbit(h, cplx(0.0, 0.1), stop);
    AsymptoticsReport rep2 = orbit_asymptotics_check(o2);
    CHECK(std::abs(std::abs(rep2.fitted_direction) - 1.0 / std::sqrt(2.0)) <
          0.02 / std::sqrt(2.0));

    Germ hyp({cplx(0.5)});
    OrbitSample o3 = orbit(hyp, cplx(0.3, 0.0), {});
    AsymptoticsReport rep3 = orbit_asymptotics_check(o3);
    CHECK(rep3.exponential_decay);
}

TEST_CASE("argument of orbit points converges to the attracting direction") {
    Germ h = Germ::parse("1,0,1,0,0,0,0,0");
    StopCriteria stop;
    stop.max_points = 50'000;
    OrbitSample o = orbit(h, cplx(0.02, 0.1), stop);
    auto dirs = attracting_directions(h);
    double target = std::arg(dirs[static_cast<size_t>(o.direction_index)].a_full);
    for (std::size_t n = o.points() * 9 / 10; n < o.points(); n += 111)
        CHECK(std::abs(std::arg(o.z[n]) - target) < 0.05);
    // d strictly decreasing past n0
    for (std::size_t n = o.n0; n + 1 < o.d.size(); ++n) CHECK(o.d[n + 1] < o.d[n]);
}

TEST_CASE("escaping initial point is rejected") {
    Germ g = Germ::parse("1,1,0,0");
    CHECK_THROWS(orbit(g, cplx(0.1, 0.0), {}));
}

TEST_CASE("orbit csv dump") {
    Germ m = Germ::model(12);
    StopCriteria stop;
    stop.max_points = 5;
    OrbitSample o = orbit(m, cplx(-0.1, 0.0), stop);
    std::ostringstream os;
    write_orbit_csv(os, o);
    std::string text = os.str();
    CHECK(text.rfind("n,re,im,d\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 6);
}
