#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "orbitlens/eps_neighborhood.hpp"
#include "oracles.hpp"

using namespace orbitlens;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

OrbitSample model_orbit(double z0, std::size_t npts) {
    StopCriteria stop;
    stop.max_points = npts;
    return orbit(Germ::model(16), cplx(z0, 0.0), stop);
}
}  // namespace

TEST_CASE("critical index examples") {
    OrbitSample o = model_orbit(-0.1, 200'000);
    double d100 = 0.01 / ((1.0 + 0.1 * 100) * (1.1 + 0.1 * 100));
    CHECK(std::abs(o.d[100] - d100) < 1e-16);
    CHECK(critical_index(o, d100 / 2.0) == 101);  // strict inequality convention
    CHECK(critical_index(o, o.d[o.n0] / 2.0 * 1.0001) == o.n0);

    // geometric real points 2^-n
    std::vector<cplx> pts;
    for (int n = 0; n <= 16; ++n) pts.push_back(cplx(std::pow(2.0, -n), 0.0));
    OrbitSample geo = OrbitSample::from_points(pts);
    CHECK(critical_index(geo, std::pow(2.0, -10) / 2.0) == 10);

    CHECK_THROWS(critical_index(o, o.d.back() / 4.0));
}

TEST_CASE("crescent area closed forms and raster oracle") {
    CHECK(std::abs(crescent_area(2.0, 1.0) - kPi) < 1e-15);
    CHECK(crescent_area(0.0, 1.0) == 0.0);
    CHECK(std::abs(crescent_area(1.0, 1.0) - (std::sqrt(3.0) / 2.0 + kPi / 3.0)) < 1e-15);
    CHECK_THROWS_AS(crescent_area(2.5, 1.0), std::domain_error);

    auto rc = oracles::raster_crescent(cplx(0.0), cplx(1.0, 0.0), 1.0, 2048);
    CHECK(std::abs(rc.area - crescent_area(1.0, 1.0)) < 0.003 * rc.area);
}

TEST_CASE("crescent centroid examples") {
    // d = 2 eps: full disc, centroid at the center
    CHECK(std::abs(crescent_centroid(cplx(0.3, 0.1), cplx(2.3, 0.1), 1.0) - cplx(0.3, 0.1)) <
          1e-12);
    // raster comparison
    cplx t = crescent_centroid(cplx(0.0), cplx(1.0, 0.0), 1.0);
    CHECK(t.real() < 0.0);
    CHECK(std::abs(t.imag()) < 1e-12);
    auto rc = oracles::raster_crescent(cplx(0.0), cplx(1.0, 0.0), 1.0, 4096);
    CHECK(std::abs(t - rc.centroid) < 1e-4);
    // reflection symmetry
    cplx t2 = crescent_centroid(cplx(0.0), cplx(-1.0, 0.0), 1.0);
    CHECK(std::abs(t2 + t) < 1e-14);
    CHECK_THROWS_AS(crescent_centroid(cplx(0.0), cplx(0.0), 1.0), std::domain_error);
}

TEST_CASE("length of real neighborhoods") {
    // finite set 2^-n, n=0..10
    std::vector<cplx> pts;
    std::vector<double> xs;
    for (int n = 0; n <= 10; ++n) {
        pts.push_back(cplx(std::pow(2.0, -n), 0.0));
        xs.push_back(std::pow(2.0, -n));
    }
    OrbitSample o = OrbitSample::from_points(pts);
    double eps = std::pow(2.0, -12);
    CHECK(length_eps(o, eps, TailPolicy::finite_set) ==
          doctest::Approx(oracles::merge_length(xs, eps, false)).epsilon(1e-14));

    OrbitSample single = OrbitSample::from_points({cplx(0.5, 0.0)});
    CHECK(length_eps(single, 0.01, TailPolicy::finite_set) == doctest::Approx(0.02));
    OrbitSample touching = OrbitSample::from_points({cplx(0.5, 0.0), cplx(0.5 - 0.02, 0.0)});
    CHECK(length_eps(touching, 0.01, TailPolicy::finite_set) == doctest::Approx(0.04));
}

TEST_CASE("tail/nucleus length identity for monotone real orbits") {
    StopCriteria stop;
    stop.max_points = 100'000;
    OrbitSample o = real_orbit([](double x) { return x * x * x; }, 0.2, stop);
    for (double eps : {1e-4, 1e-5, 3e-6}) {
        std::size_t ne = critical_index(o, eps);
        double identity = 2.0 * eps * static_cast<double>(ne) + o.z[ne].real() + eps;
        double merged = length_eps(o, eps, TailPolicy::extend);
        CHECK(std::abs(merged - identity) < 1e-12 * merged);
    }
}

TEST_CASE("measures of small truncated orbits match the raster oracle") {
    OrbitSample full = model_orbit(-0.1, 200);
    std::vector<cplx> pts(full.z.begin(), full.z.end());
    OrbitSample o = OrbitSample::from_points(pts);
    for (double eps : {2e-3, 8e-4}) {
        MeasureResult m = measures_eps(o, eps, TailPolicy::finite_set);
        auto rast = oracles::scanline_union(pts, eps, 100'000);
        CHECK(std::abs(m.area - rast.area) < 3e-3 * rast.area);
        CHECK(std::abs(m.complex_measure - rast.complex_measure) <
              5e-3 * std::abs(rast.complex_measure));
    }
    // one-point orbit
    OrbitSample single = OrbitSample::from_points({cplx(0.2, 0.1)});
    MeasureResult m1 = measures_eps(single, 0.05);
    CHECK(m1.area == doctest::Approx(kPi * 0.0025));
    CHECK(std::abs(m1.complex_measure - kPi * 0.0025 * cplx(0.2, 0.1)) < 1e-15);
    CHECK(std::abs(std::abs(m1.directed_area) - m1.area) < 1e-15);
}

TEST_CASE("shift additivity of the complex measure") {
    OrbitSample full = model_orbit(-0.1, 400);
    std::mt19937 rng(17);
    std::uniform_int_distribution<std::size_t> pick(0, 100);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t start = pick(rng);
        std::vector<cplx> pts1(full.z.begin() + static_cast<std::ptrdiff_t>(start), full.z.end());
        std::vector<cplx> pts2(pts1.begin() + 1, pts1.end());
        OrbitSample o1 = OrbitSample::from_points(pts1);
        OrbitSample o2 = OrbitSample::from_points(pts2);
        double eps = 0.45 * o1.d[0];  // leading discs disjoint
        cplx diff = complex_measure_eps(o1, eps, TailPolicy::finite_set) -
                    complex_measure_eps(o2, eps, TailPolicy::finite_set);
        cplx expect = pts1[0] * eps * eps * kPi;
        CHECK(std::abs(diff - expect) < 1e-10 * std::abs(expect));
    }
}

TEST_CASE("rotation equivariance and scaling") {
    OrbitSample full = model_orbit(-0.1, 300);
    std::vector<cplx> pts(full.z.begin(), full.z.end());
    double eps = 1e-3;
    MeasureResult base = measures_eps(OrbitSample::from_points(pts), eps, TailPolicy::finite_set);

    cplx rot = std::polar(1.0, 0.7);
    std::vector<cplx> rpts;
    for (auto& p : pts) rpts.push_back(p * rot);
    MeasureResult r = measures_eps(OrbitSample::from_points(rpts), eps, TailPolicy::finite_set);
    CHECK(std::abs(r.area - base.area) < 1e-12 * base.area);
    CHECK(std::abs(r.complex_measure - rot * base.complex_measure) <
          1e-12 * std::abs(base.complex_measure));

    double s = 2.5;
    std::vector<cplx> spts;
    for (auto& p : pts) spts.push_back(p * s);
    MeasureResult sc = measures_eps(OrbitSample::from_points(spts), eps * s, TailPolicy::finite_set);
    CHECK(std::abs(sc.area - s * s * base.area) < 1e-12 * sc.area);
    CHECK(std::abs(sc.complex_measure - s * s * s * base.complex_measure) <
          1e-12 * std::abs(sc.complex_measure));
}

TEST_CASE("admissibility") {
    OrbitSample o = model_orbit(-0.1, 50'000);
    CHECK(admissibility_check(o, 1e-4));
    CHECK(admissibility_check(OrbitSample::from_points({cplx(0.5, 0.0)}), 0.1));
    // zig-zag
    std::vector<cplx> zig;
    for (int n = 0; n < 60; ++n)
        zig.push_back(cplx(1.0 / (1.0 + 0.2 * n), n % 2 ? 0.04 : -0.04));
    CHECK_FALSE(admissibility_check(OrbitSample::from_points(zig), 0.05));
}

TEST_CASE("sweep smoke, serial equivalence, csv round trip") {
    OrbitSample o = model_orbit(-0.1, 400'000);
    SweepSpec spec = auto_sweep_spec(o, 2.0, 60);
    EpsSweep s = sweep(o, spec);
    CHECK(s.rows.size() >= 100);
    for (std::size_t i = 0; i + 1 < s.rows.size(); ++i) {
        CHECK(s.rows[i].eps > s.rows[i + 1].eps);
        CHECK(s.rows[i].area > s.rows[i + 1].area);  // monotone areas
        CHECK(s.rows[i].n_eps <= s.rows[i + 1].n_eps);
    }
    EpsSweep ser = sweep_serial(o, spec);
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
        CHECK(s.rows[i].area == ser.rows[i].area);
        CHECK(s.rows[i].cm == ser.rows[i].cm);
        CHECK(s.rows[i].da == ser.rows[i].da);
    }
    // csv round trip is exact at 17 significant digits
    std::stringstream ss;
    write_sweep_csv(ss, s);
    EpsSweep back = read_sweep_csv(ss);
    REQUIRE(back.rows.size() == s.rows.size());
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
        CHECK(back.rows[i].eps == s.rows[i].eps);
        CHECK(back.rows[i].area == s.rows[i].area);
        CHECK(back.rows[i].cm == s.rows[i].cm);
    }
    // singleton grid equals the direct call
    SweepSpec one = spec;
    one.eps_min = one.eps_max = std::sqrt(spec.eps_min * spec.eps_max);
    EpsSweep s1 = sweep(o, one);
    REQUIRE(s1.rows.size() == 1);
    MeasureResult direct = measures_eps(o, s1.rows[0].eps, TailPolicy::extend, false);
    CHECK(s1.rows[0].area == direct.area);
    // eps below the window is rejected
    SweepSpec bad = spec;
    bad.eps_min = o.last_distance() * 0.1;
    CHECK_THROWS(sweep(o, bad));
}

TEST_CASE("singularity scan at half distances") {
    OrbitSample o = model_orbit(-0.1, 30'000);
    SingularityReport rep = singularity_scan(o, 200, 204);
    REQUIRE(rep.points.size() == 5);
    for (const auto& p : rep.points) {
        CHECK(p.blowup_factor > 50.0);
        CHECK(p.d1_mismatch < 1e-3);
        // mid-interval refinement drift is tiny against the singular growth
        CHECK(p.interior2 < 0.02 * p.right2);
    }
}

TEST_CASE("extend-mode consistency between truncation lengths") {
    OrbitSample o1 = model_orbit(-0.1, 2'000'000);
    OrbitSample o2 = model_orbit(-0.1, 1'000'000);
    for (double eps : {1e-4, 1e-5}) {
        MeasureResult a = measures_eps(o1, eps, TailPolicy::extend, false);
        MeasureResult b = measures_eps(o2, eps, TailPolicy::extend, false);
        CHECK(std::abs(a.area - b.area) < 2.0 * (a.trunc_bound + b.trunc_bound) + 1e-7 * a.area);
    }
}
