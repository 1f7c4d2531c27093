#include <doctest.h>

#include "orbitlens/series.hpp"
#include "oracles.hpp"

using namespace orbitlens;

TEST_CASE("series arithmetic basics") {
    Series a({1.0, 2.0, 3.0});        // 1 + 2z + 3z^2
    Series b({0.0, 1.0, 1.0});        // z + z^2
    Series p = mul(a, b, 3);
    CHECK(p[0] == cplx(0.0));
    CHECK(p[1] == cplx(1.0));
    CHECK(p[2] == cplx(3.0));         // 2*1 + 1*1
    CHECK(p[3] == cplx(5.0));         // 3 + 2

    Series c = compose_series(a, b, 3);
    // 1 + 2(z+z^2) + 3(z+z^2)^2 = 1 + 2z + 5z^2 + 6z^3 + ...
    CHECK(c[0] == cplx(1.0));
    CHECK(c[1] == cplx(2.0));
    CHECK(c[2] == cplx(5.0));
    CHECK(c[3] == cplx(6.0));
}

TEST_CASE("reciprocal, log, exp, pow") {
    Series u({1.0, 1.0});  // 1 + z
    Series r = u.reciprocal(4);
    for (int j = 0; j <= 4; ++j) CHECK(r[j] == cplx(j % 2 == 0 ? 1.0 : -1.0));
    Series lg = u.log_series(4);
    CHECK(std::abs(lg[1] - 1.0) < 1e-15);
    CHECK(std::abs(lg[2] + 0.5) < 1e-15);
    CHECK(std::abs(lg[3] - 1.0 / 3) < 1e-15);
    Series e = Series({0.0, 1.0}).exp_series(5);
    CHECK(std::abs(e[3] - 1.0 / 6) < 1e-15);
    CHECK(std::abs(e[5] - 1.0 / 120) < 1e-16);
    Series sq = u.pow_series(0.5, 3);
    CHECK(std::abs(sq[1] - 0.5) < 1e-14);
    CHECK(std::abs(sq[2] + 0.125) < 1e-14);
}

TEST_CASE("reversion matches Lagrange inversion oracle") {
    Series g({0.0, 1.0, -0.5, 0.25, 0.1});
    Series h = g.reversion(8);
    Series ho = oracles::lagrange_reversion(g, 8);
    for (int j = 1; j <= 8; ++j) CHECK(std::abs(h[j] - ho[j]) < 1e-12);
    Series idc = compose_series(g, h, 8);
    CHECK(std::abs(idc[1] - 1.0) < 1e-12);
    for (int j = 2; j <= 8; ++j) CHECK(std::abs(idc[j]) < 1e-11);
}
