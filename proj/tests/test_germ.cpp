#include <doctest.h>

#include <random>

#include "orbitlens/germ.hpp"
#include "oracles.hpp"

using namespace orbitlens;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("eval examples") {
    Germ m = Germ::model(12);
    CHECK(std::abs(m.eval_series(0.1) - cplx(1.0 / 9.0)) < 1.2e-13);  // tail 0.1^13/0.9
    Germ id({cplx(1.0)});
    CHECK(id.eval(0.5) == cplx(0.5));
    Germ g = Germ::parse("1,0,1");
    CHECK(std::abs(g.eval(0.2) - cplx(0.208)) < 1e-15);
}

TEST_CASE("compose examples") {
    Germ g = Germ::parse("1,1,0");
    Germ c = compose(g, g, 3);
    CHECK(c.coeff(1) == cplx(1.0));
    CHECK(c.coeff(2) == cplx(2.0));
    CHECK(c.coeff(3) == cplx(2.0));

    Germ id = Germ::parse("1,0,0");
    Germ h = Germ::parse("1,0.5,0.25");
    Germ ih = compose(id, h, 3);
    for (int i = 1; i <= 3; ++i) CHECK(ih.coeff(i) == h.coeff(i));

    Germ two({cplx(2.0)}), three({cplx(3.0)});
    CHECK(compose(two, three, 1).coeff(1) == cplx(6.0));

    CHECK_THROWS_AS(compose(two, three, 2), std::invalid_argument);
}

TEST_CASE("invert_series examples and Lagrange oracle") {
    Germ g = Germ::parse("1,1,0,0");
    Germ h = invert_series(g, 4);
    CHECK(std::abs(h.coeff(1) - 1.0) < 1e-14);
    CHECK(std::abs(h.coeff(2) + 1.0) < 1e-14);
    CHECK(std::abs(h.coeff(3) - 2.0) < 1e-14);
    CHECK(std::abs(h.coeff(4) + 5.0) < 1e-13);

    Germ id({cplx(1.0)});
    CHECK(invert_series(id, 1).coeff(1) == cplx(1.0));

    Germ m = Germ::model(10);
    Germ mi = invert_series(m, 10);
    for (int i = 1; i <= 10; ++i)
        CHECK(std::abs(mi.coeff(i) - cplx(i % 2 == 1 ? 1.0 : -1.0)) < 1e-12);

    // random germ against the Lagrange oracle
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> un(-0.6, 0.6);
    Series gs(8);
    gs.at(1) = 1.0;
    for (int j = 2; j <= 8; ++j) gs.at(j) = cplx(un(rng), un(rng));
    std::vector<cplx> coeffs;
    for (int j = 1; j <= 8; ++j) coeffs.push_back(gs[j]);
    Germ rg(coeffs);
    Germ ri = invert_series(rg, 8);
    Series ro = oracles::lagrange_reversion(gs, 8);
    for (int j = 1; j <= 8; ++j) CHECK(std::abs(ri.coeff(j) - ro[j]) < 1e-12);
}

TEST_CASE("normalize_extended examples") {
    auto [nf1, inv1] = normalize_extended(Germ::parse("1,1,1"));
    CHECK(inv1.k == 1);
    CHECK(std::abs(inv1.a1 - 1.0) < 1e-14);
    CHECK(std::abs(inv1.lambda) < 1e-13);
    CHECK(std::abs(nf1.coeff(2) - 1.0) < 1e-14);
    CHECK(std::abs(nf1.coeff(3) - 1.0) < 1e-14);

    auto [nf2, inv2] = normalize_extended(Germ::parse("1,0,1,0,0"));
    CHECK(inv2.k == 2);
    CHECK(std::abs(inv2.lambda - cplx(0.0, 3.0 * kPi)) < 1e-12);

    auto [nf3, inv3] = normalize_extended(Germ::parse("1,1,1,1"));
    CHECK(inv3.k == 1);
    CHECK(std::abs(inv3.a1 - 1.0) < 1e-14);
    CHECK(std::abs(inv3.lambda) < 1e-13);

    CHECK_THROWS_AS(normalize_extended(Germ::parse("1,0,0")), std::domain_error);
    CHECK_THROWS_AS(normalize_extended(Germ::parse("0.5,1")), std::domain_error);
    CHECK_THROWS_AS(normalize_extended(Germ::parse("1,0,0,1")), std::invalid_argument);
}

TEST_CASE("residual_index examples and empirical relation to lambda") {
    // f - z = z^2 exactly, so the Laurent series is 1/z^2 with residue 0
    CHECK(std::abs(residual_index(Germ::parse("1,1,0"))) < 1e-14);
    CHECK(std::abs(residual_index(Germ::parse("1,1,1")) - cplx(-1.0)) < 1e-14);
    CHECK(std::abs(residual_index(Germ::parse("1,0,1,0,0"))) < 1e-14);

    // observed sign convention: iota = lambda/(2 pi i) - (k+1)/2
    for (const char* spec : {"1,1,1", "1,1,2,0.5", "1,0,1,0,1.25,0,0"}) {
        Germ g = Germ::parse(spec);
        auto [nf, inv] = normalize_extended(g);
        cplx iota = residual_index(g);
        cplx predicted = inv.lambda / cplx(0.0, 2.0 * kPi) - 0.5 * (inv.k + 1);
        CHECK(std::abs(iota - predicted) < 1e-11);
    }
}

TEST_CASE("conjugation invariance of the extended invariants") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> un(-1.0, 1.0);
    Germ base = Germ::parse("1,0,1,0,1.25,0,0,0,0");  // k=2, lambda = pi i/2
    auto [nf0, inv0] = normalize_extended(base);
    int order = base.truncation_order();
    for (int trial = 0; trial < 10; ++trial) {
        int l = 2 + trial % 3;
        cplx c(un(rng), un(rng));
        std::vector<cplx> pc(static_cast<size_t>(order), 0.0);
        pc[0] = 1.0;
        pc[static_cast<size_t>(l - 1)] = c;
        Germ phi(pc);
        Germ conj = compose(invert_series(phi, order), compose(base, phi, order), order);
        auto [nf, inv] = normalize_extended(conj);
        CHECK(inv.k == inv0.k);
        CHECK(std::abs(inv.a1 - inv0.a1) < 1e-10);
        CHECK(std::abs(inv.lambda - inv0.lambda) < 1e-9 * (1.0 + std::abs(inv0.lambda)));
        // residual index is invariant too
        CHECK(std::abs(residual_index(conj) - residual_index(base)) < 1e-10);
    }
}

TEST_CASE("compose with inverse gives the identity") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> un(-0.5, 0.5);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<cplx> c{cplx(1.0)};
        for (int j = 2; j <= 8; ++j) c.push_back(cplx(un(rng), un(rng)));
        Germ g(c);
        Germ gi = invert_series(g, 8);
        Germ idc = compose(g, gi, 8);
        CHECK(std::abs(idc.coeff(1) - 1.0) < 1e-12);
        for (int j = 2; j <= 8; ++j) CHECK(std::abs(idc.coeff(j)) < 1e-12);
    }
}

TEST_CASE("parsing the germ text format") {
    Germ g = Germ::parse("1,0,1.5+0.5i");
    CHECK(g.coeff(3) == cplx(1.5, 0.5));
    CHECK(g.kind() == Germ::Kind::complex_plane);
    Germ h = Germ::parse("1,-2.5,1e-3");
    CHECK(h.coeff(2) == cplx(-2.5));
    CHECK(h.coeff(3) == cplx(1e-3));
    CHECK(h.kind() == Germ::Kind::real_line);
    CHECK_THROWS(Germ::parse(""));
    CHECK_THROWS(Germ::parse("abc"));
    CHECK_THROWS(Germ::parse("0,1"));  // a1 = 0

    // builtins carry exact evaluators consistent with their series
    for (const char* name : {"model", "zexp", "loggerm"}) {
        Germ b = Germ::parse(name);
        cplx z(0.05, 0.02);
        CHECK(std::abs(b.eval(z) - b.eval_series(z)) < 1e-14);
        CHECK(std::abs(b.displacement(z) - (b.eval(z) - z)) < 1e-14);
    }
    // loggerm is z + z^2 + z^3 + ... through order 3 with lambda = 0
    Germ lg = Germ::loggerm(8);
    CHECK(std::abs(lg.coeff(2) - 1.0) < 1e-14);
    CHECK(std::abs(lg.coeff(3) - 1.0) < 1e-14);
    auto [nf, inv] = normalize_extended(lg);
    CHECK(std::abs(inv.lambda) < 1e-12);
}

TEST_CASE("multiplicity index") {
    CHECK(Germ::parse("1,1").multiplicity_index() == 1);
    CHECK(Germ::parse("1,0,1").multiplicity_index() == 2);
    CHECK(Germ::parse("1,0,0,5").multiplicity_index() == 3);
    CHECK_FALSE(Germ::parse("0.5,1").is_parabolic());
    auto [nf, inv] = normalize_extended(Germ::parse("1,0,1,0,0"));
    CHECK(inv.k == Germ::parse("1,0,1,0,0").multiplicity_index());
}
