#pragma once

#include <optional>
#include <string>
#include <vector>

#include "orbitlens/asymptotic_fit.hpp"
#include "orbitlens/chebyshev.hpp"

namespace orbitlens {

enum class ClassificationRoute {
    real_multiplicity,
    chebyshev_order,
    parabolic_formal,
    holonomy,
    saddle_loop,
};

struct ClassificationResult {
    ClassificationRoute route = ClassificationRoute::parabolic_formal;
    std::optional<FormalInvariants> invariants;
    std::optional<int> multiplicity;
    std::optional<int> cyclicity_bound;
    bool linearizable = false;
    std::string confidence;
    std::optional<FormalInvariants> exact;  // symbolic cross-check when the germ is known
};

// mu = round(1/(1-d)), residual check 0.15
int multiplicity_from_dimension(double d);

enum class HyperbolicSubcase { strict, degenerate, inconclusive };

// Distinguishes |S_eps| ~ eps(-log eps) (f'(0) < 1) from eps log(-log eps)
// (f'(0) = 1) by which gauge keeps the ratio bounded over the sweep window.
HyperbolicSubcase hyperbolic_subcase(const EpsSweep& length_sweep);

struct OrderReading {
    int multiplicity_bound = 0;
    std::string gauge;  // the monomial the displacement is comparable to
    std::optional<int> cyclicity_bound;  // saddle-loop scale only
    bool inapplicable = false;           // infinite order (exponential scales)
    std::string note;
};

// Interprets a critical Minkowski order in the given scale; for the
// saddle-loop scale order 2k reads as cyclicity <= 2k and order 2k-1 as
// <= 2k-1 (equality under the regularity condition).
OrderReading multiplicity_from_order(const CriticalOrderResult& order,
                                     const ChebyshevScale& scale);

// Gamma expression of the inversion constant, exposed as a cross-check
// quantity; the lambda inversion itself uses the channel weights of the
// directed-area development (see parabolic_invariants).
double phi(int k);

// Inverts (dim_B, M^C, M, R^C) into the extended formal invariants; k >= 2.
FormalInvariants parabolic_invariants(const FractalReport& report);

// Boundary case k = 1: a1 from the eps^2 log eps coefficient pi/(2 a1) of
// the complex measure, Re(lambda/2 pi i) from the area log coefficient and
// Im from the eps^{5/2} log eps coefficient of the complex measure.
FormalInvariants k1_invariants(const FractalReport& report);

struct HolonomyResult {
    bool linearizable = false;
    int k = 0;        // saddle invariant (k q = parabolic index of h^{o q})
    cplx lambda{};
    int p = 0, q = 0;
};

// Formal orbital invariants of a resonant saddle from the fractal report of
// an orbit of the q-th iterate of its holonomy map.
HolonomyResult holonomy_invariants(int p, int q, const FractalReport& report_of_qth_iterate);

// d = 2 - 2/k (k even), 2 - 2/(k+1) (k odd)
double saddle_loop_dimension(int codim);
// inverse reading: {2/(2-d) - 1, 2/(2-d)}
std::vector<int> cyclicity_set(double d);

// max{1+s, 1 + s/(s + r(1-s))}
double hyperbola_family_dimension(double s, double r);

// Desk-scale check of the hyperbola family dimension: grid box counting of
// {x^r y = s_l^r} with s_l = l^{-1/(alpha-1)}.
double hyperbola_box_count_dimension(double s, double r, int grid = 4096);

}  // namespace orbitlens
