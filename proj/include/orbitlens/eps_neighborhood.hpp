#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include "orbitlens/orbit.hpp"

namespace orbitlens {

// How to treat the unstored part of an accumulating orbit. `extend`
// estimates the contribution of the points past the stored end (they all
// overlap at valid eps) from the fitted distance decay; `finite_set` measures
// exactly the finite union of stored discs.
enum class TailPolicy { extend, finite_set };

// Critical index n_eps: d_{n_eps} < 2 eps, d_{n_eps - 1} >= 2 eps (boundary
// case n_eps = n0 when even d_{n0} < 2 eps). Throws when the orbit is too
// short for this eps.
std::size_t critical_index(const OrbitSample& o, double eps);

// Area of the crescent K(z,eps) \ K(w,eps) with d = |z-w| <= 2 eps.
double crescent_area(double d, double eps);

// Center of mass of the crescent at z with the disc at w removed.
cplx crescent_centroid(cplx z, cplx w, double eps);

// Length of the eps-neighborhood of a positive real orbit accumulating at 0,
// measured on the half line [0, inf). With TailPolicy::extend the unstored
// tail fills [0, x_N + eps] and the interval merge reproduces the
// tail/nucleus identity 2 eps n_eps + x_{n_eps} + eps when distances are
// monotone. finite_set merges the stored intervals only, unclipped.
double length_eps(const OrbitSample& o, double eps, TailPolicy tail = TailPolicy::extend);

struct MeasureResult {
    double area = 0.0;
    cplx complex_measure{};  // A(U) t(U)
    cplx directed_area{};    // A(U) t(U)/|t(U)|
    double trunc_bound = 0.0;
    std::size_t n_eps = 0;
};

MeasureResult measures_eps(const OrbitSample& o, double eps,
                           TailPolicy tail = TailPolicy::extend,
                           bool check_admissibility = true);

double area_eps(const OrbitSample& o, double eps, TailPolicy tail = TailPolicy::extend);
cplx complex_measure_eps(const OrbitSample& o, double eps, TailPolicy tail = TailPolicy::extend);
cplx directed_area_eps(const OrbitSample& o, double eps, TailPolicy tail = TailPolicy::extend);

// Verifies that past n_eps each disc meets only its predecessor in the sense
// of the crescent decomposition: K(z_n) cap K(z_j), j < n-1, is contained in
// K(z_{n-1}). Exact lens-containment tests on the early nucleus plus a
// step-direction variation certificate for the deep part.
bool admissibility_check(const OrbitSample& o, double eps);

// Valid eps window: [5 d_N, d_{n0}/4].
double valid_eps_min(const OrbitSample& o);
double valid_eps_max(const OrbitSample& o);

struct SweepSpec {
    double eps_min = 0.0;
    double eps_max = 0.0;
    int points_per_decade = 60;
    TailPolicy tail = TailPolicy::extend;
    // Anchor grid points just above the nearest half distance d_m/2. The
    // critical index is then pinned at the grid points, which freezes the
    // phase of the bounded non-developable ripple of the measures and makes
    // the log-coefficient fits well posed.
    bool pin_to_half_distances = false;
    // Measure interval lengths (real-line route) instead of areas. A real
    // orbit may still be measured in the plane, so this is explicit.
    bool lengths = false;
};

struct EpsSweep {
    struct Row {
        double eps = 0.0;
        std::size_t n_eps = 0;
        double area = 0.0;
        cplx cm{};
        cplx da{};
        double length = 0.0;
        double trunc_bound = 0.0;
    };
    std::vector<Row> rows;  // decreasing eps
    Germ::Kind kind = Germ::Kind::complex_plane;
};

// Geometric grid, decreasing eps, grid points jittered off exact half
// distances. Parallel over grid points; sweep_serial is the reference
// implementation used for testing and benchmarking.
EpsSweep sweep(const OrbitSample& o, const SweepSpec& spec);
EpsSweep sweep_serial(const OrbitSample& o, const SweepSpec& spec);

// Places a grid of the requested width at the lowest eps for which the
// truncation estimate stays below 1e-4 of the value.
SweepSpec auto_sweep_spec(const OrbitSample& o, double decades, int points_per_decade = 60,
                          bool lengths = false);

void write_sweep_csv(std::ostream& os, const EpsSweep& s);
EpsSweep read_sweep_csv(std::istream& is);

struct SingularityReport {
    struct Point {
        std::size_t n = 0;
        double eps_n = 0.0;
        double left2 = 0.0;   // |one-sided second difference| from below at h/4
        double right2 = 0.0;  // from above at h/4
        // growth of the one-sided second difference under h -> h/4 refinement,
        // right against left: the right side diverges like (eps-eps_n)^{-1/2},
        // the left limit is finite, so this ratio blows up exactly at eps_n
        double blowup_factor = 0.0;
        double d1_mismatch = 0.0;  // relative first-difference jump (C^1 check)
        double interior2 = 0.0;    // refinement drift mid-interval (stays small)
    };
    std::vector<Point> points;
};

// Probes the complex measure around the half distances eps_n with local
// steps h = 1e-4 eps_n and h/4.
SingularityReport singularity_scan(const OrbitSample& o, std::size_t n_lo, std::size_t n_hi);

}  // namespace orbitlens
