#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "orbitlens/germ.hpp"

namespace orbitlens {

struct StopCriteria {
    std::size_t max_points = 2'000'000;
    double min_modulus = 1e-9;
    double min_distance = 1e-12;
};

struct AttractingDirection {
    cplx a_full;     // A = (-k a1)^{-1/k}, one of the k roots
    cplx nu;         // A/|A|
    int root_index;  // 0..k-1, sorted by argument in [0, 2pi)
};

// The k complex roots of (-k a1)^{-1/k}.
std::vector<AttractingDirection> attracting_directions(const Germ& g);

struct PetalQuery {
    bool attracted = false;
    int direction_index = -1;
    bool verified = false;  // false means heuristic
};

// Nearest attracting/repelling direction plus a 200-iterate empirical check
// inside the sector of opening 2pi - 0.2.
PetalQuery petal_membership(const Germ& g, cplx z);

struct OrbitSample {
    Germ germ = Germ({cplx(1.0, 0.0)});
    Germ::Kind kind = Germ::Kind::complex_plane;
    std::vector<cplx> z;       // z_0..z_N
    std::vector<double> d;     // d_n = |z_{n+1} - z_n|
    std::vector<cplx> zsum;    // zsum[m] = sum_{n<m} z_n (for tail measures)
    std::size_t n0 = 0;        // d strictly decreasing for n >= n0
    int direction_index = 0;
    bool inverse = false;      // built by inverse iteration

    std::size_t points() const { return z.size(); }
    double last_distance() const { return d.empty() ? 0.0 : d.back(); }

    // Synthetic sample from an explicit point list (tests, CSV replay).
    static OrbitSample from_points(std::vector<cplx> pts);
};

// Forward orbit z_{n+1} = f(z_n); records distances from the cancellation-free
// step. Throws when the point is not attracted (unless membership is waived).
OrbitSample orbit(const Germ& g, cplx z0, const StopCriteria& stop = {},
                  bool require_membership = true);

// Orbit of the numerical inverse (Newton per step, residual < 1e-14).
OrbitSample inverse_orbit(const Germ& g, cplx z0, const StopCriteria& stop = {});

// Real-line orbit x_{n+1} = g(x_n) for a generator given as a callable;
// displacement f = id - g supplied separately so distances stay exact.
OrbitSample real_orbit(const std::function<double(double)>& displacement, double x0,
                       const StopCriteria& stop = {});

struct AsymptoticsReport {
    bool parabolic_fit_ok = false;
    cplx fitted_direction{};   // limit of z_n n^{1/k}
    double rel_deviation = 0.0;
    bool exponential_decay = false;
    double decay_ratio = 0.0;
};

// Fits z_n n^{1/k} over the last decade of indices and reports the deviation
// from the attracting direction A; flags exponential decay instead for
// hyperbolic samples.
AsymptoticsReport orbit_asymptotics_check(const OrbitSample& o);

// CSV with header n,re,im,d.
void write_orbit_csv(std::ostream& os, const OrbitSample& o);

}  // namespace orbitlens
