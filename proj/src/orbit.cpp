#include "orbitlens/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace orbitlens {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double wrap_angle(double a) {
    while (a > kPi) a -= 2.0 * kPi;
    while (a < -kPi) a += 2.0 * kPi;
    return a;
}

std::size_t monotone_index(const std::vector<double>& d) {
    if (d.size() < 2) return 0;
    std::size_t n0 = 0;
    for (std::size_t n = d.size() - 1; n-- > 0;) {
        if (!(d[n + 1] < d[n])) {
            n0 = n + 1;
            break;
        }
    }
    return n0;
}

void finish_sample(OrbitSample& o) {
    o.n0 = monotone_index(o.d);
    o.zsum.resize(o.z.size() + 1);
    cplx acc = 0.0, comp = 0.0;
    o.zsum[0] = 0.0;
    for (std::size_t n = 0; n < o.z.size(); ++n) {
        cplx y = o.z[n] - comp;
        cplx t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        o.zsum[n + 1] = acc;
    }
}

}  // namespace

std::vector<AttractingDirection> attracting_directions(const Germ& g) {
    if (!g.is_parabolic()) throw std::domain_error("attracting_directions: germ is not parabolic");
    int k = g.multiplicity_index();
    cplx a1 = g.coeff(k + 1);
    cplx base = -static_cast<double>(k) * a1;
    double mod = std::pow(std::abs(base), -1.0 / k);
    double arg0 = -std::arg(base) / k;
    std::vector<AttractingDirection> dirs;
    dirs.reserve(static_cast<size_t>(k));
    for (int j = 0; j < k; ++j) {
        double th = arg0 + 2.0 * kPi * j / k;
        cplx a = std::polar(mod, th);
        dirs.push_back({a, a / std::abs(a), 0});
    }
    std::sort(dirs.begin(), dirs.end(), [](const auto& x, const auto& y) {
        double ax = std::arg(x.a_full), ay = std::arg(y.a_full);
        if (ax < 0) ax += 2.0 * kPi;
        if (ay < 0) ay += 2.0 * kPi;
        return ax < ay;
    });
    for (int j = 0; j < k; ++j) dirs[static_cast<size_t>(j)].root_index = j;
    return dirs;
}

PetalQuery petal_membership(const Germ& g, cplx z) {
    auto dirs = attracting_directions(g);
    int k = g.multiplicity_index();

    auto nearest = [&](cplx v, bool repelling) {
        int best = 0;
        double bestgap = 1e300;
        for (int j = 0; j < k; ++j) {
            double target = std::arg(dirs[static_cast<size_t>(j)].a_full) + (repelling ? kPi / k : 0.0);
            double gap = std::abs(wrap_angle(std::arg(v) - target));
            if (gap < bestgap) {
                bestgap = gap;
                best = j;
            }
        }
        return best;
    };

    // forward test: 200 iterates staying in the sector of opening 2pi - 0.2
    // around the candidate direction, with eventually decreasing modulus
    int cand = nearest(z, false);
    double center = std::arg(dirs[static_cast<size_t>(cand)].a_full);
    cplx w = z;
    bool in_sector = true;
    double prev = std::abs(z);
    int increases = 0;
    for (int n = 0; n < 200; ++n) {
        w = g.eval(w);
        double m = std::abs(w);
        if (!(m < 10.0 * std::abs(z)) || !std::isfinite(m)) {
            in_sector = false;
            break;
        }
        if (std::abs(wrap_angle(std::arg(w) - center)) > kPi - 0.1) in_sector = false;
        if (n >= 100 && m >= prev) ++increases;
        prev = m;
    }
    if (in_sector && increases == 0 && std::abs(w) < std::abs(z)) {
        return {true, cand, true};
    }

    // repelling side: inverse iterates must contract
    int rcand = nearest(z, true);
    try {
        cplx v = z;
        bool shrink = true;
        for (int n = 0; n < 50; ++n) {
            cplx nv = g.inverse_step(v, v);
            if (!(std::abs(nv) < std::abs(v) * 1.001)) {
                shrink = false;
                break;
            }
            v = nv;
        }
        if (shrink && std::abs(v) < std::abs(z)) return {false, rcand, true};
    } catch (const std::exception&) {
    }
    return {false, rcand, false};
}

OrbitSample orbit(const Germ& g, cplx z0, const StopCriteria& stop, bool require_membership) {
    if (require_membership && g.is_parabolic()) {
        PetalQuery q = petal_membership(g, z0);
        if (!q.attracted)
            throw std::runtime_error("orbit: initial point not attracted (override to force)");
    }
    OrbitSample o{g, Germ::Kind::complex_plane, {}, {}, {}, 0, 0, false};
    if (g.kind() == Germ::Kind::real_line && z0.imag() == 0.0) o.kind = Germ::Kind::real_line;
    if (g.is_parabolic()) {
        auto q = petal_membership(g, z0);
        o.direction_index = q.direction_index;
    }
    o.z.reserve(std::min<std::size_t>(stop.max_points, 1 << 20));
    cplx z = z0;
    double z0mod = std::abs(z0);
    o.z.push_back(z);
    while (o.z.size() < stop.max_points) {
        cplx step = g.displacement(z);
        double dn = std::abs(step);
        if (dn < stop.min_distance) break;
        z += step;
        double m = std::abs(z);
        if (!std::isfinite(m) || m > 100.0 * z0mod + 1.0)
            throw std::runtime_error("orbit: escaping iterates, initial point not attracted");
        o.z.push_back(z);
        o.d.push_back(dn);
        if (m < stop.min_modulus) break;
    }
    finish_sample(o);
    if (g.is_parabolic() && o.n0 > o.z.size() / 2)
        throw std::runtime_error("orbit: initial point too far from origin (monotone index past N/2)");
    return o;
}

OrbitSample inverse_orbit(const Germ& g, cplx z0, const StopCriteria& stop) {
    OrbitSample o{g, Germ::Kind::complex_plane, {}, {}, {}, 0, 0, true};
    if (g.kind() == Germ::Kind::real_line && z0.imag() == 0.0) o.kind = Germ::Kind::real_line;
    cplx z = z0;
    double z0mod = std::abs(z0);
    o.z.push_back(z);
    while (o.z.size() < stop.max_points) {
        cplx w = g.inverse_step(z, z);
        double dn = std::abs(w - z);
        if (dn < stop.min_distance) break;
        double m = std::abs(w);
        if (!std::isfinite(m) || m > 100.0 * z0mod + 1.0)
            throw std::runtime_error("inverse_orbit: escaping iterates");
        o.z.push_back(w);
        o.d.push_back(dn);
        z = w;
        if (m < stop.min_modulus) break;
    }
    finish_sample(o);
    return o;
}

OrbitSample real_orbit(const std::function<double(double)>& displacement, double x0,
                       const StopCriteria& stop) {
    // one harmless coefficient; the germ slot is unused for synthetic orbits
    OrbitSample o{Germ({cplx(1.0, 0.0)}), Germ::Kind::real_line, {}, {}, {}, 0, 0, false};
    double x = x0;
    o.z.push_back(x);
    while (o.z.size() < stop.max_points) {
        double f = displacement(x);
        if (!(f > 0.0) || f >= x) {
            // steps at the floating point floor end the orbit cleanly
            if (o.z.size() > 3) break;
            throw std::runtime_error("real_orbit: displacement must satisfy 0 < f(x) < x");
        }
        if (f < stop.min_distance) break;
        x -= f;
        o.z.push_back(x);
        o.d.push_back(f);
        if (x < stop.min_modulus) break;
    }
    finish_sample(o);
    return o;
}

OrbitSample OrbitSample::from_points(std::vector<cplx> pts) {
    OrbitSample o{Germ({cplx(1.0, 0.0)}), Germ::Kind::complex_plane, std::move(pts), {}, {}, 0, 0, false};
    bool real = true;
    for (const auto& p : o.z) real = real && p.imag() == 0.0;
    if (real) o.kind = Germ::Kind::real_line;
    o.d.resize(o.z.empty() ? 0 : o.z.size() - 1);
    for (std::size_t n = 0; n + 1 < o.z.size(); ++n) o.d[n] = std::abs(o.z[n + 1] - o.z[n]);
    finish_sample(o);
    return o;
}

AsymptoticsReport orbit_asymptotics_check(const OrbitSample& o) {
    AsymptoticsReport rep;
    std::size_t n = o.z.size();
    if (n < 12) return rep;

    // exponential decay shows as a stable ratio |z_{n+1}|/|z_n| < 1
    double r1 = std::abs(o.z[n - 1]) / std::abs(o.z[n - 2]);
    double r2 = std::abs(o.z[n / 2]) / std::abs(o.z[n / 2 - 1]);
    if (r1 < 0.999 && std::abs(r1 - r2) < 0.05 * (1.0 - r1)) {
        rep.exponential_decay = true;
        rep.decay_ratio = r1;
        return rep;
    }

    if (n < 100 || !o.germ.is_parabolic()) return rep;
    int k = o.germ.multiplicity_index();
    // average of z_m m^{1/k} over the last decade of indices
    cplx acc = 0.0;
    std::size_t cnt = 0;
    for (std::size_t m = n / 10; m < n; ++m) {
        acc += o.z[m] * std::pow(static_cast<double>(m), 1.0 / k);
        ++cnt;
    }
    rep.fitted_direction = acc / static_cast<double>(cnt);
    auto dirs = attracting_directions(o.germ);
    cplx a = dirs[static_cast<size_t>(o.direction_index)].a_full;
    rep.rel_deviation = std::abs(rep.fitted_direction - a) / std::abs(a);
    rep.parabolic_fit_ok = rep.rel_deviation < 0.05;
    return rep;
}

void write_orbit_csv(std::ostream& os, const OrbitSample& o) {
    os.precision(17);
    os << "n,re,im,d\n";
    for (std::size_t n = 0; n < o.z.size(); ++n) {
        double dn = n < o.d.size() ? o.d[n] : 0.0;
        os << n << ',' << o.z[n].real() << ',' << o.z[n].imag() << ',' << dn << '\n';
    }
}

}  // namespace orbitlens
