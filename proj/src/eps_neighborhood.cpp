#include "orbitlens/eps_neighborhood.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace orbitlens {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

template <typename T>
struct Kahan {
    T sum{}, comp{};
    void add(T v) {
        T y = v - comp;
        T t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

double wrap_angle(double a) {
    while (a > kPi) a -= 2.0 * kPi;
    while (a < -kPi) a += 2.0 * kPi;
    return a;
}

// crescent building blocks at u = d/(2 eps)
inline double crescent_g(double u) {
    double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    return u * s + std::asin(std::min(1.0, u));
}
inline double crescent_b(double u) {
    double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    return u * s - std::asin(s);
}

struct TailModel {
    bool ok = false;
    bool geometric = false;
    // log d(x) = c0 + p log x + c2 x^{-1/k}; log z(x) similar with complex c
    double c0 = 0.0, p = 0.0, c2 = 0.0, invk = 1.0;
    double ratio = 0.0;  // geometric fallback d_{n+1}/d_n
    cplx z0{};           // z(x) = exp(z0 + zc x^{-1/k}) x^{-1/k}
    cplx zc{};
    double rel_err = 0.1;  // back-tested prediction error of the arc length
};

struct PowerFit {
    double c0 = 0.0, p = 0.0, c2 = 0.0;
};

// LS of y against {1, log x, x^{-1/k}} over [lo, hi)
PowerFit fit_log_power(const std::vector<double>& y_of_log, std::size_t lo, std::size_t hi,
                       double invk, const OrbitSample& o, bool use_z) {
    (void)y_of_log;
    double a[3][3] = {};
    double b[3] = {};
    for (std::size_t i = lo; i < hi; ++i) {
        double x = static_cast<double>(i) + 1.0;
        double f0 = 1.0, f1 = std::log(x), f2 = std::pow(x, -invk);
        double yv = std::log(use_z ? std::abs(o.z[i]) : o.d[i]);
        if (use_z) yv += invk * f1;  // remove the leading power of |z|
        double f[3] = {f0, f1, f2};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) a[r][c] += f[r] * f[c];
            b[r] += f[r] * yv;
        }
    }
    // 3x3 Gaussian elimination
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (int r = col + 1; r < 3; ++r) {
            double f = a[r][col] / a[col][col];
            for (int c = col; c < 3; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    double x2 = b[2] / a[2][2];
    double x1 = (b[1] - a[1][2] * x2) / a[1][1];
    double x0 = (b[0] - a[0][1] * x1 - a[0][2] * x2) / a[0][0];
    return {x0, x1, x2};
}

TailModel fit_tail_model(const OrbitSample& o) {
    TailModel m;
    std::size_t nd = o.d.size();
    if (nd < 64) {
        if (nd >= 3) {
            m.ok = true;
            m.geometric = true;
            m.ratio = std::min(o.d[nd - 1] / o.d[nd - 2], 0.99);
            m.z0 = o.z.back();
            m.rel_err = 1.0;
        }
        return m;
    }
    double invk = 1.0;
    if (o.germ.is_parabolic()) invk = 1.0 / o.germ.multiplicity_index();

    std::size_t lo = std::max(o.n0, nd / 2), hi = nd;
    if (hi - lo < 32) lo = hi - 32;
    for (std::size_t i = lo; i < hi; ++i) {
        if (!(o.d[i] > 0.0) || !std::isfinite(o.d[i])) {
            // distances at the resolution floor; fall back to a crude bound
            m.ok = false;
            return m;
        }
    }
    PowerFit df = fit_log_power({}, lo, hi, invk, o, false);
    m.c0 = df.c0;
    m.p = df.p;
    m.c2 = df.c2;
    m.invk = invk;
    if (m.p < -6.0) {
        m.geometric = true;
        m.ratio = o.d[nd - 1] / o.d[nd - 2];
        m.ok = m.ratio > 0.0 && m.ratio < 0.999;
        m.z0 = o.z.back();
        m.rel_err = 0.5;
        return m;
    }
    PowerFit zf = fit_log_power({}, lo, hi, invk, o, true);
    // complex phase: fit unwrapped argument against {1, x^{-1/k}}
    {
        double a00 = 0, a01 = 0, a11 = 0, b0 = 0, b1 = 0;
        double prev = std::arg(o.z[lo]);
        double unwrapped = prev;
        for (std::size_t i = lo; i < hi; ++i) {
            double cur = std::arg(o.z[i]);
            unwrapped += wrap_angle(cur - prev);
            prev = cur;
            double f1 = std::pow(static_cast<double>(i) + 1.0, -invk);
            a00 += 1.0; a01 += f1; a11 += f1 * f1;
            b0 += unwrapped; b1 += unwrapped * f1;
        }
        double det = a00 * a11 - a01 * a01;
        double argc = det != 0 ? (a00 * b1 - a01 * b0) / det : 0.0;
        double arg0 = det != 0 ? (b0 - argc * a01) / a00 : std::arg(o.z.back());
        m.z0 = cplx(zf.c0, arg0);
        m.zc = cplx(zf.c2, argc);
    }

    // back-test: fit on [lo2, mid), predict the arc length of [mid, hi)
    std::size_t lo2 = std::max(o.n0, nd / 4), mid = nd / 2;
    if (mid > lo2 + 32) {
        PowerFit bt = fit_log_power({}, lo2, mid, invk, o, false);
        double actual = 0.0, predicted = 0.0;
        for (std::size_t i = mid; i < hi; ++i) {
            double x = static_cast<double>(i) + 1.0;
            actual += o.d[i];
            predicted += std::exp(bt.c0 + bt.p * std::log(x) + bt.c2 * std::pow(x, -invk));
        }
        m.rel_err = std::abs(predicted - actual) / actual;
    } else {
        m.rel_err = 0.05;
    }
    m.ok = true;
    return m;
}

struct TailRemainder {
    double area = 0.0;
    cplx measure{};
    double bound = 0.0;
};

// Contribution of the unstored crescents past the orbit end, by integrating
// the fitted distance model; the uncertainty comes from the back-tested
// prediction error of the model.
TailRemainder tail_remainder(const OrbitSample& o, double eps, const TailModel& m) {
    TailRemainder r;
    std::size_t nd = o.d.size();
    if (nd == 0) return r;
    double dn = o.d[nd - 1];
    if (!m.ok || !std::isfinite(m.c0) || !std::isfinite(m.c2)) {
        double zl = std::abs(o.z.back());
        r.area = 2.0 * eps * 2.0 * zl;
        r.measure = r.area * o.z.back() / std::max(zl, 1e-300);
        r.bound = r.area;
        return r;
    }
    if (m.geometric) {
        double l = dn * m.ratio / (1.0 - m.ratio);
        r.area = 2.0 * eps * l;
        r.measure = 2.0 * eps * l * m.z0;
        r.bound = std::max(0.1, m.rel_err) * r.area;
        return r;
    }
    // integrate 2 eps^2 G(d(x)/2eps) (optionally times z(x)) in t = log x
    double t0 = std::log(static_cast<double>(nd));
    double span = 40.0 / std::max(1.0, -(m.p + 1.0));
    span = std::min(span, 60.0);
    int panels = 512;
    double h = span / panels;
    Kahan<double> ka, kmr, kmi;
    for (int i = 0; i < panels; ++i) {
        double t = t0 + (i + 0.5) * h;
        double xmk = std::exp(-m.invk * t);
        double dd = std::exp(m.c0 + m.p * t + m.c2 * xmk);
        double u = std::min(dd / (2.0 * eps), 1.0);
        double w = 2.0 * eps * eps * crescent_g(u) * std::exp(t) * h;
        ka.add(w);
        cplx zv = std::exp(m.z0 + m.zc * xmk - m.invk * t);
        kmr.add(w * zv.real());
        kmi.add(w * zv.imag());
    }
    // analytic linear continuation past the grid (G(u) ~ 2u)
    double x1 = std::exp(t0 + span);
    if (m.p < -1.0) {
        double tail_len = std::exp(m.c0) * std::pow(x1, m.p + 1.0) / (-(m.p + 1.0));
        ka.add(2.0 * eps * tail_len);
    }
    r.area = ka.sum;
    r.measure = cplx(kmr.sum, kmi.sum);
    // floor calibrated against truncated-orbit consistency tests
    r.bound = std::max(3.0 * m.rel_err, 1e-4) * r.area + 2.0 * eps * dn;
    return r;
}

}  // namespace

std::size_t critical_index(const OrbitSample& o, double eps) {
    if (o.d.empty()) return 0;
    if (!(eps > 0.0)) throw std::invalid_argument("critical_index: eps must be positive");
    double two_eps = 2.0 * eps;
    if (o.d.back() >= two_eps)
        throw std::runtime_error("critical_index: orbit too short for this eps");
    auto first = o.d.begin() + static_cast<std::ptrdiff_t>(o.n0);
    auto it = std::partition_point(first, o.d.end(), [two_eps](double v) { return v >= two_eps; });
    return static_cast<std::size_t>(it - o.d.begin());
}

double crescent_area(double d, double eps) {
    if (d < 0.0 || d > 2.0 * eps * (1.0 + 1e-12))
        throw std::domain_error("crescent_area: need 0 <= d <= 2 eps");
    return 2.0 * eps * eps * crescent_g(std::min(d / (2.0 * eps), 1.0));
}

cplx crescent_centroid(cplx z, cplx w, double eps) {
    double d = std::abs(z - w);
    if (d > 2.0 * eps * (1.0 + 1e-12))
        throw std::domain_error("crescent_centroid: discs are disjoint");
    double a = crescent_area(d, eps);
    if (a == 0.0) throw std::domain_error("crescent_centroid: degenerate crescent (d = 0)");
    double u = std::min(d / (2.0 * eps), 1.0);
    return z + eps * eps * (w - z) * crescent_b(u) / a;
}

double length_eps(const OrbitSample& o, double eps, TailPolicy tail) {
    if (o.kind != Germ::Kind::real_line)
        throw std::domain_error("length_eps: orbit is not real");
    if (o.z.empty()) return 0.0;
    std::vector<double> x(o.z.size());
    for (std::size_t i = 0; i < o.z.size(); ++i) x[i] = o.z[i].real();
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (x[i + 1] >= x[i]) throw std::domain_error("length_eps: orbit must decrease");
    if (tail == TailPolicy::extend && o.d.back() >= 2.0 * eps)
        throw std::runtime_error("length_eps: orbit too short for this eps");

    double total = 0.0;
    double right = x[0] + eps, left = x[0] - eps;
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (x[i] + eps >= left) {
            left = x[i] - eps;
        } else {
            total += right - (tail == TailPolicy::extend ? std::max(left, 0.0) : left);
            right = x[i] + eps;
            left = x[i] - eps;
        }
    }
    if (tail == TailPolicy::extend) left = 0.0;  // unstored points fill [0, x_N + eps]
    total += right - (tail == TailPolicy::extend ? std::max(left, 0.0) : left);
    return total;
}

MeasureResult measures_eps(const OrbitSample& o, double eps, TailPolicy tail,
                           bool check_admissibility) {
    MeasureResult res;
    if (o.z.empty()) return res;
    if (o.z.size() == 1) {
        res.area = kPi * eps * eps;
        res.complex_measure = res.area * o.z[0];
        res.directed_area = std::abs(o.z[0]) == 0.0 ? cplx{} : res.area * o.z[0] / std::abs(o.z[0]);
        return res;
    }
    std::size_t ne = critical_index(o, eps);
    res.n_eps = ne;
    if (check_admissibility && !admissibility_check(o, eps))
        throw std::runtime_error("measures_eps: admissibility violated");

    double e2 = eps * eps;
    Kahan<double> area;
    Kahan<double> mre, mim;
    // tail discs 0..n_eps-1 plus the leading nucleus disc at z_{n_eps}
    area.add(kPi * e2 * static_cast<double>(ne + 1));
    cplx tail_m = kPi * e2 * (o.zsum[ne] + o.z[ne]);
    mre.add(tail_m.real());
    mim.add(tail_m.imag());
    // crescents: disc n+1 relative to disc n, distance d_n
    for (std::size_t n = ne; n + 1 < o.z.size(); ++n) {
        double u = std::min(o.d[n] / (2.0 * eps), 1.0);
        double g = crescent_g(u);
        double ac = 2.0 * e2 * g;
        area.add(ac);
        cplx am = ac * o.z[n + 1] + e2 * (o.z[n] - o.z[n + 1]) * crescent_b(u);
        mre.add(am.real());
        mim.add(am.imag());
    }
    res.area = area.sum;
    res.complex_measure = cplx(mre.sum, mim.sum);

    if (tail == TailPolicy::extend) {
        static thread_local const OrbitSample* cached_orbit = nullptr;
        static thread_local std::size_t cached_size = 0;
        static thread_local cplx cached_last{};
        static thread_local TailModel cached_model;
        if (cached_orbit != &o || cached_size != o.z.size() || cached_last != o.z.back()) {
            cached_model = fit_tail_model(o);
            cached_orbit = &o;
            cached_size = o.z.size();
            cached_last = o.z.back();
        }
        TailRemainder rem = tail_remainder(o, eps, cached_model);
        res.area += rem.area;
        res.complex_measure += rem.measure;
        res.trunc_bound = rem.bound;
    }

    cplx t = res.complex_measure;
    double tm = std::abs(t);
    if (tm > 0.0) res.directed_area = res.area * t / tm;
    return res;
}

double area_eps(const OrbitSample& o, double eps, TailPolicy tail) {
    return measures_eps(o, eps, tail).area;
}

cplx complex_measure_eps(const OrbitSample& o, double eps, TailPolicy tail) {
    return measures_eps(o, eps, tail).complex_measure;
}

cplx directed_area_eps(const OrbitSample& o, double eps, TailPolicy tail) {
    MeasureResult r = measures_eps(o, eps, tail);
    if (std::abs(r.complex_measure) == 0.0)
        throw std::domain_error("directed_area_eps: center of mass at the origin");
    return r.directed_area;
}

namespace {

// lens(z_n, z_j) contained in K(c, eps), with a relative slack: collinear
// orbits put the lens corners exactly on the boundary circle
bool lens_in_disc(cplx zn, cplx zj, cplx c, double eps) {
    double slack = eps * (1.0 + 1e-9);
    double delta = std::abs(zn - zj);
    if (delta >= 2.0 * eps) return true;  // empty lens
    cplx mid = 0.5 * (zn + zj);
    double half_h = std::sqrt(std::max(0.0, eps * eps - 0.25 * delta * delta));
    if (std::abs(mid - c) + half_h <= slack) return true;  // cheap sufficient bound
    // corners
    cplx axis = (zj - zn) / std::max(delta, 1e-300);
    cplx normal = axis * cplx(0.0, 1.0);
    cplx p1 = mid + half_h * normal, p2 = mid - half_h * normal;
    if (std::abs(p1 - c) > slack || std::abs(p2 - c) > slack) return false;
    // farthest point of each bounding circle from c, when it lies on the lens
    for (cplx center : {zn, zj}) {
        cplx other = (center == zn) ? zj : zn;
        double dc = std::abs(center - c);
        if (dc == 0.0) continue;
        cplx q = center + eps * (center - c) / dc;
        if (std::abs(q - other) <= eps && std::abs(q - c) > slack) return false;
    }
    return true;
}

}  // namespace

bool admissibility_check(const OrbitSample& o, double eps) {
    if (o.z.size() <= 2) return true;
    std::size_t ne;
    try {
        ne = critical_index(o, eps);
    } catch (const std::exception&) {
        return false;
    }
    // distances must decrease beyond the critical index
    for (std::size_t n = std::max(ne, o.n0); n + 1 < o.d.size(); ++n)
        if (!(o.d[n + 1] < o.d[n])) return false;
    if (ne < o.n0) return false;

    // step-direction turns stay small past n_eps (certifies the deep nucleus)
    double max_turn = 0.0;
    for (std::size_t n = ne; n + 2 < o.z.size(); ++n) {
        cplx s1 = o.z[n + 1] - o.z[n], s2 = o.z[n + 2] - o.z[n + 1];
        max_turn = std::max(max_turn, std::abs(wrap_angle(std::arg(s2) - std::arg(s1))));
    }
    if (max_turn > kPi / 3.0) return false;

    // exact pairwise containment on the early nucleus, accelerated by the
    // monotone-modulus structure
    std::size_t hi = std::min(o.z.size(), ne + 2000);
    for (std::size_t n = ne + 2; n < hi; ++n) {
        double zn_mod = std::abs(o.z[n]);
        for (std::size_t j = n - 1; j-- > 0;) {
            if (std::abs(o.z[j]) > zn_mod + 2.0 * eps) {
                if (j >= o.n0) break;  // moduli only ordered past the monotone index
                continue;
            }
            if (std::abs(o.z[n] - o.z[j]) >= 2.0 * eps) continue;
            if (!lens_in_disc(o.z[n], o.z[j], o.z[n - 1], eps)) return false;
        }
    }
    return true;
}

double valid_eps_min(const OrbitSample& o) { return 5.0 * o.last_distance(); }

double valid_eps_max(const OrbitSample& o) {
    return o.d.empty() ? 0.0 : o.d[o.n0] / 4.0;
}

namespace {

std::vector<double> make_grid(const OrbitSample& o, const SweepSpec& spec) {
    if (!(spec.eps_min > 0.0) || !(spec.eps_max >= spec.eps_min))
        throw std::invalid_argument("sweep: bad eps range");
    if (spec.eps_max == spec.eps_min) return {spec.eps_min};  // singleton grid
    if (spec.eps_min < valid_eps_min(o) * (1.0 - 1e-12))
        throw std::runtime_error("sweep: eps_min below the valid window (extend the orbit)");
    if (spec.eps_max > valid_eps_max(o) * (1.0 + 1e-12))
        throw std::runtime_error("sweep: eps_max above the valid window");
    double decades = std::log10(spec.eps_max / spec.eps_min);
    int npts = std::max(2, static_cast<int>(std::round(decades * spec.points_per_decade)) + 1);
    std::vector<double> grid(static_cast<size_t>(npts));
    for (int i = 0; i < npts; ++i) {
        double t = static_cast<double>(i) / (npts - 1);
        double eps = spec.eps_max * std::pow(spec.eps_min / spec.eps_max, t);
        if (spec.pin_to_half_distances) {
            // snap to the nearest half distance within the monotone range
            auto it = std::lower_bound(o.d.begin() + static_cast<std::ptrdiff_t>(o.n0), o.d.end(),
                                       2.0 * eps, std::greater<double>());
            if (it == o.d.end()) --it;
            if (it != o.d.begin() + static_cast<std::ptrdiff_t>(o.n0) &&
                std::abs(*(it - 1) - 2.0 * eps) < std::abs(*it - 2.0 * eps))
                --it;
            eps = 0.5 * (*it) * (1.0 + 1e-9);
        } else {
            // keep grid points off the exact half distances
            auto it = std::lower_bound(o.d.rbegin(), o.d.rend(), 2.0 * eps);
            if (it != o.d.rend() && std::abs(*it - 2.0 * eps) < 1e-9 * (*it)) eps *= 1.0 + 1e-9;
        }
        grid[static_cast<size_t>(i)] = eps;
    }
    if (spec.pin_to_half_distances) {
        std::sort(grid.begin(), grid.end(), std::greater<double>());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        grid.erase(std::remove_if(grid.begin(), grid.end(),
                                  [&](double e) {
                                      return e < spec.eps_min * 0.99 || e > spec.eps_max * 1.01;
                                  }),
                   grid.end());
        if (grid.size() < 8) throw std::runtime_error("sweep: pinned grid too small");
    }
    return grid;
}

template <bool Parallel>
EpsSweep run_sweep(const OrbitSample& o, const SweepSpec& spec) {
    std::vector<double> grid = make_grid(o, spec);
    EpsSweep s;
    bool lengths = spec.lengths;
    s.kind = lengths ? Germ::Kind::real_line : Germ::Kind::complex_plane;
    s.rows.resize(grid.size());
    if (!lengths && !admissibility_check(o, grid.front()))
        throw std::runtime_error("sweep: admissibility check failed");
    std::size_t bad = 0, failed = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(+ : bad, failed) if (Parallel)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(grid.size()); ++i) {
        auto& row = s.rows[static_cast<size_t>(i)];
        row.eps = grid[static_cast<size_t>(i)];
        try {
            if (lengths) {
                row.length = length_eps(o, row.eps, spec.tail);
                row.n_eps = critical_index(o, row.eps);
            } else {
                MeasureResult m = measures_eps(o, row.eps, spec.tail, false);
                row.n_eps = m.n_eps;
                row.area = m.area;
                row.cm = m.complex_measure;
                row.da = m.directed_area;
                row.trunc_bound = m.trunc_bound;
                if (spec.tail == TailPolicy::extend && m.trunc_bound > 1e-4 * m.area) bad += 1;
            }
        } catch (const std::exception&) {
            failed += 1;
        }
    }
    if (failed > 0) throw std::runtime_error("sweep: per-eps evaluation failed inside the grid");
    if (bad > 0)
        throw std::runtime_error("sweep: truncation bound above 1e-4 of the value (extend the orbit)");
    return s;
}

}  // namespace

EpsSweep sweep(const OrbitSample& o, const SweepSpec& spec) { return run_sweep<true>(o, spec); }

EpsSweep sweep_serial(const OrbitSample& o, const SweepSpec& spec) {
    return run_sweep<false>(o, spec);
}

SweepSpec auto_sweep_spec(const OrbitSample& o, double decades, int points_per_decade,
                          bool lengths) {
    SweepSpec spec;
    spec.points_per_decade = points_per_decade;
    spec.lengths = lengths;
    double hi = 0.9 * valid_eps_max(o);
    double lo_floor = valid_eps_min(o) * 1.05;
    if (!(hi > lo_floor)) throw std::runtime_error("auto_sweep_spec: empty valid window");
    if (lengths) {
        spec.eps_max = hi;
        spec.eps_min = std::max(lo_floor, hi / std::pow(10.0, decades));
        return spec;
    }
    // lowest eps with truncation estimate below 1e-4 of the value
    {
        MeasureResult top = measures_eps(o, hi, TailPolicy::extend, false);
        if (top.trunc_bound > 0.8e-4 * top.area)
            throw std::runtime_error("auto_sweep_spec: truncation too large even at eps_max");
    }
    double lo = lo_floor, good = hi;
    for (int it = 0; it < 40; ++it) {
        double mid = std::sqrt(lo * good);
        MeasureResult m = measures_eps(o, mid, TailPolicy::extend, false);
        if (m.trunc_bound <= 0.8e-4 * m.area)
            good = mid;
        else
            lo = mid;
        if (good / lo < 1.02) break;
    }
    spec.eps_min = good;
    spec.eps_max = good * std::pow(10.0, decades);
    if (spec.eps_max > hi)
        throw std::runtime_error("auto_sweep_spec: window too narrow, extend the orbit");
    return spec;
}

void write_sweep_csv(std::ostream& os, const EpsSweep& s) {
    os.precision(17);
    if (s.kind == Germ::Kind::real_line) {
        os << "eps,n_eps,length\n";
        for (const auto& r : s.rows) os << r.eps << ',' << r.n_eps << ',' << r.length << '\n';
        return;
    }
    os << "eps,n_eps,area,cm_re,cm_im,da_re,da_im,trunc_bound\n";
    for (const auto& r : s.rows) {
        os << r.eps << ',' << r.n_eps << ',' << r.area << ',' << r.cm.real() << ',' << r.cm.imag()
           << ',' << r.da.real() << ',' << r.da.imag() << ',' << r.trunc_bound << '\n';
    }
}

EpsSweep read_sweep_csv(std::istream& is) {
    EpsSweep s;
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("read_sweep_csv: empty input");
    bool lengths = line.rfind("eps,n_eps,length", 0) == 0;
    s.kind = lengths ? Germ::Kind::real_line : Germ::Kind::complex_plane;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string item;
        std::vector<double> v;
        while (std::getline(ss, item, ',')) v.push_back(std::strtod(item.c_str(), nullptr));
        EpsSweep::Row r;
        if (lengths) {
            if (v.size() != 3) throw std::invalid_argument("read_sweep_csv: bad row");
            r.eps = v[0];
            r.n_eps = static_cast<std::size_t>(v[1]);
            r.length = v[2];
        } else {
            if (v.size() != 8) throw std::invalid_argument("read_sweep_csv: bad row");
            r.eps = v[0];
            r.n_eps = static_cast<std::size_t>(v[1]);
            r.area = v[2];
            r.cm = cplx(v[3], v[4]);
            r.da = cplx(v[5], v[6]);
            r.trunc_bound = v[7];
        }
        s.rows.push_back(r);
    }
    return s;
}

SingularityReport singularity_scan(const OrbitSample& o, std::size_t n_lo, std::size_t n_hi) {
    SingularityReport rep;
    auto measure = [&](double eps) {
        return measures_eps(o, eps, TailPolicy::finite_set, false).complex_measure;
    };
    // One-sided second differences at step h and h/4. The smooth background
    // is h-stable while the (eps - eps_n)^{-1/2} right-side blowup grows by
    // a factor 2, so the refinement growth isolates the singular part.
    auto second_diff = [&](double eps, double h, int side) {
        double s = side;
        cplx m0 = measure(eps), m1 = measure(eps + s * h), m2 = measure(eps + 2.0 * s * h);
        return (m2 - 2.0 * m1 + m0) / (h * h);
    };
    for (std::size_t n = n_lo; n <= n_hi && n < o.d.size(); ++n) {
        SingularityReport::Point pt;
        pt.n = n;
        pt.eps_n = o.d[n] / 2.0;
        double h = 1e-4 * pt.eps_n;
        cplx r_h = second_diff(pt.eps_n, h, +1), r_h4 = second_diff(pt.eps_n, h / 4.0, +1);
        cplx l_h = second_diff(pt.eps_n, h, -1), l_h4 = second_diff(pt.eps_n, h / 4.0, -1);
        pt.right2 = std::abs(r_h4);
        pt.left2 = std::abs(l_h4);
        pt.blowup_factor = std::abs(r_h4 - r_h) / std::max(std::abs(l_h4 - l_h), 1e-300);
        cplx m0 = measure(pt.eps_n);
        cplx dr = (measure(pt.eps_n + h) - m0) / h, dl = (m0 - measure(pt.eps_n - h)) / h;
        pt.d1_mismatch = std::abs(dr - dl) / std::max(std::abs(dl), 1e-300);
        if (n + 1 < o.d.size()) {
            double mid = 0.5 * (o.d[n] + o.d[n + 1]) / 2.0;
            double hh = 1e-4 * mid;
            cplx c_h = second_diff(mid, hh, +1), c_h4 = second_diff(mid, hh / 4.0, +1);
            pt.interior2 = std::abs(c_h4 - c_h);  // refinement-stable when smooth
        }
        rep.points.push_back(pt);
    }
    return rep;
}

}  // namespace orbitlens
