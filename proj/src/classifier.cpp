#include "orbitlens/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "orbitlens/special_functions.hpp"

namespace orbitlens {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
const cplx kTwoPiI(0.0, 2.0 * kPi);
}  // namespace

int multiplicity_from_dimension(double d) {
    if (!(d >= 0.0 && d < 1.0)) throw std::domain_error("multiplicity_from_dimension: d outside [0,1)");
    double mu_real = 1.0 / (1.0 - d);
    int mu = static_cast<int>(std::lround(mu_real));
    if (mu < 1 || std::abs(mu_real - mu) > 0.15)
        throw std::runtime_error("multiplicity_from_dimension: no integer within tolerance 0.15");
    return mu;
}

HyperbolicSubcase hyperbolic_subcase(const EpsSweep& sweep) {
    if (sweep.kind != Germ::Kind::real_line)
        throw std::invalid_argument("hyperbolic_subcase: needs a real-length sweep");
    // ratio spreads against the two gauges over the full window
    double lo1 = 1e300, hi1 = 0.0, lo2 = 1e300, hi2 = 0.0;
    for (const auto& r : sweep.rows) {
        double el = -std::log(r.eps);
        double g1 = r.eps * el;             // strict gauge
        double g2 = r.eps * std::log(el);   // degenerate gauge
        double q1 = r.length / g1, q2 = r.length / g2;
        lo1 = std::min(lo1, q1); hi1 = std::max(hi1, q1);
        lo2 = std::min(lo2, q2); hi2 = std::max(hi2, q2);
    }
    double s1 = hi1 / lo1, s2 = hi2 / lo2;
    if (s1 < 0.6 * s2 && s1 < 3.0) return HyperbolicSubcase::strict;
    if (s2 < 0.6 * s1 && s2 < 3.0) return HyperbolicSubcase::degenerate;
    return HyperbolicSubcase::inconclusive;
}

OrderReading multiplicity_from_order(const CriticalOrderResult& order,
                                     const ChebyshevScale& scale) {
    OrderReading r;
    if (order.beyond_truncation) {
        r.inapplicable = true;
        r.note = "critical Minkowski order beyond the scale truncation (method inapplicable)";
        return r;
    }
    const ScaleMonomial& m = scale.u[static_cast<size_t>(order.order)];
    r.gauge = m.str();
    r.note = "upper bound; equality under the regularity condition";
    if (scale.name == "saddle_loop") {
        // order 2k <=> f ~ s^k, cyclicity <= 2k; order 2k-1 <=> f ~ s^k(-log s)
        r.cyclicity_bound = order.order;
        r.multiplicity_bound = static_cast<int>(m.alpha);
    } else if (scale.name == "power") {
        r.multiplicity_bound = order.order;
    } else {
        r.multiplicity_bound = order.order;
    }
    return r;
}

double phi(int k) {
    if (k < 2) throw std::domain_error("phi: defined for k >= 2 (k = 1 uses the boundary route)");
    double kk = k;
    double d1 = gamma_fn(1.0 / (kk + 1.0)) / gamma_fn(1.5 + 1.0 / (kk + 1.0)) + std::sqrt(kPi);
    double n1 = gamma_fn(0.5 + 1.0 / (2 * kk + 2)) / gamma_fn(2.0 + 1.0 / (2 * kk + 2)) -
                std::sqrt(kPi);
    double p = gamma_fn(1.0 + 1.0 / (2 * kk + 2)) / gamma_fn(1.5 + 1.0 / (2 * kk + 2));
    return kk * (kk + 1.0) / (kk - 1.0) / std::sqrt(kPi) * d1 / n1 * p;
}

FormalInvariants parabolic_invariants(const FractalReport& report) {
    int k = report.k;
    if (k <= 1) throw std::domain_error("parabolic_invariants: needs k >= 2 (use k1_invariants)");
    if (!report.have_residual)
        throw std::invalid_argument("parabolic_invariants: report lacks the residual content");

    cplx nu = report.directed_content / std::abs(report.directed_content);
    cplx w = report.residual_content / nu;
    // channel weights of K_{k+1}/nu_A: Re = (pi/(k+1)) Re(lambda/2 pi i),
    // Im = -W Im(lambda/2 pi i)
    double a1_abs = a1_abs_from_content(k, report.minkowski_content);
    double wim = kk1_im_channel(k, a1_abs);
    double re_lt = w.real() * (k + 1) / kPi;
    double im_lt = -w.imag() / wim;
    cplx lambda = kTwoPiI * cplx(re_lt, im_lt);

    // a1 = -nu_A^{-k} |a1|
    cplx nu_pow = std::pow(nu, -k);
    cplx a1 = -nu_pow * a1_abs;

    return {k, a1, lambda};
}

FormalInvariants k1_invariants(const FractalReport& report) {
    if (report.k != 1) throw std::domain_error("k1_invariants: report is not a k = 1 case");
    // pi/(2 a1) is the eps^2 log eps coefficient of the complex measure
    cplx a1 = kPi / (2.0 * report.cm_log_coeff);
    double a1_abs = std::abs(a1);
    double re_lt = report.area_log_coeff / (kPi / 2.0);
    // eps^{5/2} log eps coefficient of the complex measure:
    // pref * sqrt|a1| / a1 * i * Im(lambda/2 pi i)
    double pref = -5.0 * kPi / (4.0 * std::sqrt(2.0)) +
                  std::sqrt(kPi) / (4.0 * std::sqrt(2.0)) * gamma_fn(0.75) / gamma_fn(1.25);
    cplx unit = pref * std::sqrt(a1_abs) / a1 * cplx(0.0, 1.0);
    double im_lt = 0.0;
    if (std::abs(unit) > 1e-12) im_lt = (report.cm_52_log_coeff / unit).real();
    cplx lambda = kTwoPiI * cplx(re_lt, im_lt);
    return {1, a1, lambda};
}

HolonomyResult holonomy_invariants(int p, int q, const FractalReport& report) {
    HolonomyResult hr;
    hr.p = p;
    hr.q = q;
    if (std::gcd(p, q) != 1) throw std::invalid_argument("holonomy_invariants: need (p,q) = 1");
    if (report.dim_b < 0.05) {
        hr.linearizable = true;
        return hr;
    }
    double kq_real = report.dim_b / (1.0 - report.dim_b);
    int kq = static_cast<int>(std::lround(kq_real));
    if (std::abs(kq_real - kq) > 0.15 || kq % q != 0)
        throw std::runtime_error("holonomy_invariants: k q does not snap to a multiple of q");
    hr.k = kq / q;
    if (kq > 1) {
        FractalReport rep = report;
        rep.k = kq;
        hr.lambda = parabolic_invariants(rep).lambda;
    } else {
        hr.lambda = k1_invariants(report).lambda;
    }
    return hr;
}

double saddle_loop_dimension(int codim) {
    if (codim < 1) throw std::domain_error("saddle_loop_dimension: codim >= 1");
    if (codim % 2 == 0) return 2.0 - 2.0 / codim;
    return 2.0 - 2.0 / (codim + 1);
}

std::vector<int> cyclicity_set(double d) {
    if (!(d >= 1.0 && d < 2.0)) throw std::domain_error("cyclicity_set: d in [1,2)");
    double v = 2.0 / (2.0 - d);
    int hi = static_cast<int>(std::lround(v));
    return {hi - 1, hi};
}

double hyperbola_family_dimension(double s, double r) {
    if (!(s >= 0.0 && s < 1.0) || !(r > 0.0))
        throw std::domain_error("hyperbola_family_dimension: need s in [0,1), r > 0");
    return std::max(1.0 + s, 1.0 + s / (s + r * (1.0 - s)));
}

double hyperbola_box_count_dimension(double s, double r, int grid) {
    // family {x^r y = s_l^r} on (0,1]^2 with s_l = l^{-1/(alpha-1)}, alpha = 1/(1-s)
    double alpha = 1.0 / (1.0 - s);
    std::vector<uint8_t> cells(static_cast<size_t>(grid) * grid, 0);
    double h = 1.0 / grid;
    int lmax = static_cast<int>(std::pow(1.0 / h, alpha - 1.0)) + 2;
    for (int l = 1; l <= lmax; ++l) {
        double sl = std::pow(static_cast<double>(l), -1.0 / (alpha - 1.0));
        double c = std::pow(sl, r);
        // column-wise marking: y(x) = c / x^r, x from c^{1/r} (y=1) to 1
        int i0 = static_cast<int>(std::pow(c, 1.0 / r) / h);
        for (int i = std::max(0, i0 - 1); i < grid; ++i) {
            double xl = i * h, xr = (i + 1) * h;
            double yhi = c / std::pow(std::max(xl, h * 0.5), r);
            double ylo = c / std::pow(xr, r);
            if (ylo > 1.0) continue;
            yhi = std::min(yhi, 1.0);
            int j0 = std::max(0, static_cast<int>(ylo / h));
            int j1 = std::min(grid - 1, static_cast<int>(yhi / h));
            for (int j = j0; j <= j1; ++j) cells[static_cast<size_t>(j) * grid + i] = 1;
        }
    }
    // slope of log N over the finest octave (coarser octaves drift upward
    // with the slowly decaying log corrections of this family)
    std::size_t count_fine = 0;
    for (auto v : cells) count_fine += v;
    int g2 = grid / 2;
    std::vector<uint8_t> coarse(static_cast<size_t>(g2) * g2, 0);
    for (int j = 0; j < grid; ++j)
        for (int i = 0; i < grid; ++i)
            if (cells[static_cast<size_t>(j) * grid + i])
                coarse[static_cast<size_t>(j / 2) * g2 + i / 2] = 1;
    std::size_t count_coarse = 0;
    for (auto v : coarse) count_coarse += v;
    return std::log(static_cast<double>(count_fine) / count_coarse) / std::log(2.0);
}

}  // namespace orbitlens
