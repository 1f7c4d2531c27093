#include "orbitlens/asymptotic_fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "orbitlens/special_functions.hpp"

namespace orbitlens {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const cplx kTwoPiI(0.0, 2.0 * kPi);

cplx column_value(const EpsSweep::Row& r, SweepColumn col) {
    switch (col) {
        case SweepColumn::area: return r.area;
        case SweepColumn::complex_measure: return r.cm;
        case SweepColumn::directed_area: return r.da;
        case SweepColumn::length: return r.length;
    }
    return {};
}

double term_eval(const TermSpec& t, double eps) {
    double v = std::pow(eps, t.exponent);
    return t.with_log ? v * std::log(eps) : v;
}

// modified Gram-Schmidt least squares for a small complex system
std::vector<cplx> solve_ls(std::vector<std::vector<cplx>> cols, std::vector<cplx> y,
                           FitDiagnostics* diag) {
    size_t m = cols.size(), rows = y.size();
    std::vector<std::vector<cplx>> q = cols;
    std::vector<std::vector<cplx>> r(m, std::vector<cplx>(m));
    double rmax = 0.0, rmin = 1e300;
    for (size_t j = 0; j < m; ++j) {
        for (size_t i = 0; i < j; ++i) {
            cplx dot = 0.0;
            for (size_t t = 0; t < rows; ++t) dot += std::conj(q[i][t]) * q[j][t];
            r[i][j] = dot;
            for (size_t t = 0; t < rows; ++t) q[j][t] -= dot * q[i][t];
        }
        double nrm = 0.0;
        for (size_t t = 0; t < rows; ++t) nrm += std::norm(q[j][t]);
        nrm = std::sqrt(nrm);
        r[j][j] = nrm;
        rmax = std::max(rmax, nrm);
        rmin = std::min(rmin, nrm);
        if (nrm == 0.0) throw std::runtime_error("fit: rank-deficient basis");
        for (size_t t = 0; t < rows; ++t) q[j][t] /= nrm;
    }
    std::vector<cplx> qty(m);
    for (size_t j = 0; j < m; ++j) {
        cplx dot = 0.0;
        for (size_t t = 0; t < rows; ++t) dot += std::conj(q[j][t]) * y[t];
        qty[j] = dot;
    }
    std::vector<cplx> x(m);
    for (size_t j = m; j-- > 0;) {
        cplx acc = qty[j];
        for (size_t l = j + 1; l < m; ++l) acc -= r[j][l] * x[l];
        x[j] = acc / r[j][j];
    }
    if (diag) {
        diag->condition = rmax / rmin;
        double res = 0.0, sig = 0.0;
        for (size_t t = 0; t < rows; ++t) {
            cplx fit = 0.0;
            for (size_t j = 0; j < m; ++j) fit += cols[j][t] * x[j];
            res += std::norm(y[t] - fit);
            sig += std::norm(y[t]);
        }
        diag->residual_rel = sig > 0 ? std::sqrt(res / sig) : 0.0;
        diag->low_confidence = diag->condition > 1e6;
    }
    return x;
}

std::vector<const EpsSweep::Row*> fit_window(const EpsSweep& sweep, double decades) {
    if (sweep.rows.empty()) throw std::invalid_argument("fit: empty sweep");
    double lo = sweep.rows.back().eps;  // rows stored with decreasing eps
    double hi = lo * std::pow(10.0, decades);
    std::vector<const EpsSweep::Row*> w;
    for (const auto& r : sweep.rows)
        if (r.eps <= hi * (1.0 + 1e-12)) w.push_back(&r);
    if (w.size() < 8) throw std::invalid_argument("fit: window too small");
    return w;
}

}  // namespace

std::vector<cplx> fit_terms(const EpsSweep& sweep, SweepColumn col,
                            const std::vector<TermSpec>& known,
                            const std::vector<TermSpec>& basis, double window_decades,
                            FitDiagnostics* diag) {
    auto w = fit_window(sweep, window_decades);
    size_t rows = w.size(), m = basis.size();
    // weight rows by 1/|value| so every decade contributes equally
    std::vector<cplx> y(rows);
    std::vector<double> wt(rows);
    for (size_t t = 0; t < rows; ++t) {
        cplx v = column_value(*w[t], col);
        for (const auto& kt : known) v -= kt.coeff * term_eval(kt, w[t]->eps);
        double scale = std::abs(column_value(*w[t], col));
        wt[t] = scale > 0 ? 1.0 / scale : 1.0;
        y[t] = v * wt[t];
    }
    std::vector<std::vector<cplx>> cols(m, std::vector<cplx>(rows));
    for (size_t j = 0; j < m; ++j)
        for (size_t t = 0; t < rows; ++t)
            cols[j][t] = term_eval(basis[j], w[t]->eps) * wt[t];
    return solve_ls(std::move(cols), std::move(y), diag);
}

double fit_box_dimension(const EpsSweep& sweep, FitDiagnostics* diag) {
    bool lengths = sweep.kind == Germ::Kind::real_line;
    double ambient = lengths ? 1.0 : 2.0;
    auto w = fit_window(sweep, 4.0);

    // local slopes on half-decade windows, from the top of the window down
    struct P { double x, s; };
    std::vector<P> locals;
    size_t i = 0;
    while (i < w.size()) {
        size_t j = i;
        double hi = w[i]->eps;
        double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0, xc = 0;
        while (j < w.size() && w[j]->eps > hi / std::sqrt(10.0)) {
            double x = std::log(w[j]->eps);
            double yv = std::log(std::abs(column_value(*w[j], lengths ? SweepColumn::length
                                                                      : SweepColumn::area)));
            sx += x; sy += yv; sxx += x * x; sxy += x * yv; n += 1; xc += 1.0 / x;
            ++j;
        }
        if (n >= 4) {
            double det = n * sxx - sx * sx;
            locals.push_back({xc / n, (n * sxy - sx * sy) / det});
        }
        i = j;
    }
    if (locals.size() < 2) throw std::invalid_argument("fit_box_dimension: too few grid points");

    // drift of the local slopes toward small eps: power-type corrections give
    // geometrically decaying increments (extrapolate the geometric sum),
    // log-type corrections decay like 1/log eps (Richardson against it)
    double slope_inf = locals.back().s;
    std::size_t m = locals.size();
    if (m >= 4) {
        double d1 = locals[m - 1].s - locals[m - 2].s;
        double d2 = locals[m - 2].s - locals[m - 3].s;
        double d3 = locals[m - 3].s - locals[m - 4].s;
        double q1 = d2 != 0.0 ? d1 / d2 : 0.0;
        double q2 = d3 != 0.0 ? d2 / d3 : 0.0;
        bool clean_decay = d1 * d2 > 0.0 && d2 * d3 > 0.0 && q1 > 0.05 && q1 < 0.9 &&
                           q2 > 0.05 && q2 < 0.95;
        if (clean_decay) {
            slope_inf = locals[m - 1].s + d1 * q1 / (1.0 - q1);
        } else {
            double xmin = 1e300, xmax = -1e300, xbar = 0;
            for (const auto& p : locals) {
                xmin = std::min(xmin, p.x);
                xmax = std::max(xmax, p.x);
                xbar += p.x / static_cast<double>(m);
            }
            if ((xmax - xmin) / std::abs(xbar) >= 0.5) {
                // wide enough in 1/log eps to extrapolate the log-type drift
                double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
                for (const auto& p : locals) {
                    sx += p.x; sy += p.s; sxx += p.x * p.x; sxy += p.x * p.s; n += 1;
                }
                double det = n * sxx - sx * sx;
                if (det != 0) slope_inf = (sy - (n * sxy - sx * sy) / det * sx) / n;
            } else {
                // staircase noise dominates; average the deepest locals
                double acc = 0;
                std::size_t cnt = std::min<std::size_t>(4, m);
                for (std::size_t t = m - cnt; t < m; ++t) acc += locals[t].s;
                slope_inf = acc / static_cast<double>(cnt);
            }
        }
    }
    if (diag) {
        double drift = std::abs(locals.back().s - locals[locals.size() - 2].s);
        diag->low_confidence = drift > 0.05;
        diag->residual_rel = drift;
    }
    return ambient - slope_inf;
}

namespace {

std::vector<TermSpec> content_basis(double p, double dx) {
    return {{p, false, 0.0},
            {p + dx, false, 0.0},
            {p + dx, true, 0.0},
            {p + 2.0 * dx, false, 0.0},
            {p + 2.0 * dx, true, 0.0}};
}

}  // namespace

double fit_minkowski_content(const EpsSweep& sweep, double d, FitDiagnostics* diag) {
    int k = std::max(1, static_cast<int>(std::lround(d / (1.0 - d))));
    // snap the exponent to the lattice when d is close to k/(k+1); the raw
    // fitted dimension would tilt the lead basis function across the window
    double ds = static_cast<double>(k) / (k + 1);
    double p = 2.0 - (std::abs(d - ds) < 0.02 ? ds : d);
    auto c = fit_terms(sweep, SweepColumn::area, {}, content_basis(p, 1.0 / (k + 1)), 2.5, diag);
    return c[0].real();
}

cplx fit_directed_content(const EpsSweep& sweep, int k, FitDiagnostics* diag) {
    double p = 1.0 + 1.0 / (k + 1);
    auto c = fit_terms(sweep, SweepColumn::directed_area, {}, content_basis(p, 1.0 / (k + 1)),
                       2.5, diag);
    return c[0];
}

cplx fit_log_coefficient(const EpsSweep& sweep, SweepColumn col, double e,
                         const std::vector<TermSpec>& known, FitDiagnostics* diag) {
    // the documented 2x2 system in {eps^e log eps, eps^e} is augmented with
    // the next half-step of the ladder, which otherwise leaks into the log
    // coefficient over any finite window
    std::vector<TermSpec> basis = {{e, true, 0.0},
                                   {e, false, 0.0},
                                   {e + 0.5, true, 0.0},
                                   {e + 0.5, false, 0.0},
                                   {e + 1.0, true, 0.0}};
    auto c = fit_terms(sweep, col, known, basis, 20.0, diag);
    return c[0];
}

cplx fit_residual_content(const EpsSweep& sweep, int k, const std::vector<TermSpec>& known,
                          FitDiagnostics* diag) {
    if (k <= 1) throw std::invalid_argument("fit_residual_content: needs k > 1");
    auto covered = [&](double e, bool lg) {
        for (const auto& t : known)
            if (!t.with_log == !lg && std::abs(t.exponent - e) < 1e-12) return true;
        return false;
    };
    std::vector<TermSpec> basis;
    auto push = [&](double e, bool lg) {
        if (!covered(e, lg)) basis.push_back({e, lg, 0.0});
    };
    for (int j = 1; j < k; ++j) push(1.0 + static_cast<double>(j) / (k + 1), false);
    push(1.0 + static_cast<double>(k) / (k + 1), true);
    push(1.0 + static_cast<double>(k) / (k + 1), false);  // the H term
    basis.push_back({2.0, true, 0.0});
    push(2.0, false);
    auto c = fit_terms(sweep, SweepColumn::directed_area, known, basis, 1.8, diag);
    for (size_t j = 0; j < basis.size(); ++j)
        if (basis[j].with_log && std::abs(basis[j].exponent - 2.0) < 1e-12) return c[j];
    throw std::logic_error("fit_residual_content: missing target basis term");
}

cplx fit_principal_part(const EpsSweep& sweep, int k, const std::vector<TermSpec>& known,
                        FitDiagnostics* diag) {
    auto covered = [&](double e, bool lg) {
        for (const auto& t : known)
            if (!t.with_log == !lg && std::abs(t.exponent - e) < 1e-12) return true;
        return false;
    };
    std::vector<TermSpec> basis;
    auto push = [&](double e, bool lg) {
        if (!covered(e, lg)) basis.push_back({e, lg, 0.0});
    };
    if (k == 1) {
        push(2.0, true);
        basis.push_back({2.0, false, 0.0});
        push(2.5, true);
        push(2.5, false);
    } else {
        for (int j = 2; j <= k; ++j) push(1.0 + static_cast<double>(j) / (k + 1), false);
        push(2.0, true);
        basis.push_back({2.0, false, 0.0});
        push(2.0 + 1.0 / (k + 1), true);
    }
    auto c = fit_terms(sweep, SweepColumn::complex_measure, known, basis, 1.8, diag);
    for (size_t j = 0; j < basis.size(); ++j)
        if (!basis[j].with_log && std::abs(basis[j].exponent - 2.0) < 1e-12) return c[j];
    throw std::logic_error("fit_principal_part: missing target basis term");
}

double k1_magnitude(int k, double a1_abs) {
    double kk = k;
    double g1 = gamma_fn(1.0 + 1.0 / (2 * kk + 2));
    double g2 = gamma_fn(1.5 + 1.0 / (2 * kk + 2));
    return (kk + 1.0) / kk * std::sqrt(kPi) * g1 / g2 * std::pow(2.0 / a1_abs, 1.0 / (kk + 1.0));
}

double a1_abs_from_content(int k, double content) {
    return 2.0 * std::pow(k1_magnitude(k, 2.0) / content, k + 1);
}

double kk1_im_channel(int k, double a1_abs) {
    double kk = k;
    double num = gamma_fn(0.5 + 1.0 / (2 * kk + 2)) / gamma_fn(2.0 + 1.0 / (2 * kk + 2)) -
                 std::sqrt(kPi);
    double den = gamma_fn(1.0 / (kk + 1.0)) / gamma_fn(1.5 + 1.0 / (kk + 1.0)) + std::sqrt(kPi);
    return 2.0 * (kk - 1.0) / (kk + 1.0) * std::pow(a1_abs / 2.0, 1.0 / (kk + 1.0)) * num / den;
}

cplx kk1_from_lambda(int k, cplx a1, cplx lambda, cplx nu_a) {
    cplx w = lambda / kTwoPiI;
    double re = w.real(), im = w.imag();
    double wim = kk1_im_channel(k, std::abs(a1));
    return nu_a * (cplx(kPi / (k + 1.0) * re, 0.0) - cplx(0.0, wim * im));
}

OracleCoefficients oracle_coefficients(const Germ& g, int direction_index) {
    OracleCoefficients oc;
    auto [nf, inv] = normalize_extended(g);
    oc.k = inv.k;
    auto dirs = attracting_directions(g);
    oc.nu_a = dirs[static_cast<size_t>(direction_index % inv.k)].nu;
    double a1m = std::abs(inv.a1);
    oc.k1 = k1_magnitude(inv.k, a1m) * oc.nu_a;

    oc.kk1_complete = true;
    for (int i = 2; i <= inv.k; ++i)
        if (std::abs(g.coeff(inv.k + i)) > 1e-13) oc.kk1_complete = false;
    if (inv.k > 1) oc.kk1 = kk1_from_lambda(inv.k, inv.a1, inv.lambda, oc.nu_a);

    if (inv.k == 1) {
        cplx a1 = inv.a1;
        cplx a2 = g.coeff(3);  // resonant coefficient, invariant for k = 1
        cplx one_m = 1.0 - a2 / (a1 * a1);
        oc.area_lead = std::sqrt(kPi / 2.0) * gamma_fn(0.25) / gamma_fn(1.75) / std::sqrt(a1m);
        oc.area_log = kPi / 2.0 * one_m.real();
        oc.cm_log = kPi / (2.0 * a1);
        double pref = -5.0 * kPi / (4.0 * std::sqrt(2.0)) +
                      std::sqrt(kPi) / (4.0 * std::sqrt(2.0)) * gamma_fn(0.75) / gamma_fn(1.25);
        oc.cm_52_log = pref * std::sqrt(a1m) / a1 * cplx(0.0, 1.0) * one_m.imag();
    }
    return oc;
}

cplx lambda_from_orbit(const Germ& g, int direction_index, double* err_est) {
    using cld = std::complex<long double>;
    auto [nf, inv] = normalize_extended(g);
    int k = inv.k;
    auto dirs = attracting_directions(nf);
    cplx a = dirs[static_cast<size_t>(direction_index % k)].a_full;
    cplx z0 = 0.1 * a / std::abs(a);

    const std::pair<double, int> schedule[] = {{-1.0, 3}, {-2.0, 2}};
    const std::size_t npts = std::size_t{1} << 22;
    std::vector<std::size_t> nodes;
    for (std::size_t n = 1024; n <= npts; n *= 2) nodes.push_back(n);

    std::vector<cld> coef(static_cast<size_t>(nf.truncation_order()));
    for (int i = 1; i <= nf.truncation_order(); ++i)
        coef[static_cast<size_t>(i - 1)] = cld(nf.coeff(i).real(), nf.coeff(i).imag());
    cld a_ld(a.real(), a.imag());
    std::vector<cld> s(nodes.size());
    cld w(z0.real(), z0.imag());
    std::size_t ni = 0;
    for (std::size_t n = 0; n <= nodes.back() && ni < nodes.size(); ++n) {
        if (n == nodes[ni]) {
            s[ni] = std::pow(w / a_ld, static_cast<long double>(-k)) - static_cast<long double>(n);
            ++ni;
        }
        cld acc = 0.0L;
        for (int i = nf.truncation_order(); i >= 2; --i) acc = (acc + coef[static_cast<size_t>(i - 1)]) * w;
        w += acc * w + (coef[0] - 1.0L) * w;
    }
    std::vector<cld> x(s.size() - 1);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) x[i] = s[i + 1] - s[i];
    for (const auto& [e, passes] : schedule) {
        for (int p = 0; p < passes && x.size() >= 2; ++p) {
            long double f = std::pow(2.0L, static_cast<long double>(e));
            std::vector<cld> y(x.size() - 1);
            for (std::size_t i = 0; i + 1 < x.size(); ++i) y[i] = (x[i + 1] - f * x[i]) / (1.0L - f);
            x = std::move(y);
        }
    }
    const long double ln2 = std::log(2.0L);
    if (err_est)
        *err_est = x.size() >= 2
                       ? static_cast<double>(std::abs(x.back() - x[x.size() - 2]) / ln2) * 2.0 * kPi * k
                       : 1.0;
    cld top = x.back() / ln2;
    return kTwoPiI * static_cast<double>(k) *
           cplx(static_cast<double>(top.real()), static_cast<double>(top.imag()));
}

FractalReport fractal_report(const EpsSweep& sweep, const Germ* known_germ,
                             int direction_index) {
    FractalReport rep;
    rep.dim_b = fit_box_dimension(sweep, &rep.diagnostics);
    double kreal = rep.dim_b / (1.0 - rep.dim_b);
    rep.k = static_cast<int>(std::lround(kreal));
    if (rep.k < 1 || std::abs(kreal - rep.k) > 0.15) {
        rep.k = 0;  // classification aborted upstream
        return rep;
    }
    rep.minkowski_content = fit_minkowski_content(sweep, rep.dim_b);
    rep.directed_content = fit_directed_content(sweep, rep.k);

    std::optional<OracleCoefficients> oc;
    if (known_germ) oc = oracle_coefficients(*known_germ, direction_index);

    double p1 = 1.0 + 1.0 / (rep.k + 1);
    if (rep.k > 1) {
        if (known_germ) {
            // lambda from the orbit's Fatou variable (well posed), mapped to
            // the eps^2 log eps coefficient of the directed area
            cplx lam = lambda_from_orbit(*known_germ, direction_index);
            cplx nu = rep.directed_content / std::abs(rep.directed_content);
            double a1_abs = a1_abs_from_content(rep.k, rep.minkowski_content);
            rep.residual_content = kk1_from_lambda(rep.k, a1_abs, lam, nu);
            rep.have_residual = true;
        } else {
            // sweep-only mode: direct ladder fit, documented lower accuracy
            std::vector<TermSpec> known = {{p1, false, rep.directed_content}};
            FitDiagnostics d2;
            rep.residual_content = fit_residual_content(sweep, rep.k, known, &d2);
            rep.have_residual = true;
            rep.diagnostics.condition = std::max(rep.diagnostics.condition, d2.condition);
            rep.diagnostics.low_confidence = true;
        }
        FitDiagnostics d3;
        std::vector<TermSpec> kn3;
        rep.principal_part = fit_principal_part(sweep, rep.k, kn3, &d3);
        rep.have_principal = true;
    } else {
        // k = 1: coefficients read off the area and the complex measure
        FitDiagnostics d2;
        std::vector<TermSpec> ka = {{1.5, false, oc ? cplx(oc->area_lead, 0.0)
                                                    : cplx(rep.minkowski_content, 0.0)}};
        rep.area_log_coeff = fit_log_coefficient(sweep, SweepColumn::area, 2.0, ka, &d2).real();
        FitDiagnostics d3;
        rep.cm_log_coeff = fit_log_coefficient(sweep, SweepColumn::complex_measure, 2.0, {}, &d3);
        std::vector<TermSpec> kcm = {{2.0, true, oc ? oc->cm_log : rep.cm_log_coeff}};
        FitDiagnostics d4;
        rep.principal_part = fit_principal_part(sweep, 1, kcm, &d4);
        rep.have_principal = true;
        std::vector<TermSpec> kcm2 = kcm;
        kcm2.push_back({2.0, false, rep.principal_part});
        FitDiagnostics d5;
        std::vector<TermSpec> b52 = {{2.5, true, 0.0}, {2.5, false, 0.0}};
        auto c52 = fit_terms(sweep, SweepColumn::complex_measure, kcm2, b52, 1.2, &d5);
        rep.cm_52_log_coeff = c52[0];
    }
    return rep;
}

}  // namespace orbitlens
