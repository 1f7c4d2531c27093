#include "orbitlens/abel.hpp"

#include <cmath>
#include <stdexcept>

namespace orbitlens {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const cplx kTwoPiI(0.0, 2.0 * kPi);

// Log with argument in (0, 2 pi), used on the attracting petal
cplx log_plus(cplx z) {
    double a = std::arg(z);
    if (a <= 0.0) a += 2.0 * kPi;
    return {std::log(std::abs(z)), a};
}

void require_prenormalized(const Germ& f) {
    if (!f.is_parabolic() || f.multiplicity_index() != 1)
        throw std::domain_error("abel: germ must be parabolic of multiplicity 2");
    if (std::abs(f.coeff(2) - 1.0) > 1e-12)
        throw std::domain_error("abel: germ must be prenormalized (z^2 coefficient 1)");
}

}  // namespace

AbelProblem::AbelProblem(Germ germ, Series g) : f(std::move(germ)), rhs(std::move(g)) {
    require_prenormalized(f);
    if (rhs.max_abs_coeff() == 0.0) throw std::invalid_argument("abel: zero right-hand side");
}

FormalAbelSolution formal_solution(const AbelProblem& p, int order) {
    const Series& g = p.rhs;
    int work = std::min(order + 2, p.f.truncation_order());
    Series f = p.f.as_series(work);
    FormalAbelSolution sol;
    sol.pole_coeff = g[0];

    // pole increment alpha0 (1/z - 1/f) = alpha0 (f - z)/(z f): a power series
    Series pole_inc(work);
    if (sol.pole_coeff != cplx{}) {
        Series num(work), den(work);
        for (int j = 0; j <= work - 2; ++j) num.at(j) = f[j + 2];  // (f - z)/z^2
        for (int j = 0; j <= work - 1; ++j) den.at(j) = f[j + 1];  // f/z
        pole_inc = mul(num, den.reciprocal(work), work) * sol.pole_coeff;
    }
    // log increment Log(f/z): series of log(1 + (f-z)/z)
    Series ratio(work);
    ratio.at(0) = 1.0;
    for (int j = 1; j <= work; ++j) ratio.at(j) = f[j + 1];
    Series log_inc = ratio.log_series(work);

    // order-z matching fixes the log coefficient
    cplx rhs1 = g[1] - pole_inc[1];
    if (std::abs(log_inc[1]) == 0.0) throw std::logic_error("abel: degenerate log increment");
    sol.log_coeff = rhs1 / log_inc[1];

    // remaining power part: P(f) - P(z) = g - pole_inc - log_inc*beta
    Series target = g - pole_inc - log_inc * sol.log_coeff;
    if (std::abs(target[0]) > 1e-12 * (1.0 + std::abs(g[0])))
        throw std::runtime_error("abel: constant term cannot be matched (germ not admissible)");
    Series power(order);
    for (int m = 2; m <= order; ++m) {
        // [z^m] sum_j p_j (f^j - z^j); p_{m-1} enters as (m-1) c2 p_{m-1}
        Series lhs(work);
        for (int j = 1; j < m; ++j) {
            if (power[j] == cplx{}) continue;
            // f^j - z^j
            Series fj(work);
            fj.at(0) = 1.0;
            for (int t = 0; t < j; ++t) fj = mul(fj, f, work);
            fj.at(j) -= 1.0;
            lhs = lhs + fj * power[j];
        }
        cplx deficit = target[m] - lhs[m];
        power.at(m - 1) = deficit / (static_cast<double>(m - 1) * f[2]);
    }
    sol.power = power;
    return sol;
}

namespace {

// delta(z) = g(z) + alpha0 (1/f(z) - 1/z) - beta Log(f(z)/z), cancellation free
struct DeltaEval {
    const Germ* f;
    const Series* g;
    cplx alpha0, beta;

    cplx operator()(cplx z) const {
        cplx step = f->displacement(z);
        cplx fz = z + step;
        cplx v = g->eval(z);
        if (alpha0 != cplx{}) v += alpha0 * (-step / (fz * z));
        if (beta != cplx{}) v -= beta * log1p_c(step / z);
        return v;
    }
};

// Richardson acceleration of the orbit series sum_n delta(z_n): partial sums
// at N, 2N, 4N, 8N eliminate the 1/N, log N/N^2 and 1/N^2 tails.
cplx accelerated_orbit_sum(const DeltaEval& delta, const std::function<cplx(cplx)>& advance,
                           cplx z0, std::size_t budget) {
    std::size_t base = budget / 8;
    cplx sum = 0.0, comp = 0.0;
    auto add = [&](cplx v) {
        cplx y = v - comp;
        cplx t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    };
    cplx z = z0;
    cplx p[4];
    std::size_t marks[4] = {base, 2 * base, 4 * base, 8 * base};
    std::size_t mi = 0;
    for (std::size_t n = 0; n < marks[3]; ++n) {
        add(delta(z));
        z = advance(z);
        if (n + 1 == marks[mi]) p[mi++] = sum;
    }
    // tails: t(N) = a/N + b log N/N^2 + c/N^2 + O(log^2/N^3)
    // pass 1 (1/N): q_i = 2 p_{i+1} - p_i
    cplx q[3] = {2.0 * p[1] - p[0], 2.0 * p[2] - p[1], 2.0 * p[3] - p[2]};
    // pass 2 and 3 (log N/N^2 and 1/N^2): factor 4
    cplx r[2] = {(4.0 * q[1] - q[0]) / 3.0, (4.0 * q[2] - q[1]) / 3.0};
    cplx s = (4.0 * r[1] - r[0]) / 3.0;
    return s;
}

}  // namespace

SectorialSolution::SectorialSolution(AbelProblem p, PetalSide side)
    : p_(std::move(p)), side_(side) {
    FormalAbelSolution f = formal_solution(p_, 6);
    pole_ = f.pole_coeff;
    logc_ = f.log_coeff;
}

cplx SectorialSolution::eval(cplx z, double tol) const {
    std::size_t budget = tol >= 1e-9 ? (budget_ >> 1) : (tol >= 1e-10 ? budget_ : budget_ << 2);
    DeltaEval delta{&p_.f, &p_.rhs, pole_, logc_};
    cplx r;
    if (side_ == PetalSide::plus) {
        auto advance = [this](cplx w) { return p_.f.eval(w); };
        r = -accelerated_orbit_sum(delta, advance, z, budget);
    } else {
        auto advance = [this](cplx w) { return p_.f.inverse_step(w, w); };
        cplx z1 = p_.f.inverse_step(z, z);
        r = accelerated_orbit_sum(delta, advance, z1, budget);
    }
    cplx lg = side_ == PetalSide::plus ? log_plus(z) : std::log(z);
    return -pole_ / z + logc_ * lg + r;
}

cplx SectorialSolution::residual(cplx z, double tol) const {
    cplx fz = p_.f.eval(z);
    return eval(fz, tol) - eval(z, tol) - p_.rhs.eval(z);
}

cplx sectorial_plus(const AbelProblem& p, cplx z, double tol) {
    return SectorialSolution(p, PetalSide::plus).eval(z, tol);
}

cplx sectorial_minus(const AbelProblem& p, cplx z, double tol) {
    return SectorialSolution(p, PetalSide::minus).eval(z, tol);
}

namespace {

Series series_of_power_part(const Series& rhs, const Germ& phi, int k, int order) {
    // truncated series of the solvable germ construction
    Series ph = phi.as_series(order);
    if (k >= 2) {
        cplx alpha_k = rhs[k];
        if (std::abs(alpha_k) == 0.0)
            throw std::invalid_argument("build_solvable_germ: rhs lacks the z^k coefficient");
        // u(z) = (k-1)/alpha_k g(z)/phi^{k-1}: multiplicity >= 1
        Series phik(order);
        phik.at(0) = 1.0;
        Series ph_unit(order);  // phi/z as a unit series
        for (int j = 0; j < order; ++j) ph_unit.at(j) = ph[j + 1];
        for (int t = 0; t < k - 1; ++t) phik = mul(phik, ph_unit, order);
        // g/z^{k-1}
        Series gshift(order);
        for (int j = 0; j + k - 1 <= rhs.order() && j <= order; ++j) gshift.at(j) = rhs[j + k - 1];
        Series u = mul(gshift, phik.reciprocal(order), order) *
                   (static_cast<double>(k - 1) / alpha_k);
        Series root = u;
        root.at(0) += 1.0;
        root = root.pow_series(1.0 / (k - 1.0), order);
        Series inner = mul(ph, root, order);  // phi(z) (1+u)^{1/(k-1)}
        Series phi_inv = ph.reversion(order);
        return compose_series(phi_inv, inner, order);
    }
    cplx a0 = rhs[0], a1 = rhs[1];
    if (a0 == cplx{} && a1 != cplx{}) {
        // f = phi^{-1}(exp(g/alpha1) phi)
        Series e = (rhs * (1.0 / a1)).truncated(order).exp_series(order);
        Series inner = mul(ph, e, order);
        return compose_series(ph.reversion(order), inner, order);
    }
    if (a0 != cplx{} && a1 == cplx{}) {
        // f = phi^{-1}(phi/(1 - g phi/alpha0))
        Series den = mul(rhs, ph, order) * (-1.0 / a0);
        den.at(0) += 1.0;
        Series inner = mul(ph, den.reciprocal(order), order);
        return compose_series(ph.reversion(order), inner, order);
    }
    if (a0 == cplx{} && a1 == cplx{})
        throw std::invalid_argument("build_solvable_germ: k <= 1 needs alpha0 or alpha1");
    // general h_{a0,a1}: solve alpha0 u/(phi (1+u)) + alpha1 log(1+u) = g for
    // u by fixed-point iteration in the series orders
    Series u(order);
    for (int it = 0; it < order + 2; ++it) {
        Series one_pu = u;
        one_pu.at(0) += 1.0;
        Series lg = one_pu.log_series(order) * a1;
        Series target = rhs.truncated(order) - lg;  // = alpha0 u/(phi (1+u))
        Series ph_unit(order);
        for (int j = 0; j < order; ++j) ph_unit.at(j) = ph[j + 1];
        // u = target * z * phi_unit * (1+u) / alpha0
        Series t2(order);
        for (int j = 1; j <= order; ++j) t2.at(j) = target[j - 1];
        u = mul(mul(t2, ph_unit, order), one_pu, order) * (1.0 / a0);
    }
    Series one_pu = u;
    one_pu.at(0) += 1.0;
    Series inner = mul(ph, one_pu, order);
    return compose_series(ph.reversion(order), inner, order);
}

}  // namespace

Germ build_solvable_germ(const Germ& phi, const Series& rhs, int k) {
    int order = std::max(phi.truncation_order(), std::max(rhs.order() + 2, 16));
    Series fs = series_of_power_part(rhs, phi, k, order);
    std::vector<cplx> a;
    for (int i = 1; i <= order; ++i) a.push_back(fs[i]);
    Germ f(std::move(a));

    // closed-form evaluators through phi
    Germ phv = phi;
    auto phi_fwd = [phv](cplx z) { return phv.eval(z); };
    auto phi_inv = [phv](cplx w) { return phv.inverse_step(w, w); };
    Series g = rhs;
    if (k >= 2) {
        cplx ak = rhs[k];
        double ex = 1.0 / (k - 1.0);
        int kk = k;
        f.exact_eval = [=](cplx z) {
            cplx p = phi_fwd(z);
            cplx u = (static_cast<double>(kk - 1) / ak) * g.eval(z) / std::pow(p, kk - 1);
            return phi_inv(p * std::pow(1.0 + u, ex));
        };
    } else {
        cplx a0 = rhs[0], a1 = rhs[1];
        if (a0 == cplx{} && a1 != cplx{}) {
            f.exact_eval = [=](cplx z) {
                return phi_inv(std::exp(g.eval(z) / a1) * phi_fwd(z));
            };
        } else if (a0 != cplx{} && a1 == cplx{}) {
            f.exact_eval = [=](cplx z) {
                cplx p = phi_fwd(z);
                return phi_inv(p / (1.0 - g.eval(z) * p / a0));
            };
        }
    }
    if (f.exact_eval) {
        auto ee = f.exact_eval;
        f.exact_displacement = [ee](cplx z) { return ee(z) - z; };
    }
    return f;
}

std::function<cplx(cplx)> global_solution(const Germ& phi, const Series& rhs, int k) {
    Germ phv = phi;
    Series g = rhs;
    if (k >= 2) {
        cplx ak = rhs[k];
        int kk = k;
        return [=](cplx z) { return ak / static_cast<double>(kk - 1) * std::pow(phv.eval(z), kk - 1); };
    }
    cplx a0 = rhs[0], a1 = rhs[1];
    return [=](cplx z) {
        cplx p = phv.eval(z);
        cplx v = 0.0;
        if (a0 != cplx{}) v += -a0 / p;
        if (a1 != cplx{}) v += a1 * std::log(p);
        return v;
    };
}

namespace {

Series one_abel_rhs(int order) {
    Series g(order);
    g.at(1) = -1.0;
    return g;
}

}  // namespace

cplx principal_part_plus(const Germ& f, cplx z, double tol) {
    AbelProblem p(f, one_abel_rhs(4));
    cplx hp = sectorial_plus(p, z, tol);
    return kPi * hp - kPi / 4.0 + cplx(0.0, kPi * kPi);
}

cplx principal_part_minus(const Germ& f, cplx z, double tol) {
    AbelProblem p(f, one_abel_rhs(4));
    cplx hm = sectorial_minus(p, z, tol);
    return z - kPi * hm + kPi / 4.0;
}

cplx model_cocycle(cplx z, IntersectionSide side) {
    // Equals psi(-1/z) - psi(1 + 1/z) - i pi = pi cot(pi/z) - i pi, the
    // difference H_+ - H_- of the constant-free sectorial 1-Abel solutions
    // (H_- - H_+ on the low side). The digamma reflection identity fixes the
    // overall sign of the exponential series.
    cplx e;
    if (side == IntersectionSide::up)
        e = std::exp(-kTwoPiI / z);
    else
        e = std::exp(kTwoPiI / z);
    if (std::abs(1.0 - e) < 1e-6)
        throw std::domain_error("model_cocycle: too close to the singular rays");
    cplx core = kTwoPiI * e / (1.0 - e);
    return side == IntersectionSide::up ? core : kTwoPiI + core;
}

MomentSamples moment_sample(const Germ& f, const std::vector<cplx>& points_up,
                            const std::vector<cplx>& points_low) {
    MomentSamples out;
    Series abel_rhs(2);
    abel_rhs.at(0) = 1.0;
    AbelProblem trivialization(f, abel_rhs);
    AbelProblem one_abel(f, one_abel_rhs(4));
    SectorialSolution psi_plus(trivialization, PetalSide::plus);
    SectorialSolution h_plus(one_abel, PetalSide::plus);
    SectorialSolution h_minus(one_abel, PetalSide::minus);

    auto handle = [&](cplx z, bool up) {
        cplx psi = psi_plus.eval(z);
        if (std::abs(psi.imag()) < 2.0)
            throw std::domain_error("moment_sample: point outside the Fourier bands (|Im Psi| < 2)");
        cplx t = std::exp(-kTwoPiI * psi);
        MomentSample ms;
        if (up) {
            ms.t = 1.0 / t;  // |t| > 1 on the up side; sample g_inf against 1/t
            ms.h = h_plus.eval(z) - h_minus.eval(z);
        } else {
            ms.t = t;
            // the branch constant of Log^+ vs Log across the low component
            ms.h = h_minus.eval(z) - h_plus.eval(z) - kTwoPiI;
        }
        return ms;
    };
    for (cplx z : points_up) out.up.push_back(handle(z, true));
    for (cplx z : points_low) out.low.push_back(handle(z, false));
    return out;
}

}  // namespace orbitlens
