#include "orbitlens/germ.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace orbitlens {

namespace {

constexpr double kParabolicTol = 1e-12;

Germ::Kind detect_kind(const std::vector<cplx>& a) {
    for (const auto& v : a)
        if (v.imag() != 0.0) return Germ::Kind::complex_plane;
    return Germ::Kind::real_line;
}

}  // namespace

Germ::Germ(std::vector<cplx> coeffs, Kind kind) : a_(std::move(coeffs)), kind_(kind) {
    if (a_.empty() || std::abs(a_[0]) == 0.0)
        throw std::invalid_argument("germ: a1 must be nonzero");
}

Germ::Germ(std::vector<cplx> coeffs) : Germ(coeffs, detect_kind(coeffs)) {}

cplx Germ::coeff(int i) const {
    if (i < 1) throw std::out_of_range("germ coefficients start at degree 1");
    return i <= truncation_order() ? a_[static_cast<size_t>(i - 1)] : cplx{};
}

bool Germ::is_parabolic() const {
    if (std::abs(a1() - 1.0) > kParabolicTol) return false;
    for (int i = 2; i <= truncation_order(); ++i)
        if (std::abs(coeff(i)) != 0.0) return true;
    return false;
}

int Germ::multiplicity_index() const {
    if (!is_parabolic()) throw std::domain_error("multiplicity index: germ is not parabolic");
    for (int i = 2; i <= truncation_order(); ++i)
        if (std::abs(coeff(i)) != 0.0) return i - 1;
    throw std::domain_error("multiplicity index: identity germ");
}

cplx Germ::eval(cplx z) const {
    if (exact_eval) return exact_eval(z);
    return eval_series(z);
}

cplx Germ::eval_series(cplx z) const {
    cplx acc = 0.0;
    for (int i = truncation_order(); i >= 1; --i) acc = (acc + coeff(i)) * z;
    return acc;
}

cplx Germ::derivative(cplx z) const {
    cplx acc = 0.0;
    for (int i = truncation_order(); i >= 2; --i)
        acc = acc * z + static_cast<double>(i) * coeff(i);
    return acc * z + a1();
}

cplx Germ::displacement(cplx z) const {
    if (exact_displacement) return exact_displacement(z);
    // (a1 - 1) z + sum_{i>=2} a_i z^i, free of the identity-part cancellation
    cplx acc = 0.0;
    for (int i = truncation_order(); i >= 2; --i) acc = (acc + coeff(i)) * z;
    return acc * z + (a1() - 1.0) * z;
}

cplx Germ::inverse_step(cplx target, cplx seed) const {
    if (exact_inverse) return exact_inverse(target);
    cplx w = seed;
    double scale = 1.0 + std::abs(target);
    double best = 1e300;
    for (int it = 0; it < 50; ++it) {
        cplx r = eval(w) - target;
        double ar = std::abs(r);
        if (ar < 4e-16 * scale) return w;
        if (it > 3 && ar > 0.5 * best) return w;  // stalled at the rounding floor
        best = std::min(best, ar);
        cplx dp = derivative(w);
        if (std::abs(dp) == 0.0) break;
        w -= r / dp;
    }
    cplx r = eval(w) - target;
    if (std::abs(r) < 1e-14 * scale) return w;
    throw std::runtime_error("inverse_step: Newton failed to converge in 50 iterations");
}

Series Germ::as_series(int order) const {
    Series s(order);
    for (int i = 1; i <= std::min(order, truncation_order()); ++i) s.at(i) = coeff(i);
    return s;
}

namespace {

Germ from_series(const Series& s, Germ::Kind kind) {
    std::vector<cplx> a;
    a.reserve(static_cast<size_t>(s.order()));
    for (int i = 1; i <= s.order(); ++i) a.push_back(s[i]);
    return Germ(std::move(a), kind);
}

Germ::Kind join_kinds(const Germ& g, const Germ& h) {
    return (g.kind() == Germ::Kind::real_line && h.kind() == Germ::Kind::real_line)
               ? Germ::Kind::real_line
               : Germ::Kind::complex_plane;
}

}  // namespace

Germ compose(const Germ& g, const Germ& h, int order) {
    if (g.truncation_order() < order || h.truncation_order() < order)
        throw std::invalid_argument("compose: insufficient truncation for requested order");
    Series r = compose_series(g.as_series(order), h.as_series(order), order);
    return from_series(r, join_kinds(g, h));
}

Germ invert_series(const Germ& g, int order) {
    if (std::abs(g.a1()) == 0.0) throw std::invalid_argument("invert_series: not a diffeomorphism");
    Series r = g.as_series(order).reversion(order);
    return from_series(r, g.kind());
}

std::pair<Germ, FormalInvariants> normalize_extended(const Germ& g) {
    if (!g.is_parabolic())
        throw std::domain_error("normalize_extended: germ is not parabolic (or is the identity)");
    int k = g.multiplicity_index();
    int work = 2 * k + 1;
    if (g.truncation_order() < work)
        throw std::invalid_argument("normalize_extended: truncation below 2k+1");

    cplx a1 = g.coeff(k + 1);
    Series cur = g.as_series(work);
    for (int l = 2; l <= k; ++l) {
        cplx gamma = cur[k + l];
        if (std::abs(gamma) == 0.0) continue;
        cplx c = -gamma / (a1 * static_cast<double>(k + 1 - l));
        Series phi = Series::identity(work);
        phi.at(l) = c;
        Series phi_inv = phi.reversion(work);
        cur = compose_series(phi_inv, compose_series(cur, phi, work), work);
    }
    cplx b = cur[2 * k + 1];
    const cplx two_pi_i(0.0, 2.0 * 3.141592653589793238462643383279502884);
    cplx lambda = two_pi_i * (0.5 * static_cast<double>(k + 1) - b / (a1 * a1));

    Series nf(work);
    nf.at(1) = 1.0;
    nf.at(k + 1) = a1;
    nf.at(2 * k + 1) = b;
    FormalInvariants inv{k, a1, lambda};
    return {from_series(nf, g.kind()), inv};
}

cplx residual_index(const Germ& g) {
    if (!g.is_parabolic()) throw std::domain_error("residual_index: germ is not parabolic");
    int k = g.multiplicity_index();
    if (g.truncation_order() < 2 * k + 1)
        throw std::invalid_argument("residual_index: truncation below 2k+1");
    // f(z)-z = a_{k+1} z^{k+1} (1 + u(z)); residue of 1/(f-z) is the z^k
    // coefficient of (1/a_{k+1}) / (1 + u).
    cplx lead = g.coeff(k + 1);
    Series unit(k);
    unit.at(0) = 1.0;
    for (int j = 1; j <= k; ++j) unit.at(j) = g.coeff(k + 1 + j) / lead;
    Series rec = unit.reciprocal(k);
    return rec[k] / lead;
}

cplx log1p_c(cplx w) {
    double re = 0.5 * std::log1p(2.0 * w.real() + std::norm(w));
    double im = std::atan2(w.imag(), 1.0 + w.real());
    return {re, im};
}

cplx expm1_c(cplx w) {
    double ex = std::expm1(w.real());
    double cy = std::cos(w.imag()), sy = std::sin(w.imag());
    double s2 = 2.0 * std::sin(0.5 * w.imag()) * std::sin(0.5 * w.imag());
    return {ex * cy - s2, (1.0 + ex) * sy};
}

cplx parse_complex(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw std::invalid_argument("empty complex literal");
    if (s.back() == 'i' || s.back() == 'I') {
        s.pop_back();
        // split at the sign that separates real and imaginary parts
        for (size_t p = s.size(); p-- > 1;) {
            if ((s[p] == '+' || s[p] == '-') && s[p - 1] != 'e' && s[p - 1] != 'E') {
                double re = std::stod(s.substr(0, p));
                std::string im = s.substr(p);
                if (im == "+" || im == "-") im += "1";
                return {re, std::stod(im)};
            }
        }
        if (s.empty() || s == "+") return {0.0, 1.0};
        if (s == "-") return {0.0, -1.0};
        return {0.0, std::stod(s)};
    }
    size_t pos = 0;
    double re = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad complex literal: " + text);
    return {re, 0.0};
}

std::string format_complex(cplx v) {
    std::ostringstream os;
    os.precision(17);
    os << v.real();
    if (v.imag() != 0.0) {
        os << (v.imag() >= 0 ? "+" : "-");
        os << std::abs(v.imag()) << "i";
    }
    return os.str();
}

Germ Germ::model(int order) {
    std::vector<cplx> a(static_cast<size_t>(order), cplx(1.0, 0.0));
    Germ g(std::move(a), Kind::real_line);
    g.exact_eval = [](cplx z) { return z / (1.0 - z); };
    g.exact_displacement = [](cplx z) { return z * z / (1.0 - z); };
    g.exact_inverse = [](cplx z) { return z / (1.0 + z); };
    return g;
}

Germ Germ::zexp(int order) {
    std::vector<cplx> a(static_cast<size_t>(order));
    double fact = 1.0;
    for (int i = 1; i <= order; ++i) {
        a[static_cast<size_t>(i - 1)] = 1.0 / fact;  // a_i = 1/(i-1)!
        fact *= static_cast<double>(i);
    }
    Germ g(std::move(a), Kind::real_line);
    g.exact_eval = [](cplx z) { return z * std::exp(z); };
    g.exact_displacement = [](cplx z) { return z * expm1_c(z); };
    return g;
}

Germ Germ::loggerm(int order) {
    // -Log(2 - e^z) = -log(1 - (e^z - 1)^2) - z ... derived by series below
    Series expm1(order);
    double fact = 1.0;
    for (int i = 1; i <= order; ++i) {
        fact *= static_cast<double>(i);
        expm1.at(i) = 1.0 / fact;
    }
    // 2 - e^z = 1 - (e^z - 1); -Log(1-u) with u = e^z - 1
    Series one_minus(order);
    one_minus.at(0) = 1.0;
    Series f = (one_minus - expm1).log_series(order) * cplx(-1.0, 0.0);
    std::vector<cplx> a;
    for (int i = 1; i <= order; ++i) a.push_back(f[i]);
    Germ g(std::move(a), Kind::real_line);
    g.exact_eval = [](cplx z) { return -std::log(2.0 - std::exp(z)); };
    g.exact_displacement = [](cplx z) {
        // f(z) - z = -Log((2 - e^z) e^z) = -log(1 - u^2), u = e^z - 1
        cplx u = expm1_c(z);
        return -log1p_c(-u * u);
    };
    g.exact_inverse = [](cplx w) { return std::log(2.0 - std::exp(-w)); };
    return g;
}

Germ Germ::parse(const std::string& text, int order) {
    if (text == "model") return model(order);
    if (text == "zexp") return zexp(order);
    if (text == "loggerm") return loggerm(order);
    std::vector<cplx> a;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) a.push_back(parse_complex(item));
    if (a.empty()) throw std::invalid_argument("empty germ spec");
    return Germ(std::move(a));
}

}  // namespace orbitlens
