#include "orbitlens/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace orbitlens {

namespace {

double neg_log(double x) { return -std::log(x); }

}  // namespace

double ScaleMonomial::eval(double x) const {
    if (form == Form::exponential) return std::exp(-c / x);
    return std::pow(x, alpha) * std::pow(neg_log(x), beta);
}

std::string ScaleMonomial::str() const {
    std::ostringstream os;
    if (form == Form::exponential) {
        os << "exp(" << c << ")";
        return os.str();
    }
    if (alpha == 0.0 && beta == 0.0) return "1";
    if (alpha != 0.0) {
        os << "x^" << alpha;
        if (beta != 0.0) os << "*";
    }
    if (beta != 0.0) os << "l^" << beta;
    return os.str();
}

bool less_flat(const ScaleMonomial& a, const ScaleMonomial& b) {
    if (a.form != b.form) return a.form == ScaleMonomial::Form::power_log;
    if (a.form == ScaleMonomial::Form::exponential) return a.c < b.c;
    if (a.alpha != b.alpha) return a.alpha < b.alpha;
    return a.beta > b.beta;
}

bool flatter(const ScaleMonomial& a, const ScaleMonomial& b) { return less_flat(b, a); }

ChebyshevScale builtin_scale(const std::string& name, int length,
                             const std::vector<double>& params) {
    ChebyshevScale s;
    s.name = name;
    auto pl = [](double a, double b) { return ScaleMonomial::power_log(a, b); };
    if (name == "power") {
        for (int i = 0; i < length; ++i) s.u.push_back(pl(i, 0));
    } else if (name == "power_odd") {
        s.u.push_back(pl(0, 0));
        for (int i = 1; s.size() < length; i += 2) s.u.push_back(pl(i, 0));
    } else if (name == "saddle_loop") {
        s.u.push_back(pl(0, 0));
        for (int i = 1; s.size() < length; ++i) {
            s.u.push_back(pl(i, 1));
            if (s.size() < length) s.u.push_back(pl(i, 0));
        }
    } else if (name == "two_saddle") {
        s.u.push_back(pl(0, 0));
        s.u.push_back(pl(1, 0));
        for (int i = 2; s.size() < length; ++i)
            for (int j = i; j >= 0 && s.size() < length; --j) s.u.push_back(pl(i, j));
    } else if (name == "abelian") {
        if (params.empty()) throw std::invalid_argument("abelian scale needs an alpha list");
        s.u.push_back(pl(0, 0));
        for (double a : params) {
            if (!(a > 0.0)) throw std::invalid_argument("abelian scale: alphas must be positive");
            s.u.push_back(pl(a, 1));
            s.u.push_back(pl(a, 0));
        }
    } else if (name == "exp") {
        if (params.empty()) throw std::invalid_argument("exp scale needs a c list");
        for (double c : params) s.u.push_back(ScaleMonomial::exponential(c));
    } else {
        throw std::invalid_argument("unknown builtin scale: " + name);
    }
    for (int i = 0; i + 1 < s.size(); ++i)
        if (!less_flat(s.u[static_cast<size_t>(i)], s.u[static_cast<size_t>(i + 1)]))
            throw std::logic_error("builtin scale is not flatness ordered");
    return s;
}

namespace {

ScaleMonomial parse_monomial(const std::string& item) {
    // forms: 1 | x | x^a | l | l^b | x^a*l | x^a*l^b | exp(c)
    std::string t;
    for (char ch : item)
        if (!isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
    if (t == "1") return ScaleMonomial::power_log(0, 0);
    if (t.rfind("exp(", 0) == 0 && t.back() == ')')
        return ScaleMonomial::exponential(std::stod(t.substr(4, t.size() - 5)));
    double alpha = 0, beta = 0;
    size_t pos = 0;
    auto read_factor = [&]() {
        char v = t[pos];
        if (v != 'x' && v != 'l') throw std::invalid_argument("bad scale monomial: " + item);
        ++pos;
        double e = 1.0;
        if (pos < t.size() && t[pos] == '^') {
            ++pos;
            size_t used = 0;
            e = std::stod(t.substr(pos), &used);
            pos += used;
        }
        (v == 'x' ? alpha : beta) += e;
    };
    read_factor();
    while (pos < t.size()) {
        if (t[pos] != '*') throw std::invalid_argument("bad scale monomial: " + item);
        ++pos;
        read_factor();
    }
    return ScaleMonomial::power_log(alpha, beta);
}

}  // namespace

ChebyshevScale parse_scale(const std::string& spec) {
    std::string head = spec, args;
    if (auto p = spec.find(':'); p != std::string::npos) {
        head = spec.substr(0, p);
        args = spec.substr(p + 1);
    }
    if (head == "power" || head == "power_odd" || head == "saddle_loop" || head == "two_saddle") {
        int len = args.empty() ? 8 : std::stoi(args);
        return builtin_scale(head, len);
    }
    if (head == "abelian" || head == "exp") {
        std::vector<double> params;
        std::stringstream ss(args);
        std::string item;
        while (std::getline(ss, item, ',')) params.push_back(std::stod(item));
        return builtin_scale(head, 0, params);
    }
    // explicit monomial list
    ChebyshevScale s;
    s.name = "custom";
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) s.u.push_back(parse_monomial(item));
    if (s.u.empty()) throw std::invalid_argument("empty scale spec");
    if (!(s.u.front().alpha == 0.0 && s.u.front().beta == 0.0 &&
          s.u.front().form == ScaleMonomial::Form::power_log))
        s.u.insert(s.u.begin(), ScaleMonomial::power_log(0, 0));
    return s;
}

PowerLogCombo PowerLogCombo::monomial(double alpha, double beta, double coeff) {
    PowerLogCombo c;
    c.add_term(alpha, beta, coeff);
    return c;
}

void PowerLogCombo::add_term(double alpha, double beta, double coeff) {
    if (coeff == 0.0) return;
    auto key = std::make_pair(alpha, beta);
    double& v = terms_[key];
    v += coeff;
    if (std::abs(v) < 1e-300) terms_.erase(key);
}

double PowerLogCombo::eval(double x) const {
    double acc = 0.0;
    for (const auto& [k, c] : terms_)
        acc += c * std::pow(x, k.first) * std::pow(neg_log(x), k.second);
    return acc;
}

PowerLogCombo PowerLogCombo::derivative() const {
    // d/dx x^a L^b = a x^{a-1} L^b - b x^{a-1} L^{b-1},  L = -log x
    PowerLogCombo r;
    for (const auto& [k, c] : terms_) {
        if (k.first != 0.0) r.add_term(k.first - 1.0, k.second, c * k.first);
        if (k.second != 0.0) r.add_term(k.first - 1.0, k.second - 1.0, -c * k.second);
    }
    return r;
}

PowerLogCombo PowerLogCombo::operator*(const PowerLogCombo& o) const {
    PowerLogCombo r;
    for (const auto& [ka, ca] : terms_)
        for (const auto& [kb, cb] : o.terms_)
            r.add_term(ka.first + kb.first, ka.second + kb.second, ca * cb);
    if (r.terms_.size() > 200000) throw std::runtime_error("power-log combo blow-up");
    return r;
}

PowerLogCombo PowerLogCombo::operator*(double s) const {
    PowerLogCombo r;
    for (const auto& [k, c] : terms_) r.add_term(k.first, k.second, c * s);
    return r;
}

PowerLogCombo PowerLogCombo::operator-(const PowerLogCombo& o) const {
    PowerLogCombo r = *this;
    for (const auto& [k, c] : o.terms_) r.add_term(k.first, k.second, -c);
    return r;
}

std::vector<std::tuple<double, double, double>> PowerLogCombo::sorted_terms() const {
    std::vector<std::tuple<double, double, double>> v;
    for (const auto& [k, c] : terms_) v.emplace_back(k.first, k.second, c);
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
        return std::get<1>(a) > std::get<1>(b);
    });
    return v;
}

namespace {

struct RationalCombo {
    PowerLogCombo num, den;

    RationalCombo derivative() const {
        RationalCombo r;
        r.num = num.derivative() * den - num * den.derivative();
        r.den = den * den;
        r.normalize();
        return r;
    }

    RationalCombo divided_by(const RationalCombo& o) const {
        RationalCombo r;
        r.num = num * o.den;
        r.den = den * o.num;
        r.normalize();
        return r;
    }

    // pull out the common monomial factor so exponents stay small
    void normalize() {
        auto tn = num.sorted_terms();
        auto td = den.sorted_terms();
        if (tn.empty() || td.empty()) return;
        double amin = std::min(std::get<0>(tn.front()), std::get<0>(td.front()));
        double bmin = 1e300;
        for (const auto& t : tn) bmin = std::min(bmin, std::get<1>(t));
        for (const auto& t : td) bmin = std::min(bmin, std::get<1>(t));
        if (amin == 0.0 && bmin == 0.0) return;
        PowerLogCombo nn, nd;
        for (const auto& [a, b, c] : tn) nn.add_term(a - amin, b - bmin, c);
        for (const auto& [a, b, c] : td) nd.add_term(a - amin, b - bmin, c);
        num = nn;
        den = nd;
    }

    // limit as x -> 0+: 0, finite, or +-inf
    double limit_at_zero() const {
        auto tn = num.sorted_terms();
        auto td = den.sorted_terms();
        if (tn.empty()) return 0.0;
        if (td.empty()) return std::numeric_limits<double>::quiet_NaN();
        auto [an, bn, cn] = tn.front();
        auto [ad, bd, cd] = td.front();
        if (an > ad || (an == ad && bn < bd)) return 0.0;
        if (an < ad || (an == ad && bn > bd)) {
            double sign = (cn / cd > 0) ? 1.0 : -1.0;
            return sign * std::numeric_limits<double>::infinity();
        }
        return cn / cd;
    }
};

}  // namespace

double gen_derivative_at_zero(const ChebyshevScale& scale, const PowerLogCombo& combo, int i) {
    if (i < 0 || i >= scale.size())
        throw std::invalid_argument("gen_derivative_at_zero: index outside the scale");
    for (const auto& m : scale.u)
        if (m.form != ScaleMonomial::Form::power_log)
            throw std::invalid_argument("gen_derivative_at_zero: power-log scales only");

    auto as_rational = [](const PowerLogCombo& c) {
        RationalCombo r;
        r.num = c;
        r.den = PowerLogCombo::monomial(0, 0, 1.0);
        return r;
    };
    auto monomial_of = [&](int j) {
        const auto& m = scale.u[static_cast<size_t>(j)];
        return PowerLogCombo::monomial(m.alpha, m.beta, 1.0);
    };

    // D_0(f) = f/u_0, D_{j+1}(f) = (D_j f)'/(D_j u_{j+1})'. The divisors
    // (D_j u_{j+1})' depend only on the scale, so carry D_j of every needed
    // u_m along while iterating.
    std::vector<RationalCombo> du(static_cast<size_t>(i + 1));
    for (int m = 1; m <= i; ++m)
        du[static_cast<size_t>(m)] =
            as_rational(monomial_of(m)).divided_by(as_rational(monomial_of(0)));
    RationalCombo r = as_rational(combo).divided_by(as_rational(monomial_of(0)));
    for (int j = 0; j < i; ++j) {
        RationalCombo w = du[static_cast<size_t>(j + 1)].derivative();
        r = r.derivative().divided_by(w);
        for (int m = j + 2; m <= i; ++m)
            du[static_cast<size_t>(m)] = du[static_cast<size_t>(m)].derivative().divided_by(w);
    }
    return r.limit_at_zero();
}

double invert_monomial(const ScaleMonomial& m, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("invert_monomial: eps must be positive");
    if (m.form == ScaleMonomial::Form::exponential) return m.c / neg_log(eps);
    if (m.alpha <= 0.0) throw std::domain_error("invert_monomial: monomial is not increasing");
    if (m.beta == 0.0) return std::pow(eps, 1.0 / m.alpha);
    double cap = 0.5 * std::exp(-std::max(0.0, m.beta) / m.alpha);
    cap = std::min(cap, 0.3);
    if (m.eval(cap) <= eps) throw std::domain_error("invert_monomial: eps out of range");
    double lo = std::log(1e-300), hi = std::log(cap);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (m.eval(std::exp(mid)) > eps ? hi : lo) = mid;
        if (hi - lo < 1e-13) break;
    }
    return std::exp(0.5 * (lo + hi));
}

namespace {

double loglog_slope(const std::vector<double>& eps, const std::vector<double>& ratio) {
    // least squares of log(ratio) against log(-log eps), restricted to the
    // small-eps half of the window where the transient from the orbit head
    // has died out
    double xlo = 1e300, xhi = -1e300;
    for (double e : eps) {
        double x = std::log(neg_log(e));
        xlo = std::min(xlo, x);
        xhi = std::max(xhi, x);
    }
    double xmid = 0.5 * (xlo + xhi);
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(ratio[i] > 0.0)) continue;
        double x = std::log(neg_log(eps[i]));
        if (x < xmid) continue;
        double y = std::log(ratio[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y; n += 1;
    }
    double det = n * sxx - sx * sx;
    return det > 0 ? (n * sxy - sx * sy) / det : 0.0;
}

}  // namespace

ContentEstimate generalized_content(const EpsSweep& sweep, const ScaleMonomial& m) {
    if (sweep.kind != Germ::Kind::real_line)
        throw std::invalid_argument("generalized_content: needs a real-length sweep");
    ContentEstimate est;
    est.lower = 1e300;
    est.upper = 0.0;
    std::vector<double> eps, ratio;
    double eps_lo = sweep.rows.back().eps;  // rows are decreasing
    for (const auto& r : sweep.rows) {
        if (r.eps > 10.0 * eps_lo) continue;  // last decade
        double u = invert_monomial(m, r.eps);
        double q = r.length / u;
        est.lower = std::min(est.lower, q);
        est.upper = std::max(est.upper, q);
        eps.push_back(r.eps);
        ratio.push_back(q);
    }
    est.trend_slope = loglog_slope(eps, ratio);
    return est;
}

CriticalOrderResult critical_order(const EpsSweep& sweep, const ChebyshevScale& scale) {
    if (sweep.kind != Germ::Kind::real_line)
        throw std::invalid_argument("critical_order: needs a real-length sweep");
    CriticalOrderResult res;
    std::vector<double> eps;
    for (const auto& r : sweep.rows) eps.push_back(r.eps);
    res.classes.assign(static_cast<size_t>(scale.size()), 0);
    int last_alive = 0;
    for (int i = 1; i < scale.size(); ++i) {
        std::vector<double> ratio;
        ratio.reserve(sweep.rows.size());
        for (const auto& r : sweep.rows)
            ratio.push_back(r.length / invert_monomial(scale.u[static_cast<size_t>(i)], r.eps));
        double s = loglog_slope(eps, ratio);
        int cls = (s < -0.1) ? -1 : (s > 0.1 ? 1 : 0);
        res.classes[static_cast<size_t>(i)] = cls;
        if (cls >= 0) last_alive = i;
    }
    res.order = last_alive;
    if (last_alive == scale.size() - 1 &&
        res.classes[static_cast<size_t>(last_alive)] >= 0)
        res.beyond_truncation = true;
    return res;
}

double RealGenerator::eval(double x) const { return x - displacement(x); }

double RealGenerator::displacement(double x) const {
    // f = id - g, with the identity coefficient handled exactly
    double id_coeff = 0.0, rest = 0.0;
    for (const auto& t : terms) {
        if (!t.exponential && t.alpha == 1.0 && t.beta == 0.0) {
            id_coeff += t.coeff;
            continue;
        }
        if (t.exponential)
            rest += t.coeff * std::exp(-t.c / x);
        else
            rest += t.coeff * std::pow(x, t.alpha) * std::pow(neg_log(x), t.beta);
    }
    return (1.0 - id_coeff) * x - rest;
}

RealGenerator parse_generator(const std::string& spec) {
    RealGenerator g;
    g.text = spec;
    std::string t;
    for (char ch : spec)
        if (!isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
    if (t.empty()) throw std::invalid_argument("empty generator spec");
    size_t pos = 0;
    while (pos < t.size()) {
        GeneratorTerm term;
        double sign = 1.0;
        while (pos < t.size() && (t[pos] == '+' || t[pos] == '-')) {
            if (t[pos] == '-') sign = -sign;
            ++pos;
        }
        if (pos >= t.size()) throw std::invalid_argument("trailing sign in generator spec");
        // optional numeric coefficient
        if (isdigit(static_cast<unsigned char>(t[pos])) || t[pos] == '.') {
            size_t used = 0;
            term.coeff = std::stod(t.substr(pos), &used);
            pos += used;
            if (pos < t.size() && t[pos] == '*') ++pos;
        }
        term.coeff *= sign;
        bool any_factor = false;
        while (pos < t.size() && t[pos] != '+' && t[pos] != '-') {
            if (t.compare(pos, 4, "exp(") == 0) {
                size_t close = t.find(')', pos);
                if (close == std::string::npos) throw std::invalid_argument("unbalanced exp(");
                term.exponential = true;
                term.c = std::stod(t.substr(pos + 4, close - pos - 4));
                pos = close + 1;
            } else if (t[pos] == 'x' || t[pos] == 'l') {
                char v = t[pos++];
                double e = 1.0;
                if (pos < t.size() && t[pos] == '^') {
                    ++pos;
                    size_t used = 0;
                    e = std::stod(t.substr(pos), &used);
                    pos += used;
                }
                (v == 'x' ? term.alpha : term.beta) += e;
            } else if (t[pos] == '*') {
                ++pos;
                continue;
            } else {
                throw std::invalid_argument("bad generator term near: " + t.substr(pos));
            }
            any_factor = true;
        }
        if (!any_factor && term.coeff == sign)
            throw std::invalid_argument("bad generator term");
        g.terms.push_back(term);
    }
    return g;
}

}  // namespace orbitlens
