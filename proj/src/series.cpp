#include "orbitlens/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace orbitlens {

Series Series::identity(int order) {
    Series s(order);
    if (order >= 1) s.at(1) = 1.0;
    return s;
}

Series Series::truncated(int order) const {
    Series r(order);
    int m = std::min(order, this->order());
    for (int j = 0; j <= m; ++j) r.at(j) = (*this)[j];
    return r;
}

cplx Series::eval(cplx z) const {
    cplx acc = 0.0;
    for (int j = order(); j >= 0; --j) acc = acc * z + (*this)[j];
    return acc;
}

Series Series::derivative() const {
    if (order() <= 0) return Series(0);
    Series r(order() - 1);
    for (int j = 1; j <= order(); ++j) r.at(j - 1) = static_cast<double>(j) * (*this)[j];
    return r;
}

Series Series::operator*(cplx s) const {
    Series r(order());
    for (int j = 0; j <= order(); ++j) r.at(j) = (*this)[j] * s;
    return r;
}

Series operator+(const Series& a, const Series& b) {
    Series r(std::max(a.order(), b.order()));
    for (int j = 0; j <= r.order(); ++j) r.at(j) = a[j] + b[j];
    return r;
}

Series operator-(const Series& a, const Series& b) {
    Series r(std::max(a.order(), b.order()));
    for (int j = 0; j <= r.order(); ++j) r.at(j) = a[j] - b[j];
    return r;
}

Series mul(const Series& a, const Series& b, int order) {
    Series r(order);
    int na = std::min(order, a.order());
    for (int i = 0; i <= na; ++i) {
        if (a[i] == cplx{}) continue;
        int nb = std::min(order - i, b.order());
        for (int j = 0; j <= nb; ++j) r.at(i + j) += a[i] * b[j];
    }
    return r;
}

Series compose_series(const Series& g, const Series& h, int order) {
    if (std::abs(h[0]) != 0.0) throw std::invalid_argument("compose_series: inner series must vanish at 0");
    Series r(order);
    r.at(0) = g[g.order()];
    for (int j = g.order() - 1; j >= 0; --j) {
        r = mul(r, h, order);
        r.at(0) += g[j];
    }
    return r;
}

Series Series::reciprocal(int order) const {
    cplx c0 = (*this)[0];
    if (std::abs(c0) == 0.0) throw std::invalid_argument("reciprocal: constant term is zero");
    Series r(order);
    r.at(0) = 1.0 / c0;
    for (int m = 1; m <= order; ++m) {
        cplx acc = 0.0;
        for (int j = 1; j <= m; ++j) acc += (*this)[j] * r[m - j];
        r.at(m) = -acc / c0;
    }
    return r;
}

Series Series::log_series(int order) const {
    if (std::abs((*this)[0] - 1.0) > 1e-14)
        throw std::invalid_argument("log_series: constant term must be 1");
    // log(f) = integral of f'/f
    Series q = mul(derivative(), reciprocal(order), order);
    Series r(order);
    for (int m = 1; m <= order; ++m) r.at(m) = q[m - 1] / static_cast<double>(m);
    return r;
}

Series Series::exp_series(int order) const {
    if (std::abs((*this)[0]) != 0.0)
        throw std::invalid_argument("exp_series: constant term must be 0");
    // e' = f' e, solved term by term
    Series r(order);
    r.at(0) = 1.0;
    for (int m = 1; m <= order; ++m) {
        cplx acc = 0.0;
        for (int j = 1; j <= m; ++j) acc += static_cast<double>(j) * (*this)[j] * r[m - j];
        r.at(m) = acc / static_cast<double>(m);
    }
    return r;
}

Series Series::pow_series(cplx alpha, int order) const {
    return (log_series(order) * alpha).exp_series(order);
}

Series Series::reversion(int order) const {
    if (std::abs((*this)[0]) != 0.0 || std::abs((*this)[1]) == 0.0)
        throw std::invalid_argument("reversion: need f(0)=0, f'(0)!=0");
    Series h(order);
    if (order >= 1) h.at(1) = 1.0 / (*this)[1];
    for (int m = 2; m <= order; ++m) {
        Series comp = compose_series(this->truncated(m), h.truncated(m), m);
        h.at(m) = -comp[m] / (*this)[1];
    }
    return h;
}

double Series::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& v : c_) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace orbitlens
