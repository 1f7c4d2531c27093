#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace orbitlens {

using cplx = std::complex<double>;

// Dense truncated power series sum_{j=0}^{order} c[j] z^j. All binary
// operations truncate to an explicit order; coefficients beyond the stored
// range read as zero.
class Series {
public:
    Series() = default;
    explicit Series(int order) : c_(static_cast<size_t>(order) + 1) {}
    Series(std::initializer_list<cplx> coeffs) : c_(coeffs) {}

    static Series identity(int order);

    int order() const { return static_cast<int>(c_.size()) - 1; }
    cplx operator[](int j) const {
        return (j >= 0 && j <= order()) ? c_[static_cast<size_t>(j)] : cplx{};
    }
    cplx& at(int j) { return c_[static_cast<size_t>(j)]; }

    Series truncated(int order) const;
    cplx eval(cplx z) const;  // Horner
    Series derivative() const;

    Series operator*(cplx s) const;
    friend Series operator+(const Series& a, const Series& b);
    friend Series operator-(const Series& a, const Series& b);

    friend Series mul(const Series& a, const Series& b, int order);
    // g(h(z)); requires h[0] == 0.
    friend Series compose_series(const Series& g, const Series& h, int order);

    Series reciprocal(int order) const;         // 1/this, this[0] != 0
    Series log_series(int order) const;         // log(this), this[0] == 1
    Series exp_series(int order) const;         // exp(this), this[0] == 0
    Series pow_series(cplx alpha, int order) const;  // this^alpha, this[0] == 1
    Series reversion(int order) const;          // this(rev(z)) = z; this[0]==0, this[1]!=0

    double max_abs_coeff() const;

private:
    std::vector<cplx> c_;
};

}  // namespace orbitlens
