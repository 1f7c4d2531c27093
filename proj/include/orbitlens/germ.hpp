#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "orbitlens/series.hpp"

namespace orbitlens {

// Truncated germ f(z) = sum_{i>=1} a_i z^i around the fixed point 0. No
// constant term is ever stored. Builtins additionally carry closed-form
// evaluators so long orbits do not pay the truncation error.
class Germ {
public:
    enum class Kind { real_line, complex_plane };

    Germ(std::vector<cplx> coeffs, Kind kind);
    explicit Germ(std::vector<cplx> coeffs);

    int truncation_order() const { return static_cast<int>(a_.size()); }
    cplx coeff(int i) const;  // a_i, i >= 1
    cplx a1() const { return coeff(1); }
    Kind kind() const { return kind_; }

    bool is_parabolic() const;       // a1 == 1 and some a_i != 0, i >= 2
    int multiplicity_index() const;  // smallest i-1 >= 1 with a_i != 0

    cplx eval(cplx z) const;          // f(z); closed form when available
    cplx eval_series(cplx z) const;   // truncated series only
    cplx derivative(cplx z) const;    // f'(z) of the truncated series
    cplx displacement(cplx z) const;  // f(z) - z without cancellation
    cplx inverse_step(cplx target, cplx seed) const;  // solve f(w) = target (Newton)

    Series as_series(int order) const;  // constant term 0

    // Closed-form hooks (set on builtins and constructed germs).
    std::function<cplx(cplx)> exact_eval;
    std::function<cplx(cplx)> exact_displacement;
    std::function<cplx(cplx)> exact_inverse;

    // Text format: comma-separated complex coefficients "a1,a2,..." with
    // entries `re` or `re+imi`/`re-imi`, or a builtin name.
    static Germ parse(const std::string& text, int order = 16);
    static Germ model(int order = 16);    // z/(1-z) truncated
    static Germ zexp(int order = 16);     // z e^z truncated
    static Germ loggerm(int order = 16);  // -Log(2 - e^z) truncated

private:
    std::vector<cplx> a_;  // a_[i] = a_{i+1}
    Kind kind_;
};

struct FormalInvariants {
    int k = 0;
    cplx a1{};
    cplx lambda{};
    std::pair<int, cplx> standard_pair() const { return {k, lambda}; }
};

// Coefficients of g(h(z)) exact through `order`. Both germs must carry at
// least `order` coefficients.
Germ compose(const Germ& g, const Germ& h, int order);

// Compositional inverse through `order`.
Germ invert_series(const Germ& g, int order);

// Successive tangent-to-identity changes z + c_l z^l, l = 2..k (index k+1 is
// resonant and skipped), each annihilating the z^{k+l} coefficient. Returns
// the 2k+1-jet normal form z + a1 z^{k+1} + b z^{2k+1} and the invariants
// with lambda = 2 pi i ((k+1)/2 - b/a1^2).
std::pair<Germ, FormalInvariants> normalize_extended(const Germ& g);

// Residue at 0 of 1/(f(z)-z), by series division.
cplx residual_index(const Germ& g);

cplx parse_complex(const std::string& text);
std::string format_complex(cplx v);

// cancellation-free complex log(1+w) and e^w - 1
cplx log1p_c(cplx w);
cplx expm1_c(cplx w);

}  // namespace orbitlens
