#pragma once

#include <map>
#include <string>
#include <vector>

#include "orbitlens/eps_neighborhood.hpp"

namespace orbitlens {

// Monomial of a Chebyshev scale: x^alpha (-log x)^beta or e^{-c/x}.
struct ScaleMonomial {
    enum class Form { power_log, exponential };
    Form form = Form::power_log;
    double alpha = 0.0;  // power exponent, >= 0
    double beta = 0.0;   // (-log x) exponent
    double c = 0.0;      // e^{-c/x} rate, > 0

    static ScaleMonomial power_log(double a, double b) { return {Form::power_log, a, b, 0.0}; }
    static ScaleMonomial exponential(double c) { return {Form::exponential, 0.0, 0.0, c}; }

    double eval(double x) const;
    std::string str() const;
};

// strict "is less flat than" order; total on any builtin scale
bool flatter(const ScaleMonomial& a, const ScaleMonomial& b);   // a strictly flatter than b
bool less_flat(const ScaleMonomial& a, const ScaleMonomial& b); // a strictly less flat

struct ChebyshevScale {
    std::vector<ScaleMonomial> u;  // u0 < u1 < ... by increasing flatness
    std::string name;
    int size() const { return static_cast<int>(u.size()); }
};

// Builtins: power, power_odd, saddle_loop, two_saddle, abelian (alpha list),
// exp (c list). Spec strings: `power`, `saddle_loop:8`, `abelian:0.5,1,1.5`,
// `exp:1,2,3`, or an explicit monomial list `x^1*l^1,x^1,x^2*l^1,x^2`
// (l = -log x).
ChebyshevScale builtin_scale(const std::string& name, int length = 8,
                             const std::vector<double>& params = {});
ChebyshevScale parse_scale(const std::string& spec);

// Finite combination sum c x^alpha (-log x)^beta for the symbolic
// division-differentiation algorithm.
class PowerLogCombo {
public:
    PowerLogCombo() = default;
    static PowerLogCombo monomial(double alpha, double beta, double coeff = 1.0);
    void add_term(double alpha, double beta, double coeff);
    bool empty() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    double eval(double x) const;
    PowerLogCombo derivative() const;
    PowerLogCombo operator*(const PowerLogCombo& o) const;
    PowerLogCombo operator*(double s) const;
    PowerLogCombo operator-(const PowerLogCombo& o) const;
    // terms sorted by decreasing size near 0 (least flat first)
    std::vector<std::tuple<double, double, double>> sorted_terms() const;

private:
    std::map<std::pair<double, double>, double> terms_;  // (alpha, beta) -> coeff
};

// D_i(combo)(0) by the division and differentiation algorithm of the scale;
// all scale monomials must be of power-log form. Values of +-inf signal a
// combination less flat than u_i.
double gen_derivative_at_zero(const ChebyshevScale& scale, const PowerLogCombo& combo, int i);

// Solve u(x) = eps for x by bracketing bisection to relative 1e-12 (closed
// forms for pure powers and exponentials).
double invert_monomial(const ScaleMonomial& m, double eps);

struct ContentEstimate {
    double lower = 0.0;        // min ratio over the fit window
    double upper = 0.0;        // max ratio
    double trend_slope = 0.0;  // d log(ratio) / d log(-log eps)
};

// Generalized Minkowski content of a real-length sweep against one monomial:
// ratios |S_eps| / u^{-1}(eps).
ContentEstimate generalized_content(const EpsSweep& sweep, const ScaleMonomial& m);

struct CriticalOrderResult {
    int order = 0;               // largest index with content bounded away from 0
    bool beyond_truncation = false;
    std::vector<int> classes;    // per index: -1 to 0, 0 bounded, +1 to inf
};

// Decision rule: slope of log(ratio) against log(-log eps); below -0.1 means
// the content drops to 0, above +0.1 it grows, else bounded.
CriticalOrderResult critical_order(const EpsSweep& sweep, const ChebyshevScale& scale);

// Generator parser for real-line displacement combos: signed terms
// `[coef*]x^a[*l^b]` plus `exp(c)` for e^{-c/x}; `l` stands for -log x.
struct GeneratorTerm {
    bool exponential = false;
    double coeff = 1.0, alpha = 0.0, beta = 0.0, c = 0.0;
};
struct RealGenerator {
    std::vector<GeneratorTerm> terms;
    double eval(double x) const;          // g(x)
    double displacement(double x) const;  // x - g(x), exact when g = x - f
    std::string text;
};
RealGenerator parse_generator(const std::string& spec);

}  // namespace orbitlens
