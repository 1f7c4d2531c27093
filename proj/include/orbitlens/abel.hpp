#pragma once

#include <functional>
#include <vector>

#include "orbitlens/germ.hpp"

namespace orbitlens {

// Difference equation H(f(z)) - H(z) = g(z) for a parabolic germ of
// multiplicity 2 with unit resonant coefficient (prenormalized). The right
// hand side may carry a constant term.
struct AbelProblem {
    Germ f;
    Series rhs;  // g(z) = alpha0 + alpha1 z + ...

    AbelProblem(Germ germ, Series g);
};

enum class PetalSide { plus, minus };
enum class IntersectionSide { up, low };

struct FormalAbelSolution {
    cplx pole_coeff{};  // the solution contains -pole_coeff / z
    cplx log_coeff{};   // ... + log_coeff * Log(z); alpha1 + alpha0 lambda/(2 pi i)
    Series power;       // constant-free power part
};

// Unique formal solution without the constant term, coefficients determined
// term by term from the difference equation.
FormalAbelSolution formal_solution(const AbelProblem& p, int order);

// Sectorial evaluator: H(z) = -pole/z + log_coeff Log(z) + R(z) with R the
// orbit series -sum delta(f^n z) (plus side) or +sum delta(f^-n z) (minus
// side), Richardson-accelerated in the iteration count. The plus side uses
// the Log branch with argument in (0, 2pi), the minus side the principal one.
class SectorialSolution {
public:
    SectorialSolution(AbelProblem p, PetalSide side);
    cplx eval(cplx z, double tol = 1e-9) const;
    cplx residual(cplx z, double tol = 1e-9) const;  // |H(f(z)) - H(z) - g(z)|
    PetalSide side() const { return side_; }
    cplx pole_coeff() const { return pole_; }
    cplx log_coeff() const { return logc_; }

private:
    AbelProblem p_;
    PetalSide side_;
    cplx pole_{}, logc_{};
    std::size_t budget_ = 1u << 17;
};

cplx sectorial_plus(const AbelProblem& p, cplx z, double tol = 1e-9);
cplx sectorial_minus(const AbelProblem& p, cplx z, double tol = 1e-9);

// Germ with a globally analytic Abel solution for the given right hand side:
// k >= 2: f = phi^{-1}(phi (1 + (k-1)/alpha_k g/phi^{k-1})^{1/(k-1)}),
// k in {0,1}: f = phi^{-1}(h^{-1}(h(phi) + g)), h = -alpha0/z + alpha1 Log z.
// Returns the truncated series with exact evaluators attached.
Germ build_solvable_germ(const Germ& phi, const Series& rhs, int k);

// The corresponding closed-form solution H.
std::function<cplx(cplx)> global_solution(const Germ& phi, const Series& rhs, int k);

// Principal initial-point-dependent parts of complex measures, through the
// sectorial solutions of H(f(z)) - H(z) = -z:
//   H^f(z)      = pi H_+(z) - pi/4 + i pi^2     on V_+,
//   H^{f^-1}(z) = z - pi H_-(z) + pi/4          on V_-.
cplx principal_part_plus(const Germ& f, cplx z, double tol = 1e-11);
cplx principal_part_minus(const Germ& f, cplx z, double tol = 1e-11);

// Closed-form difference of the sectorial 1-Abel solutions of the model
// z/(1-z): H_+ - H_- = 2 pi i e^{-2 pi i/z}/(1 - e^{-2 pi i/z}) on the upper
// component, H_- - H_+ = 2 pi i + 2 pi i e^{2 pi i/z}/(1 - e^{2 pi i/z}) on
// the lower one (equal to pi cot(pi/z) - i pi by the digamma reflection).
cplx model_cocycle(cplx z, IntersectionSide side);

struct MomentSample {
    cplx t;  // orbit-space coordinate e^{-2 pi i Psi_+(z)} (inverted on the up side)
    cplx h;  // cocycle value: g_inf(1/t) on up, g_0(t) on low (-2 pi i removed)
};
struct MomentSamples {
    std::vector<MomentSample> up, low;
};

// Samples of the 1-moment pair (g_inf, g_0): Psi_+ solves the Abel equation
// (rhs 1), h compares the sectorial 1-Abel solutions (rhs -z) across the
// petal intersections. Points with |Im Psi_+| < 2 are rejected as outside
// the Fourier bands.
MomentSamples moment_sample(const Germ& f, const std::vector<cplx>& points_up,
                            const std::vector<cplx>& points_low);

}  // namespace orbitlens
