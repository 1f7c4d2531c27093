#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "orbitlens/eps_neighborhood.hpp"

namespace orbitlens {

enum class SweepColumn { area, complex_measure, directed_area, length };

struct FitDiagnostics {
    double residual_rel = 0.0;  // rms residual / rms signal
    double condition = 0.0;
    bool low_confidence = false;
};

// A single development term coeff * eps^exponent * (log eps)^{0,1}.
struct TermSpec {
    double exponent = 0.0;
    bool with_log = false;
    cplx coeff{};
};

// Complex least squares of column values against basis terms over the
// smallest-eps `window_decades` of the grid, after subtracting `known`.
// Returns the fitted coefficients in basis order.
std::vector<cplx> fit_terms(const EpsSweep& sweep, SweepColumn col,
                            const std::vector<TermSpec>& known,
                            const std::vector<TermSpec>& basis, double window_decades,
                            FitDiagnostics* diag = nullptr);

// d = N - s with s the log-log slope over the final decade, Richardson
// extrapolated against 1/log(eps); N = 2 for areas, 1 for lengths.
double fit_box_dimension(const EpsSweep& sweep, FitDiagnostics* diag = nullptr);

// limit of area / eps^{2-d}
double fit_minkowski_content(const EpsSweep& sweep, double d, FitDiagnostics* diag = nullptr);

// limit of directed area / eps^{1 + 1/(k+1)}
cplx fit_directed_content(const EpsSweep& sweep, int k, FitDiagnostics* diag = nullptr);

// coefficient of eps^e log(eps) after subtracting the known terms
cplx fit_log_coefficient(const EpsSweep& sweep, SweepColumn col, double e,
                         const std::vector<TermSpec>& known, FitDiagnostics* diag = nullptr);

// coefficient of eps^2 log(eps) of the directed area (k > 1), peeling the
// supplied lower-order terms and fitting the rest of the development ladder
cplx fit_residual_content(const EpsSweep& sweep, int k, const std::vector<TermSpec>& known,
                          FitDiagnostics* diag = nullptr);

// eps^2 coefficient of the complex measure at a fixed initial point
cplx fit_principal_part(const EpsSweep& sweep, int k, const std::vector<TermSpec>& known,
                        FitDiagnostics* diag = nullptr);

struct OracleCoefficients {
    int k = 0;
    cplx nu_a{};
    cplx k1{};              // directed Minkowski content
    cplx kk1{};             // eps^2 log eps coefficient of the directed area (k > 1)
    bool kk1_complete = false;  // exact only when a_2..a_k vanish
    // boundary case k = 1 (area and complex measure developments)
    double area_lead = 0.0;  // eps^{3/2} coefficient of the area
    double area_log = 0.0;   // eps^2 log eps coefficient of the area
    cplx cm_log{};           // eps^2 log eps coefficient of the complex measure
    cplx cm_52_log{};        // eps^{5/2} log eps coefficient of the complex measure
};

// Closed-form predictions evaluated from the exact formal invariants of a
// known germ, for the orbit in the given attracting sector.
OracleCoefficients oracle_coefficients(const Germ& g, int direction_index);

// Gamma-expression building blocks shared with the classifier.
double k1_magnitude(int k, double a1_abs);        // |K_1|
double a1_abs_from_content(int k, double content);  // inverse of k1_magnitude
double kk1_im_channel(int k, double a1_abs);      // weight of Im(lambda/2 pi i) in K_{k+1}/nu_A
cplx kk1_from_lambda(int k, cplx a1, cplx lambda, cplx nu_a);

struct FractalReport {
    double dim_b = 0.0;
    int k = 0;
    double minkowski_content = 0.0;
    cplx directed_content{};  // K_1
    cplx residual_content{};  // K_{k+1}
    cplx principal_part{};    // H at the sweep's initial point
    FitDiagnostics diagnostics;
    bool have_residual = false;
    bool have_principal = false;
    // k = 1 extraction route
    double area_log_coeff = 0.0;
    cplx cm_log_coeff{};
    cplx cm_52_log_coeff{};
};

// Full extraction pipeline over one complex sweep. When the germ is known its
// oracle coefficients are peeled before the higher fits (documented mode);
// otherwise sequentially fitted terms are peeled.
FractalReport fractal_report(const EpsSweep& sweep, const Germ* known_germ = nullptr,
                             int direction_index = 0);

// Formal invariant lambda read off orbit geometry: the log n coefficient of
// the Fatou variable w_n = (z_n/A)^{-k} equals lambda/(2 pi i k). The germ is
// first reduced to its extended normal form (an exact series computation, and
// lambda is a formal invariant), whose orbit has a sparse integer correction
// ladder; a Richardson tableau over doubling indices then isolates the log
// coefficient. Accuracy ~1e-7 for k in 2..4.
cplx lambda_from_orbit(const Germ& g, int direction_index, double* err_est = nullptr);

}  // namespace orbitlens
