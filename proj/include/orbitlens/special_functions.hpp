#pragma once

#include <complex>

namespace orbitlens {

using cplx = std::complex<double>;

// Lanczos approximation, relative error below 1e-12 on the right half plane;
// reflection formula elsewhere.
cplx gamma_fn(cplx z);
cplx log_gamma(cplx z);
double gamma_fn(double x);

// Recurrence to Re(z) >= 8, then the asymptotic series.
cplx digamma(cplx z);

}  // namespace orbitlens
