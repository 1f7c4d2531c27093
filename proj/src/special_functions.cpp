#include "orbitlens/special_functions.hpp"

#include <cmath>

namespace orbitlens {

namespace {

// Lanczos g = 607/128, n = 15 coefficient set (relative error ~1e-15 on the
// right half plane).
constexpr double kLanczosG = 4.7421875;
constexpr double kLanczos[15] = {
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};

constexpr double kPi = 3.141592653589793238462643383279502884;

cplx lanczos_gamma_half_plane(cplx z) {
    // valid for Re(z) > 0.5; argument shifted by 1 internally
    z -= 1.0;
    cplx x = kLanczos[0];
    for (int i = 1; i < 15; ++i) x += kLanczos[i] / (z + static_cast<double>(i));
    cplx t = z + kLanczosG + 0.5;
    return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

}  // namespace

cplx gamma_fn(cplx z) {
    if (z.real() < 0.5) {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return kPi / (std::sin(kPi * z) * lanczos_gamma_half_plane(1.0 - z));
    }
    return lanczos_gamma_half_plane(z);
}

cplx log_gamma(cplx z) { return std::log(gamma_fn(z)); }

double gamma_fn(double x) { return gamma_fn(cplx(x, 0.0)).real(); }

cplx digamma(cplx z) {
    cplx acc = 0.0;
    while (z.real() < 8.0) {
        acc -= 1.0 / z;
        z += 1.0;
    }
    // six-term asymptotic tail
    cplx inv = 1.0 / z, inv2 = inv * inv;
    cplx r = std::log(z) - 0.5 * inv;
    const double b[6] = {1.0 / 12.0,  -1.0 / 120.0,   1.0 / 252.0,
                         -1.0 / 240.0, 1.0 / 132.0,   -691.0 / 32760.0};
    cplx p = inv2;
    for (int i = 0; i < 6; ++i) {
        r -= b[i] * p;
        p *= inv2;
    }
    return acc + r;
}

}  // namespace orbitlens
