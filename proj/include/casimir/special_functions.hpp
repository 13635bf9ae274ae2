#pragma once

#include <vector>

namespace casimir::special {

/// Which function a ZeroList holds the roots of.
enum class ZeroKind { Function, Derivative };

/// Ascending positive roots of J_nu (or of J'_nu).
struct ZeroList {
    int order = 0;
    ZeroKind kind = ZeroKind::Function;
    std::vector<double> values;
};

/// Bessel function of the first kind J_nu(x) for integer nu >= 0, x >= 0.
///
/// Power series for x small against the order, Miller backward recurrence in
/// the transition and oscillatory ranges, and the Hankel asymptotic expansion
/// once x is large compared to both 25 and nu^2. Throws std::domain_error for
/// x < 0 or nu < 0.
double bessel_j(int nu, double x);

/// J'_nu(x) via (J_{nu-1} - J_{nu+1}) / 2, with J'_0 = -J_1.
double bessel_j_prime(int nu, double x);

/// First `count` positive zeros of J_nu.
ZeroList bessel_j_zeros(int nu, int count);

/// First `count` positive zeros of J'_nu. The trivial zero of J'_0 at x = 0 is
/// not reported.
ZeroList bessel_j_prime_zeros(int nu, int count);

/// All positive zeros of J_nu (or J'_nu) that are <= x_max, ascending.
ZeroList bessel_zeros_below(int nu, ZeroKind kind, double x_max);

/// Modified Bessel function K_alpha(x) for alpha in {0, 1, 2} and x > 0.
/// Returns 0 once the result underflows.
double bessel_k(int alpha, double x);

/// e^x K_alpha(x); finite for all x > 0.
double bessel_k_scaled(int alpha, double x);

/// Riemann zeta(3).
inline constexpr double kZeta3 = 1.2020569031595942853997;

}  // namespace casimir::special
