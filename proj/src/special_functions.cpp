#include "casimir/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "casimir/detail/bessel_internal.hpp"

namespace casimir::special {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kEulerGamma = 0.57721566490153286061;

void check_order(int nu) {
    if (nu < 0) throw std::domain_error("Bessel order must be nonnegative, got " + std::to_string(nu));
}

void check_argument(double x) {
    if (!(x >= 0.0)) throw std::domain_error("Bessel J argument must be >= 0");
}

// Power series is cancellation-free while x^2/4 stays well below nu + 1.
bool series_regime(int nu, double x) { return x < 1e-3 || 0.25 * x * x < 0.25 * (nu + 1.0); }

// Hankel expansion terms shrink at least as 1/(2k) once x >= nu^2.
bool asymptotic_regime(int nu, double x) {
    return x >= 25.0 && x >= static_cast<double>(nu) * static_cast<double>(nu);
}

// Modified Bessel K_0, K_1 for 0 < x < 2 from the logarithmic series.
void k01_series(double x, double& k0, double& k1) {
    const double y = 0.25 * x * x;
    const double log_half = std::log(0.5 * x);

    double i0 = 0.0, i1_over = 0.0, s0 = 0.0, s1 = 0.0;
    double t = 1.0;       // y^k / (k!)^2
    double u = 1.0;       // y^k / (k! (k+1)!)
    double harmonic = 0;  // H_k
    for (int k = 0; k < 200; ++k) {
        if (k > 0) {
            t *= y / (static_cast<double>(k) * k);
            u *= y / (static_cast<double>(k) * (k + 1.0));
            harmonic += 1.0 / k;
        }
        const double harmonic_next = harmonic + 1.0 / (k + 1.0);
        i0 += t;
        i1_over += u;
        s0 += harmonic * t;
        s1 += (2.0 * (-kEulerGamma) + harmonic + harmonic_next) * u;
        if (t < kEps * 1e-2 * i0 && u < kEps * 1e-2 * i1_over) break;
    }
    const double i1 = 0.5 * x * i1_over;
    k0 = -(log_half + kEulerGamma) * i0 + s0;
    k1 = 1.0 / x + log_half * i1 - 0.25 * x * s1;
}

// e^x K_0(x), e^x K_1(x) for x >= 2: Steed's evaluation of the second
// continued fraction (Temme's normalisation, order 0).
void k01_scaled_cf(double x, double& k0s, double& k1s) {
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25;
    double q = a1, c = a1, a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 1; i < 100000; ++i) {
        a -= 2.0 * i;
        c = -a * c / (i + 1.0);
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < kEps * 0.5) break;
    }
    h *= a1;
    k0s = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
    k1s = k0s * (x + 0.5 - h) / x;
}

double bracket_function(int nu, ZeroKind kind, double x) {
    return kind == ZeroKind::Function ? bessel_j(nu, x) : bessel_j_prime(nu, x);
}

double refine_root(int nu, ZeroKind kind, double lo, double hi, double f_lo) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f_mid = bracket_function(nu, kind, mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Scan start lying strictly below the first positive zero.
double scan_start(int nu, ZeroKind kind) {
    (void)kind;
    return nu == 0 ? 1e-3 : static_cast<double>(nu);
}

// Consecutive zeros of J_nu and J'_nu are separated by more than 3 for every
// integer order, so a step of 0.5 can never skip a pair of roots.
constexpr double kScanStep = 0.5;
constexpr double kMinSpacing = 3.0;

template <typename Stop>
ZeroList collect_zeros(int nu, ZeroKind kind, Stop stop) {
    check_order(nu);
    ZeroList out{nu, kind, {}};
    double x = scan_start(nu, kind);
    double fx = bracket_function(nu, kind, x);
    while (!stop(out, x)) {
        const double next = x + kScanStep;
        const double fn = bracket_function(nu, kind, next);
        if (fn == 0.0 || (fn > 0.0) != (fx > 0.0)) {
            const double z = fn == 0.0 ? next : refine_root(nu, kind, x, next, fx);
            out.values.push_back(z);
            x = z + kMinSpacing;
            fx = bracket_function(nu, kind, x);
            continue;
        }
        x = next;
        fx = fn;
    }
    return out;
}

}  // namespace

namespace detail {

double bessel_j_series(int nu, double x) {
    if (x == 0.0) return nu == 0 ? 1.0 : 0.0;
    const double y = -0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= y / (static_cast<double>(k) * (nu + k));
        sum += term;
        if (std::abs(term) < kEps * 1e-2 * std::abs(sum)) break;
    }
    const double log_pref = nu * std::log(0.5 * x) - std::lgamma(nu + 1.0);
    return sum * std::exp(log_pref);
}

double bessel_j_miller(int nu, double x) {
    if (x == 0.0) return nu == 0 ? 1.0 : 0.0;
    const double big = std::max(static_cast<double>(nu), x);
    int start = static_cast<int>(big + 30.0 + std::sqrt(160.0 * big));
    start += start % 2;
    const double tox = 2.0 / x;
    double bjp = 0.0, bj = 1.0, ans = 0.0, norm = 0.0;
    for (int j = start; j > 0; --j) {
        const double bjm = j * tox * bj - bjp;
        bjp = bj;
        bj = bjm;
        if (std::abs(bj) > 1e250) {
            bj *= 1e-250;
            bjp *= 1e-250;
            ans *= 1e-250;
            norm *= 1e-250;
        }
        // bj now holds the unnormalised J_{j-1}
        if ((j - 1) % 2 == 0 && j - 1 > 0) norm += bj;
        if (j - 1 == nu) ans = bj;
    }
    norm = 2.0 * norm + bj;
    return ans / norm;
}

double bessel_j_asymptotic(int nu, double x, int* terms_used) {
    const double mu = 4.0 * nu * nu;
    double p = 1.0, q = 0.0;
    double t = 1.0;
    double last = std::numeric_limits<double>::infinity();
    int k = 1;
    for (; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        t *= (mu - odd * odd) / (k * 8.0 * x);
        const double mag = std::abs(t);
        if (mag > last) break;  // past the smallest term
        last = mag;
        // signs: P = t0 - t2 + t4 ..., Q = t1 - t3 + ...
        switch (k % 4) {
            case 0: p += t; break;
            case 1: q += t; break;
            case 2: p -= t; break;
            case 3: q -= t; break;
        }
        if (mag < kEps * 1e-3) break;
    }
    if (terms_used) *terms_used = k;
    const double chi = x - (0.5 * nu + 0.25) * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace detail

double bessel_j(int nu, double x) {
    check_order(nu);
    check_argument(x);
    if (series_regime(nu, x)) return detail::bessel_j_series(nu, x);
    if (asymptotic_regime(nu, x)) return detail::bessel_j_asymptotic(nu, x, nullptr);
    return detail::bessel_j_miller(nu, x);
}

double bessel_j_prime(int nu, double x) {
    check_order(nu);
    if (nu == 0) return -bessel_j(1, x);
    return 0.5 * (bessel_j(nu - 1, x) - bessel_j(nu + 1, x));
}

ZeroList bessel_zeros_below(int nu, ZeroKind kind, double x_max) {
    auto out = collect_zeros(nu, kind, [x_max](const ZeroList&, double x) { return x > x_max; });
    // the last bracket may straddle x_max
    while (!out.values.empty() && out.values.back() > x_max) out.values.pop_back();
    return out;
}

ZeroList bessel_j_zeros(int nu, int count) {
    if (count < 1) throw std::invalid_argument("zero count must be >= 1");
    return collect_zeros(nu, ZeroKind::Function, [count](const ZeroList& z, double) {
        return static_cast<int>(z.values.size()) >= count;
    });
}

ZeroList bessel_j_prime_zeros(int nu, int count) {
    if (count < 1) throw std::invalid_argument("zero count must be >= 1");
    return collect_zeros(nu, ZeroKind::Derivative, [count](const ZeroList& z, double) {
        return static_cast<int>(z.values.size()) >= count;
    });
}

double bessel_k_scaled(int alpha, double x) {
    if (alpha < 0 || alpha > 2) throw std::domain_error("bessel_k supports orders 0, 1, 2");
    if (!(x > 0.0)) throw std::domain_error("bessel_k argument must be > 0");
    double k0 = 0.0, k1 = 0.0;
    if (x < 2.0) {
        k01_series(x, k0, k1);
        const double e = std::exp(x);
        k0 *= e;
        k1 *= e;
    } else {
        k01_scaled_cf(x, k0, k1);
    }
    switch (alpha) {
        case 0: return k0;
        case 1: return k1;
        default: return k0 + 2.0 / x * k1;
    }
}

double bessel_k(int alpha, double x) {
    const double scaled = bessel_k_scaled(alpha, x);
    if (x > 745.0) return 0.0;
    return scaled * std::exp(-x);
}

}  // namespace casimir::special
