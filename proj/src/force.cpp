#include "casimir/force.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "casimir/numerics.hpp"
#include "casimir/special_functions.hpp"

namespace casimir {

namespace {

constexpr long kMaxMatsubara = 100'000'000;
constexpr long kMaxImages = 10'000'000;

void require_gap(double L) {
    if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("plate separation L must be positive");
}

void require_spectrum(const Spectrum& spec) {
    if (spec.empty()) throw std::invalid_argument("force evaluation needs a nonempty spectrum");
}

void require_beta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw std::domain_error("beta must be positive and finite (use the T = 0 path for beta = inf)");
    }
}

// Per-mode kernel value and the bound on what its internal sum left out.
struct ModeSum {
    double value = 0.0;
    double tail = 0.0;
    long cutoff = 0;
};

// sum_{m in Z} q/(e^{2Lq}-1), q = sqrt(m^2 Lambda^2 + lambda^2).
ModeSum matsubara_kernel(double lambda, double lambda_T, double L, double tol) {
    const double b = 2.0 * L;
    auto term = [&](long m) {
        const double q = std::hypot(static_cast<double>(m) * lambda_T, lambda);
        return q / std::expm1(b * q);
    };
    CompensatedSum sum;
    sum.add(term(0));
    ModeSum out;
    for (long m = 1; m <= kMaxMatsubara; ++m) {
        const double t = 2.0 * term(m);
        sum.add(t);
        // sum_{m>M} f(q_m) <= (1/(M Lambda^2)) int_{q_M}^inf q^2 e^{-bq} dq / (1 - e^{-b q_M})
        const double qm = std::hypot(static_cast<double>(m) * lambda_T, lambda);
        const double integral = std::exp(-b * qm) * (qm * qm / b + 2.0 * qm / (b * b) + 2.0 / (b * b * b));
        const double bound = 2.0 * integral / (-std::expm1(-b * qm)) / (static_cast<double>(m) * lambda_T * lambda_T);
        const double total = sum.value();
        if (t <= tol * total && bound <= tol * total) {
            out.value = total;
            out.tail = bound;
            out.cutoff = m;
            return out;
        }
    }
    throw ToleranceError("Matsubara sum did not reach tolerance " + std::to_string(tol));
}

// sum_{n>=1} [K_0(n x) + K_2(n x)], x = 2 L lambda.
ModeSum image_kernel(double x, double tol) {
    CompensatedSum sum;
    ModeSum out;
    const double decay = std::exp(-x);
    for (long n = 1; n <= kMaxImages; ++n) {
        const double arg = static_cast<double>(n) * x;
        const double k2 = special::bessel_k(2, arg);
        const double t = special::bessel_k(0, arg) + k2;
        sum.add(t);
        const double total = sum.value();
        // K_2(y) e^y decreases, so each later term is <= 2 K_2(nx) e^{-(n'-n)x}.
        const double bound = 2.0 * k2 * decay / (-std::expm1(-x));
        if (t == 0.0 || (t <= tol * total && bound <= tol * total)) {
            out.value = total;
            out.tail = bound;
            out.cutoff = n;
            return out;
        }
    }
    throw ToleranceError("image sum did not reach tolerance " + std::to_string(tol));
}

// Gauss-Legendre, 8 nodes on [-1, 1].
constexpr std::array<double, 8> kGlNodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                            -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                            0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                              0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};

// Weyl estimate of the contribution of the modes beyond the end of each
// boundary-condition set: int_{lambda_last}^inf (A lambda / 2 pi) kernel(lambda).
template <typename Kernel>
double weyl_tail(const Spectrum& spec, double L, Kernel kernel) {
    double total = 0.0;
    const double width = 1.0 / (2.0 * L);
    for (auto bc : spec.sets) {
        double last = 0.0;
        for (const auto& m : spec.modes) {
            if (m.bc == bc) last = std::max(last, m.lambda);
        }
        if (last <= 0.0) continue;
        CompensatedSum acc;
        for (int panel = 0; panel < 4000; ++panel) {
            const double lo = last + panel * width;
            double piece = 0.0;
            for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
                const double lam = lo + 0.5 * width * (kGlNodes[i] + 1.0);
                piece += kGlWeights[i] * spec.area * lam / (2.0 * std::numbers::pi) * kernel(lam);
            }
            piece *= 0.5 * width;
            acc.add(piece);
            if (std::abs(piece) <= 1e-14 * std::abs(acc.value())) break;
        }
        total += acc.value();
    }
    return total;
}

template <typename ModeFn>
ForceResult reduce_modes(const Spectrum& spec, const ForceOptions& opt, Regime regime, double prefactor,
                         ModeFn mode_fn) {
    const auto per_mode = parallel_map<ModeSum>(spec.modes.size(), opt.threads,
                                                 [&](std::size_t i) { return mode_fn(spec.modes[i].lambda); });
    CompensatedSum force, tail;
    ForceResult out;
    for (std::size_t i = 0; i < per_mode.size(); ++i) {
        const double g = spec.modes[i].degeneracy;
        force.add(g * per_mode[i].value);
        tail.add(g * per_mode[i].tail);
        out.cutoff = std::max(out.cutoff, per_mode[i].cutoff);
        out.n_modes_used += spec.modes[i].degeneracy;
    }
    out.force = -prefactor * force.value();
    out.tail_estimate = prefactor * tail.value();
    out.regime = regime;
    return out;
}

void finish(ForceResult& r, double spectral_tail, const ForceOptions& opt) {
    r.spectral_tail = spectral_tail;
    r.converged = std::abs(spectral_tail) <= opt.spectral_tol * std::abs(r.force);
}

void require_options(const ForceOptions& opt) {
    if (!(opt.tol > 0.0) || !(opt.tol < 1.0)) throw std::invalid_argument("tolerance must lie in (0, 1)");
}

double coth(double x) { return 1.0 / std::tanh(x); }

}  // namespace

ThermalState ThermalState::zero_temperature(double hbar, double c) {
    return ThermalState{std::numeric_limits<double>::infinity(), hbar, c};
}

ThermalState ThermalState::from_beta(double beta, double hbar, double c) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    return ThermalState{beta, hbar, c};
}

ThermalState ThermalState::from_inverse_wavelength(double lambda, double hbar, double c) {
    if (!(lambda > 0.0)) throw std::invalid_argument("inverse thermal wavelength must be positive");
    return ThermalState{2.0 * std::numbers::pi / (lambda * hbar * c), hbar, c};
}

double ThermalState::inverse_wavelength() const {
    if (!finite()) return 0.0;
    return 2.0 * std::numbers::pi / (beta * hbar * c);
}

std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::FiniteT: return "finite-T";
        case Regime::ZeroT: return "zero-T";
        case Regime::Classical: return "classical";
        case Regime::AsymptoteNear: return "asymptote-near";
        case Regime::AsymptoteFar: return "asymptote-far";
    }
    return "unknown";
}

double matsubara_mode_sum(double lambda, const ThermalState& th, long m_max) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    require_beta(th.beta);
    if (m_max < 1) throw std::invalid_argument("m_max must be >= 1");
    const double lt = th.inverse_wavelength();
    const double l2 = lambda * lambda;
    auto f = [&](double m) { return 1.0 / (l2 + m * m * lt * lt); };

    CompensatedSum sum;
    for (long m = m_max; m >= 1; --m) sum.add(2.0 * f(static_cast<double>(m)));
    sum.add(f(0.0));

    // Euler-Maclaurin (midpoint form) for sum_{m > m_max} f(m).
    const double a = static_cast<double>(m_max) + 0.5;
    const double u = a * lt / lambda;
    const double s = lt / lambda;
    const double integral = std::atan(1.0 / u) / (lambda * lt);
    const double g1 = -2.0 * u / ((1.0 + u * u) * (1.0 + u * u));
    const double g3 = 24.0 * u * (1.0 - u * u) / std::pow(1.0 + u * u, 4);
    const double d1 = g1 * s / l2;
    const double d3 = g3 * s * s * s / l2;
    const double tail = integral + d1 / 24.0 - 7.0 * d3 / 5760.0;
    sum.add(2.0 * tail);
    return sum.value() / th.beta;
}

double matsubara_mode_sum(double lambda, const ThermalState& th) {
    require_beta(th.beta);
    const double ratio = lambda / th.inverse_wavelength();
    const long m_max = std::max(64L, static_cast<long>(std::ceil(8.0 * ratio)));
    return matsubara_mode_sum(lambda, th, m_max);
}

double matsubara_closed_form(double lambda, const ThermalState& th) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    const double x = th.beta * th.hbar_c() * lambda;
    const double bracket = std::isfinite(x) ? 1.0 + 2.0 / std::expm1(x) : 1.0;
    return th.hbar_c() / (2.0 * lambda) * bracket;
}

ForceResult force_finite_T(const Spectrum& spec, double L, const ThermalState& th, const ForceOptions& opt) {
    require_gap(L);
    require_spectrum(spec);
    require_beta(th.beta);
    require_options(opt);
    const double lt = th.inverse_wavelength();
    auto kernel = [&](double lambda) { return matsubara_kernel(lambda, lt, L, opt.tol); };
    auto r = reduce_modes(spec, opt, Regime::FiniteT, 1.0 / th.beta, kernel);
    finish(r, -weyl_tail(spec, L, [&](double lam) { return kernel(lam).value; }) / th.beta, opt);
    return r;
}

ForceResult force_zero_T(const Spectrum& spec, double L, const ForceOptions& opt, double hbar_c) {
    require_gap(L);
    require_spectrum(spec);
    require_options(opt);
    auto kernel = [&](double lambda) {
        auto s = image_kernel(2.0 * L * lambda, opt.tol);
        s.value *= lambda * lambda;
        s.tail *= lambda * lambda;
        return s;
    };
    const double pref = hbar_c / (2.0 * std::numbers::pi);
    auto r = reduce_modes(spec, opt, Regime::ZeroT, pref, kernel);
    finish(r, -pref * weyl_tail(spec, L, [&](double lam) { return kernel(lam).value; }), opt);
    return r;
}

ForceResult force_classical(const Spectrum& spec, double L, double beta, const ForceOptions& opt) {
    require_gap(L);
    require_spectrum(spec);
    require_beta(beta);
    require_options(opt);
    auto kernel = [&](double lambda) { return ModeSum{lambda / std::expm1(2.0 * L * lambda), 0.0, 0}; };
    auto r = reduce_modes(spec, opt, Regime::Classical, 1.0 / beta, kernel);
    finish(r, -weyl_tail(spec, L, [&](double lam) { return kernel(lam).value; }) / beta, opt);
    return r;
}

double asymptote_near_T0(double area, double L, double hbar_c) {
    require_gap(L);
    return -hbar_c * std::numbers::pi * std::numbers::pi * area / (240.0 * std::pow(L, 4));
}

double asymptote_far_T0(int g1, double lambda1, double L, double hbar_c) {
    require_gap(L);
    if (!(lambda1 > 0.0)) throw std::invalid_argument("lambda1 must be positive");
    return -hbar_c / (2.0 * std::sqrt(std::numbers::pi * L)) * g1 * std::pow(lambda1, 1.5) *
           std::exp(-2.0 * L * lambda1);
}

double asymptote_near_classical(double area, double L, double beta) {
    require_gap(L);
    require_beta(beta);
    return -special::kZeta3 * area / (4.0 * beta * std::numbers::pi * L * L * L);
}

double asymptote_far_classical(int g1, double lambda1, double L, double beta) {
    require_gap(L);
    require_beta(beta);
    if (!(lambda1 > 0.0)) throw std::invalid_argument("lambda1 must be positive");
    return -g1 * lambda1 * std::exp(-2.0 * L * lambda1) / beta;
}

double axial_kernel_check(double Q, double L, long n_x, int ratio) {
    if (!(Q > 0.0)) throw std::invalid_argument("Q must be positive");
    require_gap(L);
    if (n_x < 1 || ratio < 1) throw std::invalid_argument("n_x and ratio must be >= 1");
    // k^2/(Q^2+k^2) = 1 - Q^2/(Q^2+k^2); the constant parts are 2N/L on both
    // sides and cancel exactly.
    auto resolvent = [Q](double len, long n) {
        CompensatedSum s;
        const double step = std::numbers::pi / len;
        for (long i = n; i >= 1; --i) {
            const double k = static_cast<double>(i) * step;
            s.add(1.0 / (Q * Q + k * k));
        }
        return s.value();
    };
    const double L2 = ratio * L;
    const double near = 2.0 * Q * Q / L * resolvent(L, n_x);
    const double far = 2.0 * Q * Q / L2 * resolvent(L2, n_x * ratio);
    return far - near;
}

double regularized_axial_kernel(double Q, double L, long n_x, int ratio) {
    return axial_kernel_check(Q, L, n_x, ratio) - (1.0 / L - 1.0 / (ratio * L));
}

double axial_kernel_limit(double Q, double L, int ratio) {
    const double L2 = ratio * L;
    return -Q * (coth(L * Q) - coth(L2 * Q)) + 1.0 / L - 1.0 / L2;
}

}  // namespace casimir
