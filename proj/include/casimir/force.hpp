#pragma once

#include <cmath>
#include <limits>
#include <string_view>

#include "casimir/numerics.hpp"
#include "casimir/spectrum.hpp"

namespace casimir {

/// Temperature and unit system. Natural units (hbar = c = k_B = 1) unless the
/// caller sets hbar and c explicitly; k_B is folded into beta = 1/(k_B T).
struct ThermalState {
    double beta = std::numeric_limits<double>::infinity();
    double hbar = 1.0;
    double c = 1.0;

    static ThermalState zero_temperature(double hbar = 1.0, double c = 1.0);
    static ThermalState from_beta(double beta, double hbar = 1.0, double c = 1.0);
    /// beta for which the inverse thermal wavelength equals `lambda`.
    static ThermalState from_inverse_wavelength(double lambda, double hbar = 1.0, double c = 1.0);

    double hbar_c() const { return hbar * c; }
    bool finite() const { return std::isfinite(beta); }
    /// Inverse thermal wavelength 2 pi / (beta hbar c); zero at T = 0.
    double inverse_wavelength() const;
    /// Matsubara frequency omega_m = m * Lambda (1/length).
    double matsubara(long m) const { return static_cast<double>(m) * inverse_wavelength(); }
};

enum class Regime { FiniteT, ZeroT, Classical, AsymptoteNear, AsymptoteFar };
std::string_view to_string(Regime r);

/// Force on the piston plate. Negative values are attractive.
struct ForceResult {
    double force = 0.0;  // energy / length
    int n_modes_used = 0;
    long cutoff = 0;            // largest |m| (finite T) or image index n (T = 0) used
    double tail_estimate = 0.0; // bound on the truncated Matsubara / image tails
    double spectral_tail = 0.0; // Weyl estimate of the modes missing beyond the spectrum
    bool converged = true;      // |spectral_tail| <= spectral_tol |force|
    Regime regime = Regime::ZeroT;
};

struct ForceOptions {
    double tol = 1e-10;          // relative tolerance on the Matsubara and image sums
    double spectral_tol = 1e-3;  // relative size of spectral_tail accepted as converged
    unsigned threads = 1;        // worker threads over modes; the result does not depend on it
};

/// (1/beta) sum_{|m| <= m_max} 1/(lambda^2 + omega_m^2) plus an Euler-Maclaurin
/// tail for |m| > m_max. Equals (hbar c / 2 lambda) coth(beta hbar c lambda / 2).
double matsubara_mode_sum(double lambda, const ThermalState& th, long m_max);
/// Same with m_max picked so the tail correction is accurate to < 1e-12.
double matsubara_mode_sum(double lambda, const ThermalState& th);
/// Closed form (hbar c / 2 lambda) [1 + 2/(e^{beta hbar c lambda} - 1)].
double matsubara_closed_form(double lambda, const ThermalState& th);

/// F = -(1/beta) sum_p g_p sum_{m in Z} q / (e^{2 L q} - 1), q = sqrt(m^2 Lambda^2 + lambda_p^2).
ForceResult force_finite_T(const Spectrum& spec, double L, const ThermalState& th, const ForceOptions& opt = {});

/// F = -(hbar c / 2 pi) sum_p g_p sum_{n >= 1} lambda_p^2 [K_0(2 n L lambda_p) + K_2(2 n L lambda_p)].
ForceResult force_zero_T(const Spectrum& spec, double L, const ForceOptions& opt = {}, double hbar_c = 1.0);

/// F = -(1/beta) sum_p g_p lambda_p / (e^{2 L lambda_p} - 1).
ForceResult force_classical(const Spectrum& spec, double L, double beta, const ForceOptions& opt = {});

/// Parallel-plate limit -hbar c pi^2 A / (240 L^4).
double asymptote_near_T0(double area, double L, double hbar_c = 1.0);
/// Single-mode limit -(hbar c / (2 sqrt(pi L))) g_1 lambda_1^{3/2} e^{-2 L lambda_1}.
double asymptote_far_T0(int g1, double lambda1, double L, double hbar_c = 1.0);
/// -zeta(3) A / (4 beta pi L^3).
double asymptote_near_classical(double area, double L, double beta);
/// -(1/beta) g_1 lambda_1 e^{-2 L lambda_1}.
double asymptote_far_classical(int g1, double lambda1, double L, double beta);

/// Cut-off difference of the one-sided axial sums,
///   D = (2/L) sum_{n<=N} k^2/(Q^2+k^2) - (2/L') sum_{n<=10N} k'^2/(Q^2+k'^2),
/// with k = n pi / L, L' = 10 L. Both sums cover the same k range.
/// `ratio` generalises the factor 10 (L' = ratio L, N' = ratio N).
double axial_kernel_check(double Q, double L, long n_x, int ratio = 10);
/// D with its Q-independent part 1/L - 1/L' removed. Tends to
/// -Q (coth(L Q) - coth(L' Q)) as n_x grows.
double regularized_axial_kernel(double Q, double L, long n_x, int ratio = 10);
/// Exact n_x -> infinity limit of axial_kernel_check.
double axial_kernel_limit(double Q, double L, int ratio = 10);

/// Force variance sigma_F^2 = 2 F^2.
inline double fluctuation_variance(double force) { return 2.0 * force * force; }

}  // namespace casimir
