#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "casimir/force.hpp"
#include "casimir/spectrum.hpp"

namespace casimir::langevin {

/// One coefficient phi_{nm} of the field and the linear pseudo-time dynamics
/// d phi / ds = -kappa phi + eta with <eta eta> = noise_strength delta(s - s').
struct ModeChannel {
    double kappa = 1.0;           // lambda_n^2 + omega_m^2, 1/length^2
    double noise_strength = 2.0;  // 2 k_B T
    double phi = 0.0;
};

/// Exact one-step law of the Ornstein-Uhlenbeck process:
/// phi' = phi e^{-kappa ds} + xi sqrt((k_B T / kappa)(1 - e^{-2 kappa ds})).
ModeChannel ou_step_exact(const ModeChannel& ch, double ds, double gaussian_deviate);

/// Stationary variance k_B T / kappa.
double stationary_variance(double kappa, double kT);

/// Standard normal deviates from a 64-bit Mersenne Twister (bit-exact by the
/// C++ standard) through the Box-Muller transform, which is fixed here rather
/// than left to std::normal_distribution.
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : engine_(seed) {}
    double operator()();

private:
    double uniform_open();  // (0, 1]

    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// Seed of chain `index`, split from `master` with the SplitMix64 finaliser.
std::uint64_t chain_seed(std::uint64_t master, std::uint64_t index);

struct SamplerConfig {
    std::uint64_t seed = 42;
    double ds = 0.5;          // pseudo-time step in units of 1/kappa_min
    long n_steps = 50'000;    // per chain, burn-in included
    long burn_in = 1'000;
    int n_chains = 4;
    long m_max = 4;           // Matsubara channels |m| <= m_max
    unsigned threads = 1;
    std::ostream* trace = nullptr;  // "step channel phi" rows of chain 0
};

void validate(const SamplerConfig& cfg);

/// A (mode, degeneracy copy, Matsubara index) triple with its relaxation rate.
struct Channel {
    double kappa = 0.0;
    int mode = 0;
    int copy = 0;
    long m = 0;
};

/// Channels of every mode copy and |m| <= m_max, mode-major order.
std::vector<Channel> build_channels(const Spectrum& spec, const ThermalState& th, long m_max);

/// Per-channel weights w = -q^3 / (e^{2 L q} - 1), q = sqrt(kappa), chosen so
/// that sum_c w_c k_B T / kappa_c is the piston force restricted to the
/// channel set.
std::vector<double> piston_weights(const std::vector<Channel>& channels, double L);

struct Estimate {
    double value = 0.0;
    double error = 0.0;  // one standard error
    double z(double expected) const;
};

struct ChannelStats {
    double kappa = 0.0;
    Estimate mean;    // <phi>
    Estimate second;  // <phi^2>
    Estimate third;   // <phi^3>
    Estimate fourth;  // <phi^4>
    Estimate fourth_ratio;  // <phi^4> / <phi^2>^2
};

enum class Observable {
    Diagonal,  // Y = sum_c w_c phi_c^2
    Piston,    // X = s (sum_c sqrt|w_c| phi_c)^2, all weights of sign s
};

struct SamplerResult {
    std::vector<ChannelStats> channels;
    Estimate mode_sum;            // <Y> = <X>
    Estimate diagonal_variance;   // Var Y
    Estimate piston_variance;     // Var X (only when weights share a sign)
    Estimate piston_ratio;        // Var X / <X>^2
    bool piston_available = false;
    long samples_per_channel = 0;
    int batches = 0;
    long batch_size = 0;
};

/// Runs cfg.n_chains independent chains over `channels` at temperature kT and
/// collects time averages after burn-in. Standard errors come from batch
/// means (jackknife over batches for ratios and variances).
SamplerResult run_sampler(const std::vector<Channel>& channels, const std::vector<double>& weights, double kT,
                          const SamplerConfig& cfg);

/// sum_c w_c <phi_c^2> over the channels of `spec`. `weights` holds one value
/// per channel, or one per mode applied to all of its channels.
Estimate estimate_mode_sum(const Spectrum& spec, const ThermalState& th, const std::vector<double>& weights,
                           const SamplerConfig& cfg);

/// Variance of the force observable built from `weights`.
Estimate estimate_force_fluctuation(const Spectrum& spec, const ThermalState& th, const std::vector<double>& weights,
                                    const SamplerConfig& cfg, Observable observable = Observable::Piston);

/// One line of the calibration report.
struct CalibrationCheck {
    std::string name;
    double estimate = 0.0;
    double expected = 0.0;
    double error = 0.0;  // one standard error
    double z = 0.0;
    bool pass = false;
};

struct CalibrationReport {
    std::vector<CalibrationCheck> checks;
    bool all_pass() const;
};

/// Variance, fourth-moment, odd-moment, Matsubara mode-sum, two-channel and
/// piston-fluctuation checks, each judged at |z| <= z_max.
CalibrationReport run_calibration(const SamplerConfig& cfg, double z_max = 3.0);

}  // namespace casimir::langevin
