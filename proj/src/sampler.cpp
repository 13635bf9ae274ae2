#include "casimir/sampler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "casimir/numerics.hpp"

namespace casimir::langevin {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Batch means of k quantities, stored batch-major.
struct BatchSeries {
    int width = 0;
    std::vector<double> means;

    int batches() const { return width == 0 ? 0 : static_cast<int>(means.size()) / width; }
    double at(int batch, int q) const { return means[static_cast<std::size_t>(batch) * width + q]; }
};

Estimate batch_mean(const BatchSeries& s, int q) {
    const int n = s.batches();
    CompensatedSum sum;
    for (int b = 0; b < n; ++b) sum.add(s.at(b, q));
    const double mean = sum.value() / n;
    CompensatedSum sq;
    for (int b = 0; b < n; ++b) sq.add((s.at(b, q) - mean) * (s.at(b, q) - mean));
    const double var = n > 1 ? sq.value() / (n - 1) : 0.0;
    return {mean, std::sqrt(var / n)};
}

// Jackknife over batches of g(means of the quantities listed in `qs`).
Estimate jackknife(const BatchSeries& s, const std::vector<int>& qs, const std::function<double(const double*)>& g) {
    const int n = s.batches();
    const std::size_t k = qs.size();
    std::vector<double> totals(k, 0.0);
    for (int b = 0; b < n; ++b) {
        for (std::size_t i = 0; i < k; ++i) totals[i] += s.at(b, qs[i]);
    }
    std::vector<double> full(k);
    for (std::size_t i = 0; i < k; ++i) full[i] = totals[i] / n;
    const double value = g(full.data());
    if (n < 2) return {value, 0.0};
    std::vector<double> leave(k), replicas(n);
    for (int b = 0; b < n; ++b) {
        for (std::size_t i = 0; i < k; ++i) leave[i] = (totals[i] - s.at(b, qs[i])) / (n - 1);
        replicas[b] = g(leave.data());
    }
    double mean = 0.0;
    for (double r : replicas) mean += r;
    mean /= n;
    double acc = 0.0;
    for (double r : replicas) acc += (r - mean) * (r - mean);
    return {value, std::sqrt(acc * (n - 1) / n)};
}

// Integrated autocorrelation time (in steps) of an AR(1) chain with lag-one
// correlation e^{-a}.
double autocorrelation_steps(double a) { return (1.0 + std::exp(-a)) / -std::expm1(-a); }

struct ChainOutput {
    BatchSeries channels;     // 4 quantities per channel: phi, phi^2, phi^3, phi^4
    BatchSeries observables;  // Y, Y^2, X, X^2
};

}  // namespace

ModeChannel ou_step_exact(const ModeChannel& ch, double ds, double gaussian_deviate) {
    if (!(ch.kappa > 0.0) || !(ch.noise_strength > 0.0)) {
        throw std::invalid_argument("channel needs kappa > 0 and noise_strength > 0");
    }
    const double kT = 0.5 * ch.noise_strength;
    ModeChannel out = ch;
    const double decay = std::exp(-ch.kappa * ds);
    const double spread = std::sqrt(kT / ch.kappa * -std::expm1(-2.0 * ch.kappa * ds));
    out.phi = ch.phi * decay + gaussian_deviate * spread;
    return out;
}

double stationary_variance(double kappa, double kT) {
    if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
    return kT / kappa;
}

double NormalSource::uniform_open() {
    // 53 random bits mapped to (0, 1]
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double NormalSource::operator()() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open()));
    const double angle = 2.0 * std::numbers::pi * uniform_open();
    cached_ = r * std::sin(angle);
    has_cached_ = true;
    return r * std::cos(angle);
}

std::uint64_t chain_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master + 0x9E3779B97F4A7C15ull * (index + 1));
}

void validate(const SamplerConfig& cfg) {
    if (!(cfg.ds > 0.0) || !std::isfinite(cfg.ds)) throw std::invalid_argument("sampler ds must be positive");
    if (cfg.n_steps < 1) throw std::invalid_argument("sampler n_steps must be >= 1");
    if (cfg.burn_in < 0 || cfg.burn_in >= cfg.n_steps) throw std::invalid_argument("sampler burn_in must lie in [0, n_steps)");
    if (cfg.n_chains < 1) throw std::invalid_argument("sampler needs at least one chain");
    if (cfg.m_max < 0) throw std::invalid_argument("sampler m_max must be >= 0");
}

double Estimate::z(double expected) const {
    if (error > 0.0) return (value - expected) / error;
    return value == expected ? 0.0 : std::numeric_limits<double>::infinity();
}

std::vector<Channel> build_channels(const Spectrum& spec, const ThermalState& th, long m_max) {
    if (spec.empty()) throw std::invalid_argument("sampler needs a nonempty spectrum");
    if (m_max < 0) throw std::invalid_argument("m_max must be >= 0");
    const long m_limit = th.finite() ? m_max : 0;
    std::vector<Channel> out;
    for (std::size_t p = 0; p < spec.modes.size(); ++p) {
        const auto& mode = spec.modes[p];
        for (int copy = 0; copy < mode.degeneracy; ++copy) {
            for (long m = -m_limit; m <= m_limit; ++m) {
                const double w = th.matsubara(m);
                out.push_back({mode.lambda_sq + w * w, static_cast<int>(p), copy, m});
            }
        }
    }
    return out;
}

std::vector<double> piston_weights(const std::vector<Channel>& channels, double L) {
    if (!(L > 0.0)) throw std::invalid_argument("plate separation L must be positive");
    std::vector<double> w;
    w.reserve(channels.size());
    for (const auto& ch : channels) {
        const double q = std::sqrt(ch.kappa);
        w.push_back(-q * q * q / std::expm1(2.0 * L * q));
    }
    return w;
}

SamplerResult run_sampler(const std::vector<Channel>& channels, const std::vector<double>& weights, double kT,
                          const SamplerConfig& cfg) {
    validate(cfg);
    if (channels.empty()) throw std::invalid_argument("sampler needs at least one channel");
    if (weights.size() != channels.size()) throw std::invalid_argument("one weight per channel required");
    if (!(kT > 0.0)) throw std::invalid_argument("sampler temperature must be positive");
    double kappa_min = std::numeric_limits<double>::infinity();
    for (const auto& c : channels) {
        if (!(c.kappa > 0.0)) throw std::invalid_argument("channel kappa must be positive");
        kappa_min = std::min(kappa_min, c.kappa);
    }

    const std::size_t nch = channels.size();
    const double step = cfg.ds / kappa_min;
    const long batch_size = std::max(1L, static_cast<long>(std::ceil(20.0 * autocorrelation_steps(cfg.ds))));
    const long recorded = cfg.n_steps - cfg.burn_in;
    const long batches_per_chain = recorded / batch_size;
    if (batches_per_chain < 1) throw std::invalid_argument("sampler run too short for one batch");

    std::vector<double> decay(nch), spread(nch), amplitude(nch);
    const int sign = weights.front() < 0.0 ? -1 : 1;
    bool same_sign = true;
    for (std::size_t c = 0; c < nch; ++c) {
        decay[c] = std::exp(-channels[c].kappa * step);
        spread[c] = std::sqrt(kT / channels[c].kappa * -std::expm1(-2.0 * channels[c].kappa * step));
        amplitude[c] = std::sqrt(std::abs(weights[c]));
        if (weights[c] != 0.0 && (weights[c] < 0.0) != (sign < 0)) same_sign = false;
    }

    auto run_chain = [&](std::size_t chain) {
        NormalSource normal(chain_seed(cfg.seed, chain));
        std::vector<double> phi(nch, 0.0);
        ChainOutput out;
        out.channels.width = static_cast<int>(4 * nch);
        out.observables.width = 4;
        out.channels.means.reserve(static_cast<std::size_t>(batches_per_chain) * 4 * nch);
        std::vector<double> acc(4 * nch, 0.0);
        std::array<double, 4> obs{};
        long in_batch = 0;
        std::ostream* trace = chain == 0 ? cfg.trace : nullptr;
        for (long s = 0; s < cfg.burn_in + batches_per_chain * batch_size; ++s) {
            for (std::size_t c = 0; c < nch; ++c) phi[c] = phi[c] * decay[c] + normal() * spread[c];
            if (trace) {
                for (std::size_t c = 0; c < nch; ++c) *trace << s << ' ' << c << ' ' << phi[c] << '\n';
            }
            if (s < cfg.burn_in) continue;
            double y = 0.0, z = 0.0;
            for (std::size_t c = 0; c < nch; ++c) {
                const double p = phi[c], p2 = p * p;
                acc[4 * c] += p;
                acc[4 * c + 1] += p2;
                acc[4 * c + 2] += p2 * p;
                acc[4 * c + 3] += p2 * p2;
                y += weights[c] * p2;
                z += amplitude[c] * p;
            }
            const double x = sign * z * z;
            obs[0] += y;
            obs[1] += y * y;
            obs[2] += x;
            obs[3] += x * x;
            if (++in_batch == batch_size) {
                for (double v : acc) out.channels.means.push_back(v / batch_size);
                for (double v : obs) out.observables.means.push_back(v / batch_size);
                std::fill(acc.begin(), acc.end(), 0.0);
                obs.fill(0.0);
                in_batch = 0;
            }
        }
        return out;
    };

    const auto outputs = parallel_map<ChainOutput>(static_cast<std::size_t>(cfg.n_chains), cfg.threads, run_chain);
    BatchSeries chan{static_cast<int>(4 * nch), {}}, obs{4, {}};
    for (const auto& o : outputs) {
        chan.means.insert(chan.means.end(), o.channels.means.begin(), o.channels.means.end());
        obs.means.insert(obs.means.end(), o.observables.means.begin(), o.observables.means.end());
    }

    SamplerResult r;
    r.batch_size = batch_size;
    r.batches = obs.batches();
    r.samples_per_channel = static_cast<long>(r.batches) * batch_size;
    for (std::size_t c = 0; c < nch; ++c) {
        const int base = static_cast<int>(4 * c);
        ChannelStats st;
        st.kappa = channels[c].kappa;
        st.mean = batch_mean(chan, base);
        st.second = batch_mean(chan, base + 1);
        st.third = batch_mean(chan, base + 2);
        st.fourth = batch_mean(chan, base + 3);
        st.fourth_ratio = jackknife(chan, {base + 1, base + 3}, [](const double* m) { return m[1] / (m[0] * m[0]); });
        r.channels.push_back(st);
    }
    r.mode_sum = batch_mean(obs, 0);
    r.diagonal_variance = jackknife(obs, {0, 1}, [](const double* m) { return m[1] - m[0] * m[0]; });
    r.piston_available = same_sign;
    if (same_sign) {
        r.piston_variance = jackknife(obs, {2, 3}, [](const double* m) { return m[1] - m[0] * m[0]; });
        r.piston_ratio = jackknife(obs, {2, 3}, [](const double* m) { return (m[1] - m[0] * m[0]) / (m[0] * m[0]); });
    }
    return r;
}

namespace {

std::vector<double> expand_weights(const Spectrum& spec, const std::vector<Channel>& channels,
                                   const std::vector<double>& weights) {
    if (weights.size() == channels.size()) return weights;
    if (weights.size() == spec.modes.size()) {
        std::vector<double> out;
        out.reserve(channels.size());
        for (const auto& c : channels) out.push_back(weights[static_cast<std::size_t>(c.mode)]);
        return out;
    }
    throw std::invalid_argument("weights must have one entry per channel or per mode");
}

double temperature_of(const ThermalState& th) {
    if (!th.finite()) throw std::domain_error("the sampler needs a finite temperature");
    return 1.0 / th.beta;
}

}  // namespace

Estimate estimate_mode_sum(const Spectrum& spec, const ThermalState& th, const std::vector<double>& weights,
                           const SamplerConfig& cfg) {
    const double kT = temperature_of(th);
    const auto channels = build_channels(spec, th, cfg.m_max);
    const auto w = expand_weights(spec, channels, weights);
    if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) return {0.0, 0.0};
    return run_sampler(channels, w, kT, cfg).mode_sum;
}

Estimate estimate_force_fluctuation(const Spectrum& spec, const ThermalState& th, const std::vector<double>& weights,
                                    const SamplerConfig& cfg, Observable observable) {
    const double kT = temperature_of(th);
    const auto channels = build_channels(spec, th, cfg.m_max);
    const auto w = expand_weights(spec, channels, weights);
    if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) return {0.0, 0.0};
    const auto r = run_sampler(channels, w, kT, cfg);
    if (observable == Observable::Diagonal) return r.diagonal_variance;
    if (!r.piston_available) throw std::invalid_argument("piston observable needs weights of a single sign");
    return r.piston_variance;
}

bool CalibrationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CalibrationCheck& c) { return c.pass; });
}

CalibrationReport run_calibration(const SamplerConfig& cfg, double z_max) {
    validate(cfg);
    CalibrationReport report;
    auto add = [&](std::string name, const Estimate& e, double expected) {
        CalibrationCheck c;
        c.name = std::move(name);
        c.estimate = e.value;
        c.expected = expected;
        c.error = e.error;
        c.z = e.z(expected);
        c.pass = std::abs(c.z) <= z_max;
        report.checks.push_back(c);
    };
    auto suite_cfg = [&](std::uint64_t suite) {
        SamplerConfig c = cfg;
        c.seed = chain_seed(cfg.seed, 1000 + suite);
        c.trace = suite == 0 ? cfg.trace : nullptr;
        return c;
    };

    {
        // one channel, kappa = 1, k_B T = 1
        const auto r = run_sampler({{1.0, 0, 0, 0}}, {1.0}, 1.0, suite_cfg(0));
        const auto& st = r.channels.front();
        add("single.variance", st.second, stationary_variance(1.0, 1.0));
        add("single.fourth_ratio", st.fourth_ratio, 3.0);
        add("single.mean", st.mean, 0.0);
        add("single.third_moment", st.third, 0.0);
    }
    {
        // lambda = 1 with Matsubara channels |m| <= m_max at Lambda = 1
        const auto th = ThermalState::from_inverse_wavelength(1.0);
        Spectrum one;
        one.modes.push_back({1.0, 1.0, 1, BoundaryCondition::Dirichlet, 0, 1, 0.0});
        one.sets = {BoundaryCondition::Dirichlet};
        const auto channels = build_channels(one, th, cfg.m_max);
        const std::vector<double> w(channels.size(), 1.0);
        const auto r = run_sampler(channels, w, 1.0 / th.beta, suite_cfg(1));
        CompensatedSum expected;
        for (const auto& c : channels) expected.add(stationary_variance(c.kappa, 1.0 / th.beta));
        add("matsubara.mode_sum", r.mode_sum, expected.value());
    }
    {
        // two independent channels, equal weights
        const std::vector<Channel> channels = {{1.0, 0, 0, 0}, {3.0, 1, 0, 0}};
        const auto r = run_sampler(channels, {1.0, 1.0}, 1.0, suite_cfg(2));
        const double v1 = stationary_variance(1.0, 1.0), v2 = stationary_variance(3.0, 1.0);
        add("pair.diagonal_variance", r.diagonal_variance, 2.0 * (v1 * v1 + v2 * v2));
    }
    {
        // circular piston, R = 1, L = 0.5, Lambda = 2 pi
        const auto th = ThermalState::from_inverse_wavelength(2.0 * std::numbers::pi);
        const auto spec = combined_spectrum(Circle{1.0}, 2);
        const auto channels = build_channels(spec, th, cfg.m_max);
        const auto w = piston_weights(channels, 0.5);
        const auto r = run_sampler(channels, w, 1.0 / th.beta, suite_cfg(3));
        CompensatedSum mean;
        for (std::size_t c = 0; c < channels.size(); ++c) {
            mean.add(w[c] * stationary_variance(channels[c].kappa, 1.0 / th.beta));
        }
        add("piston.mean_force", r.mode_sum, mean.value());
        add("piston.variance_ratio", r.piston_ratio, 2.0);
    }
    return report;
}

}  // namespace casimir::langevin
