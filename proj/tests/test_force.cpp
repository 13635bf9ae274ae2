#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "casimir/force.hpp"
#include "casimir/special_functions.hpp"
#include "oracles.hpp"

using namespace casimir;

namespace {

const double pi = std::numbers::pi;

Spectrum circle(int n) { return combined_spectrum(Circle{1.0}, n); }

double zero_t_oracle(const Spectrum& s, double L) {
    double f = 0.0;
    for (const auto& m : s.modes) f += oracle::zero_t_mode(m.lambda, m.degeneracy, L);
    return f;
}

double finite_t_oracle(const Spectrum& s, double L, double beta) {
    double f = 0.0;
    for (const auto& m : s.modes) f += oracle::finite_t_mode(m.lambda, m.degeneracy, L, beta);
    return f;
}

double classical_oracle(const Spectrum& s, double L, double beta) {
    double f = 0.0;
    for (const auto& m : s.modes) f -= m.degeneracy * m.lambda / std::expm1(2.0 * L * m.lambda) / beta;
    return f;
}

}  // namespace

TEST_CASE("thermal state") {
    const auto th = ThermalState::from_beta(2.0, 3.0, 0.5);
    CHECK(th.inverse_wavelength() * th.beta * th.hbar_c() == doctest::Approx(2.0 * pi));
    CHECK(ThermalState::zero_temperature().inverse_wavelength() == 0.0);
    CHECK_FALSE(ThermalState::zero_temperature().finite());
    CHECK(ThermalState::from_inverse_wavelength(1.0).beta == doctest::Approx(2.0 * pi));
    CHECK(th.matsubara(3) == doctest::Approx(3.0 * th.inverse_wavelength()));
    CHECK(to_string(Regime::FiniteT) == "finite-T");
    CHECK(to_string(Regime::ZeroT) == "zero-T");
}

TEST_CASE("Matsubara mode sum matches the closed form") {
    for (double x = 1e-2; x <= 1e2; x *= 1.7) {
        for (double lambda : {0.3, 1.0, 4.0}) {
            const auto th = ThermalState::from_beta(x / lambda);
            CHECK(std::abs(matsubara_mode_sum(lambda, th) / matsubara_closed_form(lambda, th) - 1.0) < 1e-8);
            CHECK(matsubara_closed_form(lambda, th) == doctest::Approx(oracle::coth_form(lambda, th.beta)).epsilon(1e-13));
        }
    }
    const auto th = ThermalState::from_inverse_wavelength(1.0);
    CHECK(matsubara_mode_sum(1.0, th) == doctest::Approx(0.5 * (1.0 + 2.0 / std::expm1(2.0 * pi))).epsilon(1e-8));
}

TEST_CASE("Matsubara mode sum with an explicit cutoff") {
    const auto th = ThermalState::from_beta(0.7);
    // the tail correction leaves an error falling like the next omitted term
    const std::pair<long, double> bounds[] = {{1, 1e-4}, {3, 1e-6}, {10, 1e-8}, {100, 1e-12}};
    for (const auto& [m, bound] : bounds) {
        CHECK(std::abs(matsubara_mode_sum(2.0, th, m) / matsubara_closed_form(2.0, th) - 1.0) < bound);
    }
    // brute-force partial sum plus the exact remainder
    const double direct = oracle::matsubara_direct(2.0, 0.7, 2'000'000);
    CHECK(direct == doctest::Approx(matsubara_closed_form(2.0, th)).epsilon(1e-6));
    CHECK_THROWS_AS(matsubara_mode_sum(1.0, ThermalState::zero_temperature(), 10), std::domain_error);
    CHECK_THROWS_AS(matsubara_mode_sum(0.0, th, 10), std::invalid_argument);
}

TEST_CASE("Matsubara sum limits") {
    const auto cold = ThermalState::from_beta(1e4);
    CHECK(matsubara_mode_sum(1.0, cold) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(matsubara_mode_sum(0.5, cold) == doctest::Approx(2.0 * matsubara_mode_sum(1.0, cold)).epsilon(1e-12));
}

TEST_CASE("zero-T force matches the std::cyl_bessel_k oracle") {
    const auto s = circle(30);
    for (double L : {0.2, 0.5, 1.0, 3.0}) {
        const auto r = force_zero_T(s, L);
        CHECK(r.force == doctest::Approx(zero_t_oracle(s, L)).epsilon(1e-11));
        CHECK(r.regime == Regime::ZeroT);
        CHECK(r.n_modes_used == s.total_count());
        CHECK(r.tail_estimate <= 1e-10 * std::abs(r.force));
        CHECK(r.cutoff >= 1);
    }
    CHECK(force_zero_T(s, 0.5, {}, 2.5).force == doctest::Approx(2.5 * force_zero_T(s, 0.5).force).epsilon(1e-14));
}

TEST_CASE("finite-T force matches the direct double sum") {
    const auto s = circle(10);
    for (double beta : {0.5, 3.0}) {
        for (double L : {0.3, 1.0}) {
            const auto r = force_finite_T(s, L, ThermalState::from_beta(beta));
            CHECK(r.force == doctest::Approx(finite_t_oracle(s, L, beta)).epsilon(1e-9));
            CHECK(r.regime == Regime::FiniteT);
            CHECK(r.tail_estimate <= 1e-10 * std::abs(r.force));
        }
    }
}

TEST_CASE("classical force") {
    const auto s = circle(40);
    const auto r = force_classical(s, 0.4, 2.0);
    CHECK(r.force == doctest::Approx(classical_oracle(s, 0.4, 2.0)).epsilon(1e-13));
    CHECK(force_classical(s, 0.4, 4.0).force == doctest::Approx(0.5 * r.force).epsilon(1e-15));
    CHECK(r.regime == Regime::Classical);
}

TEST_CASE("finite-T tends to its zero-T and classical limits") {
    const auto s = circle(100);
    const double L = 0.5;
    const double f0 = force_zero_T(s, L).force;
    CHECK(std::abs(force_finite_T(s, L, ThermalState::from_inverse_wavelength(0.25)).force / f0 - 1.0) < 1e-3);
    const auto hot = ThermalState::from_inverse_wavelength(40.0);
    const double fc = force_classical(s, L, hot.beta).force;
    CHECK(std::abs(force_finite_T(s, L, hot).force / fc - 1.0) < 1e-3);
}

TEST_CASE("attraction and monotonicity in L") {
    const auto s = circle(50);
    const auto th = ThermalState::from_beta(1.5);
    double prev0 = -INFINITY, prevT = -INFINITY, prevC = -INFINITY;
    bool first = true;
    for (double L = 0.1; L < 4.0; L *= 1.4) {
        const double f0 = force_zero_T(s, L).force;
        const double fT = force_finite_T(s, L, th).force;
        const double fC = force_classical(s, L, th.beta).force;
        CHECK(f0 < 0.0);
        CHECK(fT < 0.0);
        CHECK(fC < 0.0);
        if (!first) {
            CHECK(std::abs(f0) < std::abs(prev0));
            CHECK(std::abs(fT) < std::abs(prevT));
            CHECK(std::abs(fC) < std::abs(prevC));
        }
        prev0 = f0;
        prevT = fT;
        prevC = fC;
        first = false;
    }
}

TEST_CASE("results do not depend on the worker count") {
    const auto s = circle(400);
    ForceOptions one, many;
    many.threads = 8;
    const auto th = ThermalState::from_beta(2.0);
    CHECK(force_zero_T(s, 0.2, one).force == force_zero_T(s, 0.2, many).force);
    CHECK(force_finite_T(s, 0.2, th, one).force == force_finite_T(s, 0.2, th, many).force);
    CHECK(force_classical(s, 0.2, 2.0, one).force == force_classical(s, 0.2, 2.0, many).force);
}

TEST_CASE("spectral tail estimate") {
    const auto s = circle(1000);
    const auto tight = force_zero_T(s, 0.05);
    CHECK_FALSE(tight.converged);
    CHECK(tight.spectral_tail < 0.0);
    // truncation plus its Weyl estimate lands near the parallel-plate value
    const double near = asymptote_near_T0(pi, 0.05);
    CHECK(std::abs((tight.force + tight.spectral_tail) / near - 1.0) < 0.01);
    const auto loose = force_zero_T(s, 0.5);
    CHECK(loose.converged);
    CHECK(std::abs(loose.spectral_tail) < 1e-3 * std::abs(loose.force));
}

TEST_CASE("argument validation") {
    const auto s = circle(5);
    Spectrum empty;
    CHECK_THROWS_AS(force_zero_T(empty, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(force_zero_T(s, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(force_zero_T(s, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(force_finite_T(s, 1.0, ThermalState::zero_temperature()), std::domain_error);
    CHECK_THROWS_AS(force_classical(s, 1.0, 0.0), std::exception);
    ForceOptions bad;
    bad.tol = 0.0;
    CHECK_THROWS_AS(force_zero_T(s, 1.0, bad), std::invalid_argument);
}

TEST_CASE("asymptotic forms") {
    CHECK(asymptote_near_T0(1.0, 1.0) == doctest::Approx(-pi * pi / 240.0).epsilon(1e-15));
    CHECK(asymptote_near_T0(1.0, 1.0) == doctest::Approx(-0.0411233516712056).epsilon(1e-12));
    CHECK(asymptote_near_T0(1.0, 2.0) == doctest::Approx(asymptote_near_T0(1.0, 1.0) / 16.0));
    CHECK(asymptote_near_T0(3.0, 1.0) == doctest::Approx(3.0 * asymptote_near_T0(1.0, 1.0)));
    const double l1 = std::sqrt(3.39);
    const double a = asymptote_far_T0(2, l1, 2.0), b = asymptote_far_T0(2, l1, 2.3);
    CHECK(b / a == doctest::Approx(std::exp(-2.0 * 0.3 * l1) * std::sqrt(2.0 / 2.3)).epsilon(1e-14));
    CHECK(asymptote_near_classical(1.0, 1.0, 1.0) == doctest::Approx(-std::riemann_zeta(3.0) / (4.0 * pi)).epsilon(1e-15));
    CHECK(asymptote_near_classical(1.0, 1.0, 1.0) == doctest::Approx(-0.0956566).epsilon(1e-6));
    CHECK(asymptote_near_classical(1.0, 2.0, 1.0) == doctest::Approx(asymptote_near_classical(1.0, 1.0, 1.0) / 8.0));
    CHECK(asymptote_far_classical(1, 10.0, 1.0, 1.0) == doctest::Approx(-10.0 * std::exp(-20.0)));
    CHECK(std::abs(asymptote_far_classical(1, 10.0, 1.0, 1.0)) < 1e-7);
    CHECK_THROWS_AS(asymptote_far_T0(1, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("single-mode zero-T force approaches the far form with the Bessel correction") {
    // one mode: F / F_far = 1 + 7/(16 L lambda) + O((L lambda)^-2)
    Spectrum one;
    one.modes.push_back({1.0, 1.0, 1, BoundaryCondition::Dirichlet, 0, 1, 0.0});
    one.sets = {BoundaryCondition::Dirichlet};
    one.area = 1.0;
    for (double L : {20.0, 50.0}) {
        const double ratio = force_zero_T(one, L).force / asymptote_far_T0(1, 1.0, L);
        CHECK(std::abs(ratio - 1.0 - 7.0 / (16.0 * L)) < 0.5 / (L * L));
    }
}

TEST_CASE("axial kernel") {
    const double L = 1.0, Q = 1.0;
    // against the direct sums
    const long N = 2000;
    const double direct = 2.0 / L * (N - Q * Q * oracle::axial_sum(Q, L, N)) -
                          2.0 / (10 * L) * (10 * N - Q * Q * oracle::axial_sum(Q, 10 * L, 10 * N));
    CHECK(axial_kernel_check(Q, L, N) == doctest::Approx(direct).epsilon(1e-10));
    const double coth_diff = -Q * (1.0 / std::tanh(L * Q) - 1.0 / std::tanh(10 * L * Q));
    CHECK(std::abs(regularized_axial_kernel(Q, L, 100000) - coth_diff) < 1e-4);
    CHECK(axial_kernel_limit(Q, L) == doctest::Approx(coth_diff + 1.0 / L - 1.0 / (10 * L)).epsilon(1e-14));
    CHECK(axial_kernel_check(Q, L, 10, 1) == 0.0);
    // deep in the exponential regime the kernel is -2 Q e^{-2 L Q} per plate
    const double deep = axial_kernel_limit(Q, 8.0) - (1.0 / 8.0 - 1.0 / 80.0);
    CHECK(deep == doctest::Approx(-2.0 * Q * std::exp(-16.0 * Q)).epsilon(1e-6));
    CHECK_THROWS_AS(axial_kernel_check(0.0, 1.0, 10), std::invalid_argument);
}

TEST_CASE("fluctuation variance") {
    CHECK(fluctuation_variance(-1.0) == 2.0);
    CHECK(fluctuation_variance(0.0) == 0.0);
    CHECK(fluctuation_variance(3.0) == fluctuation_variance(-3.0));
}
