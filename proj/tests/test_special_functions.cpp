#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "casimir/detail/bessel_internal.hpp"
#include "casimir/special_functions.hpp"
#include "oracles.hpp"

using namespace casimir::special;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("bessel_j trivial values") {
    CHECK(bessel_j(0, 0.0) == 1.0);
    CHECK(bessel_j(1, 0.0) == 0.0);
    CHECK(bessel_j(5, 0.0) == 0.0);
    CHECK(std::abs(bessel_j(0, 2.404825557695773)) < 1e-10);
    CHECK_THROWS_AS(bessel_j(0, -1.0), std::domain_error);
    CHECK_THROWS_AS(bessel_j(-1, 1.0), std::domain_error);
}

TEST_CASE("bessel_j agrees with std::cyl_bessel_j across all regimes") {
    // libstdc++ loses about 1e-10 of the envelope for x > 100, so the
    // large-argument range is pinned against 40-digit values further down
    double worst = 0.0;
    for (int nu : {0, 1, 2, 3, 5, 10, 20, 50, 100, 200}) {
        for (double x : {1e-4, 0.01, 0.3, 1.0, 2.5, 7.0, 15.0, 24.9, 25.1, 40.0, 99.0}) {
            const double ref = std::cyl_bessel_j(static_cast<double>(nu), x);
            const double got = bessel_j(nu, x);
            // near a root, relative error is meaningless; compare to the local scale
            const double scale = std::max(std::abs(ref), 1e-3 * std::sqrt(2.0 / (3.14159 * std::max(x, 1.0))));
            if (std::abs(ref) < 1e-200) continue;
            worst = std::max(worst, std::abs(got - ref) / scale);
        }
    }
    CHECK(worst < 1e-11);
}

TEST_CASE("bessel_j at large arguments") {
    // 40-digit reference values (mpmath)
    const struct {
        int nu;
        double x, j;
    } ref[] = {
        {0, 150.0, -0.0007740903753942912469},  {0, 800.0, 0.008897445883816134779},
        {2, 150.0, -0.00009451180670874022378}, {20, 800.0, 0.001997899336893276762},
        {100, 800.0, 0.009601943233976237850},  {200, 1e4, -0.0003634005234268350737},
    };
    for (const auto& r : ref) {
        const double envelope = std::sqrt(2.0 / (oracle::pi * r.x));
        CHECK(std::abs(bessel_j(r.nu, r.x) - r.j) < 1e-12 * envelope);
    }
}

TEST_CASE("bessel_j matches the integral representation") {
    for (int n : {0, 1, 4, 9}) {
        for (double x : {0.5, 3.0, 12.0, 30.0}) {
            CHECK(std::abs(bessel_j(n, x) - oracle::bessel_j_integral(n, x)) < 1e-13);
        }
    }
}

TEST_CASE("evaluation routes agree in their overlap bands") {
    for (int nu : {0, 1, 3}) {
        for (double x : {0.2, 0.5}) {
            CHECK(rel(detail::bessel_j_series(nu, x), detail::bessel_j_miller(nu, x)) < 1e-13);
        }
    }
    for (int nu : {0, 1, 2, 4}) {
        for (double x : {25.0, 30.0, 45.0}) {
            int terms = 0;
            const double a = detail::bessel_j_asymptotic(nu, x, &terms);
            const double m = detail::bessel_j_miller(nu, x);
            CHECK(std::abs(a - m) < 1e-13);
            CHECK(terms > 0);
        }
    }
}

TEST_CASE("three-term recurrence holds on a grid") {
    for (int nu = 1; nu < 40; nu += 3) {
        for (double x = 0.5; x < 60.0; x += 1.7) {
            const double lhs = bessel_j(nu - 1, x) + bessel_j(nu + 1, x);
            const double rhs = 2.0 * nu / x * bessel_j(nu, x);
            const double scale = std::abs(bessel_j(nu - 1, x)) + std::abs(bessel_j(nu + 1, x)) + 1e-300;
            CHECK(std::abs(lhs - rhs) / scale < 1e-10);
        }
    }
}

TEST_CASE("bessel_j_prime") {
    CHECK(bessel_j_prime(0, 1.3) == doctest::Approx(-bessel_j(1, 1.3)).epsilon(1e-15));
    for (int nu : {1, 2, 7}) {
        for (double x : {0.7, 5.0, 33.0}) {
            CHECK(std::abs(bessel_j_prime(nu, x) - oracle::jprime(nu, x)) < 1e-12);
        }
    }
}

TEST_CASE("function zeros") {
    CHECK(bessel_j_zeros(0, 1).values[0] == doctest::Approx(2.404825557695773).epsilon(1e-14));
    CHECK(bessel_j_zeros(1, 1).values[0] == doctest::Approx(3.831705970207512).epsilon(1e-14));
    const auto z0 = bessel_j_zeros(0, 2).values;
    const auto z1 = bessel_j_zeros(1, 1).values;
    CHECK(z0[0] < z1[0]);
    CHECK(z1[0] < z0[1]);

    for (int nu : {0, 1, 2, 7, 30, 120}) {
        const auto zl = bessel_j_zeros(nu, 25);
        CHECK(zl.order == nu);
        CHECK(zl.kind == ZeroKind::Function);
        REQUIRE(zl.values.size() == 25);
        const auto ref = oracle::bessel_roots(nu, false, zl.values.back() + 0.5);
        REQUIRE(ref.size() >= 25);
        for (int k = 0; k < 25; ++k) {
            CHECK(std::abs(zl.values[k] - ref[k]) < 1e-10);
            CHECK(std::abs(bessel_j(nu, zl.values[k])) < 1e-9);
            if (k) CHECK(zl.values[k] > zl.values[k - 1]);
        }
    }
}

TEST_CASE("zeros interlace between consecutive orders") {
    for (int nu : {0, 3, 15}) {
        const auto a = bessel_j_zeros(nu, 20).values;
        const auto b = bessel_j_zeros(nu + 1, 20).values;
        for (int k = 0; k + 1 < 20; ++k) {
            CHECK(a[k] < b[k]);
            CHECK(b[k] < a[k + 1]);
        }
    }
}

TEST_CASE("derivative zeros") {
    CHECK(bessel_j_prime_zeros(1, 1).values[0] == doctest::Approx(1.841183781340659).epsilon(1e-14));
    CHECK(bessel_j_prime_zeros(0, 1).values[0] == doctest::Approx(3.831705970207512).epsilon(1e-14));
    CHECK(bessel_j_prime_zeros(2, 1).values[0] == doctest::Approx(3.054236928227140).epsilon(1e-14));
    const double lam1 = bessel_j_prime_zeros(1, 1).values[0];
    CHECK(std::round(lam1 * lam1 * 1000.0) / 1000.0 == doctest::Approx(3.390));

    for (int nu : {0, 1, 2, 9, 60}) {
        const auto zl = bessel_j_prime_zeros(nu, 20);
        CHECK(zl.kind == ZeroKind::Derivative);
        const auto ref = oracle::bessel_roots(nu, true, zl.values.back() + 0.5);
        REQUIRE(ref.size() >= 20);
        for (int k = 0; k < 20; ++k) {
            CHECK(std::abs(zl.values[k] - ref[k]) < 1e-10);
            CHECK(std::abs(bessel_j_prime(nu, zl.values[k])) < 1e-9);
        }
        if (nu >= 1) CHECK(zl.values[0] < bessel_j_zeros(nu, 1).values[0]);
    }
}

TEST_CASE("zeros below a bound") {
    const auto below = bessel_zeros_below(3, ZeroKind::Function, 30.0);
    const auto ref = oracle::bessel_roots(3, false, 30.0);
    REQUIRE(below.values.size() == ref.size());
    for (std::size_t k = 0; k < ref.size(); ++k) CHECK(std::abs(below.values[k] - ref[k]) < 1e-10);
    CHECK(bessel_zeros_below(50, ZeroKind::Function, 40.0).values.empty());
    CHECK(bessel_zeros_below(0, ZeroKind::Derivative, 3.8).values.empty());
    CHECK_THROWS(bessel_j_zeros(0, 0));
}

TEST_CASE("bessel_k values") {
    CHECK(bessel_k(0, 1.0) == doctest::Approx(0.42102443824070834).epsilon(1e-13));
    for (int a : {0, 1, 2}) {
        for (double x : {1e-6, 1e-3, 0.1, 0.7, 1.99, 2.0, 2.01, 5.0, 30.0, 200.0, 700.0}) {
            const double ref = std::cyl_bessel_k(static_cast<double>(a), x);
            CHECK(rel(bessel_k(a, x), ref) < 1e-12);
        }
        for (double x : {0.05, 1.0, 8.0, 40.0}) {
            CHECK(rel(bessel_k(a, x), oracle::bessel_k_integral(a, x)) < 1e-10);
        }
    }
}

TEST_CASE("bessel_k recurrence, asymptotics, positivity, monotonicity") {
    for (double x : {0.1, 1.0, 10.0}) {
        const double k2 = bessel_k(2, x);
        CHECK(std::abs(k2 - bessel_k(0, x) - 2.0 / x * bessel_k(1, x)) / k2 < 1e-12);
    }
    CHECK(std::abs(bessel_k(0, 50.0) * std::exp(50.0) * std::sqrt(100.0 / oracle::pi) - (1.0 - 1.0 / 400.0)) < 1e-4);
    for (int a : {0, 1, 2}) {
        double prev = bessel_k(a, 1e-4);
        for (double x = 0.01; x < 700.0; x *= 1.3) {
            const double v = bessel_k(a, x);
            CHECK(v > 0.0);
            CHECK(v < prev);
            prev = v;
        }
        CHECK(bessel_k(a, 800.0) == 0.0);
        const double mu = 4.0 * a * a;
        const double hankel = std::sqrt(oracle::pi / 1600.0) * (1.0 + (mu - 1.0) / 6400.0 + (mu - 1.0) * (mu - 9.0) / (2.0 * 6400.0 * 6400.0));
        CHECK(rel(bessel_k_scaled(a, 800.0), hankel) < 1e-9);
    }
    CHECK_THROWS_AS(bessel_k(0, 0.0), std::domain_error);
    CHECK_THROWS_AS(bessel_k(3, 1.0), std::domain_error);
}

TEST_CASE("zeta(3) constant") { CHECK(kZeta3 == doctest::Approx(std::riemann_zeta(3.0)).epsilon(1e-15)); }
