#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "casimir/spectrum.hpp"
#include "oracles.hpp"

using namespace casimir;

namespace {

std::vector<double> expand(const Spectrum& s, BoundaryCondition bc) {
    std::vector<double> out;
    for (const auto& m : s.modes) {
        if (m.bc != bc) continue;
        for (int g = 0; g < m.degeneracy; ++g) out.push_back(m.lambda);
    }
    return out;
}

}  // namespace

TEST_CASE("boundary condition names") {
    CHECK(to_string(BoundaryCondition::Dirichlet) == "dirichlet");
    CHECK(parse_boundary_condition("Neumann") == BoundaryCondition::Neumann);
    CHECK(parse_boundary_condition("TM") == BoundaryCondition::Dirichlet);
    CHECK(parse_boundary_condition("te") == BoundaryCondition::Neumann);
    CHECK_THROWS_AS(parse_boundary_condition("robin"), std::invalid_argument);
}

TEST_CASE("circle lowest modes") {
    const auto s = combined_spectrum(Circle{1.0}, 1);
    REQUIRE(!s.modes.empty());
    CHECK(s.modes[0].bc == BoundaryCondition::Neumann);
    CHECK(s.modes[0].lambda_sq == doctest::Approx(3.390).epsilon(1e-3));
    CHECK(s.modes[0].degeneracy == 2);
    const auto d = circle_spectrum(1.0, 1, BoundaryCondition::Dirichlet);
    CHECK(d.modes[0].lambda == doctest::Approx(2.404825557695773).epsilon(1e-14));
    CHECK(d.modes[0].lambda_sq == doctest::Approx(5.783185962946785).epsilon(1e-14));
}

TEST_CASE("circle spectrum matches the brute-force disk oracle") {
    for (bool neumann : {false, true}) {
        const auto bc = neumann ? BoundaryCondition::Neumann : BoundaryCondition::Dirichlet;
        const auto s = circle_spectrum(1.0, 300, bc);
        const auto got = expand(s, bc);
        CHECK(got.size() >= 300);
        CHECK(got.size() <= 301);  // a degenerate pair may straddle the cutoff
        const auto ref = oracle::disk_modes(neumann, got.back() + 1e-9);
        std::vector<double> ref_expanded;
        for (auto [l, g] : ref) {
            for (int k = 0; k < g; ++k) ref_expanded.push_back(l);
        }
        REQUIRE(ref_expanded.size() == got.size());
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - ref_expanded[i]) < 1e-10);
    }
}

TEST_CASE("circle eigenvalues scale as 1/R") {
    const auto a = circle_spectrum(1.0, 50, BoundaryCondition::Neumann);
    const auto b = circle_spectrum(2.5, 50, BoundaryCondition::Neumann);
    REQUIRE(a.modes.size() == b.modes.size());
    for (std::size_t i = 0; i < a.modes.size(); ++i) {
        CHECK(b.modes[i].lambda_sq == doctest::Approx(a.modes[i].lambda_sq / 6.25).epsilon(1e-14));
        CHECK(b.modes[i].degeneracy == a.modes[i].degeneracy);
    }
}

TEST_CASE("rectangle spectrum") {
    const double pi = std::numbers::pi;
    CHECK(rectangle_spectrum(pi, pi, 1, BoundaryCondition::Dirichlet).modes[0].lambda_sq == doctest::Approx(2.0));
    const auto n = combined_spectrum(Rectangle{pi, pi}, 1);
    CHECK(n.modes[0].bc == BoundaryCondition::Neumann);
    CHECK(n.modes[0].lambda_sq == doctest::Approx(1.0));
    CHECK(n.modes[0].degeneracy == 2);  // (1,0) and (0,1) on a square

    for (bool neumann : {false, true}) {
        const auto bc = neumann ? BoundaryCondition::Neumann : BoundaryCondition::Dirichlet;
        const auto s = rectangle_spectrum(1.0, 1.7, 200, bc);
        const auto got = expand(s, bc);
        const auto ref = oracle::rectangle_lambdas(1.0, 1.7, neumann, got.back() + 1e-9);
        REQUIRE(ref.size() == got.size());
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-13));
    }
}

TEST_CASE("Dirichlet ground state lies above the Neumann one") {
    for (CrossSection cs : {CrossSection{Circle{1.3}}, CrossSection{Rectangle{1.0, 2.0}}}) {
        const double d = single_spectrum(cs, 1, BoundaryCondition::Dirichlet).modes[0].lambda;
        const double n = single_spectrum(cs, 1, BoundaryCondition::Neumann).modes[0].lambda;
        CHECK(d > n);
    }
}

TEST_CASE("ordering, counts and tie breaking") {
    const auto s = combined_spectrum(Circle{1.0}, 200);
    CHECK(s.count(BoundaryCondition::Dirichlet) >= 200);
    CHECK(s.count(BoundaryCondition::Dirichlet) <= 201);
    CHECK(s.count(BoundaryCondition::Neumann) >= 200);
    CHECK(s.total_count() == s.count(BoundaryCondition::Dirichlet) + s.count(BoundaryCondition::Neumann));
    for (std::size_t i = 1; i < s.modes.size(); ++i) {
        const auto& a = s.modes[i - 1];
        const auto& b = s.modes[i];
        CHECK(a.lambda <= b.lambda);
        if (a.lambda == b.lambda) CHECK((a.bc == BoundaryCondition::Dirichlet || b.bc == BoundaryCondition::Neumann));
    }
    // J_0' = -J_1: Neumann nu = 0 and Dirichlet nu = 1 coincide, Dirichlet first
    const auto c = combined_spectrum(Circle{1.0}, 5);
    bool found = false;
    for (std::size_t i = 1; i < c.modes.size(); ++i) {
        if (std::abs(c.modes[i].lambda - 3.831705970207512) < 1e-12 && c.modes[i].bc == BoundaryCondition::Neumann) {
            CHECK(c.modes[i - 1].bc == BoundaryCondition::Dirichlet);
            CHECK(c.modes[i - 1].lambda == doctest::Approx(c.modes[i].lambda).epsilon(1e-12));
            found = true;
        }
    }
    CHECK(found);

    // a square merges (p, q) and (q, p); every group is reported once
    const auto sq = rectangle_spectrum(1.0, 1.0, 40, BoundaryCondition::Dirichlet);
    for (std::size_t i = 1; i < sq.modes.size(); ++i) CHECK(sq.modes[i].lambda > sq.modes[i - 1].lambda * (1 + 1e-12));
}

TEST_CASE("degenerate groups are never split at the cutoff") {
    const auto s = circle_spectrum(1.0, 2, BoundaryCondition::Dirichlet);
    // 2.405 (g = 1), then 3.832 (g = 2): asking for 2 keeps the whole pair
    CHECK(s.count(BoundaryCondition::Dirichlet) == 3);
    CHECK(s.n_requested == 2);
}

TEST_CASE("Weyl law deviation") {
    const auto c = combined_spectrum(Circle{1.0}, 1000);
    const auto r = combined_spectrum(Rectangle{std::sqrt(std::numbers::pi), std::sqrt(std::numbers::pi)}, 1000);
    CHECK(weyl_deviation(c) <= 0.1);
    CHECK(weyl_deviation(r) <= 0.1);
    const auto c2 = combined_spectrum(Circle{2.0}, 1000);
    CHECK(weyl_deviation(c2) == doctest::Approx(weyl_deviation(c)).epsilon(1e-10));
    CHECK_THROWS_AS(weyl_deviation(combined_spectrum(Circle{1.0}, 20)), std::invalid_argument);
}

TEST_CASE("cross-section validation") {
    CHECK_THROWS_AS(validate(CrossSection{Circle{-1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(validate(CrossSection{Rectangle{1.0, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(circle_spectrum(1.0, 0, BoundaryCondition::Dirichlet), std::invalid_argument);
    CHECK(area(CrossSection{Circle{2.0}}) == doctest::Approx(4.0 * std::numbers::pi));
    CHECK(reference_length(CrossSection{Circle{2.0}}) == 2.0);
    CHECK(reference_length(CrossSection{Rectangle{std::numbers::pi, 1.0}}) == doctest::Approx(1.0));
}
