#include "casimir/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "casimir/special_functions.hpp"

namespace casimir {

namespace {

constexpr double kDegeneracyTolerance = 1e-12;

bool mode_less(const TransverseMode& a, const TransverseMode& b) {
    return std::tie(a.lambda, a.bc, a.index_1, a.index_2) < std::tie(b.lambda, b.bc, b.index_1, b.index_2);
}

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw std::invalid_argument(std::string(name) + " must be positive and finite");
    }
}

void require_count(int n) {
    if (n < 1) throw std::invalid_argument("mode count must be >= 1");
}

TransverseMode make_mode(double lambda_sq, int g, BoundaryCondition bc, int i1, int i2) {
    TransverseMode m;
    m.lambda_sq = lambda_sq;
    m.lambda = std::sqrt(lambda_sq);
    m.degeneracy = g;
    m.bc = bc;
    m.index_1 = i1;
    m.index_2 = i2;
    return m;
}

// Sorts, merges coincident eigenvalues of the same boundary condition and keeps
// the smallest modes until `n` are covered counting degeneracy. A degenerate
// group straddling the cut is kept whole.
std::vector<TransverseMode> normalise(std::vector<TransverseMode> modes, int n) {
    std::sort(modes.begin(), modes.end(), [](const TransverseMode& a, const TransverseMode& b) {
        return std::tie(a.bc, a.lambda_sq, a.index_1, a.index_2) < std::tie(b.bc, b.lambda_sq, b.index_1, b.index_2);
    });
    std::vector<TransverseMode> merged;
    for (const auto& m : modes) {
        if (!merged.empty()) {
            auto& last = merged.back();
            if (last.bc == m.bc && std::abs(m.lambda_sq - last.lambda_sq) <= kDegeneracyTolerance * last.lambda_sq) {
                last.degeneracy += m.degeneracy;
                last.error_estimate = std::max(last.error_estimate, m.error_estimate);
                continue;
            }
        }
        merged.push_back(m);
    }
    std::sort(merged.begin(), merged.end(), mode_less);
    std::vector<TransverseMode> out;
    int total = 0;
    for (const auto& m : merged) {
        if (total >= n) break;
        out.push_back(m);
        total += m.degeneracy;
    }
    return out;
}

Spectrum make_spectrum(std::vector<TransverseMode> modes, CrossSection cs, int n, BoundaryCondition bc) {
    Spectrum s;
    s.modes = std::move(modes);
    s.area = area(cs);
    s.cross_section = std::move(cs);
    s.n_requested = n;
    s.sets = {bc};
    return s;
}

}  // namespace

std::string_view to_string(BoundaryCondition bc) {
    return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
}

BoundaryCondition parse_boundary_condition(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "dirichlet" || lower == "d" || lower == "tm") return BoundaryCondition::Dirichlet;
    if (lower == "neumann" || lower == "n" || lower == "te") return BoundaryCondition::Neumann;
    throw std::invalid_argument("unknown boundary condition '" + std::string(text) + "'");
}

void validate(const CrossSection& cs) {
    if (const auto* c = std::get_if<Circle>(&cs)) {
        require_positive(c->radius, "circle radius");
    } else if (const auto* r = std::get_if<Rectangle>(&cs)) {
        require_positive(r->a, "rectangle side a");
        require_positive(r->b, "rectangle side b");
    } else {
        const auto& m = std::get<RasterMask>(cs);
        require_positive(m.spacing(), "grid spacing h");
        if (m.interior_count() == 0) throw std::invalid_argument("mask has no interior cells");
        for (int r = 0; r < m.rows(); ++r) {
            for (int c = 0; c < m.cols(); ++c) {
                const bool border = r == 0 || c == 0 || r == m.rows() - 1 || c == m.cols() - 1;
                if (border && m.inside(r, c)) throw std::invalid_argument("mask touches the grid border");
            }
        }
        if (!m.connected()) throw std::invalid_argument("mask is not connected");
    }
}

double area(const CrossSection& cs) {
    if (const auto* c = std::get_if<Circle>(&cs)) return std::numbers::pi * c->radius * c->radius;
    if (const auto* r = std::get_if<Rectangle>(&cs)) return r->a * r->b;
    return std::get<RasterMask>(cs).area();
}

double reference_length(const CrossSection& cs) {
    if (const auto* c = std::get_if<Circle>(&cs)) return c->radius;
    return std::sqrt(area(cs) / std::numbers::pi);
}

std::string describe(const CrossSection& cs) {
    std::ostringstream os;
    os.precision(17);
    if (const auto* c = std::get_if<Circle>(&cs)) {
        os << "circle R=" << c->radius;
    } else if (const auto* r = std::get_if<Rectangle>(&cs)) {
        os << "rectangle a=" << r->a << " b=" << r->b;
    } else {
        const auto& m = std::get<RasterMask>(cs);
        os << "raster " << m.rows() << "x" << m.cols() << " h=" << m.spacing();
    }
    return os.str();
}

int Spectrum::total_count() const {
    int total = 0;
    for (const auto& m : modes) total += m.degeneracy;
    return total;
}

int Spectrum::count(BoundaryCondition bc) const {
    int total = 0;
    for (const auto& m : modes) {
        if (m.bc == bc) total += m.degeneracy;
    }
    return total;
}

std::vector<TransverseMode> Spectrum::subset(BoundaryCondition bc) const {
    std::vector<TransverseMode> out;
    std::copy_if(modes.begin(), modes.end(), std::back_inserter(out),
                 [bc](const TransverseMode& m) { return m.bc == bc; });
    return out;
}

Spectrum circle_spectrum(double radius, int n, BoundaryCondition bc) {
    require_positive(radius, "circle radius");
    require_count(n);
    const auto kind = bc == BoundaryCondition::Dirichlet ? special::ZeroKind::Function : special::ZeroKind::Derivative;

    struct Candidate {
        double zero;
        int nu;
        int k;
        int g;
    };
    std::vector<Candidate> candidates;
    const auto first = kind == special::ZeroKind::Function ? special::bessel_j_zeros(0, n)
                                                           : special::bessel_j_prime_zeros(0, n);
    for (std::size_t k = 0; k < first.values.size(); ++k) {
        candidates.push_back({first.values[k], 0, static_cast<int>(k) + 1, 1});
    }

    // Threshold: the zero at which the running count first reaches n.
    auto threshold = [&] {
        std::sort(candidates.begin(), candidates.end(),
                  [](const Candidate& a, const Candidate& b) { return std::tie(a.zero, a.nu) < std::tie(b.zero, b.nu); });
        int total = 0;
        for (const auto& c : candidates) {
            total += c.g;
            if (total >= n) return c.zero;
        }
        return candidates.back().zero;
    };

    double tau = threshold();
    // j_{nu,1} and j'_{nu,1} both exceed nu, so orders above tau cannot contribute.
    for (int nu = 1; nu <= tau; ++nu) {
        const auto zs = special::bessel_zeros_below(nu, kind, tau);
        if (zs.values.empty()) break;
        for (std::size_t k = 0; k < zs.values.size(); ++k) {
            candidates.push_back({zs.values[k], nu, static_cast<int>(k) + 1, 2});
        }
        tau = threshold();
    }

    std::vector<TransverseMode> modes;
    modes.reserve(candidates.size());
    for (const auto& c : candidates) {
        const double lambda = c.zero / radius;
        modes.push_back(make_mode(lambda * lambda, c.g, bc, c.nu, c.k));
        modes.back().lambda = lambda;
    }
    return make_spectrum(normalise(std::move(modes), n), Circle{radius}, n, bc);
}

Spectrum rectangle_spectrum(double a, double b, int n, BoundaryCondition bc) {
    require_positive(a, "rectangle side a");
    require_positive(b, "rectangle side b");
    require_count(n);
    const int lo = bc == BoundaryCondition::Dirichlet ? 1 : 0;
    const double ka = std::numbers::pi / a;
    const double kb = std::numbers::pi / b;

    double bound = 8.0 * std::numbers::pi * (n + 4) / (a * b) + ka * ka + kb * kb;
    std::vector<TransverseMode> modes;
    for (;;) {
        modes.clear();
        const int p_max = static_cast<int>(std::sqrt(bound) / ka) + 1;
        for (int p = lo; p <= p_max; ++p) {
            const double xp = p * ka;
            const double rest = bound - xp * xp;
            if (rest < 0.0) break;
            const int q_max = static_cast<int>(std::sqrt(rest) / kb) + 1;
            for (int q = lo; q <= q_max; ++q) {
                if (p == 0 && q == 0) continue;
                const double yq = q * kb;
                const double value = xp * xp + yq * yq;
                if (value <= bound) modes.push_back(make_mode(value, 1, bc, p, q));
            }
        }
        if (static_cast<int>(modes.size()) >= n) break;
        bound *= 2.0;
    }
    return make_spectrum(normalise(std::move(modes), n), Rectangle{a, b}, n, bc);
}

Spectrum raster_spectrum(const RasterMask& mask, int n, BoundaryCondition bc, const RasterOptions& options) {
    require_count(n);
    validate(CrossSection{mask});
    const int interior = mask.interior_count();
    if (n > interior / 10) {
        throw std::invalid_argument("raster spectrum: requested " + std::to_string(n) +
                                    " modes exceeds 10% of the " + std::to_string(interior) + " interior nodes");
    }
    const double h = mask.spacing();
    const double zero_threshold = 1e-8 / (h * h);
    const int extra = bc == BoundaryCondition::Neumann ? 1 : 0;

    auto physical = [&](const std::vector<double>& raw) {
        std::vector<double> out;
        for (double v : raw) {
            if (bc == BoundaryCondition::Neumann && std::abs(v) < zero_threshold) continue;
            out.push_back(v);
        }
        if (static_cast<int>(out.size()) > n) out.resize(n);
        return out;
    };

    const auto coarse = physical(raster_eigenvalues(mask, n + extra, bc, options.residual_tolerance));
    if (static_cast<int>(coarse.size()) < n) {
        throw std::runtime_error("raster spectrum: eigensolver returned too few physical modes");
    }
    std::vector<double> fine;
    if (options.estimate_error) {
        fine = physical(raster_eigenvalues(mask.refined(), n + extra, bc, options.residual_tolerance));
    }

    std::vector<TransverseMode> modes;
    for (int i = 0; i < n; ++i) {
        if (!(coarse[i] > 0.0)) throw std::runtime_error("raster spectrum: non-positive physical eigenvalue");
        auto m = make_mode(coarse[i], 1, bc, i, 0);
        if (!fine.empty()) m.error_estimate = std::abs(m.lambda - std::sqrt(fine[i])) * 4.0 / 3.0;
        modes.push_back(m);
    }
    auto spec = make_spectrum(normalise(std::move(modes), n), mask, n, bc);
    spec.grid_spacing = h;
    return spec;
}

Spectrum single_spectrum(const CrossSection& cs, int n, BoundaryCondition bc, const RasterOptions& options) {
    validate(cs);
    if (const auto* c = std::get_if<Circle>(&cs)) return circle_spectrum(c->radius, n, bc);
    if (const auto* r = std::get_if<Rectangle>(&cs)) return rectangle_spectrum(r->a, r->b, n, bc);
    return raster_spectrum(std::get<RasterMask>(cs), n, bc, options);
}

Spectrum combined_spectrum(const CrossSection& cs, int n_per_set, const RasterOptions& options) {
    auto dir = single_spectrum(cs, n_per_set, BoundaryCondition::Dirichlet, options);
    auto neu = single_spectrum(cs, n_per_set, BoundaryCondition::Neumann, options);
    Spectrum out = std::move(dir);
    out.modes.insert(out.modes.end(), neu.modes.begin(), neu.modes.end());
    std::sort(out.modes.begin(), out.modes.end(), mode_less);
    out.sets = {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann};
    return out;
}

double weyl_deviation(const Spectrum& spec) {
    if (!(spec.area > 0.0)) throw std::invalid_argument("weyl_deviation: spectrum has no area");
    double worst = 0.0;
    for (auto bc : spec.sets) {
        const auto modes = spec.subset(bc);
        int total = 0;
        for (const auto& m : modes) total += m.degeneracy;
        if (total < 100) throw std::invalid_argument("weyl_deviation: needs at least 100 modes per set");
        int running = 0;
        for (const auto& m : modes) {
            running += m.degeneracy;
            if (2 * running < total) continue;
            const double weyl = spec.area * m.lambda_sq / (4.0 * std::numbers::pi);
            worst = std::max(worst, std::abs(running - weyl) / weyl);
        }
    }
    return worst;
}

}  // namespace casimir
