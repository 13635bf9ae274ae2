#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace casimir {

/// Boundary condition of a transverse Laplacian eigenproblem. TM modes of the
/// piston map to the Dirichlet set, TE modes to the Neumann set.
enum class BoundaryCondition { Dirichlet, Neumann };

std::string_view to_string(BoundaryCondition bc);
BoundaryCondition parse_boundary_condition(std::string_view text);

/// One eigenvalue lambda^2 of -Laplacian on the cross section.
struct TransverseMode {
    double lambda = 0.0;     // 1/length
    double lambda_sq = 0.0;  // 1/length^2
    int degeneracy = 1;
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    // Provenance labels: (nu, k) for the circle, (p, q) for the rectangle,
    // (rank, 0) for raster modes.
    int index_1 = -1;
    int index_2 = -1;
    // Estimated absolute discretisation error in lambda; zero for exact providers.
    double error_estimate = 0.0;
};

struct Circle {
    double radius = 1.0;
};

struct Rectangle {
    double a = 1.0;
    double b = 1.0;
};

/// Cell-centred raster of a planar domain, stored as a level-set sampled at
/// the cell centres (negative inside). Masks read from 0/1 text carry +-1/2,
/// which places the boundary halfway between an inside and an outside node.
/// Masks built from an analytic shape keep the shape so a refined grid can be
/// resampled exactly.
class RasterMask {
public:
    using Shape = std::function<double(double x, double y)>;

    /// Rows of '0'/'1' characters, newline separated. Whitespace and '\r' are
    /// ignored; rows shorter than the longest are padded with '0'.
    static RasterMask from_text(std::string_view text, double h);
    static RasterMask from_shape(Shape shape, double x_min, double y_min, int rows, int cols, double h,
                                 std::optional<double> exact_area = std::nullopt);
    static RasterMask circle(double radius, double h);
    static RasterMask rectangle(double a, double b, double h);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double spacing() const { return h_; }
    double level(int row, int col) const;
    bool inside(int row, int col) const { return level(row, col) < 0.0; }
    int interior_count() const;
    /// Exact area when the mask came from an analytic shape, otherwise the
    /// number of inside cells times h^2.
    double area() const;
    bool connected() const;
    /// Same domain on a grid with spacing h/2.
    RasterMask refined() const;

private:
    RasterMask() = default;

    int rows_ = 0;
    int cols_ = 0;
    double h_ = 0.0;
    double x_min_ = 0.0;
    double y_min_ = 0.0;
    std::vector<double> level_;
    Shape shape_;
    std::optional<double> exact_area_;
};

using CrossSection = std::variant<Circle, Rectangle, RasterMask>;

/// Throws std::invalid_argument when a length is not positive or a mask is
/// empty or disconnected.
void validate(const CrossSection& cs);
double area(const CrossSection& cs);
/// R for a circle, sqrt(A / pi) (equal-area radius) otherwise.
double reference_length(const CrossSection& cs);
std::string describe(const CrossSection& cs);

/// Ordered set of transverse modes, ascending in lambda. Ties are broken
/// Dirichlet before Neumann, then by index_1.
struct Spectrum {
    std::vector<TransverseMode> modes;
    CrossSection cross_section = Circle{};
    int n_requested = 0;  // per boundary-condition set
    double area = 0.0;
    std::vector<BoundaryCondition> sets;
    std::optional<double> grid_spacing;

    /// Number of modes counted with degeneracy.
    int total_count() const;
    int count(BoundaryCondition bc) const;
    std::vector<TransverseMode> subset(BoundaryCondition bc) const;
    bool empty() const { return modes.empty(); }
};

/// Raster eigensolver controls.
struct RasterOptions {
    /// Also solve on the h/2 grid and attach a Richardson error estimate.
    bool estimate_error = true;
    double residual_tolerance = 1e-10;
};

Spectrum circle_spectrum(double radius, int n, BoundaryCondition bc);
Spectrum rectangle_spectrum(double a, double b, int n, BoundaryCondition bc);
Spectrum raster_spectrum(const RasterMask& mask, int n, BoundaryCondition bc, const RasterOptions& options = {});

/// Dirichlet and Neumann sets of `n_per_set` modes each, merged.
Spectrum combined_spectrum(const CrossSection& cs, int n_per_set, const RasterOptions& options = {});
/// Single boundary-condition set for any cross section.
Spectrum single_spectrum(const CrossSection& cs, int n, BoundaryCondition bc, const RasterOptions& options = {});

/// Largest relative gap between the cumulative mode count and the leading
/// Weyl term A lambda^2 / (4 pi), taken over the upper half of each
/// boundary-condition set. Needs at least 100 modes per set.
double weyl_deviation(const Spectrum& spec);

/// Raw eigenvalues lambda^2 of the 5-point operator on the mask, ascending,
/// including the Neumann constant mode. Exposed for diagnostics and tests.
std::vector<double> raster_eigenvalues(const RasterMask& mask, int count, BoundaryCondition bc,
                                       double residual_tolerance = 1e-10);

}  // namespace casimir
