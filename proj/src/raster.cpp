#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>

#include "casimir/numerics.hpp"
#include "casimir/spectrum.hpp"

namespace casimir {

namespace {

// Smallest boundary fraction allowed in the cut-cell Dirichlet stencil.
constexpr double kMinTheta = 1e-6;
constexpr int kBlockSize = 4;
constexpr int kDenseLimit = 600;

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

struct Grid {
    std::vector<int> id;  // row-major cell -> unknown index, -1 outside
    int unknowns = 0;
};

Grid number_cells(const RasterMask& mask) {
    Grid g;
    g.id.assign(static_cast<std::size_t>(mask.rows()) * mask.cols(), -1);
    for (int r = 0; r < mask.rows(); ++r) {
        for (int c = 0; c < mask.cols(); ++c) {
            if (mask.inside(r, c)) g.id[static_cast<std::size_t>(r) * mask.cols() + c] = g.unknowns++;
        }
    }
    return g;
}

// -Laplacian on the inside cells. Dirichlet uses the symmetric cut-cell
// stencil: a neighbour across the boundary at fraction theta of a cell adds
// 1/(theta h^2) to the diagonal. Neumann mirrors the node into the ghost cell,
// which drops the coupling.
Eigen::SparseMatrix<double> assemble(const RasterMask& mask, const Grid& grid, BoundaryCondition bc) {
    const double inv_h2 = 1.0 / (mask.spacing() * mask.spacing());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(grid.unknowns) * 5);
    constexpr int dr[4] = {-1, 1, 0, 0};
    constexpr int dc[4] = {0, 0, -1, 1};
    for (int r = 0; r < mask.rows(); ++r) {
        for (int c = 0; c < mask.cols(); ++c) {
            const int i = grid.id[static_cast<std::size_t>(r) * mask.cols() + c];
            if (i < 0) continue;
            double diag = 0.0;
            const double phi_i = mask.level(r, c);
            for (int k = 0; k < 4; ++k) {
                const int rr = r + dr[k], cc = c + dc[k];
                const bool on_grid = rr >= 0 && cc >= 0 && rr < mask.rows() && cc < mask.cols();
                const int j = on_grid ? grid.id[static_cast<std::size_t>(rr) * mask.cols() + cc] : -1;
                if (j >= 0) {
                    triplets.emplace_back(i, j, -inv_h2);
                    diag += inv_h2;
                } else if (bc == BoundaryCondition::Dirichlet) {
                    const double phi_j = on_grid ? mask.level(rr, cc) : -phi_i;
                    const double theta = std::max(kMinTheta, phi_i / (phi_i - phi_j));
                    diag += inv_h2 / theta;
                }
            }
            triplets.emplace_back(i, i, diag);
        }
    }
    Eigen::SparseMatrix<double> a(grid.unknowns, grid.unknowns);
    a.setFromTriplets(triplets.begin(), triplets.end());
    return a;
}

Eigen::MatrixXd start_block(int n, int b) {
    std::uint64_t state = 0x5EED5EEDull;
    Eigen::MatrixXd x(n, b);
    for (int j = 0; j < b; ++j) {
        for (int i = 0; i < n; ++i) {
            x(i, j) = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53 - 0.5;
        }
    }
    return x;
}

// Orthonormalises w in place, returning R with w_in = w_out * R. Columns that
// collapse numerically are replaced by fresh directions orthogonal to basis.
Eigen::MatrixXd orthonormalise(Eigen::MatrixXd& w, const std::vector<Eigen::MatrixXd>& basis, std::uint64_t& state) {
    const int b = static_cast<int>(w.cols());
    const double scale = std::max(1.0, w.norm());
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(w);
    Eigen::MatrixXd r = qr.matrixQR().topRows(b).triangularView<Eigen::Upper>();
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(w.rows(), b);
    for (int j = 0; j < b; ++j) {
        if (std::abs(r(j, j)) > 1e-13 * scale) continue;
        Eigen::VectorXd v(w.rows());
        for (int i = 0; i < v.size(); ++i) v(i) = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53 - 0.5;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& blk : basis) v -= blk * (blk.transpose() * v);
            for (int k = 0; k < b; ++k) {
                if (k != j) v -= q.col(k) * q.col(k).dot(v);
            }
        }
        q.col(j) = v.normalized();
        r.row(j).setZero();
    }
    w = std::move(q);
    return r;
}

std::vector<double> dense_eigenvalues(const Eigen::SparseMatrix<double>& a, int count) {
    Eigen::MatrixXd dense(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw ToleranceError("raster eigensolve did not converge");
    std::vector<double> out(solver.eigenvalues().data(), solver.eigenvalues().data() + count);
    return out;
}

// Block Lanczos with full reorthogonalisation on (A + shift I)^{-1}; the
// largest Ritz values map back to the smallest eigenvalues of A.
std::vector<double> shift_invert_lanczos(const Eigen::SparseMatrix<double>& a, int count, double shift,
                                         double tolerance) {
    const int n = static_cast<int>(a.rows());
    Eigen::SparseMatrix<double> shifted = a;
    for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(shifted);
    if (factor.info() != Eigen::Success) throw std::runtime_error("raster eigensolve: factorisation failed");

    const int b = kBlockSize;
    const int max_blocks = std::max(8, std::min(n / b - 1, 12 * count / b + 60));
    std::uint64_t state = 0xB10C7A11ull;

    std::vector<Eigen::MatrixXd> basis;
    Eigen::MatrixXd q = start_block(n, b);
    orthonormalise(q, basis, state);
    basis.push_back(q);

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(0, 0);
    for (int j = 0; j < max_blocks; ++j) {
        if (h.rows() < (j + 2) * b) {
            const auto old = h.rows();
            const auto grown = std::max<Eigen::Index>(2 * old, 16 * b);
            h.conservativeResize(grown, grown);
            h.rightCols(grown - old).setZero();
            h.bottomRows(grown - old).setZero();
        }
        Eigen::MatrixXd w = factor.solve(basis[j]);
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i <= j; ++i) {
                Eigen::MatrixXd c = basis[i].transpose() * w;
                w -= basis[i] * c;
                h.block(i * b, j * b, b, b) += c;
            }
        }
        Eigen::MatrixXd r = orthonormalise(w, basis, state);
        h.block((j + 1) * b, j * b, b, b) = r;

        const int dim = (j + 1) * b;
        if (dim < count + 2 * b) {
            basis.push_back(std::move(w));
            continue;
        }
        Eigen::MatrixXd t = h.topLeftCorner(dim, dim);
        t = 0.5 * (t + t.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(t);
        const auto& theta = ritz.eigenvalues();  // ascending
        bool converged = true;
        for (int k = 0; k < count; ++k) {
            const int idx = dim - 1 - k;
            const double residual = (r * ritz.eigenvectors().col(idx).tail(b)).norm();
            if (residual > tolerance * std::abs(theta(idx))) {
                converged = false;
                break;
            }
        }
        if (converged) {
            std::vector<double> out;
            for (int k = 0; k < count; ++k) out.push_back(1.0 / theta(dim - 1 - k) - shift);
            std::sort(out.begin(), out.end());
            return out;
        }
        basis.push_back(std::move(w));
    }
    throw ToleranceError("raster eigensolve did not converge within " + std::to_string(max_blocks * b) +
                             " Krylov vectors");
}

}  // namespace

RasterMask RasterMask::from_text(std::string_view text, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("grid spacing h must be positive");
    std::vector<std::string> lines;
    std::string current;
    for (char ch : text) {
        if (ch == '\n') {
            lines.push_back(current);
            current.clear();
        } else if (ch == '0' || ch == '1') {
            current.push_back(ch);
        } else if (ch == ' ' || ch == '\t' || ch == '\r') {
            continue;
        } else {
            throw std::invalid_argument(std::string("mask file: unexpected character '") + ch + "'");
        }
    }
    if (!current.empty()) lines.push_back(current);
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) throw std::invalid_argument("mask file is empty");
    std::size_t width = 0;
    for (const auto& l : lines) width = std::max(width, l.size());

    RasterMask m;
    m.h_ = h;
    m.rows_ = static_cast<int>(lines.size()) + 2;
    m.cols_ = static_cast<int>(width) + 2;
    m.x_min_ = -h;
    m.y_min_ = -h;
    m.level_.assign(static_cast<std::size_t>(m.rows_) * m.cols_, 0.5);
    for (std::size_t r = 0; r < lines.size(); ++r) {
        for (std::size_t c = 0; c < lines[r].size(); ++c) {
            if (lines[r][c] == '1') m.level_[(r + 1) * m.cols_ + (c + 1)] = -0.5;
        }
    }
    return m;
}

RasterMask RasterMask::from_shape(Shape shape, double x_min, double y_min, int rows, int cols, double h,
                                  std::optional<double> exact_area) {
    if (!(h > 0.0)) throw std::invalid_argument("grid spacing h must be positive");
    if (rows < 3 || cols < 3) throw std::invalid_argument("raster grid must be at least 3x3");
    RasterMask m;
    m.h_ = h;
    m.rows_ = rows;
    m.cols_ = cols;
    m.x_min_ = x_min;
    m.y_min_ = y_min;
    m.level_.resize(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            m.level_[static_cast<std::size_t>(r) * cols + c] = shape(x_min + (c + 0.5) * h, y_min + (r + 0.5) * h);
        }
    }
    m.shape_ = std::move(shape);
    m.exact_area_ = exact_area;
    return m;
}

RasterMask RasterMask::circle(double radius, double h) {
    if (!(radius > 0.0)) throw std::invalid_argument("circle radius must be positive");
    const int half = static_cast<int>(std::ceil(radius / h)) + 1;
    return from_shape([radius](double x, double y) { return std::hypot(x, y) - radius; }, -half * h, -half * h,
                      2 * half, 2 * half, h, std::numbers::pi * radius * radius);
}

RasterMask RasterMask::rectangle(double a, double b, double h) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("rectangle sides must be positive");
    const int cols = static_cast<int>(std::ceil(a / h - 1e-9)) + 2;
    const int rows = static_cast<int>(std::ceil(b / h - 1e-9)) + 2;
    return from_shape(
        [a, b](double x, double y) { return std::max(std::abs(x - 0.5 * a) - 0.5 * a, std::abs(y - 0.5 * b) - 0.5 * b); },
        -h, -h, rows, cols, h, a * b);
}

double RasterMask::level(int row, int col) const {
    if (row < 0 || col < 0 || row >= rows_ || col >= cols_) return 0.5 * h_;
    return level_[static_cast<std::size_t>(row) * cols_ + col];
}

int RasterMask::interior_count() const {
    return static_cast<int>(std::count_if(level_.begin(), level_.end(), [](double v) { return v < 0.0; }));
}

double RasterMask::area() const {
    if (exact_area_) return *exact_area_;
    return interior_count() * h_ * h_;
}

bool RasterMask::connected() const {
    const int total = interior_count();
    if (total == 0) return false;
    std::vector<char> seen(level_.size(), 0);
    const auto start = static_cast<std::size_t>(
        std::find_if(level_.begin(), level_.end(), [](double v) { return v < 0.0; }) - level_.begin());
    std::queue<std::size_t> todo;
    todo.push(start);
    seen[start] = 1;
    int reached = 0;
    while (!todo.empty()) {
        const auto cell = todo.front();
        todo.pop();
        ++reached;
        const int r = static_cast<int>(cell) / cols_, c = static_cast<int>(cell) % cols_;
        const int nbr[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
        for (const auto& p : nbr) {
            if (p[0] < 0 || p[1] < 0 || p[0] >= rows_ || p[1] >= cols_) continue;
            const auto idx = static_cast<std::size_t>(p[0]) * cols_ + p[1];
            if (!seen[idx] && level_[idx] < 0.0) {
                seen[idx] = 1;
                todo.push(idx);
            }
        }
    }
    return reached == total;
}

RasterMask RasterMask::refined() const {
    if (shape_) return from_shape(shape_, x_min_, y_min_, 2 * rows_, 2 * cols_, 0.5 * h_, exact_area_);
    RasterMask m;
    m.h_ = 0.5 * h_;
    m.rows_ = 2 * rows_;
    m.cols_ = 2 * cols_;
    m.x_min_ = x_min_;
    m.y_min_ = y_min_;
    m.level_.resize(static_cast<std::size_t>(m.rows_) * m.cols_);
    for (int r = 0; r < m.rows_; ++r) {
        for (int c = 0; c < m.cols_; ++c) {
            m.level_[static_cast<std::size_t>(r) * m.cols_ + c] = level_[static_cast<std::size_t>(r / 2) * cols_ + c / 2];
        }
    }
    return m;
}

std::vector<double> raster_eigenvalues(const RasterMask& mask, int count, BoundaryCondition bc,
                                       double residual_tolerance) {
    const Grid grid = number_cells(mask);
    if (count < 1 || count > grid.unknowns) {
        throw std::invalid_argument("raster eigensolve: count out of range for " + std::to_string(grid.unknowns) +
                                    " unknowns");
    }
    const auto a = assemble(mask, grid, bc);
    if (grid.unknowns <= kDenseLimit) return dense_eigenvalues(a, count);
    const double area = grid.unknowns * mask.spacing() * mask.spacing();
    return shift_invert_lanczos(a, count, 0.1 / area, residual_tolerance);
}

}  // namespace casimir
