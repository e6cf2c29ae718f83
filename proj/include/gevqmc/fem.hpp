#pragma once

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

namespace gevqmc {

using SparseMatrix = Eigen::SparseMatrix<double>;
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, 2>;

/// Uniform triangulation of the unit square with h = 2^-k. Each cell is cut
/// along its (i, j)-(i+1, j+1) diagonal. Nodes are numbered row by row,
/// node (i, j) -> j (N + 1) + i with N = 2^k.
class UniformMesh {
public:
    explicit UniformMesh(int level);

    int level() const noexcept { return level_; }
    int cells_per_side() const noexcept { return per_side_; }
    double h() const noexcept { return 1.0 / per_side_; }
    Eigen::Index node_count() const noexcept { return nodes_.rows(); }
    Eigen::Index triangle_count() const noexcept { return triangles_.rows(); }
    Eigen::Index interior_count() const noexcept { return interior_count_; }
    double triangle_area() const noexcept { return 0.5 * h() * h(); }

    const PointMatrix& nodes() const noexcept { return nodes_; }
    const Eigen::Matrix<int, Eigen::Dynamic, 3>& triangles() const noexcept { return triangles_; }
    /// Interior dof of a node, -1 on the boundary.
    int dof(int node) const { return dof_[node]; }
    PointMatrix centroids() const;

private:
    int level_;
    int per_side_;
    PointMatrix nodes_;
    Eigen::Matrix<int, Eigen::Dynamic, 3> triangles_;
    std::vector<int> dof_;
    Eigen::Index interior_count_ = 0;
};

/// Throws DomainError unless 1 <= k <= 10.
std::shared_ptr<const UniformMesh> build_mesh(int k);

/// Where the diffusion coefficient is sampled on each triangle.
enum class CoefficientRule {
    centroid,       // one point
    edge_midpoint,  // three points, exact for quadratics
};

/// Sample points of a rule, triangle-major (rule points of triangle t are
/// consecutive).
PointMatrix coefficient_points(const UniformMesh& mesh, CoefficientRule rule);

/// P1 space on a mesh, with the sparsity pattern and unit-coefficient
/// matrices computed once. Immutable; shared freely between workers.
class FemSpace {
public:
    explicit FemSpace(int level);

    const UniformMesh& mesh() const noexcept { return *mesh_; }
    int level() const noexcept { return mesh_->level(); }
    /// Stiffness with coefficient 1 on interior dofs; u' L u = |u|_{H^1}^2.
    const SparseMatrix& laplacian() const noexcept { return laplacian_; }
    /// Exact P1 mass matrix on interior dofs.
    const SparseMatrix& mass() const noexcept { return mass_; }

    /// Load vector by one-point (centroid) quadrature.
    Eigen::VectorXd load(const std::function<double(const Eigen::Vector2d&)>& f) const;

    /// Stiffness matrix for a piecewise-constant coefficient (one value per
    /// triangle), filled into `out` which must share the space's pattern.
    void assemble(const Eigen::VectorXd& coefficient, SparseMatrix& out) const;
    SparseMatrix pattern() const { return laplacian_; }

    /// Element matrix with unit coefficient for triangle t (local vertex order).
    const Eigen::Matrix3d& element_matrix(Eigen::Index t) const { return element_[t]; }

private:
    std::shared_ptr<const UniformMesh> mesh_;
    std::vector<Eigen::Matrix3d> element_;
    // slot_[t][a * 3 + b]: position in the value array, -1 if a or b is on the boundary
    std::vector<std::array<int, 9>> slot_;
    SparseMatrix laplacian_;
    SparseMatrix mass_;
};

/// Nodal values of a P1 function on interior dofs; zero on the boundary.
struct FemSolution {
    std::shared_ptr<const FemSpace> space;
    Eigen::VectorXd values;
};

/// Per-worker solver state: preconditioned CG on a matrix with the space's
/// pattern. Relative residual tolerance 1e-12.
class PoissonSolver {
public:
    explicit PoissonSolver(std::shared_ptr<const FemSpace> space, double tolerance = 1e-12);

    const FemSpace& space() const noexcept { return *space_; }
    /// Solves with one coefficient value per triangle. Throws DomainError on a
    /// nonpositive coefficient and NumericalError if CG does not converge.
    FemSolution solve(const Eigen::VectorXd& triangle_coefficient, const Eigen::VectorXd& rhs);
    /// Relative residual of the last solve.
    double last_residual() const noexcept { return last_residual_; }
    int last_iterations() const noexcept { return last_iterations_; }

private:
    std::shared_ptr<const FemSpace> space_;
    double tolerance_;
    SparseMatrix matrix_;
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::IncompleteCholesky<double>> cg_;
    double last_residual_ = 0.0;
    int last_iterations_ = 0;
};

/// Galerkin solution of -div(coeff grad u) = f, u = 0 on the boundary, with the
/// coefficient sampled per `rule` and the load by centroid quadrature.
FemSolution assemble_and_solve(std::shared_ptr<const FemSpace> space,
                               const std::function<double(const Eigen::Vector2d&)>& coeff,
                               const std::function<double(const Eigen::Vector2d&)>& f,
                               CoefficientRule rule = CoefficientRule::centroid);

/// Reduces rule samples (triangle-major) to one coefficient per triangle.
Eigen::VectorXd triangle_coefficients(const Eigen::VectorXd& samples, CoefficientRule rule);

/// P1 interpolation onto a finer nested mesh. Throws DomainError if the target
/// level is coarser.
FemSolution prolong(const FemSolution& u, std::shared_ptr<const FemSpace> fine);
/// Nodal interior values only, for callers that hold bare vectors.
Eigen::VectorXd prolong_values(const Eigen::VectorXd& values, int from_level, int to_level);

double h1_seminorm(const FemSolution& u);
double l2_norm(const FemSolution& u);
/// Norms of an interior-value vector on a given space.
double h1_seminorm(const FemSpace& space, const Eigen::VectorXd& values);
double l2_norm(const FemSpace& space, const Eigen::VectorXd& values);

/// |u - u_h|_{H^1} and ||u - u_h||_{L^2} against a smooth reference, by a
/// degree-5 rule on every triangle.
double h1_error(const FemSolution& u, const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& exact_gradient);
double l2_error(const FemSolution& u, const std::function<double(const Eigen::Vector2d&)>& exact);

/// Nodal dump: header "k interior_count", then one value per line.
void write_solution(std::ostream& os, const FemSolution& u);

}  // namespace gevqmc
