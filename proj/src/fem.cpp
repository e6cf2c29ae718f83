#include "gevqmc/fem.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "gevqmc/errors.hpp"

namespace gevqmc {

UniformMesh::UniformMesh(int level) : level_(level) {
    if (level < 1 || level > 10) throw DomainError("build_mesh: level must lie in 1..10, got " + std::to_string(level));
    per_side_ = 1 << level;
    const int N = per_side_;
    const double h = 1.0 / N;
    nodes_.resize(static_cast<Eigen::Index>(N + 1) * (N + 1), 2);
    dof_.assign(nodes_.rows(), -1);
    for (int j = 0; j <= N; ++j)
        for (int i = 0; i <= N; ++i) {
            const int id = j * (N + 1) + i;
            nodes_(id, 0) = i * h;
            nodes_(id, 1) = j * h;
            if (i > 0 && i < N && j > 0 && j < N) dof_[id] = (j - 1) * (N - 1) + (i - 1);
        }
    interior_count_ = static_cast<Eigen::Index>(N - 1) * (N - 1);

    triangles_.resize(2 * static_cast<Eigen::Index>(N) * N, 3);
    Eigen::Index t = 0;
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) {
            const int n00 = j * (N + 1) + i, n10 = n00 + 1, n01 = n00 + N + 1, n11 = n01 + 1;
            triangles_.row(t++) << n00, n10, n11;
            triangles_.row(t++) << n00, n11, n01;
        }
}

PointMatrix UniformMesh::centroids() const {
    PointMatrix c(triangle_count(), 2);
    for (Eigen::Index t = 0; t < triangle_count(); ++t)
        c.row(t) = (nodes_.row(triangles_(t, 0)) + nodes_.row(triangles_(t, 1)) + nodes_.row(triangles_(t, 2))) / 3.0;
    return c;
}

std::shared_ptr<const UniformMesh> build_mesh(int k) { return std::make_shared<const UniformMesh>(k); }

PointMatrix coefficient_points(const UniformMesh& mesh, CoefficientRule rule) {
    if (rule == CoefficientRule::centroid) return mesh.centroids();
    PointMatrix pts(3 * mesh.triangle_count(), 2);
    const auto& tri = mesh.triangles();
    for (Eigen::Index t = 0; t < mesh.triangle_count(); ++t)
        for (int e = 0; e < 3; ++e)
            pts.row(3 * t + e) = 0.5 * (mesh.nodes().row(tri(t, e)) + mesh.nodes().row(tri(t, (e + 1) % 3)));
    return pts;
}

Eigen::VectorXd triangle_coefficients(const Eigen::VectorXd& samples, CoefficientRule rule) {
    if (rule == CoefficientRule::centroid) return samples;
    if (samples.size() % 3 != 0) throw DomainError("triangle_coefficients: expected three samples per triangle");
    const Eigen::Index T = samples.size() / 3;
    Eigen::VectorXd out(T);
    for (Eigen::Index t = 0; t < T; ++t) out[t] = (samples[3 * t] + samples[3 * t + 1] + samples[3 * t + 2]) / 3.0;
    return out;
}

FemSpace::FemSpace(int level) : mesh_(build_mesh(level)) {
    const UniformMesh& m = *mesh_;
    const auto& tri = m.triangles();
    const Eigen::Index T = m.triangle_count();
    const Eigen::Index ndof = m.interior_count();
    element_.resize(T);
    slot_.resize(T);

    std::vector<Eigen::Triplet<double>> lap, mass;
    lap.reserve(9 * T);
    mass.reserve(9 * T);
    for (Eigen::Index t = 0; t < T; ++t) {
        Eigen::Matrix<double, 3, 2> p;
        for (int a = 0; a < 3; ++a) p.row(a) = m.nodes().row(tri(t, a));
        Eigen::Matrix2d B;
        B.col(0) = (p.row(1) - p.row(0)).transpose();
        B.col(1) = (p.row(2) - p.row(0)).transpose();
        const double area = 0.5 * std::abs(B.determinant());
        // gradients of barycentric coordinates
        const Eigen::Matrix2d Binv_t = B.inverse().transpose();
        Eigen::Matrix<double, 2, 3> grad;
        grad.col(1) = Binv_t.col(0);
        grad.col(2) = Binv_t.col(1);
        grad.col(0) = -grad.col(1) - grad.col(2);
        element_[t] = area * grad.transpose() * grad;
        for (int a = 0; a < 3; ++a) {
            const int da = m.dof(tri(t, a));
            if (da < 0) continue;
            for (int b = 0; b < 3; ++b) {
                const int db = m.dof(tri(t, b));
                if (db < 0) continue;
                lap.emplace_back(da, db, element_[t](a, b));
                mass.emplace_back(da, db, area / 12.0 * (a == b ? 2.0 : 1.0));
            }
        }
    }
    laplacian_.resize(ndof, ndof);
    laplacian_.setFromTriplets(lap.begin(), lap.end());
    laplacian_.makeCompressed();
    mass_.resize(ndof, ndof);
    mass_.setFromTriplets(mass.begin(), mass.end());
    mass_.makeCompressed();

    const int* outer = laplacian_.outerIndexPtr();
    const int* inner = laplacian_.innerIndexPtr();
    for (Eigen::Index t = 0; t < T; ++t) {
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                const int row = m.dof(tri(t, a)), col = m.dof(tri(t, b));
                int& s = slot_[t][3 * a + b];
                s = -1;
                if (row < 0 || col < 0) continue;
                const int* first = inner + outer[col];
                const int* last = inner + outer[col + 1];
                s = static_cast<int>(std::lower_bound(first, last, row) - inner);
            }
    }
}

Eigen::VectorXd FemSpace::load(const std::function<double(const Eigen::Vector2d&)>& f) const {
    const UniformMesh& m = *mesh_;
    const PointMatrix c = m.centroids();
    const double w = m.triangle_area() / 3.0;
    Eigen::VectorXd F = Eigen::VectorXd::Zero(m.interior_count());
    for (Eigen::Index t = 0; t < m.triangle_count(); ++t) {
        const double ft = f(c.row(t).transpose()) * w;
        for (int a = 0; a < 3; ++a) {
            const int d = m.dof(m.triangles()(t, a));
            if (d >= 0) F[d] += ft;
        }
    }
    return F;
}

void FemSpace::assemble(const Eigen::VectorXd& coefficient, SparseMatrix& out) const {
    if (coefficient.size() != mesh_->triangle_count())
        throw DomainError("assemble: need one coefficient value per triangle");
    if (out.nonZeros() != laplacian_.nonZeros() || out.rows() != laplacian_.rows()) out = laplacian_;
    double* values = out.valuePtr();
    std::fill(values, values + out.nonZeros(), 0.0);
    for (Eigen::Index t = 0; t < coefficient.size(); ++t) {
        const double a = coefficient[t];
        if (!(a > 0.0) || !std::isfinite(a))
            throw DomainError("assemble: coefficient sample " + std::to_string(a) + " on triangle " +
                              std::to_string(t) + " is not positive");
        const auto& slots = slot_[t];
        const Eigen::Matrix3d& K = element_[t];
        for (int ab = 0; ab < 9; ++ab)
            if (slots[ab] >= 0) values[slots[ab]] += a * K(ab / 3, ab % 3);
    }
}

PoissonSolver::PoissonSolver(std::shared_ptr<const FemSpace> space, double tolerance)
    : space_(std::move(space)), tolerance_(tolerance), matrix_(space_->pattern()) {
    cg_.setTolerance(tolerance_);
    cg_.setMaxIterations(std::max<int>(1000, 10 * static_cast<int>(matrix_.rows())));
    cg_.analyzePattern(matrix_);
}

FemSolution PoissonSolver::solve(const Eigen::VectorXd& triangle_coefficient, const Eigen::VectorXd& rhs) {
    if (rhs.size() != matrix_.rows()) throw DomainError("PoissonSolver: rhs length must equal the interior count");
    space_->assemble(triangle_coefficient, matrix_);
    FemSolution u{space_, Eigen::VectorXd::Zero(rhs.size())};
    last_iterations_ = 0;
    last_residual_ = 0.0;
    if (rhs.squaredNorm() == 0.0) return u;
    cg_.factorize(matrix_);
    if (cg_.info() != Eigen::Success) throw NumericalError("PoissonSolver: incomplete factorization failed");
    u.values = cg_.solve(rhs);
    last_iterations_ = static_cast<int>(cg_.iterations());
    last_residual_ = (rhs - matrix_ * u.values).norm() / rhs.norm();
    if (cg_.info() != Eigen::Success || !(last_residual_ <= tolerance_ * 10.0) || !u.values.allFinite())
        throw NumericalError("PoissonSolver: CG did not converge (relative residual " +
                             std::to_string(last_residual_) + ")");
    return u;
}

FemSolution assemble_and_solve(std::shared_ptr<const FemSpace> space,
                               const std::function<double(const Eigen::Vector2d&)>& coeff,
                               const std::function<double(const Eigen::Vector2d&)>& f, CoefficientRule rule) {
    const PointMatrix pts = coefficient_points(space->mesh(), rule);
    Eigen::VectorXd samples(pts.rows());
    for (Eigen::Index k = 0; k < pts.rows(); ++k) samples[k] = coeff(pts.row(k).transpose());
    const Eigen::VectorXd rhs = space->load(f);
    PoissonSolver solver(space);
    return solver.solve(triangle_coefficients(samples, rule), rhs);
}

namespace {

// full nodal grid (boundary included) <-> interior values
Eigen::MatrixXd to_grid(const Eigen::VectorXd& values, int N) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(N + 1, N + 1);  // g(i, j)
    for (int j = 1; j < N; ++j)
        for (int i = 1; i < N; ++i) g(i, j) = values[(j - 1) * (N - 1) + (i - 1)];
    return g;
}

Eigen::VectorXd from_grid(const Eigen::MatrixXd& g, int N) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(N - 1) * (N - 1));
    for (int j = 1; j < N; ++j)
        for (int i = 1; i < N; ++i) v[(j - 1) * (N - 1) + (i - 1)] = g(i, j);
    return v;
}

}  // namespace

Eigen::VectorXd prolong_values(const Eigen::VectorXd& values, int from_level, int to_level) {
    if (to_level < from_level) throw DomainError("prolong: target mesh is coarser than the source");
    if (from_level < 1 || to_level > 10) throw DomainError("prolong: levels must lie in 1..10");
    int N = 1 << from_level;
    if (values.size() != static_cast<Eigen::Index>(N - 1) * (N - 1))
        throw DomainError("prolong: value count does not match the source level");
    if (to_level == from_level) return values;
    Eigen::MatrixXd g = to_grid(values, N);
    for (int level = from_level; level < to_level; ++level) {
        const int M = 2 * N;
        Eigen::MatrixXd f = Eigen::MatrixXd::Zero(M + 1, M + 1);
        for (int j = 0; j <= N; ++j)
            for (int i = 0; i <= N; ++i) {
                f(2 * i, 2 * j) = g(i, j);
                if (i < N) f(2 * i + 1, 2 * j) = 0.5 * (g(i, j) + g(i + 1, j));
                if (j < N) f(2 * i, 2 * j + 1) = 0.5 * (g(i, j) + g(i, j + 1));
                if (i < N && j < N) f(2 * i + 1, 2 * j + 1) = 0.5 * (g(i, j) + g(i + 1, j + 1));
            }
        g = std::move(f);
        N = M;
    }
    return from_grid(g, N);
}

FemSolution prolong(const FemSolution& u, std::shared_ptr<const FemSpace> fine) {
    if (!u.space || !fine) throw DomainError("prolong: missing space");
    return FemSolution{fine, prolong_values(u.values, u.space->level(), fine->level())};
}

double h1_seminorm(const FemSpace& space, const Eigen::VectorXd& values) {
    if (values.size() != space.laplacian().rows()) throw DomainError("h1_seminorm: value count mismatch");
    return std::sqrt(std::max(0.0, values.dot(space.laplacian() * values)));
}

double l2_norm(const FemSpace& space, const Eigen::VectorXd& values) {
    if (values.size() != space.mass().rows()) throw DomainError("l2_norm: value count mismatch");
    return std::sqrt(std::max(0.0, values.dot(space.mass() * values)));
}

double h1_seminorm(const FemSolution& u) { return h1_seminorm(*u.space, u.values); }
double l2_norm(const FemSolution& u) { return l2_norm(*u.space, u.values); }

namespace {

// Degree-5 seven-point rule on a triangle, barycentric coordinates and weights
// summing to 1.
struct TriRule {
    std::array<Eigen::Vector3d, 7> bary;
    std::array<double, 7> w;
};

const TriRule& degree5_rule() {
    static const TriRule rule = [] {
        TriRule r;
        const double a1 = 0.059715871789770, b1 = 0.470142064105115, w1 = 0.132394152788506;
        const double a2 = 0.797426985353087, b2 = 0.101286507323456, w2 = 0.125939180544827;
        r.bary[0] = Eigen::Vector3d::Constant(1.0 / 3.0);
        r.w[0] = 0.225;
        r.bary[1] = {a1, b1, b1};
        r.bary[2] = {b1, a1, b1};
        r.bary[3] = {b1, b1, a1};
        r.bary[4] = {a2, b2, b2};
        r.bary[5] = {b2, a2, b2};
        r.bary[6] = {b2, b2, a2};
        for (int q = 1; q <= 3; ++q) r.w[q] = w1;
        for (int q = 4; q <= 6; ++q) r.w[q] = w2;
        return r;
    }();
    return rule;
}

Eigen::Vector3d local_values(const FemSolution& u, Eigen::Index t) {
    const UniformMesh& m = u.space->mesh();
    Eigen::Vector3d v;
    for (int a = 0; a < 3; ++a) {
        const int d = m.dof(m.triangles()(t, a));
        v[a] = d >= 0 ? u.values[d] : 0.0;
    }
    return v;
}

}  // namespace

double h1_error(const FemSolution& u, const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& exact_gradient) {
    const UniformMesh& m = u.space->mesh();
    const TriRule& rule = degree5_rule();
    const double area = m.triangle_area();
    double total = 0.0;
    for (Eigen::Index t = 0; t < m.triangle_count(); ++t) {
        Eigen::Matrix<double, 3, 2> p;
        for (int a = 0; a < 3; ++a) p.row(a) = m.nodes().row(m.triangles()(t, a));
        Eigen::Matrix2d B;
        B.col(0) = (p.row(1) - p.row(0)).transpose();
        B.col(1) = (p.row(2) - p.row(0)).transpose();
        const Eigen::Vector3d v = local_values(u, t);
        const Eigen::Vector2d grad_h = B.inverse().transpose() * Eigen::Vector2d(v[1] - v[0], v[2] - v[0]);
        for (int q = 0; q < 7; ++q) {
            const Eigen::Vector2d x = p.transpose() * rule.bary[q];
            total += rule.w[q] * area * (exact_gradient(x) - grad_h).squaredNorm();
        }
    }
    return std::sqrt(total);
}

double l2_error(const FemSolution& u, const std::function<double(const Eigen::Vector2d&)>& exact) {
    const UniformMesh& m = u.space->mesh();
    const TriRule& rule = degree5_rule();
    const double area = m.triangle_area();
    double total = 0.0;
    for (Eigen::Index t = 0; t < m.triangle_count(); ++t) {
        Eigen::Matrix<double, 3, 2> p;
        for (int a = 0; a < 3; ++a) p.row(a) = m.nodes().row(m.triangles()(t, a));
        const Eigen::Vector3d v = local_values(u, t);
        for (int q = 0; q < 7; ++q) {
            const Eigen::Vector2d x = p.transpose() * rule.bary[q];
            const double d = exact(x) - v.dot(rule.bary[q]);
            total += rule.w[q] * area * d * d;
        }
    }
    return std::sqrt(total);
}

void write_solution(std::ostream& os, const FemSolution& u) {
    os << u.space->level() << ' ' << u.values.size() << '\n';
    os.precision(17);
    for (Eigen::Index i = 0; i < u.values.size(); ++i) os << u.values[i] << '\n';
}

}  // namespace gevqmc
