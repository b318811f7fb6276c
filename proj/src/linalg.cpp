#include "invariance/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace invariance {

void require_finite(const Matrix& m, const std::string& what)
{
    if (m.size() == 0) {
        throw InputError(what + ": empty matrix");
    }
    if (!m.allFinite()) {
        throw InputError(what + ": non-finite entry");
    }
}

double scaled_tolerance(const Matrix& m, double tol)
{
    return tol * (1.0 + m.norm());
}

AlignmentResult eigen_align(const Matrix& m, const Vector& normal, double tol)
{
    require_finite(m, "eigen_align");
    if (m.rows() != m.cols()) {
        throw InputError("eigen_align: matrix is not square");
    }
    if (normal.size() != m.rows()) {
        throw InputError("eigen_align: normal has wrong dimension");
    }
    if (!normal.allFinite() || std::abs(normal.norm() - 1.0) > 1e-12) {
        throw InputError("eigen_align: normal is not a unit vector");
    }

    const Vector image = m.transpose() * normal;
    AlignmentResult out;
    out.eigenvalue = image.dot(normal);
    out.residual = (image - out.eigenvalue * normal).norm();
    out.aligned = out.residual <= scaled_tolerance(m, tol);
    return out;
}

std::optional<double> is_scalar(const Matrix& m, double tol)
{
    require_finite(m, "is_scalar");
    if (m.rows() != m.cols()) {
        throw InputError("is_scalar: matrix is not square");
    }
    const double lambda = m.trace() / static_cast<double>(m.rows());
    const Matrix diff = m - lambda * Matrix::Identity(m.rows(), m.cols());
    if (diff.norm() <= scaled_tolerance(m, tol)) {
        return lambda;
    }
    return std::nullopt;
}

RowsStructure rows_structure(const Matrix& m, std::span<const int> rows, double tol)
{
    require_finite(m, "rows_structure");
    if (rows.empty()) {
        throw InputError("rows_structure: empty row set");
    }
    for (int r : rows) {
        if (r < 0 || r >= m.rows()) {
            throw InputError("rows_structure: row index out of range");
        }
    }

    RowsStructure out{true, true};
    double lo = m(rows[0], rows[0]);
    double hi = lo;
    for (int r : rows) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c != r && std::abs(m(r, c)) > tol) {
                out.offdiag_zero = false;
            }
        }
        lo = std::min(lo, m(r, r));
        hi = std::max(hi, m(r, r));
    }
    out.equal_diagonal = (hi - lo) <= tol;
    return out;
}

std::optional<Vector> similarity_diagonalize(const Matrix& m, const Matrix& normals, double tol)
{
    require_finite(m, "similarity_diagonalize");
    require_finite(normals, "similarity_diagonalize normals");
    if (m.rows() != m.cols() || normals.rows() != m.rows() || normals.cols() != m.cols()) {
        throw InputError("similarity_diagonalize: dimension mismatch");
    }

    // Columns are unit, so the singularity threshold is absolute.
    const Eigen::PartialPivLU<Matrix> lu(normals);
    if (std::abs(lu.determinant()) <= 1e-10) {
        throw GeometryError("similarity_diagonalize: normal matrix is singular (invalid cone)");
    }

    // D = N^T M N^{-T}  <=>  D^T = N^{-1} M^T N.
    const Matrix similar = lu.solve(m.transpose() * normals).transpose();
    Matrix off = similar;
    off.diagonal().setZero();
    if (off.norm() <= scaled_tolerance(m, tol)) {
        return Vector(similar.diagonal());
    }
    return std::nullopt;
}

ComplexMatrix matrix_exponential(const ComplexMatrix& c)
{
    if (c.rows() != c.cols()) {
        throw InputError("matrix_exponential: matrix is not square");
    }
    if (!c.allFinite()) {
        throw InputError("matrix_exponential: non-finite entry");
    }
    ComplexMatrix out = c.exp();
    if (!out.allFinite()) {
        throw NumericError("matrix_exponential: overflow");
    }
    return out;
}

ComplexVector eigenvalues(const Matrix& m)
{
    Eigen::EigenSolver<Matrix> solver(m, false);
    if (solver.info() != Eigen::Success) {
        throw NumericError("eigenvalue iteration did not converge");
    }
    return solver.eigenvalues();
}

}  // namespace invariance
