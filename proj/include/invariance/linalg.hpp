#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace invariance {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Malformed or inconsistent caller input.
class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A body whose geometry is degenerate (singular cone normals, empty interior, ...).
class GeometryError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Overflow, non-finite results or a failed eigenvalue iteration.
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultAlignTol = 1e-9;

struct AlignmentResult {
    bool aligned = false;
    double eigenvalue = 0.0;  // Rayleigh quotient (M^T nu) . nu
    double residual = 0.0;    // || M^T nu - eigenvalue * nu ||_2
};

/// Tests whether the unit vector `normal` is an eigenvector of `m` transposed.
/// Aligned iff the residual is at most tol * (1 + ||m||_F).
AlignmentResult eigen_align(const Matrix& m, const Vector& normal, double tol = kDefaultAlignTol);

/// Threshold used by the structural predicates: tol * (1 + ||m||_F).
double scaled_tolerance(const Matrix& m, double tol);

/// Returns trace(m)/order when ||m - lambda I||_F <= tol * (1 + ||m||_F).
std::optional<double> is_scalar(const Matrix& m, double tol = kDefaultAlignTol);

struct RowsStructure {
    bool offdiag_zero = false;
    bool equal_diagonal = false;
};

/// Inspects the rows listed in `rows` (0-based). `tol` is absolute here.
RowsStructure rows_structure(const Matrix& m, std::span<const int> rows, double tol);

/// Diagonal of N^T m (N^T)^{-1} when that similarity is diagonal to tolerance.
/// `normals` holds the stacked unit normals as columns. Throws GeometryError when
/// N^T is singular.
std::optional<Vector> similarity_diagonalize(const Matrix& m, const Matrix& normals,
                                             double tol = kDefaultAlignTol);

/// exp(c) by scaling and squaring with Pade approximation.
ComplexMatrix matrix_exponential(const ComplexMatrix& c);

/// Eigenvalues of a general real matrix. Throws NumericError if the QR iteration fails.
ComplexVector eigenvalues(const Matrix& m);

void require_finite(const Matrix& m, const std::string& what);

}  // namespace invariance
