#pragma once

#include "invariance/coefficients.hpp"
#include "invariance/linalg.hpp"

#include <vector>

namespace invariance {

/// Principal symbol M(sigma) = sum_jk A_jk sigma_j sigma_k at one sample.
Matrix symbol_matrix(const CoefficientSample& coeffs, std::span<const double> sigma);

/// First-order symbol B(sigma) = sum_j A_j sigma_j.
Matrix drift_symbol(const CoefficientSample& coeffs, std::span<const double> sigma);

/// Smallest real part among the eigenvalues of m.
double min_real_eigenvalue(const Matrix& m);

/// Deterministic unit vectors in R^dim.
///   dim == 1: {+1, -1}
///   dim == 2: `count` equally spaced angles
///   dim == 3: Fibonacci lattice with `count` points
///   dim >= 4: `count` normalised Gaussian draws from a fixed seed
std::vector<Vector> sphere_points(int dim, int count);

/// Default sphere resolution per space dimension.
int default_sphere_resolution(int dim);

struct MarginOptions {
    int sphere_resolution = 0;  // 0 selects default_sphere_resolution(n)
    bool refine = true;         // local pattern search around the sampled minimiser
};

struct ParabolicityReport {
    double margin = 0.0;  // estimated delta
    SamplePoint witness_point;
    Vector witness_sigma;
    bool parabolic = false;
    int sphere_resolution = 0;
    std::size_t sample_count = 0;
    bool refined = false;
};

/// Estimates the uniform Petrovskii margin: the minimum over samples and unit
/// sigma of min_i Re eig_i(M(sigma)). A sampled estimate, not a certificate.
ParabolicityReport petrovskii_margin(const CoefficientField& field, const std::vector<SamplePoint>& samples,
                                     const MarginOptions& options = {});

/// Spectral radius bound of M(sigma) and B(sigma) over unit sigma and samples,
/// used by the explicit solver's stability gate.
struct SymbolBounds {
    double second_order = 0.0;  // max |eig M(sigma)|
    double first_order = 0.0;   // max |eig B(sigma)|
};
SymbolBounds symbol_bounds(const CoefficientField& field, const std::vector<SamplePoint>& samples, int sphere_resolution = 0);

}  // namespace invariance
