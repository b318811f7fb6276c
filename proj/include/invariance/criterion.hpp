#pragma once

#include "invariance/bodies.hpp"
#include "invariance/coefficients.hpp"
#include "invariance/linalg.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace invariance {

enum class Status { Invariant, NotInvariant, SufficientHolds, NecessaryViolated, Inconclusive };

std::string to_string(Status status);

/// One (matrix, sample point, normal) alignment test.
struct Witness {
    MatrixId matrix;
    SamplePoint point;
    Vector normal;
    AlignmentResult alignment;
};

struct Verdict {
    Status status = Status::Inconclusive;
    std::vector<Witness> witnesses;             // failing alignments (all aligned=false)
    std::optional<std::string> structural_path; // shortcut that produced the verdict
    std::vector<std::pair<MatrixId, double>> max_residual;  // per matrix, over samples and normals
    std::vector<std::pair<MatrixId, Vector>> diagonal_forms; // cone with m facets: D per matrix
    double tolerance = kDefaultAlignTol;
    std::size_t sample_count = 0;
    std::size_t normal_count = 0;
    bool t_zero_aligned = false;  // for Inconclusive: every alignment at t = 0 held

    bool holds() const { return status == Status::Invariant || status == Status::SufficientHolds; }
    bool violated() const { return status == Status::NotInvariant || status == Status::NecessaryViolated; }
};

struct CheckOptions {
    double tol = kDefaultAlignTol;
    int smooth_samples = 64;   // normals sampled on curved boundary pieces
    std::size_t max_witnesses = 32;
};

/// Eigenvector criterion over the body's normal set and the sample grid.
/// t-independent coefficients give Invariant / NotInvariant. t-dependent
/// coefficients give SufficientHolds when every (x,t) aligns, NecessaryViolated
/// when some (x,0) misaligns, and Inconclusive otherwise.
Verdict check_theorem(const CoefficientField& field, const ConvexBody& body, const std::vector<SamplePoint>& samples,
                      const CheckOptions& options = {});

/// Invariance in every layer [tau, T): alignment at every sampled (x,t).
Verdict layer_criterion(const CoefficientField& field, const ConvexBody& body, const std::vector<SamplePoint>& samples,
                        const CheckOptions& options = {});

/// Rows `rows` (0-based) of every matrix have zero off-diagonal entries.
Verdict check_polyhedral_angle(const CoefficientField& field, const std::vector<int>& rows,
                               const std::vector<SamplePoint>& samples, const CheckOptions& options = {});

/// Same structural test as the polyhedral angle.
Verdict check_cylinder(const CoefficientField& field, const std::vector<int>& rows, const std::vector<SamplePoint>& samples,
                       const CheckOptions& options = {});

/// Rows `coords` have zero off-diagonals and, within each matrix, equal diagonal entries.
Verdict check_spherical_cylinder(const CoefficientField& field, const std::vector<int>& coords,
                                 const std::vector<SamplePoint>& samples, const CheckOptions& options = {});

/// Cone with m facets: every matrix is diagonalised by the facet normals.
/// More facets, or a smooth cone: every matrix is scalar.
Verdict check_cone(const CoefficientField& field, const ConvexBody& cone, const std::vector<SamplePoint>& samples,
                   const CheckOptions& options = {});

/// The structural shortcut matching the body family, if one exists.
std::optional<Verdict> structural_check(const CoefficientField& field, const ConvexBody& body,
                                        const std::vector<SamplePoint>& samples, const CheckOptions& options = {});

}  // namespace invariance
