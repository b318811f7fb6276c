#include "invariance/criterion.hpp"

#include <algorithm>
#include <cmath>

namespace invariance {

std::string to_string(Status status)
{
    switch (status) {
    case Status::Invariant: return "Invariant";
    case Status::NotInvariant: return "NotInvariant";
    case Status::SufficientHolds: return "SufficientHolds";
    case Status::NecessaryViolated: return "NecessaryViolated";
    case Status::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

namespace {

struct Sweep {
    std::vector<Witness> failures;
    std::vector<std::pair<MatrixId, double>> max_residual;
    std::size_t failure_count = 0;
};

void note_residual(std::vector<std::pair<MatrixId, double>>& table, const MatrixId& id, double residual)
{
    for (auto& [key, value] : table) {
        if (key == id) {
            value = std::max(value, residual);
            return;
        }
    }
    table.emplace_back(id, residual);
}

// Ordered sweep over (sample, matrix, normal). Witnesses keep that order.
Sweep sweep_alignment(const CoefficientField& field, const std::vector<SamplePoint>& points,
                      const std::vector<Vector>& normals, const CheckOptions& options)
{
    Sweep out;
    const auto ids = field.matrix_ids();
    for (const auto& p : points) {
        const CoefficientSample s = field.at(p);
        for (const auto& id : ids) {
            const Matrix& a = field.matrix(s, id);
            for (const auto& nu : normals) {
                const AlignmentResult r = eigen_align(a, nu, options.tol);
                note_residual(out.max_residual, id, r.residual);
                if (!r.aligned) {
                    ++out.failure_count;
                    if (out.failures.size() < options.max_witnesses) {
                        out.failures.push_back({id, p, nu, r});
                    }
                }
            }
        }
    }
    return out;
}

void require_compatible(const CoefficientField& field, const ConvexBody& body)
{
    if (field.components() != body.dim()) {
        throw InputError("body dimension does not match the number of components");
    }
}

void require_t_independent(const CoefficientField& field, const char* what)
{
    if (field.t_dependent()) {
        throw InputError(std::string(what) + " requires coefficients that do not depend on t");
    }
}

Vector basis_vector(int dim, int i, double value = 1.0)
{
    Vector e = Vector::Zero(dim);
    e(i) = value;
    return e;
}

// Structural checks share this loop: `test` returns the normal of a failing
// alignment for one matrix, or nothing.
template <class Test>
Verdict structural_sweep(const CoefficientField& field, const std::vector<SamplePoint>& samples,
                         const CheckOptions& options, const std::string& path, Test&& test)
{
    Verdict v;
    v.tolerance = options.tol;
    v.structural_path = path;
    const auto points = effective_samples(field, samples);
    v.sample_count = points.size();
    for (const auto& p : points) {
        const CoefficientSample s = field.at(p);
        for (const auto& id : field.matrix_ids()) {
            const Matrix& a = field.matrix(s, id);
            if (auto nu = test(a, id)) {
                if (v.witnesses.size() < options.max_witnesses) {
                    v.witnesses.push_back({id, p, *nu, eigen_align(a, *nu, options.tol)});
                }
            }
        }
    }
    v.status = v.witnesses.empty() ? Status::Invariant : Status::NotInvariant;
    return v;
}

// A unit vector that is not an eigenvector of a^T, chosen from `preferred`
// first and then from e_i and (e_i +- e_j)/sqrt(2). One of the latter always
// fails for a non-scalar matrix.
std::optional<Vector> misaligned_normal(const Matrix& a, const std::vector<Vector>& preferred, double tol)
{
    for (const auto& nu : preferred) {
        if (!eigen_align(a, nu, tol).aligned) {
            return nu;
        }
    }
    const int m = static_cast<int>(a.rows());
    for (int i = 0; i < m; ++i) {
        Vector e = basis_vector(m, i);
        if (!eigen_align(a, e, tol).aligned) {
            return e;
        }
    }
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            for (double sign : {1.0, -1.0}) {
                Vector e = (basis_vector(m, i) + sign * basis_vector(m, j)) / std::sqrt(2.0);
                if (!eigen_align(a, e, tol).aligned) {
                    return e;
                }
            }
        }
    }
    return std::nullopt;
}

}  // namespace

Verdict check_theorem(const CoefficientField& field, const ConvexBody& body, const std::vector<SamplePoint>& samples,
                      const CheckOptions& options)
{
    require_compatible(field, body);
    const std::vector<Vector> normals = normal_set(body, options.smooth_samples).all();
    const auto points = effective_samples(field, samples);

    Verdict v;
    v.tolerance = options.tol;
    v.sample_count = points.size();
    v.normal_count = normals.size();

    if (!field.t_dependent()) {
        Sweep sweep = sweep_alignment(field, points, normals, options);
        v.max_residual = std::move(sweep.max_residual);
        v.witnesses = std::move(sweep.failures);
        v.status = v.witnesses.empty() ? Status::Invariant : Status::NotInvariant;
        return v;
    }

    std::vector<SamplePoint> initial;
    std::vector<SamplePoint> later;
    for (const auto& p : points) {
        (p.t == 0.0 ? initial : later).push_back(p);
    }
    Sweep at_zero = sweep_alignment(field, initial, normals, options);
    Sweep after = sweep_alignment(field, later, normals, options);
    v.max_residual = at_zero.max_residual;
    for (const auto& [id, r] : after.max_residual) {
        note_residual(v.max_residual, id, r);
    }
    v.t_zero_aligned = at_zero.failures.empty();
    if (!at_zero.failures.empty()) {
        v.status = Status::NecessaryViolated;
        v.witnesses = std::move(at_zero.failures);
    } else if (after.failures.empty()) {
        v.status = Status::SufficientHolds;
    } else {
        v.status = Status::Inconclusive;
        v.witnesses = std::move(after.failures);
    }
    return v;
}

Verdict layer_criterion(const CoefficientField& field, const ConvexBody& body, const std::vector<SamplePoint>& samples,
                        const CheckOptions& options)
{
    require_compatible(field, body);
    const std::vector<Vector> normals = normal_set(body, options.smooth_samples).all();
    const auto points = effective_samples(field, samples);
    Sweep sweep = sweep_alignment(field, points, normals, options);

    Verdict v;
    v.tolerance = options.tol;
    v.sample_count = points.size();
    v.normal_count = normals.size();
    v.structural_path = "layer";
    v.max_residual = std::move(sweep.max_residual);
    v.witnesses = std::move(sweep.failures);
    v.status = v.witnesses.empty() ? Status::Invariant : Status::NotInvariant;
    return v;
}

Verdict check_polyhedral_angle(const CoefficientField& field, const std::vector<int>& rows,
                               const std::vector<SamplePoint>& samples, const CheckOptions& options)
{
    require_t_independent(field, "check_polyhedral_angle");
    const int m = field.components();
    return structural_sweep(field, samples, options, "polyhedral_angle",
                            [&](const Matrix& a, const MatrixId&) -> std::optional<Vector> {
                                const double tol = scaled_tolerance(a, options.tol);
                                for (int r : rows) {
                                    const int one[] = {r};
                                    if (!rows_structure(a, one, tol).offdiag_zero) {
                                        return basis_vector(m, r, -1.0);
                                    }
                                }
                                return std::nullopt;
                            });
}

Verdict check_cylinder(const CoefficientField& field, const std::vector<int>& rows, const std::vector<SamplePoint>& samples,
                       const CheckOptions& options)
{
    Verdict v = check_polyhedral_angle(field, rows, samples, options);
    v.structural_path = "polyhedral_cylinder";
    return v;
}

Verdict check_spherical_cylinder(const CoefficientField& field, const std::vector<int>& coords,
                                 const std::vector<SamplePoint>& samples, const CheckOptions& options)
{
    require_t_independent(field, "check_spherical_cylinder");
    const int m = field.components();
    return structural_sweep(field, samples, options, "spherical_cylinder",
                            [&](const Matrix& a, const MatrixId&) -> std::optional<Vector> {
                                const double tol = scaled_tolerance(a, options.tol);
                                for (int r : coords) {
                                    const int one[] = {r};
                                    if (!rows_structure(a, one, tol).offdiag_zero) {
                                        return basis_vector(m, r, 1.0);
                                    }
                                }
                                if (!rows_structure(a, coords, tol).equal_diagonal) {
                                    // Two curved coordinates with different rates.
                                    auto [lo, hi] = std::minmax_element(coords.begin(), coords.end(),
                                                                        [&](int i, int j) { return a(i, i) < a(j, j); });
                                    return Vector((basis_vector(m, *lo) + basis_vector(m, *hi)) / std::sqrt(2.0));
                                }
                                return std::nullopt;
                            });
}

Verdict check_cone(const CoefficientField& field, const ConvexBody& cone, const std::vector<SamplePoint>& samples,
                   const CheckOptions& options)
{
    require_t_independent(field, "check_cone");
    require_compatible(field, cone);
    const int m = field.components();

    if (const auto* poly = cone.as<PolyhedralCone>(); poly && static_cast<int>(poly->normals.size()) == m) {
        const Matrix normals = cone_normal_matrix(*poly);
        std::vector<std::pair<MatrixId, Vector>> forms;
        Verdict v = structural_sweep(field, samples, options, "cone_diagonalizable",
                                     [&](const Matrix& a, const MatrixId& id) -> std::optional<Vector> {
                                         if (auto d = similarity_diagonalize(a, normals, options.tol)) {
                                             forms.emplace_back(id, *d);
                                             return std::nullopt;
                                         }
                                         return misaligned_normal(a, poly->normals, options.tol);
                                     });
        v.normal_count = poly->normals.size();
        if (v.status == Status::Invariant) {
            v.diagonal_forms = std::move(forms);
        }
        return v;
    }

    std::vector<Vector> preferred;
    if (const auto* poly = cone.as<PolyhedralCone>()) {
        preferred = poly->normals;
    } else if (cone.as<SmoothCone>()) {
        preferred = normal_set(cone, options.smooth_samples).all();
    } else {
        throw InputError("check_cone: body is not a cone");
    }
    Verdict v = structural_sweep(field, samples, options, "cone_scalar",
                                 [&](const Matrix& a, const MatrixId&) -> std::optional<Vector> {
                                     if (is_scalar(a, options.tol)) {
                                         return std::nullopt;
                                     }
                                     return misaligned_normal(a, preferred, options.tol);
                                 });
    v.normal_count = preferred.size();
    return v;
}

std::optional<Verdict> structural_check(const CoefficientField& field, const ConvexBody& body,
                                        const std::vector<SamplePoint>& samples, const CheckOptions& options)
{
    if (field.t_dependent()) {
        return std::nullopt;
    }
    require_compatible(field, body);
    if (const auto* a = body.as<PolyhedralAngle>()) {
        return check_polyhedral_angle(field, a->rows, samples, options);
    }
    if (const auto* c = body.as<PolyhedralCylinder>()) {
        return check_cylinder(field, c->rows, samples, options);
    }
    if (const auto* s = body.as<SphericalCylinder>()) {
        return check_spherical_cylinder(field, s->coords, samples, options);
    }
    if (body.as<Ball>()) {
        std::vector<int> all(static_cast<std::size_t>(body.dim()));
        for (int i = 0; i < body.dim(); ++i) {
            all[static_cast<std::size_t>(i)] = i;
        }
        Verdict v = check_spherical_cylinder(field, all, samples, options);
        v.structural_path = "ball";
        return v;
    }
    if (body.as<PolyhedralCone>() || body.as<SmoothCone>()) {
        return check_cone(field, body, samples, options);
    }
    return std::nullopt;
}

}  // namespace invariance
