#pragma once

#include "invariance/linalg.hpp"

#include <string>
#include <variant>
#include <vector>

namespace invariance {

/// {u : (u - point) . normal <= 0}
struct HalfSpace {
    Vector normal;
    Vector point;
};

/// Intersection of half-spaces.
struct HPolytope {
    std::vector<HalfSpace> faces;
};

/// {u : u_i >= lower_i for i in rows}; rows are 0-based.
struct PolyhedralAngle {
    int dim = 0;
    std::vector<int> rows;
    std::vector<double> lower;
};

/// {u : lower_i <= u_i <= upper_i for i in rows}.
struct PolyhedralCylinder {
    int dim = 0;
    std::vector<int> rows;
    std::vector<double> lower;
    std::vector<double> upper;
};

/// {u : sum_{i in coords} u_i^2 <= radius^2}.
struct SphericalCylinder {
    int dim = 0;
    std::vector<int> coords;
    double radius = 1.0;
};

struct Ball {
    Vector center;
    double radius = 1.0;
};

/// {u : normals_i . (u - vertex) <= 0}. `interior` is a unit direction with
/// normals_i . interior < 0 for every i, filled in by make_polyhedral_cone.
struct PolyhedralCone {
    Vector vertex;
    std::vector<Vector> normals;
    Vector interior;
};

/// Circular cone around `axis` with the given half-angle. Stands in for a cone
/// with a smooth guide; its criterion only needs scalarity of the coefficients.
struct SmoothCone {
    Vector vertex;
    Vector axis;
    double half_angle = 0.5;
};

using BodyShape =
    std::variant<HalfSpace, HPolytope, PolyhedralAngle, PolyhedralCylinder, SphericalCylinder, Ball, PolyhedralCone, SmoothCone>;

/// Validated, immutable convex body.
class ConvexBody {
  public:
    const BodyShape& shape() const { return shape_; }
    int dim() const { return dim_; }
    std::string kind() const;

    template <class T>
    const T* as() const
    {
        return std::get_if<T>(&shape_);
    }

    friend ConvexBody make_body(BodyShape shape);

  private:
    explicit ConvexBody(BodyShape shape, int dim) : shape_(std::move(shape)), dim_(dim) {}
    BodyShape shape_;
    int dim_;
};

/// Validates invariants (unit normals, lower < upper, R > 0, cone interior, ...)
/// and throws GeometryError or InputError. Normals are normalised if they are
/// nonzero but not unit length.
ConvexBody make_body(BodyShape shape);

ConvexBody make_half_space(Vector normal, Vector point);
ConvexBody make_polyhedral_angle(int dim, std::vector<int> rows, std::vector<double> lower);
ConvexBody make_polyhedral_cylinder(int dim, std::vector<int> rows, std::vector<double> lower, std::vector<double> upper);
ConvexBody make_spherical_cylinder(int dim, std::vector<int> coords, double radius);
ConvexBody make_ball(Vector center, double radius);
ConvexBody make_polyhedral_cone(Vector vertex, std::vector<Vector> normals);
ConvexBody make_smooth_cone(Vector vertex, Vector axis, double half_angle);

struct NormalSet {
    std::vector<Vector> exact;    // complete list for flat boundary pieces
    std::vector<Vector> sampled;  // samples of curved boundary pieces

    std::vector<Vector> all() const;
};

/// Outward unit normals of the body. Curved parts contribute `smooth_samples`
/// deterministic samples.
NormalSet normal_set(const ConvexBody& body, int smooth_samples = 64);

/// A face of a polyhedral body: its outward normal and a point in the face's
/// relative interior.
struct Face {
    Vector normal;
    Vector point;
};

/// Faces of a polyhedral body. Throws InputError for curved bodies.
std::vector<Face> faces(const ConvexBody& body);

/// A boundary point where `normal` is the outward unit normal. For polyhedral
/// bodies `normal` must be one of the face normals.
Vector boundary_point(const ConvexBody& body, const Vector& normal);

/// A point in the interior of the body.
Vector interior_point(const ConvexBody& body);

/// Continuous, convex, <= 0 exactly on the body. Max constraint residual for
/// polyhedral pieces, radial excess for spherical pieces.
double violation(const ConvexBody& body, const Vector& u);

bool membership(const ConvexBody& body, const Vector& u);

/// Radial projection onto the body for the ball and spherical cylinder; the
/// identity for every other body.
Vector pull_inside(const ConvexBody& body, const Vector& u);

/// [nu_1, ..., nu_m] for a cone with exactly m facets. Throws GeometryError when
/// |det| <= 1e-10.
Matrix cone_normal_matrix(const PolyhedralCone& cone);

}  // namespace invariance
