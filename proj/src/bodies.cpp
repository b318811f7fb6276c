#include "invariance/bodies.hpp"

#include "invariance/parabolicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <set>

namespace invariance {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Vector unit(const Vector& v, const std::string& what)
{
    if (!v.allFinite() || v.norm() < 1e-12) {
        throw GeometryError(what + ": normal must be a nonzero finite vector");
    }
    return v.normalized();
}

Vector basis_vector(int dim, int i, double value = 1.0)
{
    Vector e = Vector::Zero(dim);
    e(i) = value;
    return e;
}

void check_indices(int dim, const std::vector<int>& idx, const std::string& what)
{
    if (dim < 1) {
        throw InputError(what + ": dimension must be positive");
    }
    if (idx.empty()) {
        throw InputError(what + ": empty index set");
    }
    std::set<int> seen;
    for (int i : idx) {
        if (i < 0 || i >= dim) {
            throw InputError(what + ": index out of range");
        }
        if (!seen.insert(i).second) {
            throw InputError(what + ": repeated index");
        }
    }
}

// Cyclic projections onto {w : normals_j . w <= -1, j != skip} and, when skip is
// set, {w : normals_skip . w = 0}. Returns a feasible w if one is found.
std::optional<Vector> feasible_direction(const std::vector<Vector>& normals, std::optional<std::size_t> skip, Vector w)
{
    for (int sweep = 0; sweep < 20000; ++sweep) {
        bool feasible = true;
        for (std::size_t j = 0; j < normals.size(); ++j) {
            const double d = normals[j].dot(w);
            if (skip && *skip == j) {
                if (std::abs(d) > 1e-12) {
                    w -= d * normals[j];
                    feasible = feasible && std::abs(d) <= 1e-9;
                }
            } else if (d > -1.0) {
                w -= (d + 1.0) * normals[j];
                feasible = feasible && d <= -1.0 + 1e-9;
            }
        }
        if (feasible) {
            return w;
        }
    }
    return std::nullopt;
}

// Orthonormal basis of the complement of a unit vector, as columns.
Matrix complement_basis(const Vector& axis)
{
    const Eigen::Index m = axis.size();
    Eigen::HouseholderQR<Matrix> qr(axis);
    Matrix q = qr.householderQ() * Matrix::Identity(m, m);
    return q.rightCols(m - 1);
}

}  // namespace

std::string ConvexBody::kind() const
{
    return std::visit(overloaded{
                          [](const HalfSpace&) { return std::string("half_space"); },
                          [](const HPolytope&) { return std::string("h_polytope"); },
                          [](const PolyhedralAngle&) { return std::string("polyhedral_angle"); },
                          [](const PolyhedralCylinder&) { return std::string("polyhedral_cylinder"); },
                          [](const SphericalCylinder&) { return std::string("spherical_cylinder"); },
                          [](const Ball&) { return std::string("ball"); },
                          [](const PolyhedralCone&) { return std::string("polyhedral_cone"); },
                          [](const SmoothCone&) { return std::string("smooth_cone"); },
                      },
                      shape_);
}

ConvexBody make_body(BodyShape shape)
{
    int dim = 0;
    std::visit(overloaded{
                   [&](HalfSpace& h) {
                       h.normal = unit(h.normal, "half_space");
                       if (h.point.size() != h.normal.size() || !h.point.allFinite()) {
                           throw InputError("half_space: point has wrong dimension");
                       }
                       dim = static_cast<int>(h.normal.size());
                   },
                   [&](HPolytope& p) {
                       if (p.faces.empty()) {
                           throw InputError("h_polytope: no faces");
                       }
                       dim = static_cast<int>(p.faces.front().normal.size());
                       for (auto& h : p.faces) {
                           h.normal = unit(h.normal, "h_polytope");
                           if (h.normal.size() != dim || h.point.size() != dim || !h.point.allFinite()) {
                               throw InputError("h_polytope: inconsistent dimensions");
                           }
                       }
                   },
                   [&](PolyhedralAngle& a) {
                       check_indices(a.dim, a.rows, "polyhedral_angle");
                       if (a.lower.size() != a.rows.size()) {
                           throw InputError("polyhedral_angle: one bound per row required");
                       }
                       dim = a.dim;
                   },
                   [&](PolyhedralCylinder& c) {
                       check_indices(c.dim, c.rows, "polyhedral_cylinder");
                       if (c.lower.size() != c.rows.size() || c.upper.size() != c.rows.size()) {
                           throw InputError("polyhedral_cylinder: one lower and one upper bound per row required");
                       }
                       for (std::size_t i = 0; i < c.rows.size(); ++i) {
                           if (!(c.lower[i] < c.upper[i])) {
                               throw GeometryError("polyhedral_cylinder: lower bound must be below upper bound");
                           }
                       }
                       dim = c.dim;
                   },
                   [&](SphericalCylinder& s) {
                       check_indices(s.dim, s.coords, "spherical_cylinder");
                       if (!(s.radius > 0.0)) {
                           throw GeometryError("spherical_cylinder: radius must be positive");
                       }
                       dim = s.dim;
                   },
                   [&](Ball& b) {
                       if (b.center.size() < 1 || !b.center.allFinite()) {
                           throw InputError("ball: invalid center");
                       }
                       if (!(b.radius > 0.0)) {
                           throw GeometryError("ball: radius must be positive");
                       }
                       dim = static_cast<int>(b.center.size());
                   },
                   [&](PolyhedralCone& c) {
                       dim = static_cast<int>(c.vertex.size());
                       if (dim < 1 || static_cast<int>(c.normals.size()) < dim) {
                           throw GeometryError("polyhedral_cone: need at least as many facets as dimensions");
                       }
                       for (auto& nu : c.normals) {
                           if (nu.size() != dim) {
                               throw InputError("polyhedral_cone: normal has wrong dimension");
                           }
                           nu = unit(nu, "polyhedral_cone");
                       }
                       Vector start = Vector::Zero(dim);
                       for (const auto& nu : c.normals) {
                           start -= nu;
                       }
                       auto w = feasible_direction(c.normals, std::nullopt, start);
                       if (!w) {
                           throw GeometryError("polyhedral_cone: normals admit no common interior direction");
                       }
                       c.interior = w->normalized();
                   },
                   [&](SmoothCone& c) {
                       dim = static_cast<int>(c.vertex.size());
                       if (dim < 3 || c.axis.size() != dim) {
                           throw InputError("smooth_cone: inconsistent dimensions");
                       }
                       c.axis = unit(c.axis, "smooth_cone");
                       if (!(c.half_angle > 0.0 && c.half_angle < std::numbers::pi / 2)) {
                           throw GeometryError("smooth_cone: half-angle must lie in (0, pi/2)");
                       }
                   },
               },
               shape);
    return ConvexBody(std::move(shape), dim);
}

ConvexBody make_half_space(Vector normal, Vector point)
{
    return make_body(HalfSpace{std::move(normal), std::move(point)});
}

ConvexBody make_polyhedral_angle(int dim, std::vector<int> rows, std::vector<double> lower)
{
    return make_body(PolyhedralAngle{dim, std::move(rows), std::move(lower)});
}

ConvexBody make_polyhedral_cylinder(int dim, std::vector<int> rows, std::vector<double> lower, std::vector<double> upper)
{
    return make_body(PolyhedralCylinder{dim, std::move(rows), std::move(lower), std::move(upper)});
}

ConvexBody make_spherical_cylinder(int dim, std::vector<int> coords, double radius)
{
    return make_body(SphericalCylinder{dim, std::move(coords), radius});
}

ConvexBody make_ball(Vector center, double radius)
{
    return make_body(Ball{std::move(center), radius});
}

ConvexBody make_polyhedral_cone(Vector vertex, std::vector<Vector> normals)
{
    return make_body(PolyhedralCone{std::move(vertex), std::move(normals), Vector()});
}

ConvexBody make_smooth_cone(Vector vertex, Vector axis, double half_angle)
{
    return make_body(SmoothCone{std::move(vertex), std::move(axis), half_angle});
}

std::vector<Vector> NormalSet::all() const
{
    std::vector<Vector> out = exact;
    out.insert(out.end(), sampled.begin(), sampled.end());
    return out;
}

std::vector<Face> faces(const ConvexBody& body)
{
    return std::visit(
        overloaded{
            [](const HalfSpace& h) { return std::vector<Face>{{h.normal, h.point}}; },
            [](const HPolytope& p) {
                std::vector<Face> out;
                for (const auto& h : p.faces) {
                    out.push_back({h.normal, h.point});
                }
                return out;
            },
            [](const PolyhedralAngle& a) {
                Vector base = Vector::Zero(a.dim);
                for (std::size_t i = 0; i < a.rows.size(); ++i) {
                    base(a.rows[i]) = a.lower[i] + 1.0;
                }
                std::vector<Face> out;
                for (std::size_t i = 0; i < a.rows.size(); ++i) {
                    Vector p = base;
                    p(a.rows[i]) = a.lower[i];
                    out.push_back({basis_vector(a.dim, a.rows[i], -1.0), p});
                }
                return out;
            },
            [](const PolyhedralCylinder& c) {
                Vector base = Vector::Zero(c.dim);
                for (std::size_t i = 0; i < c.rows.size(); ++i) {
                    base(c.rows[i]) = 0.5 * (c.lower[i] + c.upper[i]);
                }
                std::vector<Face> out;
                for (std::size_t i = 0; i < c.rows.size(); ++i) {
                    Vector lo = base;
                    lo(c.rows[i]) = c.lower[i];
                    out.push_back({basis_vector(c.dim, c.rows[i], -1.0), lo});
                    Vector hi = base;
                    hi(c.rows[i]) = c.upper[i];
                    out.push_back({basis_vector(c.dim, c.rows[i], 1.0), hi});
                }
                return out;
            },
            [](const SphericalCylinder& s) {
                if (s.coords.size() != 1) {
                    throw InputError("faces: spherical cylinder has a curved boundary");
                }
                const int i = s.coords.front();
                return std::vector<Face>{{basis_vector(s.dim, i, -1.0), basis_vector(s.dim, i, -s.radius)},
                                         {basis_vector(s.dim, i, 1.0), basis_vector(s.dim, i, s.radius)}};
            },
            [](const Ball& b) -> std::vector<Face> {
                if (b.center.size() != 1) {
                    throw InputError("faces: ball has a curved boundary");
                }
                return {{Vector::Constant(1, -1.0), b.center - Vector::Constant(1, b.radius)},
                        {Vector::Constant(1, 1.0), b.center + Vector::Constant(1, b.radius)}};
            },
            [](const PolyhedralCone& c) {
                std::vector<Face> out;
                for (std::size_t i = 0; i < c.normals.size(); ++i) {
                    Vector start = c.interior - c.normals[i].dot(c.interior) * c.normals[i];
                    auto w = feasible_direction(c.normals, i, start);
                    if (!w) {
                        throw GeometryError("polyhedral_cone: facet " + std::to_string(i + 1) + " is redundant");
                    }
                    out.push_back({c.normals[i], c.vertex + w->normalized()});
                }
                return out;
            },
            [](const SmoothCone&) -> std::vector<Face> { throw InputError("faces: smooth cone has a curved boundary"); },
        },
        body.shape());
}

NormalSet normal_set(const ConvexBody& body, int smooth_samples)
{
    if (smooth_samples < 1) {
        throw InputError("normal_set: sample count must be positive");
    }
    NormalSet out;
    std::visit(overloaded{
                   [&](const SphericalCylinder& s) {
                       const int k = static_cast<int>(s.coords.size());
                       if (k == 1) {
                           for (const auto& f : faces(body)) {
                               out.exact.push_back(f.normal);
                           }
                           return;
                       }
                       for (const auto& w : sphere_points(k, smooth_samples)) {
                           Vector nu = Vector::Zero(s.dim);
                           for (int i = 0; i < k; ++i) {
                               nu(s.coords[static_cast<std::size_t>(i)]) = w(i);
                           }
                           out.sampled.push_back(nu);
                       }
                   },
                   [&](const Ball& b) {
                       if (b.center.size() == 1) {
                           for (const auto& f : faces(body)) {
                               out.exact.push_back(f.normal);
                           }
                           return;
                       }
                       out.sampled = sphere_points(static_cast<int>(b.center.size()), smooth_samples);
                   },
                   [&](const SmoothCone& c) {
                       const Matrix basis = complement_basis(c.axis);
                       const int k = static_cast<int>(basis.cols());
                       const double cs = std::cos(c.half_angle);
                       const double sn = std::sin(c.half_angle);
                       auto& target = k == 1 ? out.exact : out.sampled;
                       for (const auto& w : sphere_points(k, smooth_samples)) {
                           target.push_back((cs * (basis * w) - sn * c.axis).normalized());
                       }
                   },
                   [&](const auto&) {
                       for (const auto& f : faces(body)) {
                           out.exact.push_back(f.normal);
                       }
                   },
               },
               body.shape());
    return out;
}

Vector boundary_point(const ConvexBody& body, const Vector& normal)
{
    if (normal.size() != body.dim()) {
        throw InputError("boundary_point: normal has wrong dimension");
    }
    const Vector nu = unit(normal, "boundary_point");
    return std::visit(overloaded{
                          [&](const SphericalCylinder& s) -> Vector {
                              Vector a = Vector::Zero(s.dim);
                              double mass = 0.0;
                              for (int i : s.coords) {
                                  mass += nu(i) * nu(i);
                              }
                              if (std::abs(mass - 1.0) > 1e-9) {
                                  throw InputError("boundary_point: normal must lie in the curved coordinates");
                              }
                              for (int i : s.coords) {
                                  a(i) = s.radius * nu(i);
                              }
                              return a;
                          },
                          [&](const Ball& b) -> Vector { return b.center + b.radius * nu; },
                          [&](const SmoothCone& c) -> Vector {
                              // nu = cos(h) w - sin(h) axis; the generator through the
                              // touching point is axis + tan(h) w.
                              const double sn = std::sin(c.half_angle);
                              const double cs = std::cos(c.half_angle);
                              if (std::abs(nu.dot(c.axis) + sn) > 1e-9) {
                                  throw InputError("boundary_point: not a normal of the cone");
                              }
                              const Vector w = (nu + sn * c.axis) / cs;
                              return c.vertex + c.axis + std::tan(c.half_angle) * w;
                          },
                          [&](const auto&) -> Vector {
                              for (const auto& f : faces(body)) {
                                  if ((f.normal - nu).norm() <= 1e-9) {
                                      return f.point;
                                  }
                              }
                              throw InputError("boundary_point: not a face normal of the body");
                          },
                      },
                      body.shape());
}

Vector interior_point(const ConvexBody& body)
{
    return std::visit(overloaded{
                          [](const HalfSpace& h) -> Vector { return h.point - h.normal; },
                          [](const HPolytope& p) -> Vector {
                              // Cyclic projections onto nu_i . u <= nu_i . a_i - 1e-3.
                              Vector u = p.faces.front().point;
                              for (int sweep = 0; sweep < 20000; ++sweep) {
                                  bool ok = true;
                                  for (const auto& f : p.faces) {
                                      const double d = f.normal.dot(u - f.point) + 1e-3;
                                      if (d > 0.0) {
                                          u -= d * f.normal;
                                          ok = ok && d <= 1e-12;
                                      }
                                  }
                                  if (ok) {
                                      return u;
                                  }
                              }
                              throw GeometryError("h_polytope: empty interior");
                          },
                          [](const PolyhedralAngle& a) -> Vector {
                              Vector u = Vector::Zero(a.dim);
                              for (std::size_t i = 0; i < a.rows.size(); ++i) {
                                  u(a.rows[i]) = a.lower[i] + 1.0;
                              }
                              return u;
                          },
                          [](const PolyhedralCylinder& c) -> Vector {
                              Vector u = Vector::Zero(c.dim);
                              for (std::size_t i = 0; i < c.rows.size(); ++i) {
                                  u(c.rows[i]) = 0.5 * (c.lower[i] + c.upper[i]);
                              }
                              return u;
                          },
                          [](const SphericalCylinder& s) -> Vector { return Vector::Zero(s.dim); },
                          [](const Ball& b) -> Vector { return b.center; },
                          [](const PolyhedralCone& c) -> Vector { return c.vertex + c.interior; },
                          [](const SmoothCone& c) -> Vector { return c.vertex + c.axis; },
                      },
                      body.shape());
}

double violation(const ConvexBody& body, const Vector& u)
{
    if (u.size() != body.dim()) {
        throw InputError("violation: point has wrong dimension");
    }
    return std::visit(overloaded{
                          [&](const HalfSpace& h) { return (u - h.point).dot(h.normal); },
                          [&](const HPolytope& p) {
                              double worst = -std::numeric_limits<double>::infinity();
                              for (const auto& h : p.faces) {
                                  worst = std::max(worst, (u - h.point).dot(h.normal));
                              }
                              return worst;
                          },
                          [&](const PolyhedralAngle& a) {
                              double worst = -std::numeric_limits<double>::infinity();
                              for (std::size_t i = 0; i < a.rows.size(); ++i) {
                                  worst = std::max(worst, a.lower[i] - u(a.rows[i]));
                              }
                              return worst;
                          },
                          [&](const PolyhedralCylinder& c) {
                              double worst = -std::numeric_limits<double>::infinity();
                              for (std::size_t i = 0; i < c.rows.size(); ++i) {
                                  worst = std::max({worst, c.lower[i] - u(c.rows[i]), u(c.rows[i]) - c.upper[i]});
                              }
                              return worst;
                          },
                          [&](const SphericalCylinder& s) {
                              double sq = 0.0;
                              for (int i : s.coords) {
                                  sq += u(i) * u(i);
                              }
                              return std::sqrt(sq) - s.radius;
                          },
                          [&](const Ball& b) { return (u - b.center).norm() - b.radius; },
                          [&](const PolyhedralCone& c) {
                              double worst = -std::numeric_limits<double>::infinity();
                              for (const auto& nu : c.normals) {
                                  worst = std::max(worst, (u - c.vertex).dot(nu));
                              }
                              return worst;
                          },
                          [&](const SmoothCone& c) {
                              const Vector v = u - c.vertex;
                              const double height = v.dot(c.axis);
                              const double radial = (v - height * c.axis).norm();
                              return radial * std::cos(c.half_angle) - height * std::sin(c.half_angle);
                          },
                      },
                      body.shape());
}

bool membership(const ConvexBody& body, const Vector& u)
{
    return violation(body, u) <= 0.0;
}

Vector pull_inside(const ConvexBody& body, const Vector& u)
{
    if (const auto* s = body.as<SphericalCylinder>()) {
        double sq = 0.0;
        for (int i : s->coords) {
            sq += u(i) * u(i);
        }
        const double r = std::sqrt(sq);
        if (r <= s->radius) {
            return u;
        }
        Vector out = u;
        for (int i : s->coords) {
            out(i) *= s->radius / r;
        }
        return out;
    }
    if (const auto* b = body.as<Ball>()) {
        const Vector d = u - b->center;
        const double r = d.norm();
        return r <= b->radius ? u : Vector(b->center + d * (b->radius / r));
    }
    return u;
}

Matrix cone_normal_matrix(const PolyhedralCone& cone)
{
    const Eigen::Index m = cone.vertex.size();
    if (static_cast<Eigen::Index>(cone.normals.size()) != m) {
        throw InputError("cone_normal_matrix: cone must have exactly m facets");
    }
    Matrix n(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        n.col(i) = cone.normals[static_cast<std::size_t>(i)];
    }
    if (std::abs(n.transpose().partialPivLu().determinant()) <= 1e-10) {
        throw GeometryError("cone_normal_matrix: facet normals are linearly dependent (invalid cone)");
    }
    return n;
}

}  // namespace invariance
