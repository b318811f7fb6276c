#include "invariance/criterion.hpp"

#include "../support/generators.hpp"

#include <doctest.h>

#include <cmath>

using namespace invariance;

namespace {

using Cells = std::vector<std::vector<std::vector<std::string>>>;

Matrix mat2(double a, double b, double c, double d)
{
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

Matrix diag(std::initializer_list<double> xs)
{
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) {
        v(i++) = x;
    }
    return v.asDiagonal();
}

const std::vector<SamplePoint> kOrigin{SamplePoint{{0.0}, 0.0}};

// the half-plane u2 >= 0
ConvexBody upper_half_plane()
{
    return make_polyhedral_angle(2, {1}, {0.0});
}

CoefficientField one_matrix(const Matrix& a)
{
    return CoefficientField::constant(1, static_cast<int>(a.rows()), {a});
}

}  // namespace

TEST_CASE("heat system is invariant for every body")
{
    gen::Rng rng(61);
    const auto heat = CoefficientField::constant(1, 3, {Matrix::Identity(3, 3)});
    std::vector<ConvexBody> bodies{make_half_space(gen::unit_vector(3, rng), Vector::Zero(3)),
                                   make_polyhedral_angle(3, {0, 2}, {0.0, 1.0}),
                                   make_spherical_cylinder(3, {1, 2}, 1.0),
                                   make_ball(Vector::Zero(3), 2.0),
                                   make_polyhedral_cone(Vector::Zero(3), gen::cone_normals(3, rng)),
                                   make_smooth_cone(Vector::Zero(3), Vector::Unit(3, 2), 0.4)};
    for (const auto& body : bodies) {
        const auto v = check_theorem(heat, body, kOrigin);
        CHECK(v.status == Status::Invariant);
        CHECK(v.witnesses.empty());
    }
}

TEST_CASE("triangular systems on the half-plane")
{
    auto v = check_theorem(one_matrix(mat2(1, 0.3, 0, 2)), upper_half_plane(), kOrigin);
    CHECK(v.status == Status::Invariant);
    CHECK(v.holds());

    v = check_theorem(one_matrix(mat2(1, 0, 0.5, 2)), upper_half_plane(), kOrigin);
    CHECK(v.status == Status::NotInvariant);
    CHECK(v.violated());
    REQUIRE(v.witnesses.size() == 1);
    const auto& w = v.witnesses[0];
    CHECK(w.matrix.name() == "A11");
    CHECK((w.normal - Vector::Unit(2, 1) * -1.0).norm() == 0.0);
    CHECK(std::abs(w.alignment.residual - 0.5) <= 1e-12);
    CHECK_FALSE(w.alignment.aligned);
}

TEST_CASE("polyhedral angle shortcut")
{
    Matrix block = diag({1, 2, 3});
    block(0, 1) = 0.4;
    block(0, 2) = -0.7;
    auto v = check_polyhedral_angle(one_matrix(block), {1, 2}, kOrigin);
    CHECK(v.status == Status::Invariant);
    CHECK(v.structural_path == "polyhedral_angle");

    block(2, 0) = 0.2;
    v = check_polyhedral_angle(one_matrix(block), {1, 2}, kOrigin);
    CHECK(v.status == Status::NotInvariant);
    REQUIRE_FALSE(v.witnesses.empty());
    CHECK_FALSE(v.witnesses[0].alignment.aligned);

    v = check_polyhedral_angle(one_matrix(mat2(1, 0.3, 0, 2)), {1}, kOrigin);
    CHECK(v.status == Status::Invariant);
}

TEST_CASE("cylinder shortcut")
{
    auto v = check_cylinder(one_matrix(mat2(1, 0.3, 0, 2)), {1}, kOrigin);
    CHECK(v.status == Status::Invariant);
    CHECK(v.structural_path == "polyhedral_cylinder");

    v = check_cylinder(one_matrix(mat2(1, 0.3, 1e-3, 2)), {1}, kOrigin);
    CHECK(v.status == Status::NotInvariant);

    v = check_cylinder(one_matrix(diag({1, 5, 2})), {0, 1, 2}, kOrigin);
    CHECK(v.status == Status::Invariant);

    const auto strip = make_polyhedral_cylinder(2, {1}, {-1.0}, {2.0});
    CHECK(check_theorem(one_matrix(mat2(1, 0.3, 0, 2)), strip, kOrigin).status == Status::Invariant);
}

TEST_CASE("spherical cylinder shortcut")
{
    auto v = check_spherical_cylinder(one_matrix(mat2(1, 0.7, 0, 3)), {1}, kOrigin);
    CHECK(v.status == Status::Invariant);

    v = check_spherical_cylinder(one_matrix(diag({1, 2, 3})), {1, 2}, kOrigin);
    CHECK(v.status == Status::NotInvariant);
    REQUIRE_FALSE(v.witnesses.empty());
    const auto again = eigen_align(diag({1, 2, 3}), v.witnesses[0].normal);
    CHECK_FALSE(again.aligned);

    Matrix a(3, 3);
    a << 1, 1, 2, 0, 5, 0, 0, 0, 5;
    v = check_spherical_cylinder(one_matrix(a), {1, 2}, kOrigin);
    CHECK(v.status == Status::Invariant);
}

TEST_CASE("cone shortcut")
{
    const auto orthant = make_polyhedral_cone(Vector::Zero(2), gen::orthant_normals(2));
    const auto field = CoefficientField::constant(2, 2, {diag({1, 2}), diag({0.1, 0.3}), diag({0.1, 0.3}), diag({4, 1})},
                                                  {diag({1, -1}), diag({0, 2})});
    auto v = check_cone(field, orthant, {SamplePoint{{0.0, 0.0}, 0.0}});
    CHECK(v.status == Status::Invariant);
    CHECK(v.structural_path == "cone_diagonalizable");
    const auto s = field.at(SamplePoint{{0.0, 0.0}, 0.0});
    REQUIRE(v.diagonal_forms.size() == field.matrix_ids().size());
    for (const auto& [id, d] : v.diagonal_forms) {
        CHECK((Matrix(d.asDiagonal()) - field.matrix(s, id)).norm() <= 1e-14);
    }

    gen::Rng rng(67);
    const auto pyramid = make_polyhedral_cone(Vector::Zero(3), gen::cone_normals_extra(3, 1, rng));
    v = check_cone(one_matrix(3.0 * Matrix::Identity(3, 3)), pyramid, kOrigin);
    CHECK(v.status == Status::Invariant);
    CHECK(v.structural_path == "cone_scalar");

    v = check_cone(one_matrix(diag({1, 2, 2})), pyramid, kOrigin);
    CHECK(v.status == Status::NotInvariant);
    CHECK(check_theorem(one_matrix(diag({1, 2, 2})), pyramid, kOrigin).status == Status::NotInvariant);
}

TEST_CASE("layer criterion")
{
    const auto grid = sample_grid({{0.0}}, {0.0, 0.25, 0.5, 1.0});
    const auto scaled = CoefficientField::from_expressions(1, 2, Cells{{{"1 + t", "0.3 * (1 + t)"}, {"0", "2 * (1 + t)"}}}, {});
    auto v = layer_criterion(scaled, upper_half_plane(), grid);
    CHECK(v.status == Status::Invariant);
    CHECK(v.structural_path == "layer");

    const auto skew = CoefficientField::from_expressions(1, 2, Cells{{{"1", "0"}, {"t", "2"}}}, {});
    v = layer_criterion(skew, upper_half_plane(), grid);
    CHECK(v.status == Status::NotInvariant);
    REQUIRE_FALSE(v.witnesses.empty());
    CHECK(v.witnesses[0].point.t > 0.0);

    const auto constant = one_matrix(mat2(1, 0, 0.5, 2));
    CHECK(layer_criterion(constant, upper_half_plane(), kOrigin).status ==
          check_theorem(constant, upper_half_plane(), kOrigin).status);
}

TEST_CASE("time-dependent verdicts")
{
    const auto grid = sample_grid({{0.0}}, {0.0, 0.5});
    const auto scaled = CoefficientField::from_expressions(1, 2, Cells{{{"1 + t", "0.3"}, {"0", "2 + t"}}}, {});
    CHECK(check_theorem(scaled, upper_half_plane(), grid).status == Status::SufficientHolds);

    const auto late = CoefficientField::from_expressions(1, 2, Cells{{{"1", "0"}, {"t", "2"}}}, {});
    auto v = check_theorem(late, upper_half_plane(), grid);
    CHECK(v.status == Status::Inconclusive);
    CHECK(v.t_zero_aligned);
    REQUIRE_FALSE(v.witnesses.empty());
    CHECK(v.witnesses[0].point.t == 0.5);

    const auto early = CoefficientField::from_expressions(1, 2, Cells{{{"1", "0"}, {"0.5 + t", "2"}}}, {});
    v = check_theorem(early, upper_half_plane(), grid);
    CHECK(v.status == Status::NecessaryViolated);
    REQUIRE_FALSE(v.witnesses.empty());
    CHECK(v.witnesses[0].point.t == 0.0);

    CHECK_FALSE(structural_check(late, upper_half_plane(), grid).has_value());
    CHECK_THROWS_AS(check_polyhedral_angle(late, {1}, grid), InputError);
    CHECK_THROWS_AS(check_theorem(late, upper_half_plane(), {}), InputError);
}

TEST_CASE("x-dependent coefficients use every x-sample")
{
    const auto field = CoefficientField::from_expressions(1, 2, Cells{{{"1", "0"}, {"x1 * (x1 - 1)", "2"}}}, {});
    CHECK(check_theorem(field, upper_half_plane(), sample_grid({{0.0}, {1.0}}, {0.0})).status == Status::Invariant);
    const auto v = check_theorem(field, upper_half_plane(), sample_grid({{0.0}, {1.0}, {2.0}}, {0.0}));
    CHECK(v.status == Status::NotInvariant);
    REQUIRE_FALSE(v.witnesses.empty());
    CHECK(v.witnesses[0].point.x[0] == 2.0);
}

TEST_CASE("witnesses re-evaluate as misaligned")
{
    gen::Rng rng(71);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = gen::uniform_int(rng, 1, 2);
        const int m = gen::uniform_int(rng, 2, 4);
        const auto field = gen::field(n, m, [&](int, int) { return gen::matrix(m, m, rng); });
        const auto body = make_polyhedral_cone(Vector::Zero(m), gen::cone_normals(m, rng));
        const SamplePoint origin{std::vector<double>(static_cast<std::size_t>(n), 0.0), 0.0};
        const auto v = check_theorem(field, body, {origin});
        REQUIRE(v.status == Status::NotInvariant);
        REQUIRE_FALSE(v.witnesses.empty());
        for (const auto& w : v.witnesses) {
            const auto r = eigen_align(field.matrix(field.at(w.point), w.matrix), w.normal, v.tolerance);
            CHECK_FALSE(r.aligned);
            CHECK(r.residual == doctest::Approx(w.alignment.residual).epsilon(1e-14));
        }
    }
}

TEST_CASE("verdicts are invariant under positive scaling")
{
    gen::Rng rng(73);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = gen::uniform_int(rng, 2, 4);
        const auto rows = gen::index_subset(m, rng);
        const auto body = make_polyhedral_angle(m, rows, std::vector<double>(rows.size(), 0.0));
        const auto field = gen::structured_system(body, 1, m, rng);
        const double c = std::exp(gen::uniform(rng, -3.0, 3.0));
        const auto base = check_theorem(field, body, kOrigin);
        const auto scaled = check_theorem(field.scaled(c), body, kOrigin);
        CHECK(base.status == scaled.status);
        CHECK(check_polyhedral_angle(field.scaled(c), body.as<PolyhedralAngle>()->rows, kOrigin).status == base.status);
    }
}

TEST_CASE("intersection of invariant half-spaces is invariant")
{
    gen::Rng rng(79);
    for (int trial = 0; trial < 50; ++trial) {
        const int m = gen::uniform_int(rng, 2, 4);
        // common eigenvectors of every A^T: the columns of Q
        const Matrix q = gen::orthonormal(m, rng);
        const auto field = gen::field(2, m, [&](int, int) -> Matrix {
            return (q * gen::gaussian(m, rng).asDiagonal() * q.transpose()).transpose();
        });
        HPolytope poly;
        const int count = gen::uniform_int(rng, 1, m);
        for (int i = 0; i < count; ++i) {
            const Vector nu = (gen::coin(rng) ? 1.0 : -1.0) * q.col(i);
            const auto half = make_half_space(nu, gen::gaussian(m, rng));
            const SamplePoint origin{{0.0, 0.0}, 0.0};
            REQUIRE(check_theorem(field, half, {origin}).status == Status::Invariant);
            poly.faces.push_back(*half.as<HalfSpace>());
        }
        poly.faces.push_back({-q.col(0), q.col(0) * -50.0});
        CHECK(check_theorem(field, make_body(poly), {SamplePoint{{0.0, 0.0}, 0.0}}).status == Status::Invariant);
    }
}

TEST_CASE("structural and generic paths agree")
{
    gen::Rng rng(83);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = gen::uniform_int(rng, 1, 2);
        const int m = gen::uniform_int(rng, 2, 4);
        const auto angle_rows = gen::index_subset(m, rng);
        const auto rows = gen::index_subset(m, rng);
        std::vector<ConvexBody> bodies{
            make_polyhedral_angle(m, angle_rows, std::vector<double>(angle_rows.size(), -1.0)),
            make_ball(gen::gaussian(m, rng), 1.0),
            make_polyhedral_cone(Vector::Zero(m), gen::cone_normals(m, rng)),
        };
        bodies.push_back(make_polyhedral_cylinder(m, rows, std::vector<double>(rows.size(), -1.0),
                                                  std::vector<double>(rows.size(), 1.0)));
        bodies.push_back(make_spherical_cylinder(m, gen::index_subset(m, rng), 1.5));
        if (m >= 3) {
            bodies.push_back(make_polyhedral_cone(Vector::Zero(m), gen::cone_normals_extra(m, 1, rng)));
            bodies.push_back(make_smooth_cone(Vector::Zero(m), gen::unit_vector(m, rng), 0.7));
        }
        const SamplePoint origin{std::vector<double>(static_cast<std::size_t>(n), 0.0), 0.0};
        for (const auto& body : bodies) {
            const auto field = gen::structured_system(body, n, m, rng);
            const auto structural = structural_check(field, body, {origin});
            REQUIRE(structural.has_value());
            const auto generic = check_theorem(field, body, {origin});
            CHECK_MESSAGE(structural->status == generic.status, body.kind());
        }
    }
}

TEST_CASE("status names")
{
    CHECK(to_string(Status::Invariant) == "Invariant");
    CHECK(to_string(Status::NotInvariant) == "NotInvariant");
    CHECK(to_string(Status::SufficientHolds) == "SufficientHolds");
    CHECK(to_string(Status::NecessaryViolated) == "NecessaryViolated");
    CHECK(to_string(Status::Inconclusive) == "Inconclusive");
}
