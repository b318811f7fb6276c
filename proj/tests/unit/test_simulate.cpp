#include "invariance/criterion.hpp"
#include "invariance/simulate.hpp"

#include "../support/generators.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace invariance;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Matrix mat2(double a, double b, double c, double d)
{
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

Vector vec2(double a, double b)
{
    Vector v(2);
    v << a, b;
    return v;
}

CoefficientField heat(int n, int m)
{
    return gen::field(
        n, m, [&](int j, int k) -> Matrix { return j == k ? Matrix(Matrix::Identity(m, m)) : Matrix(Matrix::Zero(m, m)); }, false);
}

// Strongly parabolic random system with symmetric-dominant diffusion.
CoefficientField random_parabolic(int n, int m, gen::Rng& rng, bool drift = true)
{
    return gen::field(
        n, m,
        [&](int j, int k) -> Matrix {
            if (k < 0) {
                return 0.5 * gen::matrix(m, m, rng);
            }
            Matrix a = 0.15 * gen::matrix(m, m, rng);
            if (j == k) {
                a += gen::uniform(rng, 0.8, 1.5) * Matrix::Identity(m, m);
            }
            return a;
        },
        drift);
}

SolutionField smooth_data(int n, int m, int points, double length, gen::Rng& rng)
{
    const Matrix c = gen::matrix(m, 3, rng);
    std::vector<std::vector<int>> waves;
    for (int i = 0; i < 3; ++i) {
        std::vector<int> w(static_cast<std::size_t>(n));
        for (auto& k : w) {
            k = gen::uniform_int(rng, -2, 2);
        }
        waves.push_back(w);
    }
    return sample_field(n, m, points, length, [&](const std::vector<double>& x) {
        Vector u = Vector::Zero(m);
        for (int i = 0; i < 3; ++i) {
            double phase = 0.0;
            for (int j = 0; j < n; ++j) {
                phase += kTwoPi / length * waves[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
            }
            u += c.col(i) * std::cos(phase + i);
        }
        return u;
    });
}

double linf_gap(const SolutionField& a, const SolutionField& b)
{
    double gap = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        gap = std::max(gap, std::abs(a.values[i] - b.values[i]));
    }
    return gap;
}

SolutionField explicit_solve(const CoefficientField& field, SolutionField u, double horizon, double dt)
{
    const auto steps = static_cast<int>(std::llround(horizon / dt));
    for (int s = 0; s < steps; ++s) {
        u = step_explicit(u, field, dt);
    }
    return u;
}

}  // namespace

TEST_CASE("solution field indexing")
{
    SolutionField u(2, 3, 4, 8.0);
    CHECK(u.size() == 16);
    CHECK(u.values.size() == 48);
    CHECK(u.dx() == 2.0);
    const std::vector<int> multi{1, 3};
    const auto p = u.index(multi);
    const auto x = u.coords(p);
    CHECK(x == std::vector<double>{2.0, 6.0});
    CHECK(u.coords(u.neighbour(p, 1, +1)) == std::vector<double>{2.0, 0.0});
    CHECK(u.coords(u.neighbour(p, 0, -1)) == std::vector<double>{0.0, 6.0});
    u.set_value(p, Vector::Constant(3, 7.0));
    CHECK(u.values[p * 3 + 2] == 7.0);
    CHECK(u.max_abs() == 7.0);
    CHECK_THROWS_AS(SolutionField(1, 1, 2, 1.0), InputError);
}

TEST_CASE("constant data is preserved bit for bit")
{
    gen::Rng rng(89);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = gen::uniform_int(rng, 1, 2);
        const int m = gen::uniform_int(rng, 1, 3);
        const auto field = random_parabolic(n, m, rng);
        const Vector c = 10.0 * gen::gaussian(m, rng);
        SolutionField u = sample_field(n, m, 8, 3.0, [&](const std::vector<double>&) { return c; });
        const auto start = u.values;
        for (int s = 0; s < 200; ++s) {
            u = step_explicit(u, field, 1e-3);
            REQUIRE(u.values == start);
        }
    }
}

TEST_CASE("heat step multiplies a sine mode by 1 - dt k^2 + O(dx^2)")
{
    const double length = kTwoPi;
    const double k = kTwoPi / length;
    for (int points : {32, 64, 128}) {
        const auto u = sample_field(1, 2, points, length, [&](const std::vector<double>& x) {
            return vec2(std::sin(k * x[0]), 0.0);
        });
        const double dx = length / points;
        const double dt = 0.2 * dx * dx;
        const auto next = step_explicit(u, heat(1, 2), dt);
        const std::size_t p = static_cast<std::size_t>(points / 4);  // sin = 1
        const double factor = next.value(p)(0) / u.value(p)(0);
        CHECK(std::abs(factor - (1.0 - dt * k * k)) <= dt * std::pow(k, 4) * dx * dx / 12.0 * 1.01 + 1e-15);
        CHECK(next.value(p)(1) == 0.0);

        const auto exact = spectral_run(heat(1, 2), u, dt);
        CHECK(linf_gap(next, exact) <= dt * dx * dx + dt * dt);
    }
}

TEST_CASE("drift translates the profile along characteristics")
{
    // u_t = eps u_xx + c u_x has the solution sin(k (x + c t)) exp(-eps k^2 t)
    const double eps = 1e-3;
    const double c = 0.8;
    const double length = kTwoPi;
    const double t = 0.5;
    const auto field = CoefficientField::constant(1, 1, {Matrix::Constant(1, 1, eps)}, {Matrix::Constant(1, 1, c)});
    double previous = 0.0;
    for (int points : {64, 128, 256}) {
        const auto u0 = sample_field(1, 1, points, length, [](const std::vector<double>& x) {
            return Vector::Constant(1, std::sin(x[0]));
        });
        const double dt = 0.1 * (length / points) * (length / points);
        auto u = explicit_solve(field, u0, t, t / std::ceil(t / dt));
        const auto exact = sample_field(1, 1, points, length, [&](const std::vector<double>& x) {
            return Vector::Constant(1, std::sin(x[0] + c * t) * std::exp(-eps * t));
        });
        const double gap = linf_gap(u, exact);
        const double dx = length / points;
        CHECK(gap <= 0.2 * dx * dx);
        if (previous > 0.0) {
            CHECK(std::log2(previous / gap) >= 1.8);
        }
        previous = gap;
    }
}

TEST_CASE("spectral run oracles")
{
    gen::Rng rng(97);
    const auto field = random_parabolic(1, 2, rng);
    const auto psi = smooth_data(1, 2, 32, kTwoPi, rng);
    CHECK(linf_gap(spectral_run(field, psi, 0.0), psi) <= 1e-14);

    const auto mode = sample_field(2, 1, 16, kTwoPi, [](const std::vector<double>& x) {
        return Vector::Constant(1, std::cos(2.0 * x[0] - x[1]));
    });
    const auto out = spectral_run(heat(2, 1), mode, 0.3);
    for (std::size_t p = 0; p < mode.size(); ++p) {
        CHECK(std::abs(out.value(p)(0) - std::exp(-5.0 * 0.3) * mode.value(p)(0)) <= 1e-14);
    }

    const auto variable = CoefficientField::from_expressions(
        1, 1, std::vector<std::vector<std::vector<std::string>>>{{{"1 + x1"}}}, {});
    CHECK_THROWS_AS(spectral_run(variable, sample_field(1, 1, 8, 1.0, [](const std::vector<double>&) {
                                     return Vector::Constant(1, 0.0);
                                 }),
                                 0.1),
                    InputError);
}

TEST_CASE("explicit scheme converges to the spectral oracle at second order")
{
    gen::Rng rng(101);
    for (int trial = 0; trial < 3; ++trial) {
        // random upper-triangular constant system
        const auto field = gen::field(1, 3, [&](int, int k) -> Matrix {
            Matrix a = gen::matrix(3, 3, rng).triangularView<Eigen::Upper>();
            if (k >= 0) {
                a.diagonal() = Vector::Constant(3, 1.0) + 0.5 * gen::gaussian(3, rng).cwiseAbs();
            }
            return a;
        });
        const double horizon = 0.1;
        std::vector<double> gaps;
        for (int points : {32, 64, 128}) {
            const auto psi = sample_field(1, 3, points, kTwoPi, [](const std::vector<double>& x) {
                Vector u(3);
                u << std::sin(x[0]), std::cos(2.0 * x[0]), 0.5 * std::sin(3.0 * x[0] + 1.0);
                return u;
            });
            const double dx = kTwoPi / points;
            const double dt = horizon / std::ceil(horizon / (0.05 * dx * dx));
            gaps.push_back(linf_gap(explicit_solve(field, psi, horizon, dt), spectral_run(field, psi, horizon)));
        }
        CHECK(std::log2(gaps[0] / gaps[1]) >= 1.9);
        CHECK(std::log2(gaps[1] / gaps[2]) >= 1.9);
    }
}

TEST_CASE("periodic shift equivariance")
{
    gen::Rng rng(103);
    const auto field = random_parabolic(2, 2, rng);
    const auto psi = smooth_data(2, 2, 12, 3.0, rng);
    SolutionField shifted = psi;
    for (std::size_t p = 0; p < psi.size(); ++p) {
        shifted.set_value(psi.neighbour(p, 0, +1), psi.value(p));
    }
    auto u = psi;
    auto v = shifted;
    for (int s = 0; s < 20; ++s) {
        u = step_explicit(u, field, 1e-3);
        v = step_explicit(v, field, 1e-3);
    }
    for (std::size_t p = 0; p < u.size(); ++p) {
        CHECK((v.value(u.neighbour(p, 0, +1)) - u.value(p)).norm() == 0.0);
    }
}

TEST_CASE("propagator identities")
{
    gen::Rng rng(107);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = gen::uniform_int(rng, 1, 2);
        const int m = gen::uniform_int(rng, 1, 4);
        const auto field = random_parabolic(n, m, rng);
        const Vector sigma = 3.0 * gen::gaussian(n, rng);
        const std::span<const double> s(sigma.data(), static_cast<std::size_t>(n));
        CHECK((propagator(field, s, 0.0) - ComplexMatrix::Identity(m, m)).norm() == 0.0);
        const std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
        CHECK((propagator(field, zero, 0.7) - ComplexMatrix::Identity(m, m)).norm() <= 1e-15);
        const double t1 = gen::uniform(rng, 0.0, 0.5);
        const double t2 = gen::uniform(rng, 0.0, 0.5);
        const ComplexMatrix lhs = propagator(field, s, t1 + t2);
        const ComplexMatrix rhs = propagator(field, s, t1) * propagator(field, s, t2);
        CHECK((lhs - rhs).norm() <= 1e-10);
    }
}

TEST_CASE("propagator of a triangular system matches the closed form")
{
    // exp(-t s^2 A) for A = [[a, b], [0, d]]
    const double a = 1.0;
    const double b = 0.3;
    const double d = 2.0;
    const auto field = CoefficientField::constant(1, 2, {mat2(a, b, 0, d)});
    for (double sigma : {0.5, 1.0, 2.5}) {
        const double t = 0.5;
        const double ea = std::exp(-t * sigma * sigma * a);
        const double ed = std::exp(-t * sigma * sigma * d);
        const Matrix closed = mat2(ea, b * (ea - ed) / (a - d), 0.0, ed);
        const std::vector<double> s{sigma};
        const ComplexMatrix g = propagator(field, s, t);
        CHECK((g.real() - closed).norm() <= 1e-13);
        CHECK(g.imag().norm() == 0.0);
    }

    std::vector<Vector> sigmas;
    for (int i = 1; i <= 64; ++i) {
        sigmas.push_back(Vector::Constant(1, 0.1 * i));
    }
    CHECK(propagator_alignment(field, vec2(0.0, -1.0), 0.5, sigmas) <= 1e-10);
    CHECK(propagator_alignment(field, vec2(0.0, -1.0), 0.0, sigmas) == 0.0);
    const auto lower = CoefficientField::constant(1, 2, {mat2(1.0, 0.0, 0.5, 2.0)});
    CHECK(propagator_alignment(lower, vec2(0.0, -1.0), 0.5, sigmas) > 1e-3);
}

TEST_CASE("invariant verdicts have aligned propagators")
{
    gen::Rng rng(109);
    for (int trial = 0; trial < 30; ++trial) {
        const int m = gen::uniform_int(rng, 2, 4);
        const auto normals = gen::cone_normals(m, rng);
        const auto body = make_polyhedral_cone(Vector::Zero(m), normals);
        const Matrix nt = cone_normal_matrix(*body.as<PolyhedralCone>()).transpose();
        const auto field = gen::field(2, m, [&](int j, int k) -> Matrix {
            Vector dg = 0.3 * gen::gaussian(m, rng);
            if (k >= 0 && j == k) {
                dg.array() += 1.5;
            }
            return nt.inverse() * dg.asDiagonal() * nt;
        });
        REQUIRE(check_theorem(field, body, {SamplePoint{{0.0, 0.0}, 0.0}}).status == Status::Invariant);
        std::vector<Vector> sigmas;
        for (int i = 0; i < 32; ++i) {
            sigmas.push_back(gen::gaussian(2, rng));
        }
        for (const auto& nu : normals) {
            CHECK(propagator_alignment(field, nu, 0.3, sigmas) <= 1e-9);
        }
    }
}

TEST_CASE("cutoff profile")
{
    const double r = 0.8;
    CHECK(cutoff(0.0, r) == 1.0);
    CHECK(cutoff(0.4, r) == 1.0);
    CHECK(cutoff(0.8, r) == 0.0);
    CHECK(cutoff(5.0, r) == 0.0);
    double previous = 1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double s = 0.4 + 0.4 * i / 1000.0;
        const double z = cutoff(s, r);
        CHECK(z <= previous);
        CHECK(z >= 0.0);
        previous = z;
    }
}

TEST_CASE("counterexample data")
{
    const auto body = make_polyhedral_angle(2, {1}, {0.0});
    CounterexampleSpec spec;
    spec.a = vec2(0.3, 0.0);
    spec.normal = vec2(0.0, -1.0);
    spec.tangent = vec2(1.0, 0.0);
    spec.alpha = mat2(0.4, 0.1, -0.3, 0.2);
    spec.beta = vec2(0.5, -0.7);
    spec.center = vec2(2.0, 2.0);
    spec.radius = 1.5;
    const int points = 64;
    const double length = 4.0;
    const auto psi = counterexample_init(body, spec, points, length);
    const double dx = length / points;

    const std::vector<int> centre{32, 32};
    const auto y = psi.index(centre);
    CHECK((psi.value(y) - spec.a).norm() == 0.0);

    for (std::size_t p = 0; p < psi.size(); ++p) {
        const auto x = psi.coords(p);
        double r2 = 0.0;
        for (int j = 0; j < 2; ++j) {
            double d = std::remainder(x[static_cast<std::size_t>(j)] - spec.center(j), length);
            r2 += d * d;
        }
        if (std::sqrt(r2) >= spec.radius) {
            CHECK((psi.value(p) - spec.a).norm() == 0.0);
        }
        CHECK(psi.value(p)(1) == 0.0);
    }

    // first and second differences at y
    for (int j = 0; j < 2; ++j) {
        const auto plus = psi.neighbour(y, j, +1);
        const auto minus = psi.neighbour(y, j, -1);
        const Vector d1 = (psi.value(plus) - psi.value(minus)) / (2.0 * dx);
        CHECK((d1 - spec.beta(j) * spec.tangent).norm() <= 10.0 * dx * dx);
        for (int k = 0; k < 2; ++k) {
            const auto pp = psi.neighbour(psi.neighbour(y, j, +1), k, +1);
            const auto pm = psi.neighbour(psi.neighbour(y, j, +1), k, -1);
            const auto mp = psi.neighbour(psi.neighbour(y, j, -1), k, +1);
            const auto mm = psi.neighbour(psi.neighbour(y, j, -1), k, -1);
            Vector d2;
            if (j == k) {
                d2 = (psi.value(plus) - 2.0 * psi.value(y) + psi.value(minus)) / (dx * dx);
            } else {
                d2 = (psi.value(pp) - psi.value(pm) - psi.value(mp) + psi.value(mm)) / (4.0 * dx * dx);
            }
            CHECK((d2 - (spec.alpha(j, k) + spec.alpha(k, j)) * spec.tangent).norm() <= 10.0 * dx * dx);
        }
    }

    auto bad = spec;
    bad.tangent = vec2(0.6, 0.8);
    CHECK_THROWS_AS(counterexample_init(body, bad, points, length), InputError);
    bad = spec;
    bad.a = vec2(0.3, 1.0);
    CHECK_THROWS_AS(counterexample_init(body, bad, points, length), InputError);
    bad = spec;
    bad.radius = 2.0;
    CHECK_THROWS_AS(counterexample_init(body, bad, points, length), InputError);
}

TEST_CASE("stability gate")
{
    SimConfig config;
    config.points = 32;
    config.length = kTwoPi;
    const auto gate = stability_gate(heat(1, 2), config);
    const double dx = kTwoPi / 32;
    CHECK(gate.dx == dx);
    CHECK(gate.second_order_bound == doctest::Approx(1.0));
    CHECK(gate.dt_max == doctest::Approx(dx * dx / 2.0));

    const double dt = resolve_time_step(gate, config);
    CHECK(dt <= 0.5 * gate.dt_max);
    CHECK(std::abs(config.horizon / dt - std::round(config.horizon / dt)) <= 1e-9);

    config.dt = 2.0 * gate.dt_max;
    try {
        resolve_time_step(gate, config);
        FAIL("expected a stability error");
    } catch (const StabilityError& e) {
        CHECK(e.suggested_dt == doctest::Approx(0.5 * gate.dt_max));
    }

    // drift-dominated system: the drift bound takes over
    const auto drift = CoefficientField::constant(1, 1, {Matrix::Constant(1, 1, 1e-2)}, {Matrix::Constant(1, 1, 5.0)});
    SimConfig coarse;
    coarse.points = 16;
    const auto g2 = stability_gate(drift, coarse);
    CHECK(g2.dt_max == doctest::Approx(2.0 * 1e-2 / 25.0));
}

TEST_CASE("blow-up is reported as divergence")
{
    SolutionField u = sample_field(1, 1, 16, kTwoPi, [](const std::vector<double>& x) {
        return Vector::Constant(1, std::sin(3.0 * x[0]));
    });
    bool diverged = false;
    for (int s = 0; s < 5000 && !diverged; ++s) {
        try {
            u = step_explicit(u, heat(1, 1), 1.0);
        } catch (const DivergenceError&) {
            diverged = true;
        }
    }
    CHECK(diverged);
}

TEST_CASE("monitored runs")
{
    SimConfig config;
    config.points = 32;
    config.horizon = 0.2;
    config.monitor_stride = 5;

    const auto ball = make_ball(Vector::Zero(2), 1.0);
    const auto inside = sample_field(1, 2, 32, kTwoPi, [](const std::vector<double>&) { return vec2(0.3, -0.2); });
    auto run = run_monitored(heat(1, 2), inside, ball, config);
    const double v0 = violation(ball, vec2(0.3, -0.2));
    for (const auto& p : run.trace) {
        CHECK(p.max_violation == v0);
    }
    CHECK(run.final_field.values == inside.values);
    CHECK(run.trace.front().t == 0.0);
    CHECK(run.trace.back().t == doctest::Approx(config.horizon));

    // data on the unit circle: the maximum principle pulls it strictly inside
    const auto circle = sample_field(1, 2, 32, kTwoPi, [](const std::vector<double>& x) {
        return vec2(std::cos(x[0]), std::sin(x[0]));
    });
    run = run_monitored(heat(1, 2), circle, ball, config);
    CHECK(std::abs(run.trace.front().max_violation) <= 1e-15);
    for (std::size_t i = 1; i < run.trace.size(); ++i) {
        CHECK(run.trace[i].max_violation < run.trace[i - 1].max_violation);
    }
    CHECK(run.max_violation <= run.tolerance);
    CHECK(run.tolerance == doctest::Approx(solver_tolerance(run.gate.dx, run.dt, 1.0)));

    const auto outside = sample_field(1, 2, 32, kTwoPi, [](const std::vector<double>&) { return vec2(2.0, 0.0); });
    CHECK_THROWS_AS(run_monitored(heat(1, 2), outside, ball, config), InputError);

    config.scheme = Scheme::SpectralExact;
    run = run_monitored(heat(1, 2), circle, ball, config);
    CHECK(run.max_violation <= 1e-14);
}
