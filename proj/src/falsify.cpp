#include "invariance/falsify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace invariance {

namespace {

struct Seed {
    Witness witness;
    Vector boundary;
    Vector residual_direction;  // unit, orthogonal to the normal
};

double body_scale(const ConvexBody& body)
{
    if (const auto* s = body.as<SphericalCylinder>()) {
        return s->radius;
    }
    if (const auto* b = body.as<Ball>()) {
        return b->radius;
    }
    return 1.0;
}

Vector random_tangent(const Vector& normal, std::mt19937_64& rng)
{
    std::normal_distribution<double> gauss;
    for (;;) {
        Vector v(normal.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            v(i) = gauss(rng);
        }
        v -= v.dot(normal) * normal;
        if (v.norm() > 1e-6) {
            v.normalize();
            // Exact orthogonality after normalisation.
            v -= v.dot(normal) * normal;
            return v.normalized();
        }
    }
}

// Grid point nearest to x, wrapped into the box.
Vector snap_to_grid(std::span<const double> x, int points, double length)
{
    const double dx = length / points;
    Vector y(static_cast<Eigen::Index>(x.size()));
    for (std::size_t j = 0; j < x.size(); ++j) {
        double v = std::fmod(x[j], length);
        if (v < 0.0) {
            v += length;
        }
        y(static_cast<Eigen::Index>(j)) = std::fmod(std::round(v / dx), points) * dx;
    }
    return y;
}

bool inside(const ConvexBody& body, const SolutionField& u)
{
    return max_violation(body, u) <= 1e-12 * std::max(1.0, u.max_abs());
}

}  // namespace

FalsifyOutcome falsify(const CoefficientField& field, const ConvexBody& body, const std::vector<SamplePoint>& samples,
                       const SimConfig& config, const FalsifyOptions& options)
{
    FalsifyOutcome outcome;
    outcome.verdict = check_theorem(field, body, samples, options.check);
    if (!outcome.verdict.violated()) {
        throw InputError("falsify: the criterion reports " + to_string(outcome.verdict.status) +
                         "; a counterexample search needs NotInvariant or NecessaryViolated");
    }
    if (options.budget < 1) {
        throw InputError("falsify: budget must be positive");
    }

    // One seed per distinct failing normal, most misaligned first.
    std::vector<Witness> ordered = outcome.verdict.witnesses;
    std::stable_sort(ordered.begin(), ordered.end(), [](const Witness& l, const Witness& r) {
        return l.alignment.residual > r.alignment.residual;
    });
    std::vector<Seed> seeds;
    for (const auto& w : ordered) {
        bool seen = false;
        for (const auto& s : seeds) {
            seen = seen || ((s.witness.normal - w.normal).norm() < 1e-12 && s.witness.matrix == w.matrix);
        }
        if (seen) {
            continue;
        }
        const Matrix a = field.matrix(field.at(w.point), w.matrix);
        Vector r = a.transpose() * w.normal - w.alignment.eigenvalue * w.normal;
        r -= r.dot(w.normal) * w.normal;
        seeds.push_back({w, boundary_point(body, w.normal), r.normalized()});
    }

    const int n = field.space_dim();
    const double radius = 0.25 * config.length;
    const double scale = body_scale(body);
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    for (int k = 0; k < options.budget; ++k) {
        outcome.candidates_tried = k + 1;
        const Seed& seed = seeds[static_cast<std::size_t>(k) % seeds.size()];
        const int round = k / static_cast<int>(seeds.size());

        CounterexampleSpec spec;
        spec.a = seed.boundary;
        spec.normal = seed.witness.normal;
        spec.radius = radius;
        if (field.x_dependent()) {
            spec.center = snap_to_grid(seed.witness.point.x, config.points, config.length);
        } else {
            const std::vector<double> mid(static_cast<std::size_t>(n), 0.5 * config.length);
            spec.center = snap_to_grid(mid, config.points, config.length);
        }
        switch (round % 4) {
        case 0: spec.tangent = seed.residual_direction; break;
        case 1: spec.tangent = -seed.residual_direction; break;
        default: spec.tangent = random_tangent(spec.normal, rng); break;
        }

        // Peak of the polynomial over the cutoff support is about amplitude.
        const double amplitude = scale * (round < 2 ? 1.0 : 0.25 + 0.75 * std::abs(unit(rng)));
        spec.alpha = Matrix::Zero(n, n);
        spec.beta = Vector::Zero(n);
        const MatrixId& id = seed.witness.matrix;
        if (id.second_order()) {
            spec.alpha(id.j, id.k) += 0.5;
            spec.alpha(id.k, id.j) += 0.5;
        } else {
            spec.beta(id.j) = radius;
        }
        if (round >= 2) {
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i) {
                    spec.alpha(j, i) += 0.25 * unit(rng);
                }
                spec.beta(j) += 0.25 * radius * unit(rng);
            }
        }
        const double coefficient = amplitude / (radius * radius);
        spec.alpha *= coefficient;
        spec.beta *= coefficient;

        SolutionField psi;
        bool admissible = false;
        for (int shrink = 0; shrink < 12 && !admissible; ++shrink) {
            psi = counterexample_init(body, spec, config.points, config.length);
            for (std::size_t p = 0; p < psi.size(); ++p) {
                psi.set_value(p, pull_inside(body, psi.value(p)));
            }
            admissible = inside(body, psi);
            if (!admissible) {
                spec.alpha *= 0.5;
                spec.beta *= 0.5;
            }
        }
        if (!admissible) {
            continue;
        }

        MonitorResult run = run_monitored(field, psi, body, config);
        const double threshold = options.exit_factor * run.tolerance;
        if (run.max_violation > threshold) {
            FalsifyWitness w;
            w.spec = spec;
            w.initial = std::move(psi);
            w.exit_margin = run.max_violation / run.tolerance;
            for (const auto& point : run.trace) {
                if (point.max_violation > threshold) {
                    w.exit_time = point.t;
                    break;
                }
            }
            w.run = std::move(run);
            w.candidate = k;
            outcome.witness = std::move(w);
            return outcome;
        }
    }
    return outcome;
}

}  // namespace invariance
