#include "invariance/simulate.hpp"

#include "invariance/parabolicity.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <sstream>

namespace invariance {

SolutionField::SolutionField(int n, int m, int points, double length)
    : n_(n), m_(m), points_(points), length_(length)
{
    if (n < 1 || m < 1 || points < 3 || !(length > 0.0)) {
        throw InputError("solution field: invalid grid (need n, m >= 1, N >= 3, L > 0)");
    }
    total_ = 1;
    for (int d = 0; d < n; ++d) {
        total_ *= static_cast<std::size_t>(points);
    }
    values.assign(total_ * static_cast<std::size_t>(m), 0.0);
}

Vector SolutionField::value(std::size_t p) const
{
    return Eigen::Map<const Vector>(values.data() + p * static_cast<std::size_t>(m_), m_);
}

void SolutionField::set_value(std::size_t p, const Vector& u)
{
    if (u.size() != m_) {
        throw InputError("solution field: value has wrong dimension");
    }
    std::copy(u.data(), u.data() + m_, values.begin() + static_cast<std::ptrdiff_t>(p * static_cast<std::size_t>(m_)));
}

std::vector<double> SolutionField::coords(std::size_t p) const
{
    std::vector<double> x(static_cast<std::size_t>(n_));
    for (int d = n_ - 1; d >= 0; --d) {
        x[static_cast<std::size_t>(d)] = static_cast<double>(p % static_cast<std::size_t>(points_)) * dx();
        p /= static_cast<std::size_t>(points_);
    }
    return x;
}

std::size_t SolutionField::index(std::span<const int> multi) const
{
    std::size_t p = 0;
    for (int d = 0; d < n_; ++d) {
        const int i = ((multi[static_cast<std::size_t>(d)] % points_) + points_) % points_;
        p = p * static_cast<std::size_t>(points_) + static_cast<std::size_t>(i);
    }
    return p;
}

std::size_t SolutionField::neighbour(std::size_t p, int axis, int step) const
{
    std::size_t stride = 1;
    for (int d = n_ - 1; d > axis; --d) {
        stride *= static_cast<std::size_t>(points_);
    }
    const std::size_t i = (p / stride) % static_cast<std::size_t>(points_);
    const std::size_t j = (i + static_cast<std::size_t>(points_ + step)) % static_cast<std::size_t>(points_);
    return p + (j - i) * stride;
}

double SolutionField::max_abs() const
{
    double out = 0.0;
    for (double v : values) {
        out = std::max(out, std::abs(v));
    }
    return out;
}

namespace {

// Grid points used to bound the symbol for variable coefficients (at most ~256).
std::vector<SamplePoint> gate_samples(const CoefficientField& field, const SimConfig& config)
{
    const SolutionField grid(field.space_dim(), 1, config.points, config.length);
    std::vector<SamplePoint> out;
    if (field.is_constant()) {
        out.push_back({grid.coords(0), 0.0});
        return out;
    }
    const std::size_t stride = std::max<std::size_t>(1, grid.size() / 256);
    std::vector<double> times{0.0};
    if (field.t_dependent()) {
        times.push_back(0.5 * config.horizon);
        times.push_back(config.horizon);
    }
    for (double t : times) {
        for (std::size_t p = 0; p < grid.size(); p += stride) {
            out.push_back({grid.coords(p), t});
        }
    }
    return out;
}

// Explicit stepping with cached coefficient samples.
class Stepper {
  public:
    Stepper(const CoefficientField& field, const SolutionField& shape) : field_(field)
    {
        if (field.space_dim() != shape.space_dim() || field.components() != shape.components()) {
            throw InputError("step_explicit: field and solution dimensions differ");
        }
        if (field.is_constant()) {
            cache_.push_back(field.at(shape.coords(0), 0.0));
        } else if (!field.t_dependent()) {
            cache_.reserve(shape.size());
            for (std::size_t p = 0; p < shape.size(); ++p) {
                cache_.push_back(field.at(shape.coords(p), 0.0));
            }
        }
    }

    SolutionField advance(const SolutionField& u, double dt) const
    {
        const int n = u.space_dim();
        const int m = u.components();
        const double dx = u.dx();
        const double inv_dx2 = 1.0 / (dx * dx);
        const double inv_4dx2 = 0.25 * inv_dx2;
        const double inv_2dx = 0.5 / dx;

        SolutionField next = u;
        next.t = u.t + dt;
        std::vector<double> rate(static_cast<std::size_t>(m));
        std::vector<double> diff(static_cast<std::size_t>(m));
        const double* v = u.values.data();
        const auto at = [&](std::size_t p, int c) { return v[p * static_cast<std::size_t>(m) + static_cast<std::size_t>(c)]; };

        CoefficientSample fresh;
        for (std::size_t p = 0; p < u.size(); ++p) {
            const CoefficientSample* s = nullptr;
            if (cache_.size() == 1) {
                s = &cache_.front();
            } else if (!cache_.empty()) {
                s = &cache_[p];
            } else {
                fresh = field_.at(u.coords(p), u.t);
                s = &fresh;
            }
            std::fill(rate.begin(), rate.end(), 0.0);
            const auto accumulate = [&](const Matrix& a, double weight) {
                for (int r = 0; r < m; ++r) {
                    double acc = 0.0;
                    for (int c = 0; c < m; ++c) {
                        acc += a(r, c) * diff[static_cast<std::size_t>(c)];
                    }
                    rate[static_cast<std::size_t>(r)] += weight * acc;
                }
            };
            for (int j = 0; j < n; ++j) {
                const std::size_t pp = u.neighbour(p, j, 1);
                const std::size_t pm = u.neighbour(p, j, -1);
                for (int c = 0; c < m; ++c) {
                    diff[static_cast<std::size_t>(c)] = ((at(pp, c) + at(pm, c)) - 2.0 * at(p, c)) * inv_dx2;
                }
                accumulate(s->a(j, j, n), 1.0);
                for (int k = j + 1; k < n; ++k) {
                    const std::size_t ppp = u.neighbour(pp, k, 1);
                    const std::size_t ppm = u.neighbour(pp, k, -1);
                    const std::size_t pmp = u.neighbour(pm, k, 1);
                    const std::size_t pmm = u.neighbour(pm, k, -1);
                    for (int c = 0; c < m; ++c) {
                        diff[static_cast<std::size_t>(c)] =
                            ((at(ppp, c) + at(pmm, c)) - (at(ppm, c) + at(pmp, c))) * inv_4dx2;
                    }
                    // A_jk = A_kj: the mixed term appears twice.
                    accumulate(s->a(j, k, n), 2.0);
                }
                for (int c = 0; c < m; ++c) {
                    diff[static_cast<std::size_t>(c)] = (at(pp, c) - at(pm, c)) * inv_2dx;
                }
                accumulate(s->first[static_cast<std::size_t>(j)], 1.0);
            }
            double* out = next.values.data() + p * static_cast<std::size_t>(m);
            for (int c = 0; c < m; ++c) {
                out[c] += dt * rate[static_cast<std::size_t>(c)];
            }
        }
        return next;
    }

  private:
    const CoefficientField& field_;
    std::vector<CoefficientSample> cache_;
};

void require_finite_field(const SolutionField& u, double dt)
{
    for (double x : u.values) {
        if (!std::isfinite(x)) {
            std::ostringstream msg;
            msg << "explicit scheme diverged at t = " << u.t << " with dt = " << dt
                << "; reduce dt below the stability gate";
            throw DivergenceError(msg.str());
        }
    }
}

std::vector<double> frequencies(const SolutionField& u, std::size_t p)
{
    const int n = u.space_dim();
    const int points = u.points_per_axis();
    std::vector<double> sigma(static_cast<std::size_t>(n));
    for (int d = n - 1; d >= 0; --d) {
        const int i = static_cast<int>(p % static_cast<std::size_t>(points));
        p /= static_cast<std::size_t>(points);
        const int k = i <= points / 2 ? i : i - points;
        sigma[static_cast<std::size_t>(d)] = 2.0 * std::numbers::pi * k / u.length();
    }
    return sigma;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {}
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* data;
};

struct FftwPlan {
    explicit FftwPlan(fftw_plan p) : plan(p) {}
    ~FftwPlan() { fftw_destroy_plan(plan); }
    FftwPlan(const FftwPlan&) = delete;
    FftwPlan& operator=(const FftwPlan&) = delete;
    fftw_plan plan;
};

}  // namespace

StabilityGate stability_gate(const CoefficientField& field, const SimConfig& config)
{
    if (config.points < 3 || !(config.length > 0.0)) {
        throw InputError("simulation: need at least 3 points per axis and a positive box length");
    }
    StabilityGate gate;
    gate.dx = config.length / config.points;
    const auto samples = gate_samples(field, config);
    const int resolution = field.space_dim() == 1 ? 2 : 64;
    const SymbolBounds bounds = symbol_bounds(field, samples, resolution);
    gate.second_order_bound = bounds.second_order;
    gate.first_order_bound = bounds.first_order;
    MarginOptions mo;
    mo.sphere_resolution = resolution;
    mo.refine = false;
    gate.margin = petrovskii_margin(field, samples, mo).margin;

    const int n = field.space_dim();
    gate.dt_max = bounds.second_order > 0.0 ? gate.dx * gate.dx / (2.0 * n * bounds.second_order)
                                            : std::numeric_limits<double>::infinity();
    if (bounds.first_order > 0.0 && gate.margin > 0.0) {
        gate.dt_max = std::min(gate.dt_max, 2.0 * gate.margin / (bounds.first_order * bounds.first_order));
    }
    return gate;
}

double resolve_time_step(const StabilityGate& gate, const SimConfig& config)
{
    if (!(config.horizon > 0.0)) {
        throw InputError("simulation: horizon must be positive");
    }
    double dt = config.dt;
    if (dt > 0.0) {
        if (config.scheme == Scheme::ExplicitCentral && dt > gate.dt_max) {
            std::ostringstream msg;
            msg << "time step " << dt << " exceeds the stability limit " << gate.dt_max << " (dx = " << gate.dx
                << ", symbol bound = " << gate.second_order_bound << ", drift bound = " << gate.first_order_bound
                << ")";
            throw StabilityError(msg.str(), config.safety * gate.dt_max);
        }
    } else {
        dt = std::isfinite(gate.dt_max) ? config.safety * gate.dt_max : config.horizon / 100.0;
    }
    const double steps = std::ceil(config.horizon / dt - 1e-9);
    return config.horizon / std::max(1.0, steps);
}

SolutionField step_explicit(const SolutionField& u, const CoefficientField& field, double dt)
{
    const Stepper stepper(field, u);
    SolutionField next = stepper.advance(u, dt);
    require_finite_field(next, dt);
    return next;
}

ComplexMatrix propagator(const CoefficientField& field, std::span<const double> sigma, double t)
{
    if (!field.is_constant()) {
        throw InputError("propagator: coefficients must be constant");
    }
    const CoefficientSample s = field.at(std::vector<double>(static_cast<std::size_t>(field.space_dim()), 0.0), 0.0);
    const std::complex<double> i(0.0, 1.0);
    const ComplexMatrix generator =
        -symbol_matrix(s, sigma).cast<std::complex<double>>() + i * drift_symbol(s, sigma).cast<std::complex<double>>();
    return matrix_exponential(t * generator);
}

double propagator_alignment(const CoefficientField& field, const Vector& normal, double t,
                            const std::vector<Vector>& sigmas)
{
    if (normal.size() != field.components() || std::abs(normal.norm() - 1.0) > 1e-12) {
        throw InputError("propagator_alignment: normal must be a unit vector of the component dimension");
    }
    const ComplexVector nu = normal.cast<std::complex<double>>();
    double worst = 0.0;
    for (const auto& sigma : sigmas) {
        const ComplexMatrix g =
            propagator(field, std::span<const double>(sigma.data(), static_cast<std::size_t>(sigma.size())), t);
        const ComplexVector w = g.adjoint() * nu;
        const std::complex<double> mu = nu.dot(w);
        worst = std::max(worst, (w - mu * nu).norm());
    }
    return worst;
}

SolutionField spectral_run(const CoefficientField& field, const SolutionField& psi, double t)
{
    if (!field.is_constant()) {
        throw InputError("spectral_run: coefficients must be constant");
    }
    if (field.space_dim() != psi.space_dim() || field.components() != psi.components()) {
        throw InputError("spectral_run: field and solution dimensions differ");
    }
    SolutionField out = psi;
    out.t = psi.t + t;
    if (t == 0.0) {
        return out;
    }

    const int n = psi.space_dim();
    const int m = psi.components();
    const std::size_t total = psi.size();
    std::vector<int> dims(static_cast<std::size_t>(n), psi.points_per_axis());

    std::vector<std::unique_ptr<FftwBuffer>> spectra;
    for (int c = 0; c < m; ++c) {
        spectra.push_back(std::make_unique<FftwBuffer>(total));
    }
    FftwBuffer work(total);
    const FftwPlan forward(fftw_plan_dft(n, dims.data(), work.data, work.data, FFTW_FORWARD, FFTW_ESTIMATE));
    const FftwPlan backward(fftw_plan_dft(n, dims.data(), work.data, work.data, FFTW_BACKWARD, FFTW_ESTIMATE));

    for (int c = 0; c < m; ++c) {
        for (std::size_t p = 0; p < total; ++p) {
            work.data[p][0] = psi.values[p * static_cast<std::size_t>(m) + static_cast<std::size_t>(c)];
            work.data[p][1] = 0.0;
        }
        fftw_execute(forward.plan);
        std::copy(&work.data[0][0], &work.data[0][0] + 2 * total, &spectra[static_cast<std::size_t>(c)]->data[0][0]);
    }

    ComplexVector mode(m);
    for (std::size_t p = 0; p < total; ++p) {
        for (int c = 0; c < m; ++c) {
            const auto& z = spectra[static_cast<std::size_t>(c)]->data[p];
            mode(c) = {z[0], z[1]};
        }
        const std::vector<double> sigma = frequencies(psi, p);
        const ComplexVector evolved = propagator(field, sigma, t) * mode;
        for (int c = 0; c < m; ++c) {
            auto& z = spectra[static_cast<std::size_t>(c)]->data[p];
            z[0] = evolved(c).real();
            z[1] = evolved(c).imag();
        }
    }

    const double scale = 1.0 / static_cast<double>(total);
    for (int c = 0; c < m; ++c) {
        std::copy(&spectra[static_cast<std::size_t>(c)]->data[0][0],
                  &spectra[static_cast<std::size_t>(c)]->data[0][0] + 2 * total, &work.data[0][0]);
        fftw_execute(backward.plan);
        for (std::size_t p = 0; p < total; ++p) {
            out.values[p * static_cast<std::size_t>(m) + static_cast<std::size_t>(c)] = work.data[p][0] * scale;
        }
    }
    return out;
}

double cutoff(double s, double r)
{
    if (s <= 0.5 * r) {
        return 1.0;
    }
    if (s >= r) {
        return 0.0;
    }
    const auto h = [](double z) { return z > 0.0 ? std::exp(-1.0 / z) : 0.0; };
    // Rescaled to (0, 1) so the profile does not depend on the units of r.
    const double z = (s - 0.5 * r) / (0.5 * r);
    return h(1.0 - z) / (h(1.0 - z) + h(z));
}

SolutionField counterexample_init(const ConvexBody& body, const CounterexampleSpec& spec, int points, double length)
{
    const int m = body.dim();
    const int n = static_cast<int>(spec.center.size());
    if (spec.a.size() != m || spec.normal.size() != m || spec.tangent.size() != m) {
        throw InputError("counterexample_init: vectors must have the body dimension");
    }
    if (spec.alpha.rows() != n || spec.alpha.cols() != n || spec.beta.size() != n) {
        throw InputError("counterexample_init: alpha must be n x n and beta of length n");
    }
    if (std::abs(spec.tangent.norm() - 1.0) > 1e-12 || std::abs(spec.normal.norm() - 1.0) > 1e-12) {
        throw InputError("counterexample_init: normal and tangent must be unit vectors");
    }
    if (std::abs(spec.tangent.dot(spec.normal)) > 1e-12) {
        throw InputError("counterexample_init: tangent is not orthogonal to the normal");
    }
    if (std::abs(violation(body, spec.a)) > 1e-9 * (1.0 + spec.a.norm())) {
        throw InputError("counterexample_init: a is not on the boundary of the body");
    }
    if (!(spec.radius > 0.0) || spec.radius >= 0.5 * length) {
        throw InputError("counterexample_init: cutoff radius must lie in (0, L/2)");
    }

    return sample_field(n, m, points, length, [&](const std::vector<double>& x) {
        Vector d(n);
        for (int j = 0; j < n; ++j) {
            double v = x[static_cast<std::size_t>(j)] - spec.center(j);
            v -= length * std::round(v / length);
            d(j) = v;
        }
        const double weight = cutoff(d.norm(), spec.radius);
        if (weight == 0.0) {
            return Vector(spec.a);
        }
        const double phi = d.dot(spec.alpha * d) + spec.beta.dot(d);
        return Vector(spec.a + phi * weight * spec.tangent);
    });
}

double solver_tolerance(double dx, double dt, double scale)
{
    return 10.0 * (dx * dx + dt) * scale;
}

double max_violation(const ConvexBody& body, const SolutionField& u)
{
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < u.size(); ++p) {
        worst = std::max(worst, violation(body, u.value(p)));
    }
    return worst;
}

MonitorResult run_monitored(const CoefficientField& field, const SolutionField& psi, const ConvexBody& body,
                            const SimConfig& config)
{
    if (psi.points_per_axis() != config.points || std::abs(psi.length() - config.length) > 1e-12 * config.length) {
        throw InputError("run_monitored: initial field does not match the simulation grid");
    }
    if (body.dim() != psi.components()) {
        throw InputError("run_monitored: body dimension does not match the components");
    }
    const double scale = std::max(1.0, psi.max_abs());
    const double start = max_violation(body, psi);
    if (start > 1e-12 * scale) {
        throw InputError("run_monitored: initial data leaves the body (max violation " + std::to_string(start) + ")");
    }
    if (config.monitor_stride < 1) {
        throw InputError("run_monitored: monitor stride must be positive");
    }

    MonitorResult result;
    result.gate = stability_gate(field, config);
    result.dt = resolve_time_step(result.gate, config);
    result.steps = static_cast<std::size_t>(std::llround(config.horizon / result.dt));
    result.tolerance = solver_tolerance(result.gate.dx, result.dt, scale);
    result.trace.push_back({psi.t, start});
    result.max_violation = start;

    const auto record = [&](const SolutionField& u) {
        const double v = max_violation(body, u);
        result.trace.push_back({u.t, v});
        result.max_violation = std::max(result.max_violation, v);
    };

    if (config.scheme == Scheme::SpectralExact) {
        SolutionField u = psi;
        for (std::size_t step = 1; step <= result.steps; ++step) {
            if (step % static_cast<std::size_t>(config.monitor_stride) == 0 || step == result.steps) {
                u = spectral_run(field, psi, static_cast<double>(step) * result.dt);
                record(u);
            }
        }
        result.final_field = std::move(u);
        return result;
    }

    const Stepper stepper(field, psi);
    SolutionField u = psi;
    for (std::size_t step = 1; step <= result.steps; ++step) {
        u = stepper.advance(u, result.dt);
        if (step % static_cast<std::size_t>(config.monitor_stride) == 0 || step == result.steps) {
            require_finite_field(u, result.dt);
            record(u);
        }
    }
    result.final_field = std::move(u);
    return result;
}

}  // namespace invariance
