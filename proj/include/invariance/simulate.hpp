#pragma once

#include "invariance/bodies.hpp"
#include "invariance/coefficients.hpp"
#include "invariance/linalg.hpp"

#include <stdexcept>
#include <vector>

namespace invariance {

/// Explicit time step violates the stability gate.
class StabilityError : public std::runtime_error {
  public:
    StabilityError(const std::string& what, double suggested_dt) : std::runtime_error(what), suggested_dt(suggested_dt) {}
    double suggested_dt;
};

/// Non-finite values appeared while stepping.
class DivergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Scheme { ExplicitCentral, SpectralExact };

struct SimConfig {
    double length = 6.283185307179586;  // box side, every axis
    int points = 64;                    // grid points per axis
    double dt = 0.0;                    // 0 selects safety * (stability limit)
    double horizon = 0.5;
    Scheme scheme = Scheme::ExplicitCentral;
    int monitor_stride = 10;            // steps between trace samples
    double safety = 0.5;
};

/// Discrete solution on the periodic grid {0, dx, ..., (N-1) dx}^n, values stored
/// point-major: values[p * m + c].
class SolutionField {
  public:
    SolutionField() = default;
    SolutionField(int n, int m, int points, double length);

    int space_dim() const { return n_; }
    int components() const { return m_; }
    int points_per_axis() const { return points_; }
    double length() const { return length_; }
    double dx() const { return length_ / points_; }
    std::size_t size() const { return total_; }

    double t = 0.0;
    std::vector<double> values;

    Vector value(std::size_t p) const;
    void set_value(std::size_t p, const Vector& u);
    std::vector<double> coords(std::size_t p) const;
    std::size_t index(std::span<const int> multi) const;
    /// Neighbour of p one cell along `axis` in direction `step` (+1 or -1), periodic.
    std::size_t neighbour(std::size_t p, int axis, int step) const;

    double max_abs() const;

  private:
    int n_ = 0;
    int m_ = 0;
    int points_ = 0;
    double length_ = 0.0;
    std::size_t total_ = 0;
};

/// Field filled from a function of the grid coordinates.
template <class F>
SolutionField sample_field(int n, int m, int points, double length, F&& fn)
{
    SolutionField u(n, m, points, length);
    for (std::size_t p = 0; p < u.size(); ++p) {
        u.set_value(p, fn(u.coords(p)));
    }
    return u;
}

struct StabilityGate {
    double dx = 0.0;
    double second_order_bound = 0.0;  // max spectral radius of M(sigma), |sigma| = 1
    double first_order_bound = 0.0;   // max spectral radius of B(sigma), |sigma| = 1
    double margin = 0.0;              // sampled parabolicity margin
    double dt_max = 0.0;              // min(dx^2 / (2 n Lambda), 2 margin / beta^2)
};

StabilityGate stability_gate(const CoefficientField& field, const SimConfig& config);

/// Time step actually used: the requested one (checked against the gate) or the
/// automatic choice, shrunk so the horizon is an integer number of steps.
double resolve_time_step(const StabilityGate& gate, const SimConfig& config);

/// u + dt (sum_jk A_jk D_jk u + sum_j A_j D_j u) with second-order central
/// differences; coefficients frozen at u.t.
SolutionField step_explicit(const SolutionField& u, const CoefficientField& field, double dt);

/// Exact-in-time Fourier solution for constant coefficients.
SolutionField spectral_run(const CoefficientField& field, const SolutionField& psi, double t);

/// Fourier symbol of the fundamental matrix: exp(t(-M(sigma) + i B(sigma))).
ComplexMatrix propagator(const CoefficientField& field, std::span<const double> sigma, double t);

/// Max over sigma of the orthogonal residual of G(t,sigma)^H nu against span{nu}.
double propagator_alignment(const CoefficientField& field, const Vector& normal, double t,
                            const std::vector<Vector>& sigmas);

/// Smooth radial cutoff: 1 for s <= r/2, 0 for s >= r, monotone in between.
double cutoff(double s, double r);

struct CounterexampleSpec {
    Vector a;       // boundary point
    Vector normal;  // outward normal at a
    Vector tangent; // unit, orthogonal to normal
    Matrix alpha;   // n x n
    Vector beta;    // n
    Vector center;  // y
    double radius = 1.0;
};

/// psi(x) = a + (sum alpha_jk d_j d_k + sum beta_j d_j) cutoff(|d|, r) tangent,
/// d the periodic displacement x - y.
SolutionField counterexample_init(const ConvexBody& body, const CounterexampleSpec& spec, int points, double length);

double solver_tolerance(double dx, double dt, double scale);

struct TracePoint {
    double t = 0.0;
    double max_violation = 0.0;
};

struct MonitorResult {
    std::vector<TracePoint> trace;
    double max_violation = 0.0;  // over the whole trace
    double tolerance = 0.0;      // 10 (dx^2 + dt) scale
    double dt = 0.0;
    std::size_t steps = 0;
    StabilityGate gate;
    SolutionField final_field;
};

double max_violation(const ConvexBody& body, const SolutionField& u);

/// Solves from psi and records the maximal body violation every monitor_stride
/// steps. Requires psi inside the body.
MonitorResult run_monitored(const CoefficientField& field, const SolutionField& psi, const ConvexBody& body,
                            const SimConfig& config);

}  // namespace invariance
