#include "invariance/parabolicity.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace invariance {

Matrix symbol_matrix(const CoefficientSample& coeffs, std::span<const double> sigma)
{
    const int n = static_cast<int>(sigma.size());
    if (static_cast<int>(coeffs.second.size()) != n * n) {
        throw InputError("symbol_matrix: sigma dimension does not match the system");
    }
    Matrix out = Matrix::Zero(coeffs.second.front().rows(), coeffs.second.front().cols());
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            out += coeffs.a(j, k, n) * (sigma[static_cast<std::size_t>(j)] * sigma[static_cast<std::size_t>(k)]);
        }
    }
    return out;
}

Matrix drift_symbol(const CoefficientSample& coeffs, std::span<const double> sigma)
{
    if (coeffs.first.size() != sigma.size()) {
        throw InputError("drift_symbol: sigma dimension does not match the system");
    }
    Matrix out = Matrix::Zero(coeffs.first.front().rows(), coeffs.first.front().cols());
    for (std::size_t j = 0; j < sigma.size(); ++j) {
        out += coeffs.first[j] * sigma[j];
    }
    return out;
}

double min_real_eigenvalue(const Matrix& m)
{
    return eigenvalues(m).real().minCoeff();
}

int default_sphere_resolution(int dim)
{
    if (dim <= 1) {
        return 2;
    }
    return dim == 2 ? 4096 : 2048;
}

std::vector<Vector> sphere_points(int dim, int count)
{
    std::vector<Vector> out;
    if (dim < 1 || count < 1) {
        throw InputError("sphere_points: dimension and count must be positive");
    }
    if (dim == 1) {
        out.push_back(Vector::Constant(1, 1.0));
        out.push_back(Vector::Constant(1, -1.0));
        return out;
    }
    out.reserve(static_cast<std::size_t>(count));
    if (dim == 2) {
        for (int i = 0; i < count; ++i) {
            const double theta = 2.0 * std::numbers::pi * i / count;
            Vector v(2);
            v << std::cos(theta), std::sin(theta);
            out.push_back(v);
        }
        return out;
    }
    if (dim == 3) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < count; ++i) {
            const double z = 1.0 - (2.0 * i + 1.0) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            Vector v(3);
            v << r * std::cos(golden * i), r * std::sin(golden * i), z;
            out.push_back(v.normalized());
        }
        return out;
    }
    std::mt19937_64 rng(0x5eed5eedULL + static_cast<unsigned>(dim));
    std::normal_distribution<double> gauss;
    while (static_cast<int>(out.size()) < count) {
        Vector v(dim);
        for (int i = 0; i < dim; ++i) {
            v(i) = gauss(rng);
        }
        if (v.norm() > 1e-8) {
            out.push_back(v.normalized());
        }
    }
    return out;
}

namespace {

double margin_at(const CoefficientSample& s, const Vector& sigma)
{
    return min_real_eigenvalue(symbol_matrix(s, std::span<const double>(sigma.data(), static_cast<std::size_t>(sigma.size()))));
}

// Pattern search on the sphere: perturb along coordinate directions, renormalise,
// accept improvements, halve the step when stuck.
Vector refine_on_sphere(const CoefficientSample& s, Vector sigma, double& value)
{
    const Eigen::Index dim = sigma.size();
    double step = dim == 2 ? 2.0 * std::numbers::pi / 4096.0 : 0.05;
    while (step > 1e-10) {
        bool improved = false;
        for (Eigen::Index i = 0; i < dim; ++i) {
            for (double sign : {1.0, -1.0}) {
                Vector trial = sigma;
                trial(i) += sign * step;
                trial.normalize();
                const double v = margin_at(s, trial);
                if (v < value) {
                    value = v;
                    sigma = trial;
                    improved = true;
                }
            }
        }
        if (!improved) {
            step *= 0.5;
        }
    }
    return sigma;
}

}  // namespace

ParabolicityReport petrovskii_margin(const CoefficientField& field, const std::vector<SamplePoint>& samples,
                                     const MarginOptions& options)
{
    const int n = field.space_dim();
    const std::vector<SamplePoint> points = effective_samples(field, samples);
    const int resolution = options.sphere_resolution > 0 ? options.sphere_resolution : default_sphere_resolution(n);
    const std::vector<Vector> sigmas = sphere_points(n, resolution);

    ParabolicityReport report;
    report.sphere_resolution = n == 1 ? 2 : resolution;
    report.sample_count = points.size();
    report.margin = std::numeric_limits<double>::infinity();

    std::size_t best_point = 0;
    for (std::size_t p = 0; p < points.size(); ++p) {
        const CoefficientSample s = field.at(points[p]);
        for (const auto& sigma : sigmas) {
            double value = 0.0;
            try {
                value = margin_at(s, sigma);
            } catch (const NumericError& e) {
                std::string where;
                for (Eigen::Index i = 0; i < sigma.size(); ++i) {
                    where += (i ? "," : "") + std::to_string(sigma(i));
                }
                throw NumericError(std::string(e.what()) + " at sigma = (" + where + ")");
            }
            if (value < report.margin) {
                report.margin = value;
                report.witness_sigma = sigma;
                best_point = p;
            }
        }
    }
    report.witness_point = points[best_point];

    if (options.refine && n >= 2) {
        const CoefficientSample s = field.at(points[best_point]);
        double value = report.margin;
        Vector sigma = refine_on_sphere(s, report.witness_sigma, value);
        if (value < report.margin) {
            report.margin = value;
            report.witness_sigma = sigma;
        }
        report.refined = true;
    }
    // Real parts at roundoff level are reported as zero so that purely imaginary
    // symbol spectra read as non-parabolic.
    const CoefficientSample ws = field.at(report.witness_point);
    const Matrix wm = symbol_matrix(ws, std::span<const double>(report.witness_sigma.data(),
                                                                static_cast<std::size_t>(report.witness_sigma.size())));
    if (std::abs(report.margin) <= 1e-13 * (1.0 + wm.norm())) {
        report.margin = 0.0;
    }
    report.parabolic = report.margin > 0.0;
    return report;
}

SymbolBounds symbol_bounds(const CoefficientField& field, const std::vector<SamplePoint>& samples, int sphere_resolution)
{
    const int n = field.space_dim();
    const int resolution = sphere_resolution > 0 ? sphere_resolution : std::min(default_sphere_resolution(n), 256);
    const std::vector<Vector> sigmas = sphere_points(n, resolution);
    SymbolBounds out;
    for (const auto& p : effective_samples(field, samples)) {
        const CoefficientSample s = field.at(p);
        for (const auto& sigma : sigmas) {
            const std::span<const double> view(sigma.data(), static_cast<std::size_t>(sigma.size()));
            out.second_order = std::max(out.second_order, eigenvalues(symbol_matrix(s, view)).cwiseAbs().maxCoeff());
            out.first_order = std::max(out.first_order, eigenvalues(drift_symbol(s, view)).cwiseAbs().maxCoeff());
        }
    }
    return out;
}

}  // namespace invariance
