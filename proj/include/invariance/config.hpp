#pragma once

#include "invariance/bodies.hpp"
#include "invariance/coefficients.hpp"
#include "invariance/simulate.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace invariance {

/// Initial data for `simulate`.
struct InitialSpec {
    enum class Kind { Constant, Modes, Counterexample, RandomInBody };
    struct Mode {
        std::vector<int> wave;  // integer wave numbers per axis
        Vector cos_coeff;
        Vector sin_coeff;
    };

    Kind kind = Kind::Constant;
    Vector value;              // Constant; mean for Modes
    std::vector<Mode> modes;   // Modes
    CounterexampleSpec counterexample;
    double fill = 1.0;         // RandomInBody: fraction of the admissible amplitude
};

/// A parsed problem description. Matrix indices, row sets and coordinate sets
/// are 1-based in the document and 0-based here.
struct ProblemConfig {
    int n = 0;
    int m = 0;
    CoefficientField field;
    std::optional<ConvexBody> body;
    double tolerance = 1e-9;
    std::vector<SamplePoint> samples;
    int sphere_resolution = 0;
    int smooth_normals = 64;
    SimConfig sim;
    std::optional<InitialSpec> initial;
    int falsify_budget = 200;
    std::uint64_t seed = 7;
    std::string source;  // the document exactly as read
};

/// Parses and validates a JSON problem document. Throws InputError naming the
/// offending key.
ProblemConfig parse_config(const std::string& text);

ConvexBody parse_body(const nlohmann::json& j, int m);

/// Builds initial data on the simulation grid.
SolutionField build_initial(const ProblemConfig& config, std::mt19937_64& rng);

/// Smooth random field inside the body: c + s g(x) with c an interior point, g a
/// random low-mode trigonometric field and s = fill * (largest admissible s).
SolutionField random_field_in_body(const ConvexBody& body, int n, int points, double length, double fill,
                                   std::mt19937_64& rng);

}  // namespace invariance
