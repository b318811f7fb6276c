#pragma once

#include "invariance/bodies.hpp"
#include "invariance/coefficients.hpp"
#include "invariance/criterion.hpp"
#include "invariance/simulate.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace invariance {

struct FalsifyOptions {
    int budget = 200;
    std::uint64_t seed = 7;
    double exit_factor = 10.0;  // required exit, in units of the solver tolerance
    CheckOptions check;
};

struct FalsifyWitness {
    CounterexampleSpec spec;
    SolutionField initial;
    MonitorResult run;
    double exit_time = 0.0;    // first trace time above exit_factor * tolerance
    double exit_margin = 0.0;  // max violation / tolerance
    int candidate = 0;         // 0-based index within the budget
};

struct FalsifyOutcome {
    Verdict verdict;
    std::optional<FalsifyWitness> witness;
    int candidates_tried = 0;
};

/// Searches for initial data in the body whose discrete solution leaves it.
/// Candidates follow the cutoff-polynomial family of counterexample_init,
/// built at boundary points whose normals failed the eigenvector test.
/// Throws InputError when the criterion does not report a violation.
FalsifyOutcome falsify(const CoefficientField& field, const ConvexBody& body, const std::vector<SamplePoint>& samples,
                       const SimConfig& config, const FalsifyOptions& options = {});

}  // namespace invariance
