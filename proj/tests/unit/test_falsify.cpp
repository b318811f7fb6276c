#include "invariance/config.hpp"
#include "invariance/falsify.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

using namespace invariance;

namespace {

ProblemConfig load(const std::string& name)
{
    std::ifstream in(std::string(FIXTURE_DIR) + "/" + name, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

FalsifyOutcome run(const ProblemConfig& c, std::uint64_t seed, int budget)
{
    FalsifyOptions opts;
    opts.seed = seed;
    opts.budget = budget;
    return falsify(c.field, *c.body, c.samples, c.sim, opts);
}

}  // namespace

TEST_CASE("witnesses are found for non-invariant systems")
{
    for (const char* name : {"lower_triangular.json", "cone_nonscalar.json", "spherical_unequal.json"}) {
        CAPTURE(name);
        const auto c = load(name);
        const auto outcome = run(c, c.seed, c.falsify_budget);
        CHECK(outcome.verdict.status == Status::NotInvariant);
        REQUIRE(outcome.witness.has_value());
        const auto& w = *outcome.witness;
        CHECK(outcome.candidates_tried == w.candidate + 1);
        CHECK(w.exit_margin > 10.0);
        CHECK(w.run.max_violation > 10.0 * w.run.tolerance);
        CHECK(w.exit_time > 0.0);
        CHECK(w.exit_time <= c.sim.horizon + 1e-12);

        // the initial data sits in the body and the solution leaves it
        CHECK(max_violation(*c.body, w.initial) <= 1e-12);
        bool crossed = false;
        for (const auto& p : w.run.trace) {
            if (p.t == w.exit_time) {
                crossed = p.max_violation > 10.0 * w.run.tolerance;
            }
        }
        CHECK(crossed);
    }
}

TEST_CASE("the search is deterministic for a fixed seed")
{
    const auto c = load("lower_triangular.json");
    const auto a = run(c, 5, 20);
    const auto b = run(c, 5, 20);
    REQUIRE(a.witness.has_value());
    REQUIRE(b.witness.has_value());
    CHECK(a.witness->candidate == b.witness->candidate);
    CHECK(a.witness->initial.values == b.witness->initial.values);
    CHECK(a.witness->exit_margin == b.witness->exit_margin);
}

TEST_CASE("invariant systems are rejected")
{
    const auto c = load("upper_triangular.json");
    CHECK_THROWS_AS(run(c, 1, 5), InputError);
    const auto heat = load("heat_ball.json");
    CHECK_THROWS_AS(run(heat, 1, 5), InputError);
}

TEST_CASE("a tiny budget can run out")
{
    auto c = load("lower_triangular.json");
    FalsifyOptions opts;
    opts.budget = 3;
    opts.exit_factor = 1e12;
    const auto outcome = falsify(c.field, *c.body, c.samples, c.sim, opts);
    CHECK_FALSE(outcome.witness.has_value());
    CHECK(outcome.candidates_tried == 3);
}
