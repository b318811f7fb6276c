#include "invariance/commands.hpp"

#include "invariance/falsify.hpp"
#include "invariance/parabolicity.hpp"
#include "invariance/report.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace invariance {

using nlohmann::json;

int exit_code(Status status)
{
    switch (status) {
    case Status::Invariant:
    case Status::SufficientHolds:
        return kExitOk;
    case Status::NotInvariant:
    case Status::NecessaryViolated:
        return kExitViolated;
    case Status::Inconclusive:
        return kExitInconclusive;
    }
    return kExitInternalError;
}

namespace {

json base_report(const std::string& kind, const ProblemConfig& config)
{
    return {{"kind", kind}, {"config_source", config.source}, {"n", config.n}, {"m", config.m}};
}

int emit(json report, int code, const CommandOptions& options, std::ostream& out)
{
    report["exit_code"] = code;
    std::filesystem::create_directories(options.out_dir);
    const auto path = options.out_dir / "report.json";
    std::ofstream file(path);
    if (!file) {
        throw InputError("cannot write " + path.string());
    }
    const std::string text = report.dump(2);
    file << text << '\n';
    out << text << '\n';
    return code;
}

double tolerance(const ProblemConfig& config, const CommandOptions& options)
{
    return options.tol.value_or(config.tolerance);
}

std::uint64_t seed(const ProblemConfig& config, const CommandOptions& options)
{
    return options.seed.value_or(config.seed);
}

const ConvexBody& require_body(const ProblemConfig& config, const char* command)
{
    if (!config.body) {
        throw InputError(std::string(command) + ": config: missing key 'body'");
    }
    return *config.body;
}

CheckOptions check_options(const ProblemConfig& config, const CommandOptions& options)
{
    CheckOptions check;
    check.tol = tolerance(config, options);
    check.smooth_samples = config.smooth_normals;
    return check;
}

}  // namespace

int cmd_parabolicity(const ProblemConfig& config, const CommandOptions& options, std::ostream& out, std::ostream&)
{
    MarginOptions margin;
    margin.sphere_resolution = config.sphere_resolution;
    const ParabolicityReport report = petrovskii_margin(config.field, config.samples, margin);
    json j = base_report("parabolicity", config);
    j.update(to_json(report));
    return emit(std::move(j), report.parabolic ? kExitOk : kExitViolated, options, out);
}

int cmd_check(const ProblemConfig& config, const CommandOptions& options, std::ostream& out, std::ostream& err)
{
    const ConvexBody& body = require_body(config, "check");
    const CheckOptions check = check_options(config, options);
    const Verdict generic = check_theorem(config.field, body, config.samples, check);
    const std::optional<Verdict> structural = structural_check(config.field, body, config.samples, check);
    const bool agreement = !structural || structural->status == generic.status;

    json j = base_report("check", config);
    j["status"] = to_string(generic.status);
    j["tolerance"] = check.tol;
    j["body"] = to_json(body);
    j["generic"] = to_json(generic);
    j["structural"] = structural ? to_json(*structural) : json(nullptr);
    j["agreement"] = agreement;
    if (!agreement) {
        err << "check: structural path '" << structural->structural_path.value_or("?") << "' reports "
            << to_string(structural->status) << " but the generic criterion reports " << to_string(generic.status)
            << '\n';
        return emit(std::move(j), kExitInternalError, options, out);
    }
    return emit(std::move(j), exit_code(generic.status), options, out);
}

int cmd_simulate(const ProblemConfig& config, const CommandOptions& options, std::ostream& out, std::ostream& err)
{
    const ConvexBody& body = require_body(config, "simulate");
    if (!config.initial) {
        throw InputError("simulate: config: missing key 'initial'");
    }
    std::mt19937_64 rng(seed(config, options));
    const SolutionField psi = build_initial(config, rng);

    const auto start = std::chrono::steady_clock::now();
    MonitorResult run;
    try {
        run = run_monitored(config.field, psi, body, config.sim);
    } catch (const StabilityError& e) {
        err << "simulate: " << e.what() << "\nsuggested dt: " << e.suggested_dt << '\n';
        return kExitUnstable;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::filesystem::create_directories(options.out_dir);
    write_trace_csv(options.out_dir / "trace.csv", run.trace);
    write_field_dump(options.out_dir / "final.bin", options.out_dir / "final.json", run.final_field, run.dt);

    json j = base_report("simulate", config);
    j["body"] = to_json(body);
    j["scheme"] = config.sim.scheme == Scheme::SpectralExact ? "spectral" : "explicit";
    j["max_violation"] = run.max_violation;
    j["tolerance"] = run.tolerance;
    j["within_tolerance"] = run.max_violation <= run.tolerance;
    j["dt"] = run.dt;
    j["steps"] = run.steps;
    j["horizon"] = config.sim.horizon;
    j["runtime_seconds"] = seconds;
    j["gate"] = to_json(run.gate);
    j["trace_file"] = "trace.csv";
    j["final_field"] = {{"data", "final.bin"}, {"header", "final.json"}};
    return emit(std::move(j), kExitOk, options, out);
}

int cmd_falsify(const ProblemConfig& config, const CommandOptions& options, std::ostream& out, std::ostream& err)
{
    const ConvexBody& body = require_body(config, "falsify");
    FalsifyOptions falsify_options;
    falsify_options.budget = config.falsify_budget;
    falsify_options.seed = seed(config, options);
    falsify_options.check = check_options(config, options);

    FalsifyOutcome outcome;
    try {
        outcome = falsify(config.field, body, config.samples, config.sim, falsify_options);
    } catch (const StabilityError& e) {
        err << "falsify: " << e.what() << "\nsuggested dt: " << e.suggested_dt << '\n';
        return kExitUnstable;
    }

    json j = base_report("falsify", config);
    j["body"] = to_json(body);
    j["verdict"] = to_json(outcome.verdict);
    j["candidates_tried"] = outcome.candidates_tried;
    j["budget"] = falsify_options.budget;
    j["seed"] = falsify_options.seed;
    j["found"] = outcome.witness.has_value();
    if (!outcome.witness) {
        err << "falsify: no witness within budget of " << falsify_options.budget << " candidates\n";
        j["witness"] = nullptr;
        return emit(std::move(j), kExitNoWitness, options, out);
    }

    const FalsifyWitness& w = *outcome.witness;
    json alpha = json::array();
    for (Eigen::Index r = 0; r < w.spec.alpha.rows(); ++r) {
        alpha.push_back(to_json(Vector(w.spec.alpha.row(r).transpose())));
    }
    const json counterexample{{"a", to_json(w.spec.a)},
                              {"normal", to_json(w.spec.normal)},
                              {"tangent", to_json(w.spec.tangent)},
                              {"alpha", alpha},
                              {"beta", to_json(w.spec.beta)},
                              {"center", to_json(w.spec.center)},
                              {"radius", w.spec.radius}};

    std::filesystem::create_directories(options.out_dir);
    write_trace_csv(options.out_dir / "trace.csv", w.run.trace);
    write_field_dump(options.out_dir / "witness.bin", options.out_dir / "witness.json", w.initial, w.run.dt,
                     {{"counterexample", counterexample}, {"exit_time", w.exit_time}});

    j["witness"] = {{"exit_time", w.exit_time},
                    {"exit_margin", w.exit_margin},
                    {"candidate", w.candidate},
                    {"max_violation", w.run.max_violation},
                    {"tolerance", w.run.tolerance},
                    {"dt", w.run.dt},
                    {"counterexample", counterexample},
                    {"files", {{"data", "witness.bin"}, {"header", "witness.json"}, {"trace", "trace.csv"}}}};
    return emit(std::move(j), kExitOk, options, out);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Invariant convex sets of linear parabolic systems"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed_value = 0;
    double tol_value = 0.0;

    struct Sub {
        CLI::App* app;
        int (*run)(const ProblemConfig&, const CommandOptions&, std::ostream&, std::ostream&);
    };
    std::vector<Sub> subs{
        {app.add_subcommand("parabolicity", "Petrovskii margin of the coefficient symbol"), cmd_parabolicity},
        {app.add_subcommand("check", "Eigenvector criterion for the body"), cmd_check},
        {app.add_subcommand("simulate", "Monitored simulation from the configured initial data"), cmd_simulate},
        {app.add_subcommand("falsify", "Search for initial data whose solution leaves the body"), cmd_falsify},
    };
    std::vector<CLI::Option*> seed_opts;
    std::vector<CLI::Option*> tol_opts;
    for (auto& sub : subs) {
        sub.app->add_option("--config", config_path, "problem description (JSON)")->required();
        sub.app->add_option("--out", out_dir, "output directory");
        seed_opts.push_back(sub.app->add_option("--seed", seed_value, "seed for randomized searches"));
        tol_opts.push_back(sub.app->add_option("--tol", tol_value, "alignment tolerance"));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInputError;
    }

    CommandOptions options;
    options.out_dir = out_dir;
    for (auto* o : seed_opts) {
        if (o->count() > 0) {
            options.seed = seed_value;
        }
    }
    for (auto* o : tol_opts) {
        if (o->count() > 0) {
            if (!(tol_value > 0.0)) {
                err << "--tol must be positive\n";
                return kExitInputError;
            }
            options.tol = tol_value;
        }
    }

    try {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) {
            throw InputError("cannot read config " + config_path);
        }
        std::ostringstream text;
        text << in.rdbuf();
        const ProblemConfig config = parse_config(text.str());
        for (const auto& sub : subs) {
            if (sub.app->parsed()) {
                return sub.run(config, options, out, err);
            }
        }
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const GeometryError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternalError;
    }
    return kExitInputError;
}

}  // namespace invariance
