#include "invariance/config.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace invariance {

using nlohmann::json;

namespace {

const json& require(const json& j, const std::string& key, const std::string& path)
{
    if (!j.is_object() || !j.contains(key)) {
        throw InputError("config: missing key '" + path + key + "'");
    }
    return j.at(key);
}

double number(const json& j, const std::string& path)
{
    if (!j.is_number()) {
        throw InputError("config: '" + path + "' must be a number");
    }
    return j.get<double>();
}

int integer(const json& j, const std::string& path)
{
    if (!j.is_number_integer()) {
        throw InputError("config: '" + path + "' must be an integer");
    }
    return j.get<int>();
}

Vector vector_of(const json& j, const std::string& path, Eigen::Index expected = -1)
{
    if (!j.is_array()) {
        throw InputError("config: '" + path + "' must be an array of numbers");
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = number(j[i], path + "[" + std::to_string(i) + "]");
    }
    if (expected >= 0 && v.size() != expected) {
        throw InputError("config: '" + path + "' must have " + std::to_string(expected) + " entries");
    }
    return v;
}

std::vector<double> doubles(const json& j, const std::string& path)
{
    const Vector v = vector_of(j, path);
    return {v.data(), v.data() + v.size()};
}

// 1-based indices in the document, 0-based in memory.
std::vector<int> indices(const json& j, const std::string& path)
{
    if (!j.is_array()) {
        throw InputError("config: '" + path + "' must be an array of 1-based indices");
    }
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(integer(j[i], path) - 1);
    }
    return out;
}

// A matrix whose entries are numbers or expression strings.
std::vector<std::vector<std::string>> matrix_cells(const json& j, int m, const std::string& path)
{
    if (!j.is_array() || static_cast<int>(j.size()) != m) {
        throw InputError("config: '" + path + "' must be a " + std::to_string(m) + "x" + std::to_string(m) +
                         " row-major nested array");
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t r = 0; r < j.size(); ++r) {
        const json& row = j[r];
        if (!row.is_array() || static_cast<int>(row.size()) != m) {
            throw InputError("config: row " + std::to_string(r + 1) + " of '" + path + "' must have " +
                             std::to_string(m) + " entries");
        }
        std::vector<std::string> cells;
        for (const auto& cell : row) {
            if (cell.is_number()) {
                std::ostringstream s;
                s.precision(17);
                s << cell.get<double>();
                cells.push_back(s.str());
            } else if (cell.is_string()) {
                cells.push_back(cell.get<std::string>());
            } else {
                throw InputError("config: entries of '" + path + "' must be numbers or expression strings");
            }
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

CoefficientField parse_coefficients(const json& j, int n, int m)
{
    const json& second = require(j, "second", "coefficients.");
    if (!second.is_array() || static_cast<int>(second.size()) != n) {
        throw InputError("config: 'coefficients.second' must be an n x n array of matrices");
    }
    std::vector<std::vector<std::vector<std::string>>> s;
    for (int a = 0; a < n; ++a) {
        const json& row = second[static_cast<std::size_t>(a)];
        if (!row.is_array() || static_cast<int>(row.size()) != n) {
            throw InputError("config: 'coefficients.second' must be an n x n array of matrices");
        }
        for (int b = 0; b < n; ++b) {
            s.push_back(matrix_cells(row[static_cast<std::size_t>(b)], m,
                                     "coefficients.second[" + std::to_string(a) + "][" + std::to_string(b) + "]"));
        }
    }
    std::vector<std::vector<std::vector<std::string>>> f;
    if (j.contains("first")) {
        const json& first = j.at("first");
        if (!first.is_array() || static_cast<int>(first.size()) != n) {
            throw InputError("config: 'coefficients.first' must hold n matrices");
        }
        for (int a = 0; a < n; ++a) {
            f.push_back(matrix_cells(first[static_cast<std::size_t>(a)], m, "coefficients.first[" + std::to_string(a) + "]"));
        }
    }
    return CoefficientField::from_expressions(n, m, s, f);
}

SimConfig parse_sim(const json& j)
{
    SimConfig sim;
    if (j.contains("length")) sim.length = number(j.at("length"), "simulation.length");
    if (j.contains("points")) sim.points = integer(j.at("points"), "simulation.points");
    if (j.contains("dt")) sim.dt = number(j.at("dt"), "simulation.dt");
    if (j.contains("horizon")) sim.horizon = number(j.at("horizon"), "simulation.horizon");
    if (j.contains("monitor_stride")) sim.monitor_stride = integer(j.at("monitor_stride"), "simulation.monitor_stride");
    if (j.contains("safety")) sim.safety = number(j.at("safety"), "simulation.safety");
    if (j.contains("scheme")) {
        const std::string scheme = j.at("scheme").get<std::string>();
        if (scheme == "explicit" || scheme == "explicit-central") {
            sim.scheme = Scheme::ExplicitCentral;
        } else if (scheme == "spectral" || scheme == "spectral-exact") {
            sim.scheme = Scheme::SpectralExact;
        } else {
            throw InputError("config: unknown simulation.scheme '" + scheme + "'");
        }
    }
    if (!(sim.horizon > 0.0)) {
        throw InputError("config: simulation.horizon must be positive");
    }
    return sim;
}

InitialSpec parse_initial(const json& j, int n, int m)
{
    InitialSpec spec;
    const std::string type = require(j, "type", "initial.").get<std::string>();
    if (type == "constant") {
        spec.kind = InitialSpec::Kind::Constant;
        spec.value = vector_of(require(j, "value", "initial."), "initial.value", m);
    } else if (type == "modes") {
        spec.kind = InitialSpec::Kind::Modes;
        spec.value = j.contains("mean") ? vector_of(j.at("mean"), "initial.mean", m) : Vector::Zero(m);
        for (const auto& mode : require(j, "modes", "initial.")) {
            InitialSpec::Mode md;
            for (const auto& k : require(mode, "wave", "initial.modes[].")) {
                md.wave.push_back(integer(k, "initial.modes[].wave"));
            }
            if (static_cast<int>(md.wave.size()) != n) {
                throw InputError("config: 'initial.modes[].wave' must have n entries");
            }
            md.cos_coeff = mode.contains("cos") ? vector_of(mode.at("cos"), "initial.modes[].cos", m) : Vector::Zero(m);
            md.sin_coeff = mode.contains("sin") ? vector_of(mode.at("sin"), "initial.modes[].sin", m) : Vector::Zero(m);
            spec.modes.push_back(std::move(md));
        }
    } else if (type == "counterexample") {
        spec.kind = InitialSpec::Kind::Counterexample;
        auto& c = spec.counterexample;
        c.a = vector_of(require(j, "a", "initial."), "initial.a", m);
        c.normal = vector_of(require(j, "normal", "initial."), "initial.normal", m);
        c.tangent = vector_of(require(j, "tangent", "initial."), "initial.tangent", m);
        const json& alpha = require(j, "alpha", "initial.");
        c.alpha = Matrix(n, n);
        if (!alpha.is_array() || static_cast<int>(alpha.size()) != n) {
            throw InputError("config: 'initial.alpha' must be n x n");
        }
        for (int r = 0; r < n; ++r) {
            c.alpha.row(r) = vector_of(alpha[static_cast<std::size_t>(r)], "initial.alpha", n).transpose();
        }
        c.beta = vector_of(require(j, "beta", "initial."), "initial.beta", n);
        c.center = vector_of(require(j, "center", "initial."), "initial.center", n);
        c.radius = number(require(j, "radius", "initial."), "initial.radius");
    } else if (type == "random_in_body") {
        spec.kind = InitialSpec::Kind::RandomInBody;
        if (j.contains("fill")) {
            spec.fill = number(j.at("fill"), "initial.fill");
        }
    } else {
        throw InputError("config: unknown initial.type '" + type + "'");
    }
    return spec;
}

}  // namespace

ConvexBody parse_body(const json& j, int m)
{
    const std::string type = require(j, "type", "body.").get<std::string>();
    if (type == "half_space") {
        return make_half_space(vector_of(require(j, "normal", "body."), "body.normal", m),
                               vector_of(require(j, "point", "body."), "body.point", m));
    }
    if (type == "h_polytope") {
        HPolytope p;
        for (const auto& f : require(j, "faces", "body.")) {
            p.faces.push_back({vector_of(require(f, "normal", "body.faces[]."), "body.faces[].normal", m),
                               vector_of(require(f, "point", "body.faces[]."), "body.faces[].point", m)});
        }
        return make_body(std::move(p));
    }
    if (type == "polyhedral_angle") {
        return make_polyhedral_angle(m, indices(require(j, "rows", "body."), "body.rows"),
                                     doubles(require(j, "lower", "body."), "body.lower"));
    }
    if (type == "polyhedral_cylinder") {
        return make_polyhedral_cylinder(m, indices(require(j, "rows", "body."), "body.rows"),
                                        doubles(require(j, "lower", "body."), "body.lower"),
                                        doubles(require(j, "upper", "body."), "body.upper"));
    }
    if (type == "spherical_cylinder") {
        return make_spherical_cylinder(m, indices(require(j, "coords", "body."), "body.coords"),
                                       number(require(j, "radius", "body."), "body.radius"));
    }
    if (type == "ball") {
        return make_ball(vector_of(require(j, "center", "body."), "body.center", m),
                         number(require(j, "radius", "body."), "body.radius"));
    }
    if (type == "polyhedral_cone") {
        std::vector<Vector> normals;
        for (const auto& nu : require(j, "normals", "body.")) {
            normals.push_back(vector_of(nu, "body.normals[]", m));
        }
        const Vector vertex = j.contains("vertex") ? vector_of(j.at("vertex"), "body.vertex", m) : Vector::Zero(m);
        return make_polyhedral_cone(vertex, std::move(normals));
    }
    if (type == "smooth_cone") {
        const Vector vertex = j.contains("vertex") ? vector_of(j.at("vertex"), "body.vertex", m) : Vector::Zero(m);
        return make_smooth_cone(vertex, vector_of(require(j, "axis", "body."), "body.axis", m),
                                number(require(j, "half_angle", "body."), "body.half_angle"));
    }
    throw InputError("config: unknown body.type '" + type + "'");
}

ProblemConfig parse_config(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("config: malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw InputError("config: top level must be an object");
    }

    ProblemConfig cfg;
    cfg.source = text;
    try {
        cfg.n = integer(require(doc, "n", ""), "n");
        cfg.m = integer(require(doc, "m", ""), "m");
        if (cfg.n < 1 || cfg.m < 1) {
            throw InputError("config: n and m must be positive");
        }
        cfg.field = parse_coefficients(require(doc, "coefficients", ""), cfg.n, cfg.m);
        if (doc.contains("body")) {
            cfg.body = parse_body(doc.at("body"), cfg.m);
        }
        if (doc.contains("tolerance")) {
            cfg.tolerance = number(doc.at("tolerance"), "tolerance");
        }
        if (doc.contains("seed")) {
            cfg.seed = doc.at("seed").get<std::uint64_t>();
        }
        if (doc.contains("simulation")) {
            cfg.sim = parse_sim(doc.at("simulation"));
        }
        if (doc.contains("initial")) {
            cfg.initial = parse_initial(doc.at("initial"), cfg.n, cfg.m);
        }
        if (doc.contains("falsify") && doc.at("falsify").contains("budget")) {
            cfg.falsify_budget = integer(doc.at("falsify").at("budget"), "falsify.budget");
        }

        const json sampling = doc.value("sampling", json::object());
        if (sampling.contains("sphere_resolution")) {
            cfg.sphere_resolution = integer(sampling.at("sphere_resolution"), "sampling.sphere_resolution");
        }
        if (sampling.contains("smooth_normals")) {
            cfg.smooth_normals = integer(sampling.at("smooth_normals"), "sampling.smooth_normals");
        }
        if (sampling.contains("points")) {
            for (const auto& p : sampling.at("points")) {
                cfg.samples.push_back({doubles(require(p, "x", "sampling.points[]."), "sampling.points[].x"),
                                       p.contains("t") ? number(p.at("t"), "sampling.points[].t") : 0.0});
            }
        }
        std::vector<std::vector<double>> xs;
        if (sampling.contains("x_grid")) {
            for (const auto& x : sampling.at("x_grid")) {
                xs.push_back(doubles(x, "sampling.x_grid[]"));
            }
        }
        std::vector<double> ts;
        if (sampling.contains("t_values")) {
            ts = doubles(sampling.at("t_values"), "sampling.t_values");
        }
        if (!xs.empty() || !ts.empty()) {
            if (xs.empty()) {
                xs.push_back(std::vector<double>(static_cast<std::size_t>(cfg.n), 0.0));
            }
            if (ts.empty()) {
                ts.push_back(0.0);
            }
            for (auto& p : sample_grid(xs, ts)) {
                cfg.samples.push_back(std::move(p));
            }
        }
        if (cfg.samples.empty()) {
            const std::vector<double> origin(static_cast<std::size_t>(cfg.n), 0.0);
            cfg.samples.push_back({origin, 0.0});
            if (cfg.field.t_dependent()) {
                for (double f : {0.25, 0.5, 1.0}) {
                    cfg.samples.push_back({origin, f * cfg.sim.horizon});
                }
            }
        }
        for (const auto& p : cfg.samples) {
            if (static_cast<int>(p.x.size()) != cfg.n) {
                throw InputError("config: sample point has " + std::to_string(p.x.size()) + " coordinates, expected n");
            }
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("config: ") + e.what());
    }
    return cfg;
}

SolutionField random_field_in_body(const ConvexBody& body, int n, int points, double length, double fill,
                                   std::mt19937_64& rng)
{
    const int m = body.dim();
    const Vector center = interior_point(body);
    std::normal_distribution<double> gauss;

    // g: three random trigonometric modes with wave numbers in [-2, 2].
    struct Term {
        std::vector<int> wave;
        Vector c;
        Vector s;
    };
    std::vector<Term> terms;
    const int count = 3;
    std::uniform_int_distribution<int> wave(-2, 2);
    for (int i = 0; i < count; ++i) {
        Term term;
        bool nonzero = false;
        for (int d = 0; d < n; ++d) {
            term.wave.push_back(wave(rng));
            nonzero = nonzero || term.wave.back() != 0;
        }
        if (!nonzero) {
            term.wave[0] = 1;
        }
        term.c = Vector(m);
        term.s = Vector(m);
        for (int c = 0; c < m; ++c) {
            term.c(c) = gauss(rng);
            term.s(c) = gauss(rng);
        }
        terms.push_back(std::move(term));
    }

    SolutionField g = sample_field(n, m, points, length, [&](const std::vector<double>& x) {
        Vector v = Vector::Zero(m);
        for (const auto& term : terms) {
            double phase = 0.0;
            for (int d = 0; d < n; ++d) {
                phase += 2.0 * std::numbers::pi * term.wave[static_cast<std::size_t>(d)] * x[static_cast<std::size_t>(d)] / length;
            }
            v += term.c * std::cos(phase) + term.s * std::sin(phase);
        }
        return v;
    });
    const double g_scale = std::max(g.max_abs(), 1e-12);

    const auto compose = [&](double s) {
        SolutionField u = g;
        for (std::size_t p = 0; p < u.size(); ++p) {
            u.set_value(p, center + (s / g_scale) * g.value(p));
        }
        return u;
    };

    // The admissible amplitudes form an interval [0, s*]; locate s* by bisection,
    // capped for unbounded directions.
    double lo = 0.0;
    double hi = 4.0;
    if (max_violation(body, compose(hi)) <= 0.0) {
        lo = hi;
    } else {
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (max_violation(body, compose(mid)) <= 0.0 ? lo : hi) = mid;
        }
    }
    return compose(fill * lo);
}

SolutionField build_initial(const ProblemConfig& config, std::mt19937_64& rng)
{
    if (!config.initial) {
        throw InputError("config: missing key 'initial'");
    }
    const InitialSpec& spec = *config.initial;
    const int n = config.n;
    const int m = config.m;
    const double length = config.sim.length;
    const int points = config.sim.points;
    switch (spec.kind) {
    case InitialSpec::Kind::Constant:
        return sample_field(n, m, points, length, [&](const std::vector<double>&) { return spec.value; });
    case InitialSpec::Kind::Modes:
        return sample_field(n, m, points, length, [&](const std::vector<double>& x) {
            Vector v = spec.value;
            for (const auto& mode : spec.modes) {
                double phase = 0.0;
                for (int d = 0; d < n; ++d) {
                    phase += 2.0 * std::numbers::pi * mode.wave[static_cast<std::size_t>(d)] * x[static_cast<std::size_t>(d)] / length;
                }
                v += mode.cos_coeff * std::cos(phase) + mode.sin_coeff * std::sin(phase);
            }
            return v;
        });
    case InitialSpec::Kind::Counterexample:
        if (!config.body) {
            throw InputError("config: counterexample initial data needs a body");
        }
        return counterexample_init(*config.body, spec.counterexample, points, length);
    case InitialSpec::Kind::RandomInBody:
        if (!config.body) {
            throw InputError("config: random_in_body initial data needs a body");
        }
        return random_field_in_body(*config.body, n, points, length, spec.fill, rng);
    }
    throw InputError("config: unknown initial data");
}

}  // namespace invariance
