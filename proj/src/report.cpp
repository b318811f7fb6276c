#include "invariance/report.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <map>

namespace invariance {

using nlohmann::json;

json to_json(const Vector& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(v(i));
    }
    return out;
}

json to_json(const Verdict& verdict)
{
    json out;
    out["status"] = to_string(verdict.status);
    out["structural_path"] = verdict.structural_path ? json(*verdict.structural_path) : json(nullptr);
    out["tolerance"] = verdict.tolerance;
    out["sample_count"] = verdict.sample_count;
    out["normal_count"] = verdict.normal_count;
    out["t_zero_aligned"] = verdict.t_zero_aligned;
    json witnesses = json::array();
    for (const auto& w : verdict.witnesses) {
        witnesses.push_back({{"matrix", w.matrix.name()},
                             {"x", w.point.x},
                             {"t", w.point.t},
                             {"normal", to_json(w.normal)},
                             {"aligned", w.alignment.aligned},
                             {"eigenvalue", w.alignment.eigenvalue},
                             {"residual", w.alignment.residual}});
    }
    out["witnesses"] = std::move(witnesses);
    json residuals = json::object();
    for (const auto& [id, r] : verdict.max_residual) {
        residuals[id.name()] = r;
    }
    out["max_residual"] = std::move(residuals);
    json forms = json::object();
    for (const auto& [id, d] : verdict.diagonal_forms) {
        forms[id.name()] = to_json(d);
    }
    out["diagonal_forms"] = std::move(forms);
    return out;
}

json to_json(const ParabolicityReport& report)
{
    return {{"margin", report.margin},
            {"parabolic", report.parabolic},
            {"witness", {{"x", report.witness_point.x}, {"t", report.witness_point.t}, {"sigma", to_json(report.witness_sigma)}}},
            {"sphere_resolution", report.sphere_resolution},
            {"sample_count", report.sample_count},
            {"refined", report.refined},
            {"estimate", "sampled"}};
}

json to_json(const StabilityGate& gate)
{
    return {{"dx", gate.dx},
            {"second_order_bound", gate.second_order_bound},
            {"first_order_bound", gate.first_order_bound},
            {"margin", gate.margin},
            {"dt_max", gate.dt_max}};
}

json to_json(const ConvexBody& body)
{
    json out{{"type", body.kind()}, {"dim", body.dim()}};
    const auto one_based = [](const std::vector<int>& idx) {
        std::vector<int> out;
        for (int i : idx) {
            out.push_back(i + 1);
        }
        return out;
    };
    if (const auto* h = body.as<HalfSpace>()) {
        out["normal"] = to_json(h->normal);
        out["point"] = to_json(h->point);
    } else if (const auto* p = body.as<HPolytope>()) {
        out["faces"] = json::array();
        for (const auto& f : p->faces) {
            out["faces"].push_back({{"normal", to_json(f.normal)}, {"point", to_json(f.point)}});
        }
    } else if (const auto* a = body.as<PolyhedralAngle>()) {
        out["rows"] = one_based(a->rows);
        out["lower"] = a->lower;
    } else if (const auto* c = body.as<PolyhedralCylinder>()) {
        out["rows"] = one_based(c->rows);
        out["lower"] = c->lower;
        out["upper"] = c->upper;
    } else if (const auto* s = body.as<SphericalCylinder>()) {
        out["coords"] = one_based(s->coords);
        out["radius"] = s->radius;
    } else if (const auto* b = body.as<Ball>()) {
        out["center"] = to_json(b->center);
        out["radius"] = b->radius;
    } else if (const auto* k = body.as<PolyhedralCone>()) {
        out["vertex"] = to_json(k->vertex);
        out["normals"] = json::array();
        for (const auto& nu : k->normals) {
            out["normals"].push_back(to_json(nu));
        }
    } else if (const auto* sc = body.as<SmoothCone>()) {
        out["vertex"] = to_json(sc->vertex);
        out["axis"] = to_json(sc->axis);
        out["half_angle"] = sc->half_angle;
    }
    return out;
}

namespace {

using Check = std::function<bool(const json&)>;

const Check is_number = [](const json& j) { return j.is_number(); };
const Check is_integer = [](const json& j) { return j.is_number_integer(); };
const Check is_bool = [](const json& j) { return j.is_boolean(); };
const Check is_string = [](const json& j) { return j.is_string(); };
const Check is_object = [](const json& j) { return j.is_object(); };
const Check is_array = [](const json& j) { return j.is_array(); };
const Check is_number_array = [](const json& j) {
    return j.is_array() && std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_number(); });
};

void expect(const json& j, const std::string& path, const std::map<std::string, Check>& fields,
            std::vector<std::string>& errors)
{
    if (!j.is_object()) {
        errors.push_back(path + ": expected an object");
        return;
    }
    for (const auto& [key, check] : fields) {
        if (!j.contains(key)) {
            errors.push_back(path + "." + key + ": missing");
        } else if (!check(j.at(key))) {
            errors.push_back(path + "." + key + ": wrong type");
        }
    }
}

bool valid_status(const json& j)
{
    if (!j.is_string()) {
        return false;
    }
    const auto s = j.get<std::string>();
    return s == "Invariant" || s == "NotInvariant" || s == "SufficientHolds" || s == "NecessaryViolated" ||
           s == "Inconclusive";
}

void expect_verdict(const json& j, const std::string& path, std::vector<std::string>& errors)
{
    expect(j, path,
           {{"status", valid_status},
            {"witnesses", is_array},
            {"max_residual", is_object},
            {"diagonal_forms", is_object},
            {"tolerance", is_number},
            {"sample_count", is_integer},
            {"normal_count", is_integer},
            {"t_zero_aligned", is_bool}},
           errors);
    if (!j.is_object() || !j.contains("witnesses") || !j.at("witnesses").is_array()) {
        return;
    }
    std::size_t i = 0;
    for (const auto& w : j.at("witnesses")) {
        expect(w, path + ".witnesses[" + std::to_string(i++) + "]",
               {{"matrix", is_string},
                {"x", is_number_array},
                {"t", is_number},
                {"normal", is_number_array},
                {"aligned", is_bool},
                {"eigenvalue", is_number},
                {"residual", is_number}},
               errors);
    }
}

}  // namespace

std::vector<std::string> report_schema_errors(const json& report)
{
    std::vector<std::string> errors;
    expect(report, "report", {{"kind", is_string}, {"exit_code", is_integer}, {"config_source", is_string}}, errors);
    if (!errors.empty()) {
        return errors;
    }
    const std::string kind = report.at("kind").get<std::string>();
    if (kind == "parabolicity") {
        expect(report, "report",
               {{"margin", is_number},
                {"parabolic", is_bool},
                {"witness", is_object},
                {"sphere_resolution", is_integer},
                {"sample_count", is_integer}},
               errors);
        if (report.contains("witness")) {
            expect(report.at("witness"), "report.witness", {{"x", is_number_array}, {"t", is_number}, {"sigma", is_number_array}},
                   errors);
        }
    } else if (kind == "check") {
        expect(report, "report",
               {{"status", valid_status}, {"generic", is_object}, {"agreement", is_bool}, {"tolerance", is_number}}, errors);
        if (report.contains("generic")) {
            expect_verdict(report.at("generic"), "report.generic", errors);
        }
        if (!report.contains("structural")) {
            errors.push_back("report.structural: missing");
        } else if (!report.at("structural").is_null()) {
            expect_verdict(report.at("structural"), "report.structural", errors);
        }
    } else if (kind == "simulate") {
        expect(report, "report",
               {{"max_violation", is_number},
                {"tolerance", is_number},
                {"within_tolerance", is_bool},
                {"dt", is_number},
                {"steps", is_integer},
                {"runtime_seconds", is_number},
                {"gate", is_object},
                {"trace_file", is_string}},
               errors);
    } else if (kind == "falsify") {
        expect(report, "report", {{"found", is_bool}, {"candidates_tried", is_integer}, {"verdict", is_object}}, errors);
        if (report.contains("verdict")) {
            expect_verdict(report.at("verdict"), "report.verdict", errors);
        }
        if (!report.contains("witness")) {
            errors.push_back("report.witness: missing");
        } else if (!report.at("witness").is_null()) {
            expect(report.at("witness"), "report.witness",
                   {{"exit_time", is_number},
                    {"exit_margin", is_number},
                    {"candidate", is_integer},
                    {"max_violation", is_number},
                    {"tolerance", is_number}},
                   errors);
        }
    } else {
        errors.push_back("report.kind: unknown kind '" + kind + "'");
    }
    return errors;
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TracePoint>& trace)
{
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    out << "t,max_violation\n" << std::setprecision(17);
    for (const auto& p : trace) {
        out << p.t << ',' << p.max_violation << '\n';
    }
}

void write_field_dump(const std::filesystem::path& bin, const std::filesystem::path& header, const SolutionField& u,
                      double dt, const json& extra)
{
    std::ofstream data(bin, std::ios::binary);
    if (!data) {
        throw InputError("cannot write " + bin.string());
    }
    data.write(reinterpret_cast<const char*>(u.values.data()),
               static_cast<std::streamsize>(u.values.size() * sizeof(double)));

    std::vector<int> dims(static_cast<std::size_t>(u.space_dim()), u.points_per_axis());
    dims.push_back(u.components());
    json h = extra;
    h["dims"] = dims;
    h["dtype"] = "float64";
    h["order"] = "row-major";
    h["byte_order"] = std::endian::native == std::endian::little ? "little" : "big";
    h["n"] = u.space_dim();
    h["m"] = u.components();
    h["dx"] = u.dx();
    h["dt"] = dt;
    h["t"] = u.t;
    h["length"] = u.length();
    std::ofstream out(header);
    if (!out) {
        throw InputError("cannot write " + header.string());
    }
    out << h.dump(2) << '\n';
}

SolutionField read_field_dump(const std::filesystem::path& bin, const std::filesystem::path& header)
{
    std::ifstream in(header);
    if (!in) {
        throw InputError("cannot read " + header.string());
    }
    const json h = json::parse(in);
    const int n = h.at("n").get<int>();
    const int m = h.at("m").get<int>();
    const int points = h.at("dims").at(0).get<int>();
    SolutionField u(n, m, points, h.at("length").get<double>());
    u.t = h.at("t").get<double>();
    std::ifstream data(bin, std::ios::binary);
    data.read(reinterpret_cast<char*>(u.values.data()), static_cast<std::streamsize>(u.values.size() * sizeof(double)));
    if (!data) {
        throw InputError("truncated field dump " + bin.string());
    }
    return u;
}

}  // namespace invariance
