#include "conic_spde/config.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>

#include "conic_spde/errors.hpp"

namespace conic {

namespace {

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + " must be a JSON object");
    for (const auto& item : j.items())
        if (!allowed.count(item.key())) throw ValidationError("unknown key '" + item.key() + "' in " + where);
}

double number(const Json& j, const std::string& where) {
    if (!j.is_number()) throw ValidationError(where + " must be a number");
    return j.get<double>();
}

int integer(const Json& j, const std::string& where) {
    if (!j.is_number_integer()) throw ValidationError(where + " must be an integer");
    return j.get<int>();
}

bool boolean(const Json& j, const std::string& where) {
    if (!j.is_boolean()) throw ValidationError(where + " must be true or false");
    return j.get<bool>();
}

std::string text(const Json& j, const std::string& where) {
    if (!j.is_string()) throw ValidationError(where + " must be a string");
    return j.get<std::string>();
}

double angle(const Json& j, const std::string& where) {
    if (j.is_string()) return parse_angle(j.get<std::string>());
    return number(j, where);
}

Point point(const Json& j, const std::string& where, bool angular_second = false) {
    if (!j.is_array() || j.size() != 2) throw ValidationError(where + " must be a pair [a, b]");
    return {number(j[0], where), angular_second ? angle(j[1], where) : number(j[1], where)};
}

template <class T, class F>
void optional_field(const Json& j, const char* key, T& target, F&& convert) {
    if (j.contains(key)) target = convert(j.at(key), std::string(key));
}

Bump parse_bump(const Json& j, const Domain& domain, const std::string& where) {
    check_keys(j, {"center", "polar", "width", "amplitude", "omega", "phase"}, where);
    Bump b;
    if (j.contains("center") == j.contains("polar"))
        throw ValidationError(where + " needs exactly one of 'center' and 'polar'");
    if (j.contains("center")) {
        b.center = point(j.at("center"), where + ".center");
    } else {
        const auto* w = std::get_if<WedgeDomain>(&domain);
        if (!w) throw ValidationError(where + ".polar needs a wedge domain");
        const Point rp = point(j.at("polar"), where + ".polar", true);
        b.center = w->from_local(rp.x, rp.y);
    }
    if (!j.contains("width")) throw ValidationError(where + " needs a width");
    b.width = number(j.at("width"), where + ".width");
    optional_field(j, "amplitude", b.amplitude, number);
    optional_field(j, "omega", b.omega, number);
    optional_field(j, "phase", b.phase, number);
    require(b.width > 0, where + ".width must be positive");
    return b;
}

ScalarField parse_field(const Json& j, const Domain& domain, const std::string& where) {
    if (!j.is_array()) throw ValidationError(where + " must be a list of bumps");
    ScalarField f;
    for (std::size_t k = 0; k < j.size(); ++k) f.bumps.push_back(parse_bump(j[k], domain, where + "[" + std::to_string(k) + "]"));
    return f;
}

Json field_json(const ScalarField& f) {
    Json out = Json::array();
    for (const Bump& b : f.bumps)
        out.push_back({{"center", {b.center.x, b.center.y}},
                       {"width", b.width},
                       {"amplitude", b.amplitude},
                       {"omega", b.omega},
                       {"phase", b.phase}});
    return out;
}

std::uint64_t env_seed() {
    const char* env = std::getenv("CONIC_SPDE_SEED");
    if (!env || !*env) return 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw ValidationError("CONIC_SPDE_SEED must be a non-negative integer");
    return v;
}

}  // namespace

double parse_angle(const std::string& input) {
    static const std::regex pattern(
        R"(^\s*([+-]?)\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*(\*?\s*pi)?\s*(?:/\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?))?\s*$)");
    std::smatch m;
    if (!std::regex_match(input, m, pattern) || (!m[2].matched && !m[3].matched))
        throw ValidationError("cannot parse angle '" + input + "'");
    double value = m[2].matched ? std::stod(m[2].str()) : 1.0;
    if (m[3].matched) value *= kPi;
    if (m[4].matched) {
        const double den = std::stod(m[4].str());
        if (den == 0) throw ValidationError("angle '" + input + "' divides by zero");
        value /= den;
    }
    return m[1].str() == "-" ? -value : value;
}

CoefficientPath RunConfig::coefficient_path(std::uint32_t trial) const {
    if (coefficients.kind == CoefficientKind::constant) return CoefficientPath::constant(coefficients.a);
    return sample_coefficients(seed, coefficients.kind, coefficients.nu1, coefficients.nu2, problem.T,
                               coefficients.n_switches, trial);
}

ProblemSpec RunConfig::problem_for_trial(std::uint32_t trial) const {
    ProblemSpec spec = problem;
    spec.coefficients = coefficient_path(trial);
    return spec;
}

EstimateOptions RunConfig::estimate_options() const {
    EstimateOptions eo;
    eo.solver = solver;
    eo.trials = trials;
    eo.seed = seed;
    eo.threads = threads;
    eo.max_radius = max_radius;
    if (coefficients.kind != CoefficientKind::constant)
        eo.random_coefficients =
            CoefficientModel{coefficients.kind, coefficients.nu1, coefficients.nu2, coefficients.n_switches};
    return eo;
}

RepresentationOptions RunConfig::representation_options() const {
    RepresentationOptions ro;
    ro.grid = solver.grid;
    ro.max_modes = max_modes;
    ro.eval_radius = max_radius;
    return ro;
}

RunConfig config_from_json(const Json& j) {
    check_keys(j, {"version", "command", "domain", "operator", "data", "weights", "solver", "trials", "seed", "threads",
                   "max_radius", "output", "kernel", "sweep", "decay", "holder", "exponents", "norm"},
               "config");
    RunConfig c;
    optional_field(j, "command", c.command, text);

    if (j.contains("domain")) {
        const Json& d = j.at("domain");
        check_keys(d, {"type", "kappa", "alpha", "r_max", "vertices"}, "domain");
        const std::string type = d.contains("type") ? text(d.at("type"), "domain.type") : "wedge";
        if (type == "wedge") {
            double kappa = kPi / 2, alpha = 0.0, r_max = 2.0;
            optional_field(d, "kappa", kappa, angle);
            optional_field(d, "alpha", alpha, angle);
            optional_field(d, "r_max", r_max, number);
            if (d.contains("vertices")) throw ValidationError("a wedge takes no vertices");
            c.problem.domain = WedgeDomain(kappa, alpha, r_max);
        } else if (type == "polygon") {
            if (!d.contains("vertices") || !d.at("vertices").is_array())
                throw ValidationError("a polygon needs a vertex list");
            for (const char* key : {"kappa", "alpha", "r_max"})
                if (d.contains(key)) throw ValidationError(std::string("a polygon takes no ") + key);
            std::vector<Point> v;
            for (const auto& p : d.at("vertices")) v.push_back(point(p, "domain.vertices"));
            c.problem.domain = PolygonDomain(v);
        } else {
            throw ValidationError("domain.type must be 'wedge' or 'polygon'");
        }
    }

    if (j.contains("operator")) {
        const Json& o = j.at("operator");
        check_keys(o, {"coefficients", "a", "nu1", "nu2", "n_switches"}, "operator");
        if (o.contains("coefficients"))
            c.coefficients.kind = coefficient_kind_from_string(text(o.at("coefficients"), "operator.coefficients"));
        if (o.contains("a")) {
            const Json& a = o.at("a");
            if (!a.is_array() || a.size() != 3) throw ValidationError("operator.a must be [a11, a12, a22]");
            c.coefficients.a = {number(a[0], "operator.a"), number(a[1], "operator.a"), number(a[2], "operator.a")};
        }
        optional_field(o, "nu1", c.coefficients.nu1, number);
        optional_field(o, "nu2", c.coefficients.nu2, number);
        optional_field(o, "n_switches", c.coefficients.n_switches, integer);
    }

    if (j.contains("data")) {
        const Json& d = j.at("data");
        check_keys(d, {"u0", "f0", "f", "noise"}, "data");
        const Domain& dom = c.problem.domain;
        if (d.contains("u0")) c.problem.u0 = parse_field(d.at("u0"), dom, "data.u0");
        if (d.contains("f0")) c.problem.f0 = parse_field(d.at("f0"), dom, "data.f0");
        if (d.contains("f")) {
            const Json& f = d.at("f");
            check_keys(f, {"x", "y"}, "data.f");
            if (f.contains("x")) c.problem.f.x = parse_field(f.at("x"), dom, "data.f.x");
            if (f.contains("y")) c.problem.f.y = parse_field(f.at("y"), dom, "data.f.y");
        }
        if (d.contains("noise")) {
            const Json& n = d.at("noise");
            if (!n.is_array()) throw ValidationError("data.noise must be a list of fields");
            for (std::size_t k = 0; k < n.size(); ++k)
                c.problem.noise.fields.push_back(parse_field(n[k], dom, "data.noise[" + std::to_string(k) + "]"));
        }
    }

    if (j.contains("weights")) {
        const Json& ws = j.at("weights");
        if (!ws.is_array() || ws.empty()) throw ValidationError("weights must be a non-empty list");
        c.weights.clear();
        for (const auto& w : ws) {
            check_keys(w, {"p", "theta", "Theta", "m"}, "weights[]");
            WeightParams wp;
            optional_field(w, "p", wp.p, number);
            optional_field(w, "theta", wp.theta, number);
            optional_field(w, "Theta", wp.Theta, number);
            optional_field(w, "m", wp.m, integer);
            wp.validate();
            c.weights.push_back(wp);
        }
    }

    if (j.contains("solver")) {
        const Json& s = j.at("solver");
        check_keys(s, {"T", "dt", "n_r", "n_eta", "grading", "h", "scheme", "engine", "snapshot_every", "c_stab",
                       "max_modes"},
                   "solver");
        optional_field(s, "T", c.problem.T, number);
        optional_field(s, "dt", c.problem.dt, number);
        optional_field(s, "n_r", c.solver.grid.n_r, integer);
        optional_field(s, "n_eta", c.solver.grid.n_eta, integer);
        optional_field(s, "grading", c.solver.grid.grading, number);
        optional_field(s, "h", c.solver.grid.h, number);
        if (s.contains("scheme")) c.solver.scheme = scheme_from_string(text(s.at("scheme"), "solver.scheme"));
        if (s.contains("engine")) c.engine = engine_from_string(text(s.at("engine"), "solver.engine"));
        optional_field(s, "snapshot_every", c.solver.snapshot_every, integer);
        optional_field(s, "c_stab", c.solver.c_stab, number);
        optional_field(s, "max_modes", c.max_modes, integer);
    }

    optional_field(j, "trials", c.trials, integer);
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw ValidationError("seed must be a non-negative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    } else {
        c.seed = env_seed();
    }
    optional_field(j, "threads", c.threads, integer);
    optional_field(j, "max_radius", c.max_radius, number);

    if (j.contains("output")) {
        const Json& o = j.at("output");
        check_keys(o, {"dir", "format"}, "output");
        optional_field(o, "dir", c.output.dir, text);
        optional_field(o, "format", c.output.format, text);
    }
    if (j.contains("kernel")) {
        const Json& k = j.at("kernel");
        check_keys(k, {"samples", "lambda_plus", "lambda_minus", "residual_step"}, "kernel");
        optional_field(k, "samples", c.kernel.samples, integer);
        if (k.contains("lambda_plus")) c.kernel.lambda_plus = number(k.at("lambda_plus"), "kernel.lambda_plus");
        if (k.contains("lambda_minus")) c.kernel.lambda_minus = number(k.at("lambda_minus"), "kernel.lambda_minus");
        optional_field(k, "residual_step", c.kernel.residual_step, number);
    }
    if (j.contains("sweep")) {
        const Json& s = j.at("sweep");
        check_keys(s, {"Theta", "thetas", "p", "levels", "dilate", "refine_angle"}, "sweep");
        optional_field(s, "Theta", c.sweep.Theta, number);
        if (s.contains("thetas")) {
            if (!s.at("thetas").is_array()) throw ValidationError("sweep.thetas must be a list");
            c.sweep.thetas.clear();
            for (const auto& t : s.at("thetas")) c.sweep.thetas.push_back(number(t, "sweep.thetas"));
        }
        optional_field(s, "p", c.sweep.p, number);
        optional_field(s, "levels", c.sweep.levels, integer);
        optional_field(s, "dilate", c.sweep.dilate, boolean);
        optional_field(s, "refine_angle", c.sweep.refine_angle, boolean);
    }
    if (j.contains("decay")) {
        const Json& d = j.at("decay");
        check_keys(d, {"direction", "window_lo", "window_hi", "edge_radius", "tolerance"}, "decay");
        if (d.contains("direction"))
            c.decay_direction = decay_direction_from_string(text(d.at("direction"), "decay.direction"));
        optional_field(d, "window_lo", c.decay.window_lo, number);
        optional_field(d, "window_hi", c.decay.window_hi, number);
        optional_field(d, "edge_radius", c.decay.edge_radius, number);
        optional_field(d, "tolerance", c.decay.tolerance, number);
    }
    if (j.contains("holder")) {
        const Json& h = j.at("holder");
        check_keys(h, {"alpha", "beta", "pairs"}, "holder");
        optional_field(h, "alpha", c.holder.alpha, number);
        optional_field(h, "beta", c.holder.beta, number);
        optional_field(h, "pairs", c.holder.pairs, integer);
    }

    if (j.contains("exponents")) {
        const Json& e = j.at("exponents");
        check_keys(e, {"d", "kappa", "alpha", "cap_angle", "a", "b", "c", "p", "nu1", "nu2"}, "exponents");
        ExponentQuery& q = c.exponents;
        optional_field(e, "d", q.d, integer);
        optional_field(e, "kappa", q.kappa, angle);
        optional_field(e, "alpha", q.alpha, angle);
        optional_field(e, "cap_angle", q.cap_angle, angle);
        optional_field(e, "a", q.op.a, number);
        optional_field(e, "b", q.op.b, number);
        optional_field(e, "c", q.op.c, number);
        optional_field(e, "p", q.p, number);
        if (e.contains("nu1") != e.contains("nu2")) throw ValidationError("exponents needs both nu1 and nu2");
        if (e.contains("nu1"))
            q.bounds = EllipticityBounds{number(e.at("nu1"), "exponents.nu1"), number(e.at("nu2"), "exponents.nu2")};
    }
    if (j.contains("norm")) {
        const Json& n = j.at("norm");
        check_keys(n, {"inputs", "snapshot"}, "norm");
        if (n.contains("inputs")) {
            if (!n.at("inputs").is_array()) throw ValidationError("norm.inputs must be a list of files");
            for (const auto& f : n.at("inputs")) c.norm.inputs.push_back(text(f, "norm.inputs"));
        }
        optional_field(n, "snapshot", c.norm.snapshot, integer);
    }

    require(c.trials >= 1, "trials must be >= 1");
    require(c.threads >= 0, "threads must be >= 0");
    require(c.output.format == "csv" || c.output.format == "binary", "output.format must be 'csv' or 'binary'");
    require(c.max_modes >= 1, "solver.max_modes must be >= 1");
    c.holder.trials = c.trials;
    c.holder.seed = c.seed;
    c.holder.solver = c.solver;
    c.holder.max_radius = c.max_radius;
    c.holder.threads = c.threads;
    c.problem.coefficients = c.coefficient_path(0);
    c.problem.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("malformed JSON in " + path + ": " + e.what());
    }
    return config_from_json(j);
}

Json config_to_json(const RunConfig& c) {
    Json j;
    j["version"] = CONIC_SPDE_VERSION;
    j["command"] = c.command;
    if (const auto* w = std::get_if<WedgeDomain>(&c.problem.domain)) {
        j["domain"] = {{"type", "wedge"}, {"kappa", w->kappa()}, {"alpha", w->alpha()}, {"r_max", w->r_max()}};
    } else {
        Json v = Json::array();
        for (Point p : std::get<PolygonDomain>(c.problem.domain).vertices()) v.push_back({p.x, p.y});
        j["domain"] = {{"type", "polygon"}, {"vertices", v}};
    }
    const Matrix2& a = c.coefficients.a;
    j["operator"] = {{"coefficients", to_string(c.coefficients.kind)},
                     {"a", {a.a11, a.a12, a.a22}},
                     {"nu1", c.coefficients.nu1},
                     {"nu2", c.coefficients.nu2},
                     {"n_switches", c.coefficients.n_switches}};
    Json noise = Json::array();
    for (const auto& g : c.problem.noise.fields) noise.push_back(field_json(g));
    j["data"] = {{"u0", field_json(c.problem.u0)},
                 {"f0", field_json(c.problem.f0)},
                 {"f", {{"x", field_json(c.problem.f.x)}, {"y", field_json(c.problem.f.y)}}},
                 {"noise", noise}};
    Json ws = Json::array();
    for (const auto& w : c.weights) ws.push_back({{"p", w.p}, {"theta", w.theta}, {"Theta", w.Theta}, {"m", w.m}});
    j["weights"] = ws;
    j["solver"] = {{"T", c.problem.T},
                   {"dt", c.problem.dt},
                   {"n_r", c.solver.grid.n_r},
                   {"n_eta", c.solver.grid.n_eta},
                   {"grading", c.solver.grid.grading},
                   {"h", c.solver.grid.h},
                   {"scheme", to_string(c.solver.scheme)},
                   {"engine", to_string(c.engine)},
                   {"snapshot_every", c.solver.snapshot_every},
                   {"c_stab", c.solver.c_stab},
                   {"max_modes", c.max_modes}};
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["max_radius"] = c.max_radius;
    j["output"] = {{"dir", c.output.dir}, {"format", c.output.format}};
    Json kernel = {{"samples", c.kernel.samples}, {"residual_step", c.kernel.residual_step}};
    if (c.kernel.lambda_plus) kernel["lambda_plus"] = *c.kernel.lambda_plus;
    if (c.kernel.lambda_minus) kernel["lambda_minus"] = *c.kernel.lambda_minus;
    j["kernel"] = kernel;
    j["sweep"] = {{"Theta", c.sweep.Theta},
                  {"thetas", c.sweep.thetas},
                  {"p", c.sweep.p},
                  {"levels", c.sweep.levels},
                  {"dilate", c.sweep.dilate},
                  {"refine_angle", c.sweep.refine_angle}};
    j["decay"] = {{"direction", to_string(c.decay_direction)},
                  {"window_lo", c.decay.window_lo},
                  {"window_hi", c.decay.window_hi},
                  {"edge_radius", c.decay.edge_radius},
                  {"tolerance", c.decay.tolerance}};
    j["holder"] = {{"alpha", c.holder.alpha}, {"beta", c.holder.beta}, {"pairs", c.holder.pairs}};
    const ExponentQuery& q = c.exponents;
    Json e = {{"d", q.d}, {"kappa", q.kappa}, {"alpha", q.alpha}, {"cap_angle", q.cap_angle}, {"a", q.op.a},
              {"b", q.op.b}, {"c", q.op.c}, {"p", q.p}};
    if (q.bounds) {
        e["nu1"] = q.bounds->nu1;
        e["nu2"] = q.bounds->nu2;
    }
    j["exponents"] = e;
    j["norm"] = {{"inputs", c.norm.inputs}, {"snapshot", c.norm.snapshot}};
    return j;
}

}  // namespace conic
