#include "conic_spde/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "conic_spde/errors.hpp"

namespace conic {

namespace {

constexpr char kMagic[4] = {'C', 'S', 'P', 'D'};
constexpr std::uint32_t kVersion = 1;

void ensure_parent(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::string& file) {
    T v;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw ValidationError("truncated snapshot file " + file);
    return v;
}

Json interval(const Interval& i) { return Json::array({i.lo, i.hi}); }

}  // namespace

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    ensure_parent(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << content;
}

void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

std::vector<std::string> write_snapshots_csv(const std::string& stem, const SolutionPath& path) {
    const auto nodes = grid_nodes(*path.grid);
    std::vector<std::string> files;
    for (std::size_t k = 0; k < path.snapshots.size(); ++k) {
        char suffix[32];
        std::snprintf(suffix, sizeof suffix, "_%04zu.csv", k);
        std::ostringstream out;
        out << "# t=" << format_number(path.times[k]) << "\n";
        out << "x1,x2,u\n";
        for (std::size_t n = 0; n < nodes.size(); ++n)
            out << format_number(nodes[n].x) << ',' << format_number(nodes[n].y) << ','
                << format_number(path.snapshots[k][n]) << '\n';
        files.push_back(stem + suffix);
        write_text_file(files.back(), out.str());
    }
    return files;
}

void write_snapshots_binary(const std::string& file, const SolutionPath& path) {
    ensure_parent(file);
    std::ofstream out(file, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + file);
    out.write(kMagic, 4);
    put<std::uint32_t>(out, kVersion);
    if (const auto* g = std::get_if<PolarGrid>(path.grid.get())) {
        put<std::uint32_t>(out, 0);
        put(out, g->domain.kappa());
        put(out, g->domain.alpha());
        put(out, g->domain.r_max());
        put(out, g->grading);
        put<std::uint32_t>(out, static_cast<std::uint32_t>(g->n_r()));
        put<std::uint32_t>(out, static_cast<std::uint32_t>(g->n_eta()));
    } else {
        const auto& cg = std::get<CartesianGrid>(*path.grid);
        put<std::uint32_t>(out, 1);
        put(out, cg.h);
        put<std::uint32_t>(out, static_cast<std::uint32_t>(cg.domain.vertices().size()));
        for (Point p : cg.domain.vertices()) {
            put(out, p.x);
            put(out, p.y);
        }
    }
    put<std::uint64_t>(out, path.snapshots.size());
    put<std::uint64_t>(out, grid_size(*path.grid));
    for (std::size_t k = 0; k < path.snapshots.size(); ++k) {
        put(out, path.times[k]);
        out.write(reinterpret_cast<const char*>(path.snapshots[k].data()),
                  static_cast<std::streamsize>(path.snapshots[k].size() * sizeof(double)));
    }
}

SnapshotFile read_snapshots_binary(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ValidationError("cannot open snapshot file " + file);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw ValidationError(file + " is not a snapshot block file");
    if (get<std::uint32_t>(in, file) != kVersion) throw ValidationError("unsupported snapshot file version in " + file);
    SnapshotFile s;
    const auto kind = get<std::uint32_t>(in, file);
    if (kind == 0) {
        const double kappa = get<double>(in, file), alpha = get<double>(in, file), r_max = get<double>(in, file);
        const double grading = get<double>(in, file);
        const int n_r = static_cast<int>(get<std::uint32_t>(in, file));
        const int n_eta = static_cast<int>(get<std::uint32_t>(in, file));
        s.grid = std::make_shared<const Grid>(build_polar_grid(WedgeDomain(kappa, alpha, r_max), n_r, n_eta, grading));
    } else if (kind == 1) {
        const double h = get<double>(in, file);
        const auto n = get<std::uint32_t>(in, file);
        std::vector<Point> v(n);
        for (auto& p : v) {
            p.x = get<double>(in, file);
            p.y = get<double>(in, file);
        }
        s.grid = std::make_shared<const Grid>(build_cartesian_grid(PolygonDomain(v), h));
    } else {
        throw ValidationError("unknown grid kind in " + file);
    }
    const auto count = get<std::uint64_t>(in, file);
    const auto values = get<std::uint64_t>(in, file);
    if (values != grid_size(*s.grid)) throw ValidationError("snapshot size does not match the grid in " + file);
    for (std::uint64_t k = 0; k < count; ++k) {
        s.times.push_back(get<double>(in, file));
        std::vector<double> u(values);
        if (!in.read(reinterpret_cast<char*>(u.data()), static_cast<std::streamsize>(values * sizeof(double))))
            throw ValidationError("truncated snapshot file " + file);
        s.snapshots.push_back(std::move(u));
    }
    return s;
}

std::string sweep_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "theta,Theta,level,lhs,rhs,ratio,stderr,classification\n";
    for (std::size_t i = 0; i < result.reports.size(); ++i)
        for (const auto& r : result.reports[i])
            out << format_number(r.weights.theta) << ',' << format_number(r.weights.Theta) << ',' << r.level << ','
                << format_number(r.lhs) << ',' << format_number(r.rhs) << ',' << format_number(r.ratio) << ','
                << format_number(r.ratio_stderr) << ',' << to_string(result.classification[i]) << '\n';
    return out.str();
}

Json to_json(const EstimateReport& r) {
    return {{"p", r.weights.p},
            {"theta", r.weights.theta},
            {"Theta", r.weights.Theta},
            {"level", r.level},
            {"trials", r.trials},
            {"lhs", r.lhs},
            {"rhs", r.rhs},
            {"ratio", r.ratio},
            {"lhs_stderr", r.lhs_stderr},
            {"rhs_stderr", r.rhs_stderr},
            {"ratio_stderr", r.ratio_stderr},
            {"zero_data", r.zero_data},
            {"ratio_undefined", r.ratio_undefined},
            {"divergence_warning", r.divergence_warning},
            {"warning", r.warning}};
}

Json to_json(const DecayFit& f) {
    return {{"direction", to_string(f.direction)},
            {"window", {f.window_lo, f.window_hi}},
            {"slope", f.slope},
            {"intercept", f.intercept},
            {"r_squared", f.r_squared},
            {"points", f.points},
            {"guarantee", f.guarantee},
            {"pass", f.pass},
            {"underflow", f.underflow}};
}

Json to_json(const HolderReport& r) {
    return {{"eta", r.eta},
            {"max_quotient", r.max_quotient},
            {"max_quotient_doubled", r.max_quotient_doubled},
            {"relative_change", r.relative_change},
            {"trial_max", r.trial_max},
            {"finite", r.finite},
            {"stable", r.stable}};
}

Json to_json(const ExponentReport& r) {
    Json j = {{"d", r.d},
              {"p", r.p},
              {"lambda", r.lambda_plus},
              {"lambda_plus", r.lambda_plus},
              {"lambda_minus", r.lambda_minus},
              {"theta_range", interval(r.ranges.theta)},
              {"Theta_range", interval(r.ranges.Theta)}};
    if (r.Lambda) j["Lambda"] = *r.Lambda;
    if (r.kappa_effective) j["kappa_effective"] = *r.kappa_effective;
    if (r.lambda_lower_bound) {
        j["lambda_lower_bound"] = r.lambda_lower_bound->value;
        j["lower_bound_vacuous"] = r.lambda_lower_bound->vacuous;
    }
    if (r.theta_range_random) j["theta_range_random"] = interval(*r.theta_range_random);
    return j;
}

}  // namespace conic
