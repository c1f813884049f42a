#pragma once

#include <memory>
#include <string>
#include <vector>

#include "conic_spde/config.hpp"
#include "conic_spde/geometry.hpp"
#include "conic_spde/solver.hpp"
#include "conic_spde/verify.hpp"

namespace conic {

/// 17 significant digits, enough to round-trip a double.
std::string format_number(double v);

void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const Json& j);

/// One file per snapshot, `<stem>_<k>.csv`, columns x1,x2,u. Returns the paths.
std::vector<std::string> write_snapshots_csv(const std::string& stem, const SolutionPath& path);

/// Binary snapshot block (host byte order):
///   "CSPD", u32 version = 1, u32 grid kind (0 polar, 1 lattice)
///   polar:   f64 kappa, alpha, r_max, grading; u32 n_r, n_eta
///   lattice: f64 h; u32 vertex count; f64 x, y per vertex
///   u64 snapshot count, u64 values per snapshot
///   per snapshot: f64 time, then the nodal values as f64
void write_snapshots_binary(const std::string& file, const SolutionPath& path);

struct SnapshotFile {
    std::shared_ptr<const Grid> grid;
    std::vector<double> times;
    std::vector<std::vector<double>> snapshots;
};

SnapshotFile read_snapshots_binary(const std::string& file);

/// Columns theta,Theta,level,lhs,rhs,ratio,stderr,classification.
std::string sweep_csv(const SweepResult& result);

Json to_json(const EstimateReport& r);
Json to_json(const DecayFit& fit);
Json to_json(const HolderReport& r);
Json to_json(const ExponentReport& r);

}  // namespace conic
