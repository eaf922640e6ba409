#include "thinfilm/branch_io.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "thinfilm/numerics.hpp"

namespace thinfilm {

namespace {

constexpr const char* branch_header =
    "s,M,K,min_h,max_h,l2_norm,h2_norm,flux_residual,leading_eig";

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw config_error("cannot open for writing: " + p.string());
  return f;
}

}  // namespace

std::vector<std::vector<double>> read_csv(const std::string& path,
                                          const std::string& expected_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != expected_header)
    throw config_error(path + ": unexpected header");
  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    size_t pos = 0;
    while (true) {
      size_t comma = line.find(',', pos);
      std::string cell = line.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);
      char* end = nullptr;
      double x = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw config_error(path + " line " + std::to_string(line_no) +
                           ": cannot parse '" + cell + "'");
      row.push_back(x);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void emit_branch(const BranchRecord& rec, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  {
    auto f = open_out(fs::path(dir) / "branch.csv");
    f << branch_header << "\n";
    for (const auto& p : rec.points) {
      f << format_g17(p.s) << ',' << format_g17(p.M) << ',' << format_g17(p.K)
        << ',' << format_g17(p.min_h) << ',' << format_g17(p.max_h) << ','
        << format_g17(p.l2_norm) << ',' << format_g17(p.h2_norm) << ','
        << format_g17(p.flux_residual) << ',' << format_g17(p.leading_eig)
        << "\n";
    }
  }
  for (size_t i = 0; i < rec.points.size(); ++i) {
    auto f = open_out(fs::path(dir) /
                      ("profile_" + std::to_string(i) + ".csv"));
    f << "x,v,h\n";
    const auto& prof = rec.points[i].profile;
    int n = 4 * prof.modes();
    auto x = PeriodicProfile::grid(prof.k0(), n);
    for (int j = 0; j < n; ++j) {
      double v = prof.eval(x[j]);
      f << format_g17(x[j]) << ',' << format_g17(v) << ','
        << format_g17(1.0 + v) << "\n";
    }
  }
  {
    auto f = open_out(fs::path(dir) / "bifurcation.csv");
    f << "M,l2_norm\n";
    for (const auto& p : rec.points)
      f << format_g17(p.M) << ',' << format_g17(p.l2_norm) << "\n";
  }
}

EmittedBranch read_branch_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  EmittedBranch eb;
  auto rows = read_csv((fs::path(dir) / "branch.csv").string(), branch_header);
  for (const auto& r : rows) {
    if (r.size() != 9)
      throw config_error(dir + "/branch.csv: expected 9 columns");
    std::array<double, 9> a;
    std::copy(r.begin(), r.end(), a.begin());
    eb.rows.push_back(a);
  }
  for (size_t i = 0; i < eb.rows.size(); ++i) {
    auto prows = read_csv(
        (fs::path(dir) / ("profile_" + std::to_string(i) + ".csv")).string(),
        "x,v,h");
    std::vector<std::array<double, 3>> prof;
    for (const auto& r : prows) {
      if (r.size() != 3)
        throw config_error(dir + ": profile row must have 3 columns");
      prof.push_back({r[0], r[1], r[2]});
    }
    eb.profiles.push_back(std::move(prof));
  }
  auto brows = read_csv((fs::path(dir) / "bifurcation.csv").string(),
                        "M,l2_norm");
  for (const auto& r : brows) {
    if (r.size() != 2)
      throw config_error(dir + "/bifurcation.csv: expected 2 columns");
    eb.bifurcation.push_back({r[0], r[1]});
  }
  return eb;
}

BranchPoint read_branch_point(const std::string& dir, int idx) {
  auto eb = read_branch_dir(dir);
  if (idx < 0) idx = static_cast<int>(eb.rows.size()) - 1;
  if (idx < 0 || idx >= static_cast<int>(eb.rows.size()))
    throw config_error("branch point index out of range");

  const auto& samples = eb.profiles[idx];
  int n = static_cast<int>(samples.size());
  if (n < 8 || n % 4 != 0)
    throw config_error("profile sample count not a multiple of 4");
  double dx = samples[1][0] - samples[0][0];
  double L = dx * n;
  double k0 = 2.0 * std::numbers::pi / L;
  int N = n / 4;
  std::vector<double> a(N, 0.0);
  for (int l = 1; l <= N; ++l) {
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      s += samples[j][1] * std::cos(l * k0 * samples[j][0]);
    a[l - 1] = 2.0 * s / n;
  }

  BranchPoint bp;
  const auto& r = eb.rows[idx];
  bp.s = r[0];
  bp.M = r[1];
  bp.K = r[2];
  bp.min_h = r[3];
  bp.max_h = r[4];
  bp.l2_norm = r[5];
  bp.h2_norm = r[6];
  bp.flux_residual = r[7];
  bp.leading_eig = r[8];
  bp.profile = PeriodicProfile(k0, std::move(a));
  return bp;
}

}  // namespace thinfilm
