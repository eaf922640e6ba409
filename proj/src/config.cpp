#include "thinfilm/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "thinfilm/numerics.hpp"

namespace thinfilm {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line_no, const std::string& msg) {
  throw config_error("line " + std::to_string(line_no) + ": " + msg);
}

double parse_double(const std::string& v, const std::string& key, int line_no) {
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    fail(line_no, "cannot parse value for '" + key + "'");
  return x;
}

long long parse_int(const std::string& v, const std::string& key, int line_no) {
  char* end = nullptr;
  long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    fail(line_no, "cannot parse value for '" + key + "'");
  return x;
}

bool parse_bool(const std::string& v, const std::string& key, int line_no) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(line_no, "cannot parse value for '" + key + "'");
}

[[noreturn]] void range_fail(int line_no, const std::string& key,
                             const std::string& what) {
  fail(line_no, "value out of range for '" + key + "' (" + what + ")");
}

}  // namespace

void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value, int line_no) {
  if (key == "g") {
    cfg.g = parse_double(value, key, line_no);
    if (!(cfg.g > 0.0)) range_fail(line_no, key, "must be positive");
  } else if (key == "k0") {
    cfg.k0 = parse_double(value, key, line_no);
    if (!(cfg.k0 > 0.0)) range_fail(line_no, key, "must be positive");
  } else if (key == "M") {
    cfg.M = parse_double(value, key, line_no);
    if (!(cfg.M > 0.0)) range_fail(line_no, key, "must be positive");
  } else if (key == "eps") {
    cfg.eps = parse_double(value, key, line_no);
    if (!(cfg.eps > 0.0) || cfg.eps > 0.3)
      range_fail(line_no, key, "must lie in (0, 0.3]");
  } else if (key == "amplitude") {
    cfg.amplitude = parse_double(value, key, line_no);
    if (!(cfg.amplitude > 0.0)) range_fail(line_no, key, "must be positive");
  } else if (key == "K") {
    cfg.K = parse_double(value, key, line_no);
    cfg.K_set = true;
    if (!(cfg.K <= K0 + 1e-14)) range_fail(line_no, key, "must not exceed K0");
  } else if (key == "E") {
    cfg.E = parse_double(value, key, line_no);
    cfg.E_set = true;
  } else if (key == "v0") {
    cfg.v0 = parse_double(value, key, line_no);
    if (!(cfg.v0 > -1.0)) range_fail(line_no, key, "must exceed -1");
  } else if (key == "w0") {
    cfg.w0 = parse_double(value, key, line_no);
  } else if (key == "t_end") {
    cfg.t_end = parse_double(value, key, line_no);
    if (!(cfg.t_end > 0.0)) range_fail(line_no, key, "must be positive");
  } else if (key == "dt") {
    cfg.dt = parse_double(value, key, line_no);
    if (!(cfg.dt > 0.0)) range_fail(line_no, key, "must be positive");
  } else if (key == "ds") {
    cfg.ds = parse_double(value, key, line_no);
    if (!(cfg.ds > 0.0)) range_fail(line_no, key, "must be positive");
  } else if (key == "max_steps") {
    cfg.max_steps = static_cast<int>(parse_int(value, key, line_no));
    if (cfg.max_steps < 2) range_fail(line_no, key, "must be >= 2");
  } else if (key == "rupture_threshold") {
    cfg.rupture_threshold = parse_double(value, key, line_no);
    if (!(cfg.rupture_threshold > 0.0) || cfg.rupture_threshold >= 1.0)
      range_fail(line_no, key, "must lie in (0, 1)");
  } else if (key == "grid") {
    cfg.grid = static_cast<int>(parse_int(value, key, line_no));
    if (cfg.grid < 16 || cfg.grid % 2 != 0)
      range_fail(line_no, key, "must be even and >= 16");
  } else if (key == "n_modes") {
    cfg.n_modes = static_cast<int>(parse_int(value, key, line_no));
    if (cfg.n_modes < 4) range_fail(line_no, key, "must be >= 4");
  } else if (key == "snapshot_every") {
    cfg.snapshot_every = static_cast<int>(parse_int(value, key, line_no));
    if (cfg.snapshot_every < 1) range_fail(line_no, key, "must be >= 1");
  } else if (key == "point_index") {
    cfg.point_index = static_cast<int>(parse_int(value, key, line_no));
    if (cfg.point_index < -1) range_fail(line_no, key, "must be >= -1");
  } else if (key == "mode") {
    cfg.mode_ell = static_cast<int>(parse_int(value, key, line_no));
    if (cfg.mode_ell < 1) range_fail(line_no, key, "must be >= 1");
  } else if (key == "samples") {
    cfg.samples = static_cast<int>(parse_int(value, key, line_no));
    if (cfg.samples < 1) range_fail(line_no, key, "must be >= 1");
  } else if (key == "seed") {
    cfg.seed = static_cast<unsigned long long>(parse_int(value, key, line_no));
  } else if (key == "bloch_sweep") {
    cfg.bloch_sweep = parse_bool(value, key, line_no);
  } else if (key == "branch_file") {
    if (value.empty()) range_fail(line_no, key, "must not be empty");
    cfg.branch_file = value;
  } else if (key == "out_dir") {
    if (value.empty()) range_fail(line_no, key, "must not be empty");
    cfg.out_dir = value;
  } else {
    fail(line_no, "unknown key '" + key + "'");
  }
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) fail(line_no, "expected 'key = value'");
    apply_config_entry(cfg, key, value, line_no);
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string echo_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "# resolved configuration\n";
  out << "g = " << format_g17(cfg.g) << "\n";
  out << "k0 = " << format_g17(cfg.k0) << "\n";
  out << "M = " << format_g17(cfg.M) << "\n";
  out << "eps = " << format_g17(cfg.eps) << "\n";
  out << "amplitude = " << format_g17(cfg.amplitude) << "\n";
  out << "K = " << format_g17(cfg.K) << "\n";
  if (cfg.E_set) out << "E = " << format_g17(cfg.E) << "\n";
  out << "v0 = " << format_g17(cfg.v0) << "\n";
  out << "w0 = " << format_g17(cfg.w0) << "\n";
  out << "t_end = " << format_g17(cfg.t_end) << "\n";
  out << "dt = " << format_g17(cfg.dt) << "\n";
  out << "ds = " << format_g17(cfg.ds) << "\n";
  out << "max_steps = " << cfg.max_steps << "\n";
  out << "rupture_threshold = " << format_g17(cfg.rupture_threshold) << "\n";
  out << "grid = " << cfg.grid << "\n";
  out << "n_modes = " << cfg.n_modes << "\n";
  out << "snapshot_every = " << cfg.snapshot_every << "\n";
  out << "point_index = " << cfg.point_index << "\n";
  out << "mode = " << cfg.mode_ell << "\n";
  out << "samples = " << cfg.samples << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "bloch_sweep = " << (cfg.bloch_sweep ? "true" : "false") << "\n";
  if (!cfg.branch_file.empty())
    out << "branch_file = " << cfg.branch_file << "\n";
  out << "out_dir = " << cfg.out_dir << "\n";
  ModelParams p = cfg.model();
  out << "# derived: M_star = " << format_g17(p.M_star())
      << ", M_star_k0 = " << format_g17(p.M_star_k0()) << "\n";
  return out.str();
}

}  // namespace thinfilm
