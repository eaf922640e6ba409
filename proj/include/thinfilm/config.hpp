#pragma once

#include <string>

#include "thinfilm/model.hpp"

namespace thinfilm {

struct RunConfig {
  double g = 1.0;
  double k0 = 1.0;
  double M = 8.0;
  double eps = 0.1;
  double amplitude = 0.1;
  double K = K0;
  bool K_set = false;
  double E = 0.0;
  bool E_set = false;
  double v0 = -0.1;
  double w0 = 0.0;
  double t_end = 10.0;
  double dt = 1e-4;
  double ds = 0.05;
  int max_steps = 400;
  double rupture_threshold = 1e-2;
  int grid = 256;
  int n_modes = 64;
  int snapshot_every = 1000;
  int point_index = -1;
  int mode_ell = 1;
  int samples = 20;
  unsigned long long seed = 12345;
  bool bloch_sweep = false;
  std::string branch_file;
  std::string out_dir = "out";

  ModelParams model() const { return {g, M, k0}; }
};

// key = value lines, # comments, blank lines allowed; errors carry the
// 1-based line number
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);
void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value, int line_no);

// deterministic echo of the fully resolved configuration, itself parseable
std::string echo_config(const RunConfig& cfg);

}  // namespace thinfilm
