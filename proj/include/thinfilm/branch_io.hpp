#pragma once

#include <array>
#include <string>
#include <vector>

#include "thinfilm/continuation.hpp"

namespace thinfilm {

// branch.csv, profile_<idx>.csv, bifurcation.csv under dir; 17 significant
// digits, LF line endings
void emit_branch(const BranchRecord& rec, const std::string& dir);

struct EmittedBranch {
  std::vector<std::array<double, 9>> rows;  // branch.csv data rows
  std::vector<std::vector<std::array<double, 3>>> profiles;
  std::vector<std::array<double, 2>> bifurcation;
};

EmittedBranch read_branch_dir(const std::string& dir);

// reconstruct a branch point from emitted files (profile coefficients are
// recovered from the uniform samples)
BranchPoint read_branch_point(const std::string& dir, int idx);

std::vector<std::vector<double>> read_csv(const std::string& path,
                                          const std::string& expected_header);

}  // namespace thinfilm
