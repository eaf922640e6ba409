#pragma once

#include <stdexcept>
#include <string>

namespace thinfilm {

// input outside the mathematical domain of an operation
struct domain_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// an iteration failed to converge or a solution ceased to exist
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// malformed or out-of-range configuration input
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace thinfilm
