#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "roaflow/boundary.hpp"
#include "roaflow/energy.hpp"

namespace roaflow::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kExcitationFailure = 2,
  kFlowFailure = 3,
};

/// Experiment setup behind `roa --preset`.
struct Preset {
  std::string name;
  std::string system;
  FlowConfig flow;
  /// Whether the oracle has a reference boundary curve for this system.
  bool has_reference_curve = false;
};

[[nodiscard]] std::vector<std::string> preset_names();
/// Throws InputError for unknown names.
[[nodiscard]] Preset preset(std::string_view name);

/// Parses and runs one command line (without the program name). Reports go
/// to `out`, diagnostics to `err`; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace roaflow::cli
