#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mfrcli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kNumericalError = 3,
  kInstanceTooLarge = 4,
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "MFRGAME_OUT_DIR";

/// Entry point shared by the binary and the tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mfrcli
