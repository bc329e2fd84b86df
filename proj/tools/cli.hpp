#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hretan::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;         // usage, parse or I/O error
inline constexpr int kFindings = 2;      // validate found violations
inline constexpr int kPartialFailure = 3;  // compare: some datasets failed

struct RunConfig {
  std::string subcommand;
  std::string data_path;
  std::string dag_path;
  std::string manifest_path;
  std::string stub_gmeans_path;
  std::string classifier = "hre-tan";
  std::string classifier_b = "tan";
  std::size_t folds = 10;
  std::uint64_t seed = 1;
  double smoothing = 1.0;
  std::optional<std::string> positive_class;
  std::string root = "random";
  std::string format = "json";
  std::string output_path;
};

// Runs the command line. Reports go to `out` unless --output names a file;
// diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hretan::cli
