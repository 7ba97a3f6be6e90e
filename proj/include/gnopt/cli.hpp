#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gnopt/errors.hpp"

namespace gnopt::cli {

enum ExitCode : int {
  kSuccess = 0,
  kDomainError = 2,
  kIoError = 3,
  kExtremalityViolated = 4,
  kNotConverged = 5,
};

class IoError : public Error {
public:
  using Error::Error;
};

/// Ordered key/value settings. Keys are long option names without dashes.
using RunConfig = std::vector<std::pair<std::string, std::string>>;

/// Flat `key = value` text. Lines starting with '#' are comments, except
/// `# config: key=value`, which is how CSV artifacts embed their config; a
/// JSON artifact is accepted too (its "config" object is used). Throws IoError.
RunConfig read_config_file(const std::filesystem::path& path);
RunConfig parse_config_text(std::string_view text);

/// 12 significant digits.
std::string format_number(double x);
/// x rounded to 12 significant digits, as a double (for JSON output).
double round_number(double x);
/// Shortest text that parses back to exactly x.
std::string format_exact(double x);

std::vector<double> parse_number_list(std::string_view text);

/// Writes through a temporary file in the same directory and renames it into
/// place. Throws IoError.
void write_atomically(const std::filesystem::path& path, std::string_view content);

/// Directory for artifacts whose path was not given: $GNOPT_OUTPUT_DIR or ".".
std::filesystem::path default_output_dir();

/// Entry point shared by the executable and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace gnopt::cli
