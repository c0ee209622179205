#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace tailbench {

inline constexpr const char* kVersion = "tailbench 1.0.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

// Provenance record written next to every reproduce/run output.
struct RunManifest
{
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string output_dir;
  std::string version = kVersion;
  std::size_t replications = 0;
  std::string note;
  std::vector<std::string> files;

  std::string to_json() const;
};

// One number per line; blank lines and '#' comments are skipped. Throws
// std::invalid_argument on a line that is not a finite number and
// IoError when the file cannot be read.
std::vector<double> read_data_file(const std::filesystem::path& path);

// Entry point of the command-line tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace tailbench
