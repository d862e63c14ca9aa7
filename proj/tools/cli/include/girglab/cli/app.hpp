#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace girglab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

// Parses argv, runs the subcommand, writes outputs plus a manifest. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::string version_string();

std::string sha256_hex(const std::filesystem::path& file);

// Any CSV the tool writes: one header line, then comma-separated numbers.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvTable read_numeric_csv(const std::filesystem::path& file);

} // namespace girglab::cli
