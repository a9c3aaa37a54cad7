#pragma once

// Command-line front end: surface, curve, critical, dims, simulate, replay.
// Exit codes: 0 success, 1 usage error, 2 numerical/bracket failure, 3 I/O.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cqkd/infocalc.hpp"
#include "cqkd/protosim.hpp"

namespace cqkd::cli {

inline constexpr std::string_view kToolVersion = "0.3.0";

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2, kIo = 3 };

enum class Format { Csv, Json };

// Radians by default; a "deg" suffix converts from degrees, "rad" is accepted.
double parse_angle(std::string_view text);

// Column-oriented numeric table; the shape every grid-like output uses.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  bool operator==(const Table&) const = default;
};

void write_table_csv(std::ostream& out, const Table& table);
Table read_table_csv(std::istream& in);
nlohmann::json table_to_json(const Table& table);
Table table_from_json(const nlohmann::json& data);

// Command name, canonical argument list, parameter set, seed, quadrature,
// version and wall-clock duration. `args` replays the run exactly.
struct RunManifest {
  std::string command;
  std::vector<std::string> args;
  nlohmann::json parameters;
  std::optional<std::uint64_t> seed;
  std::optional<QuadratureSettings> quadrature;
  std::string tool_version{kToolVersion};
  double duration_seconds = 0.0;

  [[nodiscard]] nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

// Entry point shared by the binary and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace cqkd::cli
