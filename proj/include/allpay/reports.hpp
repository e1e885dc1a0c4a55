#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace allpay::reports {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Process exit codes of the command-line tool.
enum ExitCode : int
{
  exit_ok                  = 0,
  exit_usage               = 1,
  exit_numerical           = 2,
  exit_statistical_breach  = 3,
  exit_hypothesis_violated = 4,
  exit_io_error            = 5,
};

class UsageError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// Flag name (without leading dashes) to its raw command-line text.
using Params = std::map<std::string, std::string>;

struct Request
{
  std::string command;
  Params      params;
};

// Everything needed to reproduce a run. Embedded in every output; the
// wall-clock timestamp is written only to the sidecar manifest so that
// outputs stay byte-identical across reruns.
struct RunManifest
{
  std::string                command;
  Params                     params;  // after defaults are applied
  std::optional<std::uint64_t> seed;
  std::string                version{kToolVersion};
  std::optional<std::string> timestamp;

  nlohmann::ordered_json to_json() const;
  static RunManifest     from_json(nlohmann::ordered_json const &j);
  Request                request() const;
};

struct Report
{
  std::string body;       // CSV or JSON text
  int         exit_code = exit_ok;
  std::string diagnostic; // human-readable message for stderr
  RunManifest manifest;
};

// Executes one subcommand: equilibrium, bidcdf, simulate, market, deviate
// or sweep. Never throws; failures map onto exit codes.
Report run(Request const &request);

// Recovers the manifest embedded in a CSV ("# manifest: ...") or JSON body,
// or read from a sidecar manifest file.
RunManifest extract_manifest(std::string_view body);

// JSON text with every floating-point number written to 17 significant
// digits and non-finite values as null.
std::string dump_json(nlohmann::ordered_json const &j, int indent = 2);

// printf("%.17g"); empty for non-finite values.
std::string format_number(double value);

// Parses "v", "start:stop:step" or "v1,v2,...".
std::vector<double> parse_range(std::string_view spec);

}  // namespace allpay::reports
