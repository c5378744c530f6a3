#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "autorb/function.hpp"
#include "autorb/identities.hpp"
#include "autorb/orbit.hpp"

namespace autorb::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

/// Everything a run depends on; parsed from flags, echoed into the report file.
struct RunConfig {
  std::string command;
  std::string function = "exp";
  int n = 2;                      // monomial degree
  std::string coeffs;             // ascending, comma separated
  std::string gcoeffs;            // exponent polynomial for polyexp
  std::string c = "0.5";          // NgFactor constant
  std::optional<std::string> z;
  std::optional<std::string> w;
  std::optional<double> radius;
  std::optional<std::string> rgrid;
  std::optional<std::string> degrees;
  int nodes_initial = 256;
  double tol_abs = 1e-10;
  double tol_rel = 1e-10;
  std::string suite = "all";
  std::string output;
  std::string format = "json";
  std::optional<unsigned long long> seed;
  int random = 0;
  bool wiman = false;
  std::optional<double> rho;
  double eps = 0.05;
  double rlo = 1e2;
  double rhi = 1e8;
};

Complex parse_complex(const std::string& text);
std::vector<Complex> parse_complex_list(const std::string& text);
/// "lo:hi:log" (four radii per decade), "lo:hi:log:N" or "a,b,c".
std::vector<double> parse_grid(const std::string& text);

EntireFunction make_function(const RunConfig& cfg);

nlohmann::json complex_json(Complex z);
nlohmann::json report_json(const IdentityReport& r);
nlohmann::json orbit_json(const OrbitSample& s);
nlohmann::json config_json(const RunConfig& cfg);

/// CSV with a header row: one row per scalar report, orbit point or density radius.
std::string to_csv(const nlohmann::json& report_file);

/// Runs one command line; returns the process exit code.
/// 0: success, 1: a non-xfail identity failed, 2: usage or engine error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace autorb::cli
