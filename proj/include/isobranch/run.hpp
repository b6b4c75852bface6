#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "isobranch/config.hpp"
#include "isobranch/continuation.hpp"

namespace isobranch {

namespace exit_code {
inline constexpr int success = 0;
/// Unexpected failure, or summarize on a CSV without records.
inline constexpr int failure = 1;
inline constexpr int config = 2;
inline constexpr int stall = 3;
inline constexpr int inversion = 4;
}  // namespace exit_code

struct RunOptions {
  /// Replaces [output] directory when non-empty.
  std::string output_directory;
  /// Progress lines; null keeps the run silent.
  std::ostream* log = nullptr;
};

/**
 * mesh -> star-shape check -> material self-checks -> origin audit -> branch trace -> probes.
 * Artifacts go to the output directory. A summary is written on every exit path; when the
 * config does not parse it goes to <override or current directory>/summary.txt.
 */
int run(const std::string& config_path, const RunOptions& options = {});
int run(const RunConfig& config, const RunOptions& options = {});

/// Aggregates over branch records shared by the run summary and summarize.
struct BranchVerdicts {
  int records = 0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double max_u = 0.0;
  double max_gradu = 0.0;
  double max_p = 0.0;
  double min_det = 1.0;
  double max_det_dev = 0.0;
  double min_se_margin = 0.0;
  double min_adn_abs = 0.0;
  std::vector<ParityEvent> parity_events;

  /// "no parity events; injectivity held (min det = 1.000)"
  std::string parity_injectivity() const;
  std::string incompressibility() const;
  std::string ellipticity() const;
};

BranchVerdicts branch_verdicts(const std::vector<BranchRecord>& records);

/// Report on a branch CSV. Returns 0, exit_code::failure for no records, exit_code::config on a schema mismatch.
int summarize(const std::string& csv_path, std::ostream& out);

}  // namespace isobranch
