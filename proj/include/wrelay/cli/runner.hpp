#ifndef WRELAY_CLI_RUNNER_HPP
#define WRELAY_CLI_RUNNER_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wrelay/cli/scenario.hpp"

namespace wrelay::cli {

// A sweep point whose evaluation did not converge.
class PointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<metrics::Method>> methods;
  std::optional<std::uint64_t> trials;
  unsigned threads = 0;  // 0: hardware concurrency
};

// One CSV table in memory.
struct CsvTable {
  std::string file_name;  // "<scenario>_<label>.csv"
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string text() const;
};

// Evaluates every metric of every variant over the sweep. Columns:
//   variant,<sweep>,exact,asymptotic,mc,mc_half_width[,extras]
// with empty fields for methods that are not requested or not available.
// Extras: bler adds mc_normal,mc_normal_half_width; ber with stale_csi_mc
// adds mc_stale_csi,mc_stale_csi_half_width; allocated ber and ee add
// exact_uniform.
std::vector<CsvTable> evaluate_scenario(const Scenario& s, const RunOptions& opt);

// evaluate_scenario followed by writing the tables into opt.out_dir.
// Returns the written paths.
std::vector<std::string> run_scenario(const Scenario& s, const RunOptions& opt);

std::vector<metrics::Method> parse_methods(const std::string& csv);

// Agreement between exact and Monte-Carlo columns.
struct RowCheck {
  std::size_t line = 0;  // 1-based line in the file, header is line 1
  std::string variant;
  std::string x;
  double exact = 0.0;
  double mc = 0.0;
  double half_width = 0.0;
};

struct FileAgreement {
  std::string file;
  std::size_t compared = 0;
  std::size_t passed = 0;
  std::size_t unresolved = 0;  // half_width >= |mc|, not counted
  std::vector<RowCheck> flagged;
};

struct AgreementReport {
  std::vector<FileAgreement> files;
  std::size_t compared() const;
  std::size_t passed() const;
  double pass_rate() const;  // 1 when nothing was compared
};

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

FileAgreement check_agreement(const std::string& file_name, const std::string& csv_text);
// All *.csv files in dir, in name order.
AgreementReport report_agreement(const std::string& dir);
std::string format_report(const AgreementReport& r);

}  // namespace wrelay::cli

#endif  // WRELAY_CLI_RUNNER_HPP
