// Scenario generation, error injection, correction dispatch, exact
// verification and benchmarking. Shared by the CLI and the test suites.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecla/mat.hpp"
#include "ecla/report.hpp"

namespace ecla {

/// Workloads: lu, rect, rankdef, solve-small, solve-large, trinv, trsm.
struct Scenario {
  std::string workload = "lu";
  std::uint64_t p = 65537;
  unsigned nu = 1;
  std::size_t n = 32;
  std::size_t m = 0;     // rows for rect/rankdef/solve/trsm; 0 picks the workload default
  std::size_t rank = 0;  // rankdef only; 0 picks m/2
  std::size_t ell = 0;   // trsm only: inner dimension of the product term
  std::string variant = "upper_right";  // trsm only
  std::size_t errors = 0;
  double epsilon = 0.05;
  std::uint64_t seed = 1;

  Field field() const;
  /// Fills in workload defaults and validates shapes; throws std::invalid_argument.
  Scenario normalized() const;
  std::string serialize() const;
  static Scenario parse(std::string_view text);
};

using MatSet = std::map<std::string, Mat>;

/// Operands (A, B, U, ...) plus the true and corrupted candidates.
struct Instance {
  Scenario scenario;
  MatSet operands;
  MatSet truth;
  MatSet corrupted;
};

/// Names of the candidate matrices a workload corrects, e.g. {L, U}.
std::vector<std::string> candidate_names(const std::string& workload);

/// Number of entries that may be corrupted for the (normalized) scenario.
std::size_t legal_positions(const Scenario& sc);

/// Deterministic in the scenario seed. Throws std::invalid_argument when the
/// requested error count exceeds legal_positions.
Instance generate(const Scenario& sc);

void save_instance(const Instance& inst, const std::filesystem::path& dir);
Instance load_instance(const std::filesystem::path& dir);

struct CorrectSettings {
  std::optional<double> epsilon;  // overrides the scenario value
  std::optional<unsigned> lambda;
  std::optional<std::uint64_t> seed;
  std::size_t leaf_size = 1;
  bool verify = false;
};

struct CorrectOutcome {
  MatSet corrected;
  CorrectionReport report;
  bool aborted = false;
  std::string abort_message;
};

/// Runs the workload's correction pipeline on the corrupted candidates.
/// Monte Carlo aborts are reported in the outcome rather than thrown.
CorrectOutcome correct_instance(const Instance& inst, const CorrectSettings& settings);

/// Exact dense check of the workload's defining identities for `set`.
bool verify_set(const Instance& inst, const MatSet& set, std::string* why = nullptr);

void save_set(const MatSet& set, const std::filesystem::path& dir, std::string_view suffix);
MatSet load_set(const std::string& workload, const std::filesystem::path& dir, std::string_view suffix);

struct BenchConfig {
  Scenario base;
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> errors;
  std::size_t repeats = 5;
  bool reference = true;  // also time the reference factorization (lu only)
};

struct BenchRow {
  Scenario scenario;
  std::size_t runs = 0;
  std::size_t verified = 0;
  std::size_t aborted = 0;
  double median_seconds = 0;
  double median_reference_seconds = 0;
  std::uint64_t median_mul_ops = 0;
  std::uint64_t median_scan_ops = 0;
  double median_iterations = 0;
};

std::vector<BenchRow> run_bench(const BenchConfig& cfg);
std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace ecla
