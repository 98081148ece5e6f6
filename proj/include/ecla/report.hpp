// Correction reports: what was changed, how many rounds it took, and how much
// of the failure budget was used. Serialized as key=value lines.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecla/ff.hpp"

namespace ecla {

struct Correction {
  std::string target;  // which matrix: L, U, Y, R, X, ...
  std::size_t row = 0;
  std::size_t col = 0;
  Elem old_value = 0;
  Elem new_value = 0;
  bool operator==(const Correction&) const = default;
};

struct TrsmCallStats {
  std::string variant;  // upper_right, lower_left, lower_right, upper_left, tr_inv
  std::string target;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t ell = 0;
  double epsilon = 0;
  unsigned lambda = 0;
  unsigned field_degree = 1;  // degree of the working field over the input field
  bool extended = false;
  std::size_t iterations = 0;  // Freivalds passes, including the terminating one
  std::size_t rounds = 0;      // passes that found erroneous columns
  std::size_t initial_columns = 0;
  std::size_t corrected = 0;
  std::size_t final_k = 0;
  std::size_t freivalds_misses = 0;  // passes that missed an erroneous column; audit mode only
  std::uint64_t seed = 0;
  bool operator==(const TrsmCallStats&) const = default;
};

struct CorrectionReport {
  std::string operation;
  std::uint64_t seed = 0;
  double epsilon = 0;
  double epsilon_spent = 0;  // sum of the budgets handed to TrsmEC calls
  std::optional<std::size_t> rank;
  double seconds = 0;
  std::string verification = "not_run";  // pass, fail, not_run
  std::vector<TrsmCallStats> calls;
  std::vector<Correction> corrections;
  std::vector<std::string> notes;

  std::size_t corrected_count() const { return corrections.size(); }
  std::size_t total_iterations() const;
  std::size_t max_rounds() const;
  bool any_extension() const;

  /// Appends calls, corrections and notes of `o` and adds its spent budget.
  void absorb(const CorrectionReport& o);

  std::string serialize() const;
  static CorrectionReport parse(std::string_view text);
  bool operator==(const CorrectionReport&) const = default;
};

}  // namespace ecla
