#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scpatcher/error.hpp"
#include "scpatcher/model.hpp"

namespace scpatcher::eval {

enum class MetricsErrorKind { NoCompilable, EmptyBatch, InvalidCounts };
using MetricsError = KindedError<MetricsErrorKind>;

/// Percentage num/den*100 in tenths, rounded half up with exact integer
/// arithmetic (163/182 -> 896). den must be positive.
std::uint64_t rate_tenths(std::uint64_t num, std::uint64_t den);
/// One-decimal rendering of rate_tenths, e.g. "89.6".
std::string format_rate(std::uint64_t num, std::uint64_t den);

struct MetricsReport {
  std::uint64_t n_total = 0;
  std::uint64_t n_comp = 0;
  std::uint64_t n_fail_comp = 0;
  std::uint64_t n_fixed = 0;
  std::uint64_t n_fail_fixed = 0;

  /// Throws MetricsError{InvalidCounts} unless n_fixed <= n_comp <= n_total.
  static MetricsReport from_counts(std::uint64_t n_total, std::uint64_t n_comp, std::uint64_t n_fixed);

  bool has_rates() const noexcept { return n_total > 0; }
  bool has_err() const noexcept { return n_comp > 0; }

  /// Unrounded percentages. cpr/orr throw EmptyBatch when n_total = 0;
  /// err throws NoCompilable when n_comp = 0.
  double cpr() const;
  double err() const;
  double orr() const;

  /// Rounded one-decimal strings, same error rules.
  std::string cpr_text() const;
  std::string err_text() const;
  std::string orr_text() const;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

MetricsReport compute_metrics(const std::vector<RepairOutcome>& outcomes);

/// Fixed-layout text block; undefined rates print as "n/a".
std::string render_text(const MetricsReport& m);

}  // namespace scpatcher::eval
