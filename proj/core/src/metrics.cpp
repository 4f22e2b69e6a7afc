#include "scpatcher/metrics.hpp"

#include <fmt/format.h>

namespace scpatcher::eval {

std::uint64_t rate_tenths(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw MetricsError(MetricsErrorKind::InvalidCounts, "rate with zero denominator");
  // round(num * 1000 / den) with halves going up
  return (2 * 1000 * num + den) / (2 * den);
}

std::string format_rate(std::uint64_t num, std::uint64_t den) {
  const std::uint64_t t = rate_tenths(num, den);
  return fmt::format("{}.{}", t / 10, t % 10);
}

MetricsReport MetricsReport::from_counts(std::uint64_t n_total, std::uint64_t n_comp, std::uint64_t n_fixed) {
  if (n_comp > n_total || n_fixed > n_comp) {
    throw MetricsError(MetricsErrorKind::InvalidCounts,
                       fmt::format("inconsistent counts N={} N_comp={} N_fixed={}", n_total, n_comp, n_fixed));
  }
  return MetricsReport{n_total, n_comp, n_total - n_comp, n_fixed, n_comp - n_fixed};
}

namespace {

void require_total(const MetricsReport& m) {
  if (m.n_total == 0) throw MetricsError(MetricsErrorKind::EmptyBatch, "no outcomes");
}

void require_comp(const MetricsReport& m) {
  if (m.n_comp == 0) throw MetricsError(MetricsErrorKind::NoCompilable, "ERR undefined: no compilable patches");
}

}  // namespace

double MetricsReport::cpr() const {
  require_total(*this);
  return static_cast<double>(n_comp) / static_cast<double>(n_total) * 100.0;
}

double MetricsReport::err() const {
  require_comp(*this);
  return static_cast<double>(n_fixed) / static_cast<double>(n_comp) * 100.0;
}

double MetricsReport::orr() const {
  require_total(*this);
  return static_cast<double>(n_fixed) / static_cast<double>(n_total) * 100.0;
}

std::string MetricsReport::cpr_text() const {
  require_total(*this);
  return format_rate(n_comp, n_total);
}

std::string MetricsReport::err_text() const {
  require_comp(*this);
  return format_rate(n_fixed, n_comp);
}

std::string MetricsReport::orr_text() const {
  require_total(*this);
  return format_rate(n_fixed, n_total);
}

MetricsReport compute_metrics(const std::vector<RepairOutcome>& outcomes) {
  std::uint64_t comp = 0, fixed = 0;
  for (const auto& o : outcomes) {
    comp += o.compiled ? 1 : 0;
    fixed += (o.compiled && o.fixed) ? 1 : 0;
  }
  return MetricsReport::from_counts(outcomes.size(), comp, fixed);
}

std::string render_text(const MetricsReport& m) {
  std::string out;
  out += fmt::format("N            {}\n", m.n_total);
  out += fmt::format("N_comp       {}\n", m.n_comp);
  out += fmt::format("N_fail_comp  {}\n", m.n_fail_comp);
  out += fmt::format("N_fixed      {}\n", m.n_fixed);
  out += fmt::format("N_fail_fixed {}\n", m.n_fail_fixed);
  out += fmt::format("CPR          {}\n", m.has_rates() ? m.cpr_text() + "%" : "n/a");
  out += fmt::format("ERR          {}\n", m.has_err() ? m.err_text() + "%" : "n/a");
  out += fmt::format("ORR          {}\n", m.has_rates() ? m.orr_text() + "%" : "n/a");
  return out;
}

}  // namespace scpatcher::eval
