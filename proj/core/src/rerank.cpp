#include "scpatcher/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>

namespace scpatcher::rerank {

void RerankConfig::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  if (top_n == 0) throw std::invalid_argument("top_n must be >= 1");
}

FilterResult filter_syntactic(const std::vector<Candidate>& c_init, const SignatureFeatures& sig_req) {
  FilterResult out;
  for (const auto& d : c_init) {
    if (d.signature.contains_all(sig_req)) out.kept.push_back(d);
  }
  if (out.kept.empty()) {
    out.kept = c_init;
    out.fallback_used = true;
  }
  return out;
}

double score_trust(double s_sem, std::uint64_t guf, double epsilon) {
  const double denom = std::log(static_cast<double>(guf) + epsilon);
  if (!(denom > 0.0)) {
    throw ScoreError(ScoreErrorKind::NonPositiveDenominator,
                     "NonPositiveDenominator: ln(guf + epsilon) = " + std::to_string(denom) +
                         " for guf=" + std::to_string(guf) + ", epsilon=" + std::to_string(epsilon));
  }
  return s_sem / denom;
}

RerankResult rerank_detailed(const std::vector<Candidate>& c_init, const QueryContext& q, const RerankConfig& cfg) {
  cfg.validate();
  FilterResult filtered = filter_syntactic(c_init, q.sig_req);
  std::vector<Candidate>& pool = filtered.kept;

  for (auto& d : pool) d.s_final = score_trust(d.s_sem, d.guf, cfg.epsilon);
  std::stable_sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(*a.s_final, a.s_sem, a.function_id) < std::tie(*b.s_final, b.s_sem, b.function_id);
  });

  RerankResult out;
  out.fallback_used = filtered.fallback_used;
  std::set<std::string> seen;
  for (auto& d : pool) {
    if (!d.clone_id || !seen.contains(*d.clone_id)) {
      if (d.clone_id) seen.insert(*d.clone_id);
      out.selected.push_back(std::move(d));
    }
    if (out.selected.size() == cfg.k) break;
  }
  return out;
}

std::vector<Candidate> rerank(const std::vector<Candidate>& c_init, const QueryContext& q, const RerankConfig& cfg) {
  return rerank_detailed(c_init, q, cfg).selected;
}

}  // namespace scpatcher::rerank
