#pragma once

// Hand-rolled random instance generators and straight-line reference
// implementations shared by unit and acceptance tests.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "scpatcher/index.hpp"
#include "scpatcher/model.hpp"
#include "support.hpp"

namespace scpatcher::testing {

inline const std::vector<std::string>& feature_pool() {
  static const std::vector<std::string> pool{"public", "external", "view",        "payable",      "nonpayable",
                                             "param:uint256", "param:address", "ret:bool", "mod:onlyowner"};
  return pool;
}

inline SignatureFeatures random_signature(Rng& rng, double p = 0.5) {
  std::bernoulli_distribution keep(p);
  SignatureFeatures s;
  for (const auto& f : feature_pool()) {
    if (keep(rng)) s.features.insert(f);
  }
  return s;
}

/// Up to max_n candidates with distinct ids; s_sem values are drawn from a
/// coarse grid part of the time so ties occur.
inline std::vector<embed::Candidate> random_candidates(Rng& rng, std::size_t max_n = 50) {
  std::uniform_int_distribution<std::size_t> count(1, max_n);
  std::uniform_int_distribution<std::uint64_t> guf(1, 100);
  std::uniform_real_distribution<double> sem(0.0, 2.0);
  std::uniform_int_distribution<int> grid(0, 8);
  std::uniform_int_distribution<int> clone(-4, 9);  // negative -> no clone id
  std::bernoulli_distribution coarse(0.3);
  const std::size_t n = count(rng);
  std::vector<embed::Candidate> out;
  for (std::size_t i = 0; i < n; ++i) {
    embed::Candidate c;
    c.function_id = "fn" + std::to_string(rng() % 100000) + "_" + std::to_string(i);
    c.s_sem = coarse(rng) ? grid(rng) * 0.25 : sem(rng);
    c.guf = guf(rng);
    const int g = clone(rng);
    if (g >= 0) c.clone_id = "clone" + std::to_string(g);
    c.signature = random_signature(rng, 0.6);
    out.push_back(std::move(c));
  }
  return out;
}

/// Reference rerank written directly from the algorithm description: filter,
/// score, then repeatedly take the best remaining candidate.
inline std::vector<embed::Candidate> brute_force_rerank(const std::vector<embed::Candidate>& c_init,
                                                        const SignatureFeatures& sig_req, double epsilon,
                                                        std::size_t k) {
  std::vector<embed::Candidate> pool;
  for (const auto& c : c_init) {
    bool ok = true;
    for (const auto& f : sig_req.features) ok = ok && c.signature.features.count(f) == 1;
    if (ok) pool.push_back(c);
  }
  if (pool.empty()) pool = c_init;
  for (auto& c : pool) c.s_final = c.s_sem / std::log(static_cast<double>(c.guf) + epsilon);

  std::vector<embed::Candidate> out;
  std::vector<std::string> used_clones;
  std::vector<bool> taken(pool.size(), false);
  while (out.size() < k) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (taken[i]) continue;
      if (!best) {
        best = i;
        continue;
      }
      const auto& a = pool[i];
      const auto& b = pool[*best];
      const bool better = *a.s_final < *b.s_final ||
                          (*a.s_final == *b.s_final && (a.s_sem < b.s_sem ||
                                                        (a.s_sem == b.s_sem && a.function_id < b.function_id)));
      if (better) best = i;
    }
    if (!best) break;
    taken[*best] = true;
    const auto& c = pool[*best];
    if (c.clone_id) {
      if (std::find(used_clones.begin(), used_clones.end(), *c.clone_id) != used_clones.end()) continue;
      used_clones.push_back(*c.clone_id);
    }
    out.push_back(c);
  }
  return out;
}

/// Full sort of every entry by (distance, id), truncated to n.
inline std::vector<std::pair<double, std::string>> brute_force_knn(const std::vector<embed::IndexEntry>& entries,
                                                                   const embed::EmbeddingVector& q, std::size_t n) {
  std::vector<std::pair<double, std::string>> all;
  for (const auto& e : entries) {
    double acc = 0.0;
    for (std::size_t i = 0; i < q.values.size(); ++i) {
      const double d = q.values[i] - e.vector.values[i];
      acc += d * d;
    }
    all.emplace_back(std::sqrt(acc), e.function_id);
  }
  std::sort(all.begin(), all.end());
  if (all.size() > n) all.resize(n);
  return all;
}

}  // namespace scpatcher::testing
