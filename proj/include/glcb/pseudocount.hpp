#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "glcb/gating.hpp"

namespace glcb {

/// Exact per-(unit, signature, action) visit counts plus per-action pull
/// counts. Sparse storage; for every unit, the counts at that unit sum to
/// the action's pull count.
class CountTable {
 public:
  CountTable() = default;
  CountTable(int units, int num_actions);

  int unit_count() const { return units_; }
  int num_actions() const { return static_cast<int>(pulls_.size()); }
  std::uint64_t step() const { return step_; }

  /// counts(u, sig_u, a) += 1 for every u; pulls(a) += 1; step += 1.
  void increment(const Signature& sig, int action);

  std::uint64_t count(int unit, std::uint32_t sig, int action) const;
  std::uint64_t pulls(int action) const;

  /// Entries as sorted (unit, signature, action, count) tuples.
  std::vector<std::array<std::uint64_t, 4>> entries() const;
  void set_entry(int unit, std::uint32_t sig, int action, std::uint64_t n);
  void set_pulls(int action, std::uint64_t n);
  void set_step(std::uint64_t t) { step_ = t; }

 private:
  std::uint64_t key(int unit, std::uint32_t sig, int action) const;

  int units_ = 0;
  std::unordered_map<std::uint64_t, std::uint64_t> counts_;
  std::vector<std::uint64_t> pulls_;
  std::uint64_t step_ = 0;
};

/// Soft-min pseudocount (temperature -ln t) of the per-unit signature
/// counts N_u = counts(u, sig_u, a):
///   nhat = sum_u w_u N_u / sum_u w_u,  w_u = exp(-ln(t) * N_u / N_max),
/// with N_max = max_u N_u; 0 when N_max = 0. At t = 1 this is the
/// arithmetic mean; as t grows it concentrates on min_u N_u.
double pseudocount(const CountTable& table, const Signature& sig, int action,
                   std::uint64_t t);

/// C * sqrt(ln t / nhat); +infinity when nhat = 0 (forces exploration).
double exploration_bonus(std::uint64_t t, double nhat, double c);

}  // namespace glcb
