#include "glcb/pseudocount.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace glcb {

CountTable::CountTable(int units, int num_actions) : units_(units) {
  if (units < 1) throw std::invalid_argument("CountTable: units must be >= 1");
  if (num_actions < 1)
    throw std::invalid_argument("CountTable: num_actions must be >= 1");
  pulls_.assign(static_cast<std::size_t>(num_actions), 0);
}

std::uint64_t CountTable::key(int unit, std::uint32_t sig, int action) const {
  // 20 bits unit | 32 bits signature | 12 bits action.
  return (static_cast<std::uint64_t>(unit) << 44) |
         (static_cast<std::uint64_t>(sig) << 12) |
         static_cast<std::uint64_t>(action);
}

void CountTable::increment(const Signature& sig, int action) {
  if (static_cast<int>(sig.size()) != units_)
    throw std::invalid_argument("CountTable::increment: signature length mismatch");
  if (action < 0 || action >= num_actions())
    throw std::invalid_argument("CountTable::increment: action out of range");
  for (int u = 0; u < units_; ++u)
    ++counts_[key(u, sig[static_cast<std::size_t>(u)], action)];
  ++pulls_[static_cast<std::size_t>(action)];
  ++step_;
}

std::uint64_t CountTable::count(int unit, std::uint32_t sig, int action) const {
  const auto it = counts_.find(key(unit, sig, action));
  return it == counts_.end() ? 0 : it->second;
}

std::uint64_t CountTable::pulls(int action) const {
  if (action < 0 || action >= num_actions())
    throw std::invalid_argument("CountTable::pulls: action out of range");
  return pulls_[static_cast<std::size_t>(action)];
}

std::vector<std::array<std::uint64_t, 4>> CountTable::entries() const {
  std::vector<std::array<std::uint64_t, 4>> out;
  out.reserve(counts_.size());
  for (const auto& [k, n] : counts_)
    out.push_back({k >> 44, (k >> 12) & 0xffffffffULL, k & 0xfffULL, n});
  std::sort(out.begin(), out.end());
  return out;
}

void CountTable::set_entry(int unit, std::uint32_t sig, int action,
                           std::uint64_t n) {
  counts_[key(unit, sig, action)] = n;
}

void CountTable::set_pulls(int action, std::uint64_t n) {
  pulls_.at(static_cast<std::size_t>(action)) = n;
}

double pseudocount(const CountTable& table, const Signature& sig, int action,
                   std::uint64_t t) {
  if (static_cast<int>(sig.size()) != table.unit_count())
    throw std::invalid_argument("pseudocount: signature length mismatch");
  if (t < 1) throw std::invalid_argument("pseudocount: t must be >= 1");

  const int units = table.unit_count();
  std::uint64_t n_max = 0;
  std::vector<std::uint64_t> n(static_cast<std::size_t>(units));
  for (int u = 0; u < units; ++u) {
    n[static_cast<std::size_t>(u)] =
        table.count(u, sig[static_cast<std::size_t>(u)], action);
    n_max = std::max(n_max, n[static_cast<std::size_t>(u)]);
  }
  if (n_max == 0) return 0.0;

  const double log_t = std::log(static_cast<double>(t));
  double num = 0.0;
  double den = 0.0;
  for (int u = 0; u < units; ++u) {
    const double nu = static_cast<double>(n[static_cast<std::size_t>(u)]);
    const double w = std::exp(-log_t * nu / static_cast<double>(n_max));
    num += w * nu;
    den += w;
  }
  return num / den;
}

double exploration_bonus(std::uint64_t t, double nhat, double c) {
  if (t < 1) throw std::invalid_argument("exploration_bonus: t must be >= 1");
  if (nhat < 0.0) throw std::invalid_argument("exploration_bonus: nhat must be >= 0");
  if (c < 0.0) throw std::invalid_argument("exploration_bonus: c must be >= 0");
  if (nhat == 0.0) return std::numeric_limits<double>::infinity();
  return c * std::sqrt(std::log(static_cast<double>(t)) / nhat);
}

}  // namespace glcb
