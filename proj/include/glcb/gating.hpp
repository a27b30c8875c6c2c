#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "glcb/rng.hpp"

namespace glcb {

using Vec = Eigen::VectorXd;

/// Per-unit signature: the bit pattern of halfspace memberships.
using Signature = std::vector<std::uint32_t>;

/// A fixed random halfspace: indicator of normal.dot(x) >= offset.
/// The normal has unit Euclidean norm; immutable after sampling.
struct Hyperplane {
  Vec normal;
  double offset = 0.0;
};

/// One gating function: H halfspaces mapping a context to a signature
/// in {0, ..., 2^H - 1}.
struct GatingUnit {
  std::vector<Hyperplane> planes;

  std::uint32_t signature_count() const {
    return 1u << static_cast<std::uint32_t>(planes.size());
  }
};

/// The fixed gating functions shared by all per-action estimators.
/// Immutable after construction; safe for concurrent reads.
class GatingSet {
 public:
  GatingSet() = default;
  GatingSet(std::vector<GatingUnit> units, int dim);

  int dim() const { return dim_; }
  int unit_count() const { return static_cast<int>(units_.size()); }
  int planes_per_unit() const;
  const GatingUnit& unit(int u) const { return units_[static_cast<std::size_t>(u)]; }
  const std::vector<GatingUnit>& units() const { return units_; }

 private:
  std::vector<GatingUnit> units_;
  int dim_ = 0;
};

/// Samples `units` gating functions of `planes_per_unit` halfspaces each.
/// Normals are uniform on the unit sphere in R^dim (Gaussian, normalized).
/// Offsets center each plane on the cube midpoint c = (1/2, ..., 1/2):
/// offset = normal.dot(c) + zeta with zeta ~ N(0, bias_scale^2), so contexts
/// in [0,1]^dim are split about their center regardless of dimension.
GatingSet sample_gating(int dim, int units, int planes_per_unit,
                        double bias_scale, Rng& rng);

/// Bit i of the result is 1 iff planes[i].normal.dot(x) >= planes[i].offset
/// (plane 0 -> least significant bit).
std::uint32_t unit_signature(const GatingUnit& unit, const Vec& x);

/// Component u is unit_signature(units[u], x). Computed once per step and
/// reused by both prediction and counting.
void total_signature(const GatingSet& gset, const Vec& x, Signature& out);
Signature total_signature(const GatingSet& gset, const Vec& x);

}  // namespace glcb
