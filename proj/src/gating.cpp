#include "glcb/gating.hpp"

#include <stdexcept>
#include <string>

namespace glcb {

GatingSet::GatingSet(std::vector<GatingUnit> units, int dim)
    : units_(std::move(units)), dim_(dim) {
  if (dim_ < 1) throw std::invalid_argument("GatingSet: dim must be >= 1");
  for (const auto& u : units_) {
    for (const auto& pl : u.planes) {
      if (pl.normal.size() != dim_)
        throw std::invalid_argument("GatingSet: plane dimension mismatch");
    }
  }
}

int GatingSet::planes_per_unit() const {
  return units_.empty() ? 0 : static_cast<int>(units_.front().planes.size());
}

GatingSet sample_gating(int dim, int units, int planes_per_unit,
                        double bias_scale, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("sample_gating: dim must be >= 1");
  if (units < 1) throw std::invalid_argument("sample_gating: units must be >= 1");
  if (planes_per_unit < 1 || planes_per_unit > 30)
    throw std::invalid_argument("sample_gating: planes_per_unit must be in [1, 30]");
  if (bias_scale < 0.0)
    throw std::invalid_argument("sample_gating: bias_scale must be >= 0");

  std::vector<GatingUnit> out;
  out.reserve(static_cast<std::size_t>(units));
  for (int u = 0; u < units; ++u) {
    GatingUnit gu;
    gu.planes.reserve(static_cast<std::size_t>(planes_per_unit));
    for (int h = 0; h < planes_per_unit; ++h) {
      Vec n(dim);
      double norm = 0.0;
      do {
        for (int k = 0; k < dim; ++k) n[k] = rng.normal();
        norm = n.norm();
      } while (norm == 0.0);
      n /= norm;
      // Center on the cube midpoint: normal.dot(c) with c = (1/2, ..., 1/2).
      const double center = 0.5 * n.sum();
      gu.planes.push_back({std::move(n), center + rng.normal(0.0, bias_scale)});
    }
    out.push_back(std::move(gu));
  }
  return GatingSet(std::move(out), dim);
}

std::uint32_t unit_signature(const GatingUnit& unit, const Vec& x) {
  std::uint32_t s = 0;
  for (std::size_t i = 0; i < unit.planes.size(); ++i) {
    const Hyperplane& pl = unit.planes[i];
    if (pl.normal.size() != x.size())
      throw std::invalid_argument("unit_signature: context dimension mismatch");
    if (pl.normal.dot(x) >= pl.offset) s |= (1u << i);
  }
  return s;
}

void total_signature(const GatingSet& gset, const Vec& x, Signature& out) {
  if (x.size() != gset.dim())
    throw std::invalid_argument("total_signature: context dimension mismatch");
  out.resize(static_cast<std::size_t>(gset.unit_count()));
  for (int u = 0; u < gset.unit_count(); ++u)
    out[static_cast<std::size_t>(u)] = unit_signature(gset.unit(u), x);
}

Signature total_signature(const GatingSet& gset, const Vec& x) {
  Signature s;
  total_signature(gset, x, s);
  return s;
}

}  // namespace glcb
