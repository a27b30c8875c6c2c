#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <vector>

#include "glcb/gating.hpp"

namespace glcb {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit(double p) { return std::log(p / (1.0 - p)); }
inline double clip(double x, double lo, double hi) {
  return x < lo ? lo : (x > hi ? hi : x);
}

/// Base prediction for one context coordinate: affine map of [0,1] into
/// [0.15, 0.85] (values outside [0,1] clip to the band edges). The narrow
/// band keeps layer-0 logits O(1), which conditions the first layer's
/// online-gradient steps.
inline double squash_input(double x) {
  return 0.15 + 0.7 * clip(x, 0.0, 1.0);
}

struct GlnConfig {
  std::vector<int> layer_widths{100, 10, 1};
  int input_dim = 0;
  double eps = 0.01;          // prediction clipping
  double beta = 0.2;          // constant bias prediction, != 0.5
  double weight_bound = 50.0; // weight space [-b, b]^fan_in

  void validate() const;
  int layer_count() const { return static_cast<int>(layer_widths.size()); }
  int unit_count() const;
  /// Fan-in of layer i (0-based): previous layer's outputs plus the bias slot.
  int fan_in(int layer) const;
};

/// All gated weight vectors of one network: per neuron, one row per
/// signature. Rows are initialized equal and summing to 1. Every component
/// stays within [-b, b] through clipped gradient steps.
class GlnParams {
 public:
  GlnParams() = default;
  GlnParams(GlnConfig config, std::uint32_t signature_count);

  const GlnConfig& config() const { return config_; }
  std::uint32_t signature_count() const { return sig_count_; }
  int unit_count() const { return config_.unit_count(); }

  /// Weight table of layer i: (width_i * S) rows of length fan_in(i);
  /// neuron j's row for signature s is at index j * S + s.
  RowMatrix& layer_table(int i) { return tables_[static_cast<std::size_t>(i)]; }
  const RowMatrix& layer_table(int i) const {
    return tables_[static_cast<std::size_t>(i)];
  }

  Eigen::Index row_index(int neuron, std::uint32_t sig) const {
    return static_cast<Eigen::Index>(neuron) * sig_count_ + sig;
  }

 private:
  GlnConfig config_;
  std::uint32_t sig_count_ = 0;
  std::vector<RowMatrix> tables_;
};

/// Optional instrumentation for the forward pass.
struct EvalStats {
  std::size_t neuron_evals = 0;
};

/// clip_eps[sigma(w . logit(p))]: weighted product of experts.
double geometric_mix(const Vec& w, const Vec& p, double eps);

/// One online-gradient step on a neuron's active row. `logit_in` are the
/// input logits of the same pass and `p_out` the neuron's clipped output;
/// the step is w += -eta * (p_out - target) * logit_in, then each component
/// is clipped to [-bound, bound].
void ogd_row_update(Eigen::Ref<Eigen::RowVectorXd> w, const Vec& logit_in,
                    double p_out, double target, double eta, double bound);

GlnParams init_params(const GlnConfig& config, std::uint32_t signature_count);

/// Single forward pass. `sig` must be the total signature of x under the
/// gating set the caller pairs with these params (one entry per neuron,
/// layer-major). Pure; returns the output neuron's clipped probability.
double forward(const GlnParams& params, const Signature& sig, const Vec& x,
               EvalStats* stats = nullptr);

/// Forward pass with local weight updates (target in [0,1], binary in
/// normal use). Returns the prediction computed from the pre-update
/// weights; for every neuron only the row selected by `sig` changes, by
/// -eta (p - target) logit(p_in) with eta the learning rate damped per
/// layer once ||logit(p_in)||^2 grows past a small constant (see gln.cpp).
double forward_update(GlnParams& params, const Signature& sig, const Vec& x,
                      double target, double lr, EvalStats* stats = nullptr);

}  // namespace glcb
