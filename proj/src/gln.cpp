#include "glcb/gln.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace glcb {

void GlnConfig::validate() const {
  if (layer_widths.empty())
    throw std::invalid_argument("GlnConfig: layer_widths must be non-empty");
  for (int w : layer_widths)
    if (w < 1) throw std::invalid_argument("GlnConfig: layer widths must be >= 1");
  if (layer_widths.back() != 1)
    throw std::invalid_argument("GlnConfig: output layer must have width 1");
  if (input_dim < 1)
    throw std::invalid_argument("GlnConfig: input_dim must be >= 1");
  if (!(eps > 0.0 && eps < 0.5))
    throw std::invalid_argument("GlnConfig: eps must lie in (0, 0.5)");
  if (!(beta >= eps && beta <= 1.0 - eps) || beta == 0.5)
    throw std::invalid_argument("GlnConfig: beta must lie in [eps, 1-eps] \\ {0.5}");
  if (!(weight_bound > 10.0 && weight_bound < 100.0))
    throw std::invalid_argument("GlnConfig: weight_bound must lie in (10, 100)");
}

int GlnConfig::unit_count() const {
  return std::accumulate(layer_widths.begin(), layer_widths.end(), 0);
}

int GlnConfig::fan_in(int layer) const {
  return (layer == 0 ? input_dim : layer_widths[static_cast<std::size_t>(layer - 1)]) + 1;
}

GlnParams::GlnParams(GlnConfig config, std::uint32_t signature_count)
    : config_(std::move(config)), sig_count_(signature_count) {
  config_.validate();
  if (sig_count_ < 1)
    throw std::invalid_argument("GlnParams: signature_count must be >= 1");
  tables_.reserve(config_.layer_widths.size());
  for (int i = 0; i < config_.layer_count(); ++i) {
    const int width = config_.layer_widths[static_cast<std::size_t>(i)];
    const int fan = config_.fan_in(i);
    // Every row equal entries summing to 1.
    tables_.emplace_back(RowMatrix::Constant(
        static_cast<Eigen::Index>(width) * sig_count_, fan, 1.0 / fan));
  }
}

GlnParams init_params(const GlnConfig& config, std::uint32_t signature_count) {
  return GlnParams(config, signature_count);
}

double geometric_mix(const Vec& w, const Vec& p, double eps) {
  if (w.size() != p.size())
    throw std::invalid_argument("geometric_mix: length mismatch");
  double dot = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) dot += w[k] * logit(p[k]);
  return clip(sigmoid(dot), eps, 1.0 - eps);
}

void ogd_row_update(Eigen::Ref<Eigen::RowVectorXd> w, const Vec& logit_in,
                    double p_out, double target, double eta, double bound) {
  w += (-eta * (p_out - target)) * logit_in.transpose();
  w = w.cwiseMax(-bound).cwiseMin(bound);
}

namespace {

// Shared forward/update pass (Algorithm: one sweep over layers; weight
// updates use the pre-update activations of this same pass, so the returned
// prediction always equals the pure forward output).
double pass(GlnParams& params, const Signature& sig, const Vec& x, bool update,
            double target, double lr, EvalStats* stats) {
  const GlnConfig& cfg = params.config();
  if (static_cast<int>(sig.size()) != cfg.unit_count())
    throw std::invalid_argument("gln pass: signature length mismatch");
  if (x.size() != cfg.input_dim)
    throw std::invalid_argument("gln pass: context dimension mismatch");
  if (update && !(target >= 0.0 && target <= 1.0))
    throw std::invalid_argument("gln pass: target must lie in [0, 1]");
  // (0, 1]: the continuous-mode schedule starts at exactly 1.
  if (update && !(lr > 0.0 && lr <= 1.0))
    throw std::invalid_argument("gln pass: learning rate must lie in (0, 1]");

  const double eps = cfg.eps;
  const double hi = 1.0 - eps;
  const double logit_beta = logit(cfg.beta);

  // Base predictions: bias, then the squashed context coordinates.
  Vec z(cfg.input_dim + 1);
  z[0] = logit_beta;
  for (int k = 0; k < cfg.input_dim; ++k) z[k + 1] = logit(squash_input(x[k]));

  // A raw gradient step moves a neuron's pre-activation by lr * |p - r| *
  // ||z||^2; for wide or saturated layers ||z||^2 runs into the thousands
  // and the output rails on every update. Damp the step for ||z||^2 beyond
  // kRawStepNorm so the pre-activation never moves more than
  // kRawStepNorm * lr per update; small fan-ins keep the textbook step.
  constexpr double kRawStepNorm = 4.0;

  const std::uint32_t S = params.signature_count();
  double out = cfg.beta;
  std::size_t u = 0;
  Vec outs;
  for (int i = 0; i < cfg.layer_count(); ++i) {
    const int width = cfg.layer_widths[static_cast<std::size_t>(i)];
    RowMatrix& table = params.layer_table(i);
    const double eta =
        update ? lr / std::max(1.0, z.squaredNorm() / kRawStepNorm) : 0.0;
    outs.resize(width);
    for (int j = 0; j < width; ++j, ++u) {
      const std::uint32_t s = sig[u];
      if (s >= S) throw std::invalid_argument("gln pass: signature out of range");
      const Eigen::Index row = params.row_index(j, s);
      const double p = clip(sigmoid(table.row(row).dot(z)), eps, hi);
      if (stats) ++stats->neuron_evals;
      if (update)
        ogd_row_update(table.row(row), z, p, target, eta, cfg.weight_bound);
      outs[j] = p;
    }
    if (i + 1 < cfg.layer_count()) {
      Vec znext(width + 1);
      znext[0] = logit_beta;
      for (int j = 0; j < width; ++j) znext[j + 1] = logit(outs[j]);
      z.swap(znext);
    } else {
      out = outs[width - 1];
    }
  }
  return out;
}

}  // namespace

double forward(const GlnParams& params, const Signature& sig, const Vec& x,
               EvalStats* stats) {
  return pass(const_cast<GlnParams&>(params), sig, x, /*update=*/false, 0.0,
              0.5, stats);
}

double forward_update(GlnParams& params, const Signature& sig, const Vec& x,
                      double target, double lr, EvalStats* stats) {
  return pass(params, sig, x, /*update=*/true, target, lr, stats);
}

}  // namespace glcb
