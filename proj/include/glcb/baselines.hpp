#pragma once

#include <Eigen/Dense>
#include <vector>

#include "glcb/rng.hpp"

namespace glcb {

/// Uniform over {0, ..., num_actions-1}.
int uniform_select(int num_actions, Rng& rng);

/// Per-action Bayesian ridge regression with Thompson-sampled action
/// selection. Each arm keeps precision A = lambda*I + sum x x^T and moment
/// b = sum r x over intercept-augmented contexts; the posterior over
/// weights is N(A^{-1} b, noise_var * A^{-1}).
class LinearPosterior {
 public:
  LinearPosterior(int context_dim, int num_actions, double ridge_lambda = 1.0,
                  double noise_var = 0.25);

  int num_actions() const { return static_cast<int>(arms_.size()); }
  int context_dim() const { return dim_; }

  /// Samples a weight vector per arm and returns the argmax predicted
  /// reward (ties -> lowest index). noise_var = 0 degenerates to the
  /// posterior mean.
  int select(const Eigen::VectorXd& x, Rng& rng) const;

  /// Rank-1 update of arm a only.
  void update(const Eigen::VectorXd& x, int action, double reward);

  /// A^{-1} b: the ridge solution over the arm's observed data.
  Eigen::VectorXd posterior_mean(int action) const;

 private:
  struct Arm {
    Eigen::MatrixXd precision;
    Eigen::VectorXd moment;
  };

  Eigen::VectorXd augment(const Eigen::VectorXd& x) const;

  int dim_ = 0;
  double noise_var_ = 0.25;
  std::vector<Arm> arms_;
};

}  // namespace glcb
