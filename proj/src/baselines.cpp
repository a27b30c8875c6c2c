#include "glcb/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace glcb {

int uniform_select(int num_actions, Rng& rng) {
  if (num_actions < 1)
    throw std::invalid_argument("uniform_select: num_actions must be >= 1");
  return static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(num_actions)));
}

LinearPosterior::LinearPosterior(int context_dim, int num_actions,
                                 double ridge_lambda, double noise_var)
    : dim_(context_dim), noise_var_(noise_var) {
  if (context_dim < 1)
    throw std::invalid_argument("LinearPosterior: context_dim must be >= 1");
  if (num_actions < 1)
    throw std::invalid_argument("LinearPosterior: num_actions must be >= 1");
  if (!(ridge_lambda > 0.0))
    throw std::invalid_argument("LinearPosterior: ridge_lambda must be > 0");
  if (noise_var < 0.0)
    throw std::invalid_argument("LinearPosterior: noise_var must be >= 0");
  const int d = dim_ + 1;  // intercept
  arms_.assign(static_cast<std::size_t>(num_actions),
               {Eigen::MatrixXd::Identity(d, d) * ridge_lambda,
                Eigen::VectorXd::Zero(d)});
}

Eigen::VectorXd LinearPosterior::augment(const Eigen::VectorXd& x) const {
  if (x.size() != dim_)
    throw std::invalid_argument("LinearPosterior: context dimension mismatch");
  Eigen::VectorXd xt(dim_ + 1);
  xt << 1.0, x;
  return xt;
}

int LinearPosterior::select(const Eigen::VectorXd& x, Rng& rng) const {
  const Eigen::VectorXd xt = augment(x);
  int best = 0;
  double best_value = 0.0;
  for (int a = 0; a < num_actions(); ++a) {
    const Arm& arm = arms_[static_cast<std::size_t>(a)];
    const Eigen::LLT<Eigen::MatrixXd> llt(arm.precision);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("LinearPosterior: precision not positive definite");
    Eigen::VectorXd w = llt.solve(arm.moment);
    if (noise_var_ > 0.0) {
      Eigen::VectorXd z(xt.size());
      for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = rng.normal();
      // L^{-T} z has covariance A^{-1}.
      w += std::sqrt(noise_var_) *
           llt.matrixL().transpose().solve(z);
    }
    const double value = w.dot(xt);
    if (a == 0 || value > best_value) {
      best = a;
      best_value = value;
    }
  }
  return best;
}

void LinearPosterior::update(const Eigen::VectorXd& x, int action, double reward) {
  if (action < 0 || action >= num_actions())
    throw std::invalid_argument("LinearPosterior: action out of range");
  const Eigen::VectorXd xt = augment(x);
  Arm& arm = arms_[static_cast<std::size_t>(action)];
  arm.precision.noalias() += xt * xt.transpose();
  arm.moment.noalias() += reward * xt;
}

Eigen::VectorXd LinearPosterior::posterior_mean(int action) const {
  if (action < 0 || action >= num_actions())
    throw std::invalid_argument("LinearPosterior: action out of range");
  const Arm& arm = arms_[static_cast<std::size_t>(action)];
  const Eigen::LLT<Eigen::MatrixXd> llt(arm.precision);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("LinearPosterior: precision not positive definite");
  return llt.solve(arm.moment);
}

}  // namespace glcb
