#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Cholesky>

#include "stagebo/common.hpp"

namespace stagebo::gp {

/// Matern-5/2 ARD kernel hyperparameters, on normalized inputs and
/// standardized targets.
struct Hyperparameters {
  Vector lengthscales;
  double signal_variance = 1.0;
  double noise_variance = 1e-3;
};

/// Matern-5/2 ARD covariance between two normalized inputs.
double matern52(const Hyperparameters& hp, const Eigen::Ref<const Vector>& a,
                const Eigen::Ref<const Vector>& b);

struct FitOptions {
  /// Inputs are mapped to the unit cube of these bounds before fitting.
  /// Unset: inputs are used as given.
  std::optional<Bounds> input_bounds;
  Interval lengthscale_range{1e-3, 10.0};
  Interval signal_range{1e-3, 10.0};
  Interval noise_range{1e-6, 1e-1};
  int restarts = 8;
  int max_iterations = 60;
  /// Used as the first multi-start initialization when set.
  std::optional<Hyperparameters> warm_start;
};

struct Posterior {
  Vector mean;
  Vector variance;
};

/// Result of a marginal-likelihood evaluation with its gradient with
/// respect to (log lengthscales..., log signal variance, log noise variance).
struct MllGradient {
  double value = 0.0;
  Vector gradient;
};

/// Exact GP regression model for one output.
///
/// Immutable once built; concurrent reads are safe.
class GpModel {
 public:
  /// Conditions on (xs, ys) with fixed hyperparameters. Inputs are in
  /// original units; `input_bounds` (if any) defines the normalization.
  static GpModel condition(const Matrix& xs, const Vector& ys, const Hyperparameters& hp,
                           std::optional<Bounds> input_bounds = std::nullopt);

  /// Predictive mean and latent-function variance in original y units.
  Posterior posterior(const Matrix& xs) const;
  /// Single-point posterior (mean, variance).
  std::pair<double, double> posterior(const Vector& x) const;

  const Hyperparameters& hyperparameters() const { return hp_; }
  double y_mean() const { return y_mean_; }
  double y_std() const { return y_std_; }
  /// Jitter that was added to the diagonal to obtain the factorization.
  double jitter() const { return jitter_; }
  Eigen::Index dim() const { return train_unit_.cols(); }
  Eigen::Index size() const { return train_unit_.rows(); }

  /// Training inputs mapped to the normalized space.
  const Matrix& train_inputs_normalized() const { return train_unit_; }
  /// Standardized training targets.
  const Vector& train_targets_standardized() const { return train_std_; }
  /// Map from original input units to the normalized space.
  Matrix normalize(const Matrix& xs) const;
  const std::optional<Bounds>& input_bounds() const { return bounds_; }

 private:
  GpModel() = default;

  Hyperparameters hp_;
  std::optional<Bounds> bounds_;
  Matrix train_unit_;
  Vector train_std_;
  double y_mean_ = 0.0;
  double y_std_ = 1.0;
  double jitter_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Vector alpha_;
};

/// Fits hyperparameters by multi-start projected gradient ascent on the log
/// marginal likelihood of standardized targets, then conditions on the data.
/// Throws DataError on non-finite targets, NumericalError when no restart
/// admits a factorization.
GpModel fit(const Matrix& xs, const Vector& ys, std::uint64_t seed, const FitOptions& options = {});

/// Log marginal likelihood of (xs, ys) under `model`'s hyperparameters,
/// standardization and input normalization.
double log_marginal_likelihood(const GpModel& model, const Matrix& xs, const Vector& ys);

/// Log marginal likelihood and analytic gradient on already-normalized
/// inputs and standardized targets. Jitter escalates from zero through
/// 1e-3, 1e-2 and 1e-1; throws NumericalError when all fail.
MllGradient log_marginal_likelihood_with_gradient(const Matrix& xs_unit, const Vector& ys_std,
                                                  const Hyperparameters& hp);

/// Cholesky factorization of `k` with the jitter escalation schedule.
/// Returns the jitter that succeeded.
double robust_cholesky(Eigen::MatrixXd k, Eigen::LLT<Eigen::MatrixXd>& out);

/// One posterior function draw represented with random Fourier features.
///
/// Frequencies come from the Matern-5/2 spectral measure (a Student-t with 5
/// degrees of freedom scaled by the inverse lengthscales). The weights are a
/// draw from the Bayesian linear-regression posterior over those features.
class SampledPath {
 public:
  /// Values at each row of `xs` (original input units).
  Vector operator()(const Matrix& xs) const;
  double operator()(const Vector& x) const;

  /// Posterior mean of the feature-space regression (no sampling noise).
  Vector feature_mean(const Matrix& xs) const;

  Eigen::Index num_features() const { return frequencies_.rows(); }

 private:
  friend SampledPath sample_path(const GpModel&, std::size_t, std::uint64_t);
  friend SampledPath sample_prior_path(const Hyperparameters&, Eigen::Index, std::size_t,
                                       std::uint64_t);

  Matrix features(const Matrix& xs_unit) const;
  Matrix to_unit_rows(const Matrix& xs) const;

  std::optional<Bounds> bounds_;
  Eigen::MatrixXd frequencies_;  // F x d
  Vector phases_;                // F
  double feature_scale_ = 1.0;
  Vector weights_;               // F, sampled
  Vector mean_weights_;          // F, posterior mean
  double y_mean_ = 0.0;
  double y_std_ = 1.0;
};

/// Draws a posterior sample path from `model` with `num_features` features.
/// Deterministic given (model, seed).
SampledPath sample_path(const GpModel& model, std::size_t num_features, std::uint64_t seed);

/// Draws a zero-mean prior path on normalized inputs of dimension `dim`.
SampledPath sample_prior_path(const Hyperparameters& hp, Eigen::Index dim, std::size_t num_features,
                              std::uint64_t seed);

}  // namespace stagebo::gp
