#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "stagebo/random.hpp"
#include "stagebo/surrogate.hpp"

namespace stagebo::gp {

namespace {

const double kSqrt5 = std::sqrt(5.0);
constexpr double kJitterSchedule[] = {0.0, 1e-3, 1e-2, 1e-1};

Matrix normalize_inputs(const Matrix& xs, const std::optional<Bounds>& bounds) {
  if (!bounds) return xs;
  Matrix out(xs.rows(), xs.cols());
  for (Eigen::Index j = 0; j < xs.cols(); ++j) {
    const auto& b = (*bounds)[static_cast<std::size_t>(j)];
    out.col(j) = ((xs.col(j).array() - b.lo) / b.span()).matrix();
  }
  return out;
}

struct Standardization {
  double mean = 0.0;
  double std = 1.0;
};

Standardization standardization(const Vector& ys) {
  Standardization s;
  s.mean = ys.mean();
  if (ys.size() > 1) {
    const double var = (ys.array() - s.mean).square().sum() / static_cast<double>(ys.size() - 1);
    s.std = std::sqrt(var);
  }
  if (!(s.std > 1e-12)) s.std = 1.0;
  return s;
}

/// Pairwise scaled distances r_ab between rows of `a` and `b`, with inputs
/// divided by the lengthscales.
Eigen::MatrixXd scaled_distances(const Matrix& a, const Matrix& b, const Vector& lengthscales) {
  const Matrix za = a.array().rowwise() / lengthscales.transpose().array();
  const Matrix zb = b.array().rowwise() / lengthscales.transpose().array();
  Eigen::MatrixXd r(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    r.row(i) = (zb.rowwise() - za.row(i)).rowwise().norm().transpose();
  }
  return r;
}

Eigen::MatrixXd matern_from_distances(const Eigen::MatrixXd& r, double signal) {
  const auto s5r = (kSqrt5 * r.array());
  return (signal * (1.0 + s5r + s5r.square() / 3.0) * (-s5r).exp()).matrix();
}

Eigen::MatrixXd kernel_matrix(const Hyperparameters& hp, const Matrix& a, const Matrix& b) {
  return matern_from_distances(scaled_distances(a, b, hp.lengthscales), hp.signal_variance);
}

void check_training_data(const Matrix& xs, const Vector& ys) {
  if (xs.rows() < 1) throw DataError("GP fit needs at least one observation");
  if (xs.rows() != ys.size()) throw DataError("GP inputs and targets differ in length");
  if (!ys.allFinite()) throw DataError("GP targets contain non-finite values");
  if (!xs.allFinite()) throw DataError("GP inputs contain non-finite values");
}

Vector pack(const Hyperparameters& hp) {
  const auto d = hp.lengthscales.size();
  Vector theta(d + 2);
  theta.head(d) = hp.lengthscales.array().log().matrix();
  theta[d] = std::log(hp.signal_variance);
  theta[d + 1] = std::log(hp.noise_variance);
  return theta;
}

Hyperparameters unpack(const Vector& theta) {
  const auto d = theta.size() - 2;
  Hyperparameters hp;
  hp.lengthscales = theta.head(d).array().exp().matrix();
  hp.signal_variance = std::exp(theta[d]);
  hp.noise_variance = std::exp(theta[d + 1]);
  return hp;
}

struct LogBox {
  Vector lo;
  Vector hi;

  Vector project(const Vector& theta) const { return theta.cwiseMax(lo).cwiseMin(hi); }
};

LogBox log_box(const FitOptions& o, Eigen::Index d) {
  LogBox box{Vector(d + 2), Vector(d + 2)};
  box.lo.head(d).setConstant(std::log(o.lengthscale_range.lo));
  box.hi.head(d).setConstant(std::log(o.lengthscale_range.hi));
  box.lo[d] = std::log(o.signal_range.lo);
  box.hi[d] = std::log(o.signal_range.hi);
  box.lo[d + 1] = std::log(o.noise_range.lo);
  box.hi[d + 1] = std::log(o.noise_range.hi);
  return box;
}

MllGradient safe_mll(const Matrix& xs, const Vector& ys, const Vector& theta) {
  try {
    return log_marginal_likelihood_with_gradient(xs, ys, unpack(theta));
  } catch (const NumericalError&) {
    return {-std::numeric_limits<double>::infinity(), Vector::Zero(theta.size())};
  }
}

/// Projected gradient ascent with Barzilai-Borwein steps and Armijo
/// backtracking. Monotone: the returned value is never below the start.
std::pair<Vector, double> ascend(const Matrix& xs, const Vector& ys, Vector theta, const LogBox& box,
                                 int max_iterations) {
  theta = box.project(theta);
  MllGradient current = safe_mll(xs, ys, theta);
  if (!std::isfinite(current.value)) return {theta, current.value};

  double step = 0.1;
  for (int it = 0; it < max_iterations; ++it) {
    bool accepted = false;
    Vector candidate;
    MllGradient next;
    double t = step;
    for (int bt = 0; bt < 30; ++bt) {
      candidate = box.project(theta + t * current.gradient);
      const Vector delta = candidate - theta;
      if (delta.lpNorm<Eigen::Infinity>() < 1e-10) break;
      next = safe_mll(xs, ys, candidate);
      if (next.value >= current.value + 1e-4 * current.gradient.dot(delta)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;

    const Vector s = candidate - theta;
    const Vector y = current.gradient - next.gradient;  // gradient change of -MLL
    const double gain = next.value - current.value;
    theta = candidate;
    current = next;
    const double sy = s.dot(y);
    step = sy > 1e-12 ? std::clamp(s.squaredNorm() / sy, 1e-4, 10.0) : std::min(2.0 * t, 10.0);
    if (gain < 1e-9 * (1.0 + std::abs(current.value))) break;
  }
  return {theta, current.value};
}

}  // namespace

double matern52(const Hyperparameters& hp, const Eigen::Ref<const Vector>& a,
                const Eigen::Ref<const Vector>& b) {
  const double r = ((a - b).array() / hp.lengthscales.array()).matrix().norm();
  const double s5r = kSqrt5 * r;
  return hp.signal_variance * (1.0 + s5r + s5r * s5r / 3.0) * std::exp(-s5r);
}

double robust_cholesky(Eigen::MatrixXd k, Eigen::LLT<Eigen::MatrixXd>& out) {
  double applied = 0.0;
  for (double jitter : kJitterSchedule) {
    k.diagonal().array() += jitter - applied;
    applied = jitter;
    out.compute(k);
    if (out.info() == Eigen::Success && out.matrixLLT().diagonal().minCoeff() > 0.0) return jitter;
  }
  throw NumericalError("Cholesky factorization failed after jitter escalation to 1e-1");
}

MllGradient log_marginal_likelihood_with_gradient(const Matrix& xs_unit, const Vector& ys_std,
                                                  const Hyperparameters& hp) {
  const Eigen::Index n = xs_unit.rows();
  const Eigen::Index d = xs_unit.cols();
  const Eigen::MatrixXd r = scaled_distances(xs_unit, xs_unit, hp.lengthscales);
  const Eigen::MatrixXd k_signal = matern_from_distances(r, hp.signal_variance);

  Eigen::MatrixXd k = k_signal;
  k.diagonal().array() += hp.noise_variance;
  Eigen::LLT<Eigen::MatrixXd> llt;
  robust_cholesky(k, llt);

  const Vector alpha = llt.solve(ys_std);
  const double log_det_half = llt.matrixLLT().diagonal().array().log().sum();
  MllGradient out;
  out.value = -0.5 * ys_std.dot(alpha) - log_det_half -
              0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

  const Eigen::MatrixXd k_inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd w = alpha * alpha.transpose() - k_inv;

  out.gradient.resize(d + 2);
  // d k / d log(l_i) = s^2 (5/3) (1 + sqrt5 r) exp(-sqrt5 r) * (dz_i)^2
  const auto s5r = (kSqrt5 * r.array());
  const Eigen::MatrixXd c =
      (w.array() * (hp.signal_variance * (5.0 / 3.0) * (1.0 + s5r) * (-s5r).exp())).matrix();
  const Vector row_sums = c.rowwise().sum();
  for (Eigen::Index i = 0; i < d; ++i) {
    const Vector z = xs_unit.col(i) / hp.lengthscales[i];
    out.gradient[i] = z.array().square().matrix().dot(row_sums) - z.dot(c * z);
  }
  out.gradient[d] = 0.5 * (w.array() * k_signal.array()).sum();
  out.gradient[d + 1] = 0.5 * hp.noise_variance * w.trace();
  return out;
}

GpModel GpModel::condition(const Matrix& xs, const Vector& ys, const Hyperparameters& hp,
                           std::optional<Bounds> input_bounds) {
  check_training_data(xs, ys);
  if (hp.lengthscales.size() != xs.cols()) throw DataError("lengthscale count differs from input dimension");

  GpModel model;
  model.hp_ = hp;
  model.bounds_ = std::move(input_bounds);
  model.train_unit_ = normalize_inputs(xs, model.bounds_);
  const auto st = standardization(ys);
  model.y_mean_ = st.mean;
  model.y_std_ = st.std;
  model.train_std_ = (ys.array() - st.mean) / st.std;

  Eigen::MatrixXd k = kernel_matrix(hp, model.train_unit_, model.train_unit_);
  k.diagonal().array() += hp.noise_variance;
  model.jitter_ = robust_cholesky(std::move(k), model.chol_);
  model.alpha_ = model.chol_.solve(model.train_std_);
  return model;
}

Matrix GpModel::normalize(const Matrix& xs) const { return normalize_inputs(xs, bounds_); }

Posterior GpModel::posterior(const Matrix& xs) const {
  const Matrix q = normalize(xs);
  const Eigen::MatrixXd ks = kernel_matrix(hp_, q, train_unit_);  // q x n
  Posterior out;
  out.mean = (ks * alpha_).array() * y_std_ + y_mean_;
  const Eigen::MatrixXd v = chol_.matrixL().solve(ks.transpose());  // n x q
  const Vector var_std = (hp_.signal_variance - v.colwise().squaredNorm().transpose().array()).cwiseMax(0.0);
  out.variance = var_std * (y_std_ * y_std_);
  return out;
}

std::pair<double, double> GpModel::posterior(const Vector& x) const {
  Matrix row(1, x.size());
  row.row(0) = x.transpose();
  const Posterior p = posterior(row);
  return {p.mean[0], p.variance[0]};
}

GpModel fit(const Matrix& xs, const Vector& ys, std::uint64_t seed, const FitOptions& options) {
  check_training_data(xs, ys);
  const Eigen::Index d = xs.cols();
  const Matrix xs_unit = normalize_inputs(xs, options.input_bounds);
  const auto st = standardization(ys);
  const Vector ys_std = (ys.array() - st.mean) / st.std;
  const LogBox box = log_box(options, d);

  std::vector<Vector> starts;
  if (options.warm_start && options.warm_start->lengthscales.size() == d) {
    starts.push_back(pack(*options.warm_start));
  }
  {
    Hyperparameters def;
    def.lengthscales = Vector::Constant(d, 0.5);
    def.signal_variance = 1.0;
    def.noise_variance = 1e-3;
    starts.push_back(pack(def));
  }
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) {
    return std::log(lo) + unif(rng) * (std::log(hi) - std::log(lo));
  };
  while (static_cast<int>(starts.size()) < std::max(1, options.restarts)) {
    Vector theta(d + 2);
    for (Eigen::Index i = 0; i < d; ++i) theta[i] = log_uniform(0.05, 2.0);
    theta[d] = log_uniform(0.3, 3.0);
    theta[d + 1] = log_uniform(1e-6, 1e-2);
    starts.push_back(theta);
  }

  Vector best_theta;
  double best_value = -std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    auto [theta, value] = ascend(xs_unit, ys_std, start, box, options.max_iterations);
    if (value > best_value) {
      best_value = value;
      best_theta = theta;
    }
  }
  if (!std::isfinite(best_value)) {
    throw NumericalError("GP fit: no hyperparameter initialization admitted a factorization");
  }
  return GpModel::condition(xs, ys, unpack(best_theta), options.input_bounds);
}

double log_marginal_likelihood(const GpModel& model, const Matrix& xs, const Vector& ys) {
  check_training_data(xs, ys);
  if (xs.cols() != model.dim()) throw DataError("MLL data dimension differs from model");
  const Matrix unit = model.normalize(xs);
  const Vector ys_std = (ys.array() - model.y_mean()) / model.y_std();
  return log_marginal_likelihood_with_gradient(unit, ys_std, model.hyperparameters()).value;
}

}  // namespace stagebo::gp
