#include <cmath>
#include <numbers>

#include "stagebo/random.hpp"
#include "stagebo/surrogate.hpp"

namespace stagebo::gp {

namespace {

constexpr double kMaternDof = 5.0;  // 2 * nu for nu = 5/2

struct FeatureDraw {
  Eigen::MatrixXd frequencies;
  Vector phases;
  double scale = 1.0;
};

FeatureDraw draw_features(const Hyperparameters& hp, Eigen::Index dim, std::size_t num_features,
                          Rng& rng) {
  const auto f = static_cast<Eigen::Index>(num_features);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::chi_squared_distribution<double> chi2(kMaternDof);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  FeatureDraw draw{Eigen::MatrixXd(f, dim), Vector(f), std::sqrt(2.0 * hp.signal_variance / static_cast<double>(f))};
  for (Eigen::Index i = 0; i < f; ++i) {
    const double t_scale = 1.0 / std::sqrt(chi2(rng) / kMaternDof);
    for (Eigen::Index j = 0; j < dim; ++j) {
      draw.frequencies(i, j) = normal(rng) * t_scale / hp.lengthscales[j];
    }
    draw.phases[i] = phase(rng);
  }
  return draw;
}

Vector standard_normal(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = normal(rng);
  return out;
}

}  // namespace

Matrix SampledPath::features(const Matrix& xs_unit) const {
  Eigen::MatrixXd proj = xs_unit * frequencies_.transpose();  // q x F
  proj.rowwise() += phases_.transpose();
  return (feature_scale_ * proj.array().cos()).matrix();
}

Vector SampledPath::operator()(const Matrix& xs) const {
  Matrix unit = xs;
  if (bounds_) unit = to_unit_rows(xs);
  return ((features(unit) * weights_).array() * y_std_ + y_mean_).matrix();
}

double SampledPath::operator()(const Vector& x) const {
  Matrix row(1, x.size());
  row.row(0) = x.transpose();
  return (*this)(row)[0];
}

Vector SampledPath::feature_mean(const Matrix& xs) const {
  Matrix unit = xs;
  if (bounds_) unit = to_unit_rows(xs);
  return ((features(unit) * mean_weights_).array() * y_std_ + y_mean_).matrix();
}

Matrix SampledPath::to_unit_rows(const Matrix& xs) const {
  Matrix out(xs.rows(), xs.cols());
  for (Eigen::Index j = 0; j < xs.cols(); ++j) {
    const auto& b = (*bounds_)[static_cast<std::size_t>(j)];
    out.col(j) = ((xs.col(j).array() - b.lo) / b.span()).matrix();
  }
  return out;
}

SampledPath sample_prior_path(const Hyperparameters& hp, Eigen::Index dim, std::size_t num_features,
                              std::uint64_t seed) {
  Rng rng(seed);
  FeatureDraw draw = draw_features(hp, dim, num_features, rng);
  SampledPath path;
  path.frequencies_ = std::move(draw.frequencies);
  path.phases_ = std::move(draw.phases);
  path.feature_scale_ = draw.scale;
  path.weights_ = standard_normal(rng, path.frequencies_.rows());
  path.mean_weights_ = Vector::Zero(path.frequencies_.rows());
  return path;
}

SampledPath sample_path(const GpModel& model, std::size_t num_features, std::uint64_t seed) {
  const Hyperparameters& hp = model.hyperparameters();
  Rng rng(seed);
  FeatureDraw draw = draw_features(hp, model.dim(), num_features, rng);

  SampledPath path;
  path.bounds_ = model.input_bounds();
  path.frequencies_ = std::move(draw.frequencies);
  path.phases_ = std::move(draw.phases);
  path.feature_scale_ = draw.scale;
  path.y_mean_ = model.y_mean();
  path.y_std_ = model.y_std();

  // Pathwise conditioning in weight space: w = w0 + Phi^T (Phi Phi^T + s I)^-1 (y - Phi w0 - e),
  // an exact draw from the Bayesian linear-regression posterior over features.
  const Eigen::Index f = path.frequencies_.rows();
  const Eigen::Index n = model.size();
  const double noise = hp.noise_variance + model.jitter();
  const Eigen::MatrixXd phi = path.features(model.train_inputs_normalized());  // n x F
  const Vector& y = model.train_targets_standardized();

  const Vector prior_weights = standard_normal(rng, f);
  const Vector eps = standard_normal(rng, n) * std::sqrt(noise);

  Eigen::MatrixXd gram = phi * phi.transpose();
  gram.diagonal().array() += noise;
  Eigen::LLT<Eigen::MatrixXd> llt;
  robust_cholesky(std::move(gram), llt);

  path.mean_weights_ = phi.transpose() * llt.solve(y);
  path.weights_ = prior_weights + phi.transpose() * llt.solve(y - phi * prior_weights - eps);
  return path;
}

}  // namespace stagebo::gp
