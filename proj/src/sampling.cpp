#include "balnet/sampling.hpp"

#include <cmath>

#include "balnet/error.hpp"

namespace balnet {

void SamplingSpec::validate() const {
  if (n < 1) throw Error(ErrorCode::InvalidInput, "sample count must be >= 1");
  if (distribution.kind == DistributionKind::StudentT && !(distribution.dof > 4.0)) {
    throw Error(ErrorCode::InvalidInput, "StudentT needs dof > 4");
  }
}

StandardSampler::StandardSampler(Distribution dist, std::uint64_t seed)
    : dist_(dist), engine_(seed) {}

double StandardSampler::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double StandardSampler::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double StandardSampler::gamma(double shape) {
  if (shape < 1.0) {
    // Boost to shape + 1 and rescale.
    const double u = uniform();
    return gamma(shape + 1.0) * std::pow(u > 0.0 ? u : 0x1.0p-53, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double StandardSampler::operator()() {
  if (dist_.kind == DistributionKind::Gaussian) return normal();
  const double nu = dist_.dof;
  const double z = normal();
  const double chi2 = 2.0 * gamma(0.5 * nu);
  const double t = z / std::sqrt(chi2 / nu);
  return t * std::sqrt((nu - 2.0) / nu);
}

SymMatrix sample_covariance(const Matrix& y) {
  if (y.rows() < 1) throw Error(ErrorCode::InvalidInput, "no samples");
  SymMatrix s = (y.transpose() * y) / static_cast<double>(y.rows());
  return (s + s.transpose()) * 0.5;
}

SampleSet make_sample_set(Matrix y) {
  SampleSet out;
  out.s_cov = sample_covariance(y);
  out.n = static_cast<int>(y.rows());
  out.y = std::move(y);
  return out;
}

SampleSet draw_samples(const NetworkModel& model, const SamplingSpec& spec) {
  spec.validate();
  const int p = model.dim();
  StandardSampler draw(spec.distribution, spec.seed);
  Matrix z(spec.n, p);
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < p; ++j) z(i, j) = draw();

  const SymMatrix sigma_half = sym_sqrt(model.sigma_x);
  const Matrix x = sigma_half * z.transpose();  // p × n
  Eigen::LLT<Matrix> chol(model.b_star);
  if (chol.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "B* Cholesky failed");
  }
  Matrix y = chol.solve(x).transpose();
  return make_sample_set(std::move(y));
}

SymMatrix noise_deviation(const NetworkModel& model, const SampleSet& samples) {
  if (samples.s_cov.rows() != model.dim()) {
    throw Error(ErrorCode::InvalidInput, "sample dimension does not match model");
  }
  return samples.s_cov - model.sigma_y;
}

}  // namespace balnet
