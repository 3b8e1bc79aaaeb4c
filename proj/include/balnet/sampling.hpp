#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>

#include "balnet/linalg.hpp"
#include "balnet/network_model.hpp"

namespace balnet {

enum class DistributionKind { Gaussian, StudentT };

struct Distribution {
  DistributionKind kind = DistributionKind::Gaussian;
  double dof = 9.0;  // StudentT only; must exceed 4

  static Distribution gaussian() { return {}; }
  static Distribution student_t(double dof) { return {DistributionKind::StudentT, dof}; }
};

struct SamplingSpec {
  int n = 1;
  Distribution distribution;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SampleSet {
  Matrix y;         // n × p potentials, one sample per row
  SymMatrix s_cov;  // S = n⁻¹ Σ Y_i Y_iᵀ
  int n = 0;
};

/// Unit-variance draws on top of std::mt19937_64. The normal (Marsaglia
/// polar) and gamma (Marsaglia–Tsang) transforms are implemented here so
/// that streams are identical across standard-library vendors.
class StandardSampler {
 public:
  StandardSampler(Distribution dist, std::uint64_t seed);

  double operator()();

  double uniform();  // [0, 1)
  double normal();
  double gamma(double shape);  // unit scale

 private:
  Distribution dist_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// X_i = Σ_X^{1/2} Z_i with i.i.d. standardized Z entries, Y_i solved from
/// B* Y_i = X_i by Cholesky. Deterministic in spec.seed.
SampleSet draw_samples(const NetworkModel& model, const SamplingSpec& spec);

SymMatrix sample_covariance(const Matrix& y);

SampleSet make_sample_set(Matrix y);

/// W = S − Θ*⁻¹.
SymMatrix noise_deviation(const NetworkModel& model, const SampleSet& samples);

}  // namespace balnet
