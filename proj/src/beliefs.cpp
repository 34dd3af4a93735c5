#include "mevlab/beliefs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mevlab/error.hpp"

namespace mevlab {

BeliefDistribution BeliefDistribution::gaussian(double low, double high, double sigma_rel) {
  BeliefDistribution d;
  d.kind = Kind::Gaussian;
  d.low = low;
  d.high = high;
  d.mean = 0.5 * (low + high);
  d.sigma_rel = sigma_rel;
  return d;
}

BeliefDistribution BeliefDistribution::pareto(double low, double high, double alpha) {
  BeliefDistribution d;
  d.kind = Kind::Pareto;
  d.low = low;
  d.high = high;
  d.alpha = alpha;
  return d;
}

BeliefDistribution BeliefDistribution::uniform(double low, double high) {
  BeliefDistribution d;
  d.kind = Kind::Uniform;
  d.low = low;
  d.high = high;
  return d;
}

void BeliefDistribution::validate() const {
  if (!(low > 0.0) || !(high >= low) || !std::isfinite(high)) {
    throw Error(ErrorCode::InvalidDistribution, "belief band must satisfy 0 < low <= high");
  }
  if (kind == Kind::Gaussian && (!(sigma_rel >= 0.0) || !(mean > 0.0) || !std::isfinite(sigma_rel))) {
    throw Error(ErrorCode::InvalidDistribution, "gaussian needs a positive mean and sigma_rel >= 0");
  }
  if (kind == Kind::Pareto && !(alpha > 1.0)) {
    throw Error(ErrorCode::InvalidDistribution, "pareto shape must exceed 1");
  }
}

double BeliefDistribution::sample(std::mt19937_64& rng) const {
  double v = low;
  switch (kind) {
    case Kind::Gaussian: {
      std::normal_distribution<double> n(0.0, 1.0);
      v = mean + sigma_rel * mean * n(rng);
      break;
    }
    case Kind::Pareto: {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      v = low * std::pow(1.0 - u(rng), -1.0 / alpha);
      break;
    }
    case Kind::Uniform: {
      std::uniform_real_distribution<double> u(low, high);
      v = u(rng);
      break;
    }
  }
  return std::clamp(v, low, high);
}

double BeliefDistribution::quantile(double p) const {
  p = std::clamp(p, 0.0, 1.0);
  double v = low;
  switch (kind) {
    case Kind::Gaussian:
      // No inverse normal CDF in <cmath>; bisect erfc.
      {
        if (sigma_rel == 0.0) return std::clamp(mean, low, high);
        double lo = -40.0, hi = 40.0;
        for (int i = 0; i < 200; ++i) {
          double mid = 0.5 * (lo + hi);
          (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
        }
        v = mean + sigma_rel * mean * 0.5 * (lo + hi);
      }
      break;
    case Kind::Pareto:
      v = p >= 1.0 ? high : low * std::pow(1.0 - p, -1.0 / alpha);
      break;
    case Kind::Uniform:
      v = low + p * (high - low);
      break;
  }
  return std::clamp(v, low, high);
}

std::string_view to_string(BeliefDistribution::Kind k) {
  switch (k) {
    case BeliefDistribution::Kind::Gaussian: return "gaussian";
    case BeliefDistribution::Kind::Pareto: return "pareto";
    case BeliefDistribution::Kind::Uniform: return "uniform";
  }
  return "unknown";
}

BeliefDistribution::Kind parse_belief_kind(std::string_view name) {
  if (name == "gaussian") return BeliefDistribution::Kind::Gaussian;
  if (name == "pareto") return BeliefDistribution::Kind::Pareto;
  if (name == "uniform") return BeliefDistribution::Kind::Uniform;
  throw Error(ErrorCode::InvalidDistribution, "unknown belief distribution '" + std::string(name) + "'");
}

std::vector<double> sample_beliefs(const BeliefDistribution& dist, std::size_t n, std::mt19937_64& rng) {
  dist.validate();
  std::vector<double> out(n);
  for (double& v : out) v = dist.sample(rng);
  return out;
}

}  // namespace mevlab
