#pragma once

#include <random>
#include <string_view>
#include <vector>

namespace mevlab {

// Distribution of an arbitrageur's external-price belief. Samples are
// clamped to [low, high].
struct BeliefDistribution {
  enum class Kind { Gaussian, Pareto, Uniform };

  Kind kind = Kind::Gaussian;
  double low = 0.0;
  double high = 0.0;
  double mean = 0.0;       // Gaussian centre
  double sigma_rel = 0.0;  // Gaussian sd as a fraction of the mean
  double alpha = 1.5;      // Pareto shape; scale is `low`

  // Centred on the band midpoint.
  static BeliefDistribution gaussian(double low, double high, double sigma_rel);
  static BeliefDistribution pareto(double low, double high, double alpha = 1.5);
  static BeliefDistribution uniform(double low, double high);

  // Throws InvalidDistribution.
  void validate() const;

  double sample(std::mt19937_64& rng) const;

  // Inverse CDF of the clamped distribution at p in [0, 1].
  double quantile(double p) const;
};

std::string_view to_string(BeliefDistribution::Kind k);
BeliefDistribution::Kind parse_belief_kind(std::string_view name);

std::vector<double> sample_beliefs(const BeliefDistribution& dist, std::size_t n, std::mt19937_64& rng);

}  // namespace mevlab
