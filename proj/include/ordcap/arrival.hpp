#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace ordcap {

enum class ArrivalFamily { Gamma };

std::string to_string(ArrivalFamily family);
ArrivalFamily parse_arrival_family(const std::string& name);

/// Renewal inter-arrival law of the exogenous stream.
///
/// Gamma inter-arrival times are parameterized as Gamma(shape k, rate k*lambda), so the
/// mean inter-arrival time is exactly 1/lambda and the variance is 1/(k*lambda^2).
/// k = 1 gives Poisson arrivals. Immutable after construction.
class ArrivalModel {
 public:
  static ArrivalModel gamma(double shape, double rate);
  static ArrivalModel poisson(double rate) { return gamma(1.0, rate); }

  ArrivalFamily family() const { return family_; }
  double shape() const { return shape_; }
  double rate() const { return rate_; }
  double mean() const { return 1.0 / rate_; }
  double variance() const { return 1.0 / (shape_ * rate_ * rate_); }
  bool is_poisson() const { return shape_ == 1.0; }

  /// Laplace-Stieltjes transform E[exp(-s T0)]. Throws DomainError for s < 0.
  double lst(double s) const;
  /// d/ds of lst(s).
  double lst_derivative(double s) const;

  /// One inter-arrival draw; reproducible for a fixed engine state.
  double sample(std::mt19937_64& rng) const;

 private:
  ArrivalModel(ArrivalFamily family, double shape, double rate);

  ArrivalFamily family_;
  double shape_;
  double rate_;
  int integer_shape_ = 0;
};

/// Free-function spelling of ArrivalModel::lst.
inline double base_lst(const ArrivalModel& model, double s) { return model.lst(s); }

inline double sample_interarrival(const ArrivalModel& model, std::mt19937_64& rng) {
  return model.sample(rng);
}

}  // namespace ordcap
