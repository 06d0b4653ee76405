#include "ordcap/arrival.hpp"

#include <cmath>

#include "ordcap/errors.hpp"

namespace ordcap {

std::string to_string(ArrivalFamily family) {
  switch (family) {
    case ArrivalFamily::Gamma:
      return "gamma";
  }
  return "unknown";
}

ArrivalFamily parse_arrival_family(const std::string& name) {
  if (name == "gamma" || name == "Gamma") return ArrivalFamily::Gamma;
  throw DomainError("unknown arrival family '" + name + "'");
}

ArrivalModel::ArrivalModel(ArrivalFamily family, double shape, double rate)
    : family_(family), shape_(shape), rate_(rate) {
  // small integer shapes use repeated multiplication instead of exp/log1p
  if (shape >= 2.0 && shape <= 16.0 && shape == std::floor(shape)) integer_shape_ = static_cast<int>(shape);
}

ArrivalModel ArrivalModel::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw DomainError("gamma shape must be positive and finite");
  }
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw DomainError("arrival rate must be positive and finite");
  }
  return ArrivalModel(ArrivalFamily::Gamma, shape, rate);
}

double ArrivalModel::lst(double s) const {
  if (!(s >= 0.0)) throw DomainError("LST argument must be nonnegative");
  if (shape_ == 1.0) return rate_ / (rate_ + s);
  // (k*lambda / (k*lambda + s))^k
  const double scale = shape_ * rate_;
  if (integer_shape_ > 0) {
    const double base = scale / (scale + s);
    double value = base;
    for (int i = 1; i < integer_shape_; ++i) value *= base;
    return value;
  }
  return std::exp(-shape_ * std::log1p(s / scale));
}

double ArrivalModel::lst_derivative(double s) const {
  if (!(s >= 0.0)) throw DomainError("LST argument must be nonnegative");
  const double scale = shape_ * rate_;
  return -shape_ / (scale + s) * lst(s);
}

double ArrivalModel::sample(std::mt19937_64& rng) const {
  if (shape_ == 1.0) {
    std::exponential_distribution<double> dist(rate_);
    return dist(rng);
  }
  std::gamma_distribution<double> dist(shape_, 1.0 / (shape_ * rate_));
  double draw = dist(rng);
  // small shapes can underflow to an exact zero
  while (draw <= 0.0) draw = dist(rng);
  return draw;
}

}  // namespace ordcap
