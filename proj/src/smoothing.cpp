#include "bangbang/smoothing.hpp"

#include <cmath>
#include <stdexcept>

namespace bangbang {

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(what) + " must be a positive finite number");
  }
}

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

}  // namespace

std::string_view to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::HardSign:
      return "hard";
    case FilterKind::L2Norm:
      return "l2";
    case FilterKind::Tanh:
      return "tanh";
  }
  return "unknown";
}

FilterKind parse_filter_kind(std::string_view name) {
  if (name == "hard") return FilterKind::HardSign;
  if (name == "l2") return FilterKind::L2Norm;
  if (name == "tanh") return FilterKind::Tanh;
  throw std::invalid_argument("unknown filter '" + std::string(name) + "' (expected hard|l2|tanh)");
}

SmoothingFilter SmoothingFilter::hard_sign() { return {FilterKind::HardSign, 0.0}; }

SmoothingFilter SmoothingFilter::l2_norm(double delta) {
  require_positive(delta, "delta");
  return {FilterKind::L2Norm, delta};
}

SmoothingFilter SmoothingFilter::tanh(double rho) {
  require_positive(rho, "rho");
  return {FilterKind::Tanh, rho};
}

SmoothingFilter SmoothingFilter::make(FilterKind kind, double constant) {
  switch (kind) {
    case FilterKind::HardSign:
      return hard_sign();
    case FilterKind::L2Norm:
      return l2_norm(constant);
    case FilterKind::Tanh:
      return tanh(constant);
  }
  throw std::invalid_argument("unknown filter kind");
}

double SmoothingFilter::apply(double x) const {
  switch (kind_) {
    case FilterKind::HardSign:
      require_finite(x, "x");
      return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
    case FilterKind::L2Norm:
      return sat_l2(x, constant_);
    case FilterKind::Tanh:
      return sat_tanh(x, constant_);
  }
  return 0.0;
}

double SmoothingFilter::derivative(double x) const {
  switch (kind_) {
    case FilterKind::HardSign:
      return 0.0;
    case FilterKind::L2Norm: {
      const double r = constant_ + x * x;
      return constant_ / (r * std::sqrt(r));
    }
    case FilterKind::Tanh: {
      const double th = std::tanh(x / constant_);
      return (1.0 - th * th) / constant_;
    }
  }
  return 0.0;
}

ControlBounds::ControlBounds(double lo, double hi) : lower(lo), upper(hi) {
  if (!(lo < hi)) {
    throw std::invalid_argument("control bounds require lower < upper");
  }
}

double sat_l2(double x, double delta) {
  require_positive(delta, "delta");
  require_finite(x, "x");
  return x / std::sqrt(delta + x * x);
}

double sat_tanh(double x, double rho) {
  require_positive(rho, "rho");
  require_finite(x, "x");
  return std::tanh(x / rho);
}

double smooth_control(double switching, const ControlBounds& bounds, const SmoothingFilter& filter) {
  if (!filter.is_smooth()) return hard_control(switching, bounds);
  return 0.5 * ((bounds.upper + bounds.lower) - (bounds.upper - bounds.lower) * filter.apply(switching));
}

double smooth_control_derivative(double switching, const ControlBounds& bounds,
                                 const SmoothingFilter& filter) {
  return -0.5 * (bounds.upper - bounds.lower) * filter.derivative(switching);
}

double hard_control(double switching, const ControlBounds& bounds) {
  require_finite(switching, "switching function");
  if (switching < 0.0) return bounds.upper;
  if (switching > 0.0) return bounds.lower;
  return 0.5 * (bounds.upper + bounds.lower);
}

}  // namespace bangbang
