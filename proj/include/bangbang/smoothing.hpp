#pragma once

#include <string>
#include <string_view>

namespace bangbang {

enum class FilterKind { HardSign, L2Norm, Tanh };

std::string_view to_string(FilterKind kind);

/// Parses "hard", "l2" or "tanh". Throws std::invalid_argument otherwise.
FilterKind parse_filter_kind(std::string_view name);

/// Replacement for sgn(S) inside the bang-bang control law.
///
/// L2Norm uses S / sqrt(delta + S^2) and Tanh uses tanh(S / rho); both
/// approach sgn(S) as the constant goes to zero. HardSign ignores the constant.
class SmoothingFilter {
 public:
  static SmoothingFilter hard_sign();
  static SmoothingFilter l2_norm(double delta);
  static SmoothingFilter tanh(double rho);
  static SmoothingFilter make(FilterKind kind, double constant);

  FilterKind kind() const { return kind_; }
  double constant() const { return constant_; }
  bool is_smooth() const { return kind_ != FilterKind::HardSign; }

  /// Filter value in [-1, 1]. HardSign returns 0 at x == 0.
  double apply(double x) const;
  /// d(apply)/dx; zero for HardSign away from the origin.
  double derivative(double x) const;

 private:
  SmoothingFilter(FilterKind kind, double constant) : kind_(kind), constant_(constant) {}

  FilterKind kind_;
  double constant_;
};

struct ControlBounds {
  ControlBounds(double lower, double upper);

  double lower;
  double upper;
};

/// Normalized L2-norm function x / sqrt(delta + x^2).
/// Evaluated as written; |x| above ~1e154 overflows x^2 and is outside the
/// supported range.
double sat_l2(double x, double delta);

/// tanh(x / rho).
double sat_tanh(double x, double rho);

/// 0.5 * [(u_max + u_min) - (u_max - u_min) * filter(S)].
double smooth_control(double switching, const ControlBounds& bounds, const SmoothingFilter& filter);

/// d(smooth_control)/dS.
double smooth_control_derivative(double switching, const ControlBounds& bounds,
                                 const SmoothingFilter& filter);

/// u_max for S < 0, u_min for S > 0, and the midpoint at S == 0.
double hard_control(double switching, const ControlBounds& bounds);

}  // namespace bangbang
