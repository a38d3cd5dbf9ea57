#pragma once

#include "bangbang/integrator.hpp"

#include <functional>
#include <vector>

namespace bangbang {

using ScalarOfState = std::function<double(double t, const Vector& y)>;

/// Times where `scalar` changes sign between adjacent trajectory samples,
/// each refined by bisection on the interpolated flow until the bracket is
/// shorter than tol. Tangential zeros (no sign change) are not reported.
std::vector<double> refine_zero_crossings(const Trajectory& traj, const ScalarOfState& scalar,
                                          double tol);

/// Sign changes of a sampled sequence, ignoring exact zeros that do not
/// separate opposite signs.
int count_sign_changes(const std::vector<double>& values);

}  // namespace bangbang
