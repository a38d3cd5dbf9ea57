#include "bangbang/zero_crossing.hpp"

#include <stdexcept>

namespace bangbang {

namespace {

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

std::vector<double> refine_zero_crossings(const Trajectory& traj, const ScalarOfState& scalar,
                                          double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("crossing tolerance must be positive");
  std::vector<double> crossings;
  if (traj.size() < 2) return crossings;

  std::vector<double> values(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) values[i] = scalar(traj.times[i], traj.states[i]);

  // Index and sign of the last sample with a nonzero value.
  std::size_t last = 0;
  int last_sign = sign_of(values[0]);
  for (std::size_t i = 1; i < values.size(); ++i) {
    const int s = sign_of(values[i]);
    if (s == 0) continue;
    if (last_sign == 0) {
      last = i;
      last_sign = s;
      continue;
    }
    if (s != last_sign) {
      if (i - last > 1) {
        // Exact zero samples sit between the two signs; report the first.
        crossings.push_back(traj.times[last + 1]);
      } else {
        double lo = traj.times[last], hi = traj.times[i];
        while (hi - lo >= tol) {
          const double mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi) break;
          const int sm = sign_of(scalar(mid, traj.state_at(mid)));
          if (sm == 0) {
            lo = hi = mid;
            break;
          }
          (sm == last_sign ? lo : hi) = mid;
        }
        crossings.push_back(0.5 * (lo + hi));
      }
    }
    last = i;
    last_sign = s;
  }
  return crossings;
}

int count_sign_changes(const std::vector<double>& values) {
  int changes = 0;
  int last_sign = 0;
  for (double v : values) {
    const int s = sign_of(v);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) ++changes;
    last_sign = s;
  }
  return changes;
}

}  // namespace bangbang
