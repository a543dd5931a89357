#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pspin {

inline constexpr const char* kVersion = "1.0.0";

/// Input outside the documented domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to reach its accuracy contract.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point (s, lambda) of the control-parameter plane.
///
/// H(s, lambda) = s * (lambda * H0 + (1 - lambda) * V_AFF) + (1 - s) * V_TF.
struct SchedulePoint {
  double s = 0.0;
  double lambda = 0.0;

  friend bool operator==(const SchedulePoint&, const SchedulePoint&) = default;
};

/// Throws DomainError unless both coordinates lie in [0, 1].
void validate(const SchedulePoint& point);

/// Runs body(i) for i in [0, count) on at most `threads` workers.
///
/// Work is split into contiguous blocks so results written by index are
/// independent of the thread count.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

/// Uniform grid of `count` points from `first` to `last` inclusive.
std::vector<double> uniform_grid(double first, double last, int count);

}  // namespace pspin
