#include "pspin/common.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace pspin {

void validate(const SchedulePoint& point) {
  auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  if (!in_unit(point.s) || !in_unit(point.lambda)) {
    throw DomainError("schedule point (s=" + std::to_string(point.s) +
                      ", lambda=" + std::to_string(point.lambda) + ") outside [0,1]^2");
  }
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(workers);
  pool.reserve(workers);
  const std::size_t block = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * block;
    const std::size_t end = std::min(count, begin + block);
    pool.emplace_back([&body, &failures, w, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

std::vector<double> uniform_grid(double first, double last, int count) {
  if (count < 2) throw DomainError("grid needs at least two points");
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = first + (last - first) * i / (count - 1);
  g.back() = last;
  return g;
}

}  // namespace pspin
