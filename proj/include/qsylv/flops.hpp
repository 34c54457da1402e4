#pragma once

#include <atomic>

// Process-wide flop counter for the dense kernels. Only instrumentation reads it.
namespace qsylv::flops {

inline std::atomic<double>& counter() {
  static std::atomic<double> c{0.0};
  return c;
}

inline void add(double n) {
  auto& c = counter();
  double cur = c.load(std::memory_order_relaxed);
  while (!c.compare_exchange_weak(cur, cur + n, std::memory_order_relaxed)) {
  }
}

inline double total() { return counter().load(std::memory_order_relaxed); }
inline void reset() { counter().store(0.0, std::memory_order_relaxed); }

// Counts flops spent while alive.
class Scope {
 public:
  Scope() : start_(total()) {}
  double elapsed() const { return total() - start_; }

 private:
  double start_;
};

}  // namespace qsylv::flops
