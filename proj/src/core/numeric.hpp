#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <span>
#include <string>

namespace tracerank {

// Neumaier-compensated accumulator. Column sums and residual norms run over
// up to ~1e4 terms and the stochasticity tolerance is 1e-12, so plain
// left-to-right summation is too sloppy.
class KahanSum {
public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double sum_l1(std::span<const double> a, std::span<const double> b) {
  KahanSum s;
  for (size_t i = 0; i < a.size(); ++i) s.add(std::abs(a[i] - b[i]));
  return s.value();
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// All floating-point output goes through 12 significant digits so golden
// files and re-runs are byte-stable.
inline std::string format_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Round to the double nearest the 12-digit decimal form; values stored in
// JSON documents are rounded first so the serializer emits short stable text.
inline double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

}  // namespace tracerank
