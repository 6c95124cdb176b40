#pragma once

namespace lifeeval {

// Kahan-compensated accumulator; keeps fold results independent of
// aggregation order beyond float associativity.
class CompensatedSum {
 public:
  void add(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace lifeeval
