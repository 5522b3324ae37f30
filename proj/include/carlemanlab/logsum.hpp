// Log-space accumulation for integrals whose integrands span more orders of
// magnitude than double (Carleman weights reach exp(+-10^4) across a collar).
//
// A LogAccumulator holds log(sum of exp(l_i)) for a stream of log-values l_i.
// Accumulation order is fixed by the caller (node index order), so results are
// bit-identical regardless of how the per-node values were produced.

#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace carlemanlab {

class LogAccumulator {
  public:
    void add_log(double l) {
        if (l == -std::numeric_limits<double>::infinity()) return;
        if (empty_) {
            max_ = l;
            sum_ = 1.0;
            empty_ = false;
            return;
        }
        if (l <= max_) {
            sum_ += std::exp(l - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - l) + 1.0;
            max_ = l;
        }
    }

    bool empty() const { return empty_; }

    // log of the accumulated sum; -inf when nothing was added.
    double log_value() const {
        if (empty_) return -std::numeric_limits<double>::infinity();
        return max_ + std::log(sum_);
    }

  private:
    bool empty_ = true;
    double max_ = 0.0;
    double sum_ = 0.0;
};

// log(exp(a) + exp(b)).
inline double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = a > b ? a : b;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace carlemanlab
