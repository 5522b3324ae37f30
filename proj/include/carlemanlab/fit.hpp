// Least-squares fitting helpers: straight lines, and power-law exponents via
// log-log regression.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace carlemanlab {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;  // max |y - (slope x + intercept)|
};

inline LineFit line_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::runtime_error("line_fit: bad input");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    for (std::size_t i = 0; i < x.size(); ++i)
        f.max_residual = std::max(f.max_residual, std::fabs(y[i] - (f.slope * x[i] + f.intercept)));
    return f;
}

// Exponent of y ~ C x^e from log-log regression; |y| is used so sign-definite
// sequences of either sign fit cleanly.  Zero values are rejected.
inline LineFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    lx.reserve(x.size());
    ly.reserve(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || y[i] == 0.0) throw std::runtime_error("loglog_fit: bad sample");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(std::fabs(y[i])));
    }
    return line_fit(lx, ly);
}

}  // namespace carlemanlab
