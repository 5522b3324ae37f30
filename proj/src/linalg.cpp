#include "carlemanlab/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace carlemanlab {

VecN<double> symmetric_eigenvalues(MatN<double> a) {
    const int n = a.n;
    // Cyclic Jacobi rotations; ~12 sweeps is far beyond what 5x5 needs.
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    VecN<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.a.begin(), ev.a.begin() + n);
    return ev;
}

double frobenius_norm(const MatN<double>& m) {
    double s = 0.0;
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) s += m(i, j) * m(i, j);
    return std::sqrt(s);
}

double max_abs(const MatN<double>& m) {
    double s = 0.0;
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) s = std::max(s, std::fabs(m(i, j)));
    return s;
}

}  // namespace carlemanlab
