// Small dense linear algebra on stack-allocated matrices (dimension <= 5).
//
// Spacetime dimension here is n+1 with n in {2,3,4}, so every matrix in the
// toolkit is at most 5x5.  Everything is templated on the scalar type so the
// same kernels run on plain doubles and on forward-mode jets.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace carlemanlab {

inline constexpr int kMaxDim = 5;

template <class T>
struct VecN {
    int n = 0;
    std::array<T, kMaxDim> a{};

    explicit VecN(int dim = 0) : n(dim) {
        for (auto& x : a) x = T(0);
    }
    T& operator[](int i) { return a[static_cast<std::size_t>(i)]; }
    const T& operator[](int i) const { return a[static_cast<std::size_t>(i)]; }
};

template <class T>
struct MatN {
    int n = 0;
    std::array<T, kMaxDim * kMaxDim> a{};

    explicit MatN(int dim = 0) : n(dim) {
        for (auto& x : a) x = T(0);
    }
    T& operator()(int i, int j) { return a[static_cast<std::size_t>(i * kMaxDim + j)]; }
    const T& operator()(int i, int j) const {
        return a[static_cast<std::size_t>(i * kMaxDim + j)];
    }
};

// Value part of a scalar; jets overload this to return their value component.
inline double value_of(double x) { return x; }

// Value of a scalar for pivot-size comparisons; jets compare by their value part.
inline double pivot_size(double x) { return std::fabs(x); }

// Gauss-Jordan inverse with partial pivoting.  Throws on (numerically) singular
// input; metric matrices in the supported charts are uniformly non-degenerate.
template <class T>
MatN<T> inverse(const MatN<T>& m) {
    const int n = m.n;
    MatN<T> a = m;
    MatN<T> inv(n);
    for (int i = 0; i < n; ++i) inv(i, i) = T(1);

    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = pivot_size(value_of(a(col, col)));
        for (int r = col + 1; r < n; ++r) {
            const double s = pivot_size(value_of(a(r, col)));
            if (s > best) {
                best = s;
                piv = r;
            }
        }
        if (!(best > 0.0)) throw std::runtime_error("linalg: singular matrix");
        if (piv != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(a(piv, j), a(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        }
        const T d = a(col, col);
        for (int j = 0; j < n; ++j) {
            a(col, j) = a(col, j) / d;
            inv(col, j) = inv(col, j) / d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const T f = a(r, col);
            if (value_of(f) == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                a(r, j) = a(r, j) - f * a(col, j);
                inv(r, j) = inv(r, j) - f * inv(col, j);
            }
        }
    }
    return inv;
}

// Determinant by LU with partial pivoting.
template <class T>
T determinant(const MatN<T>& m) {
    const int n = m.n;
    MatN<T> a = m;
    T det = T(1);
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = pivot_size(value_of(a(col, col)));
        for (int r = col + 1; r < n; ++r) {
            const double s = pivot_size(value_of(a(r, col)));
            if (s > best) {
                best = s;
                piv = r;
            }
        }
        if (!(best > 0.0)) return T(0);
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
            det = det * T(-1);
        }
        det = det * a(col, col);
        for (int r = col + 1; r < n; ++r) {
            const T f = a(r, col) / a(col, col);
            for (int j = col; j < n; ++j) a(r, j) = a(r, j) - f * a(col, j);
        }
    }
    return det;
}

// Eigenvalues of a symmetric double matrix by the cyclic Jacobi method,
// returned in ascending order.
VecN<double> symmetric_eigenvalues(MatN<double> a);

// Frobenius and max-abs norms (double matrices).
double frobenius_norm(const MatN<double>& m);
double max_abs(const MatN<double>& m);

}  // namespace carlemanlab
