#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "placeopt/errors.hpp"

namespace placeopt {

/// Fixed-size column vector.
template <int N>
struct Vec {
    static_assert(N >= 1);
    std::array<double, N> a{};

    double& operator[](int i) { return a[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return a[static_cast<std::size_t>(i)]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < N; ++i) a[i] += o.a[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < N; ++i) a[i] -= o.a[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < N; ++i) a[i] *= s;
        return *this;
    }
    friend Vec operator+(Vec l, const Vec& r) { return l += r; }
    friend Vec operator-(Vec l, const Vec& r) { return l -= r; }
    friend Vec operator*(double s, Vec v) { return v *= s; }
    friend Vec operator*(Vec v, double s) { return v *= s; }
    friend Vec operator/(Vec v, double s) { return v *= (1.0 / s); }
    friend Vec operator-(Vec v) { return v *= -1.0; }

    double dot(const Vec& o) const {
        double s = 0.0;
        for (int i = 0; i < N; ++i) s += a[i] * o.a[i];
        return s;
    }

    /// Euclidean norm, scaled so that subnormal-squared components do not
    /// underflow to zero (a vector like [1e-300, 0] keeps its length).
    double norm() const {
        double m = 0.0;
        for (int i = 0; i < N; ++i) m = std::max(m, std::abs(a[i]));
        if (m == 0.0 || !std::isfinite(m)) return m;
        double s = 0.0;
        for (int i = 0; i < N; ++i) {
            const double t = a[i] / m;
            s += t * t;
        }
        return m * std::sqrt(s);
    }

    double norm_sq() const { return dot(*this); }
};

/// Fixed-size row-major matrix.
template <int R, int C>
struct Mat {
    static_assert(R >= 1 && C >= 1);
    std::array<double, static_cast<std::size_t>(R) * C> a{};

    double& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * C + c]; }
    double operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * C + c]; }

    static Mat identity()
        requires(R == C)
    {
        Mat m;
        for (int i = 0; i < R; ++i) m(i, i) = 1.0;
        return m;
    }

    Mat& operator+=(const Mat& o) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] -= o.a[i];
        return *this;
    }
    Mat& operator*=(double s) {
        for (auto& x : a) x *= s;
        return *this;
    }
    friend Mat operator+(Mat l, const Mat& r) { return l += r; }
    friend Mat operator-(Mat l, const Mat& r) { return l -= r; }
    friend Mat operator*(double s, Mat m) { return m *= s; }
    friend Mat operator*(Mat m, double s) { return m *= s; }

    Mat<C, R> transposed() const {
        Mat<C, R> t;
        for (int r = 0; r < R; ++r)
            for (int c = 0; c < C; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    template <int K>
    Mat<R, K> operator*(const Mat<C, K>& o) const {
        Mat<R, K> out;
        for (int r = 0; r < R; ++r)
            for (int c = 0; c < C; ++c) {
                const double v = (*this)(r, c);
                if (v == 0.0) continue;
                for (int k = 0; k < K; ++k) out(r, k) += v * o(c, k);
            }
        return out;
    }

    Vec<R> operator*(const Vec<C>& v) const {
        Vec<R> out;
        for (int r = 0; r < R; ++r) {
            double s = 0.0;
            for (int c = 0; c < C; ++c) s += (*this)(r, c) * v[c];
            out[r] = s;
        }
        return out;
    }

    double trace() const
        requires(R == C)
    {
        double s = 0.0;
        for (int i = 0; i < R; ++i) s += (*this)(i, i);
        return s;
    }

    double frobenius_sq() const {
        double s = 0.0;
        for (const auto& x : a) s += x * x;
        return s;
    }
    double frobenius_norm() const { return std::sqrt(frobenius_sq()); }

    Vec<R> col(int c) const {
        Vec<R> v;
        for (int r = 0; r < R; ++r) v[r] = (*this)(r, c);
        return v;
    }
    Vec<C> row(int r) const {
        Vec<C> v;
        for (int c = 0; c < C; ++c) v[c] = (*this)(r, c);
        return v;
    }
    void set_col(int c, const Vec<R>& v) {
        for (int r = 0; r < R; ++r) (*this)(r, c) = v[r];
    }
    void set_row(int r, const Vec<C>& v) {
        for (int c = 0; c < C; ++c) (*this)(r, c) = v[c];
    }
};

template <int R, int C>
Mat<R, C> outer(const Vec<R>& u, const Vec<C>& v) {
    Mat<R, C> m;
    for (int r = 0; r < R; ++r)
        for (int c = 0; c < C; ++c) m(r, c) = u[r] * v[c];
    return m;
}

inline double det(const Mat<2, 2>& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

inline double det(const Mat<3, 3>& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

template <int N>
struct EigenDecomposition {
    std::array<double, N> values;  // descending
    Mat<N, N> vectors;             // column j pairs with values[j]
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Intended for the
/// tiny sizes used here (N <= 5); converges in a handful of sweeps.
template <int N>
EigenDecomposition<N> jacobi_eigen(Mat<N, N> m) {
    Mat<N, N> v = Mat<N, N>::identity();
    const double scale = std::max(1.0, m.frobenius_sq());
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < N - 1; ++p)
            for (int q = p + 1; q < N; ++q) off += m(p, q) * m(p, q);
        if (off <= scale * 1e-30) break;
        for (int p = 0; p < N - 1; ++p) {
            for (int q = p + 1; q < N; ++q) {
                const double apq = m(p, q);
                if (apq == 0.0) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e15) {
                    t = 1.0 / (2.0 * theta);
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                const double tau = sn / (1.0 + c);
                const double h = t * apq;
                m(p, p) -= h;
                m(q, q) += h;
                m(p, q) = m(q, p) = 0.0;
                for (int r = 0; r < N; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = m(r, p), arq = m(r, q);
                    m(r, p) = m(p, r) = arp - sn * (arq + tau * arp);
                    m(r, q) = m(q, r) = arq + sn * (arp - tau * arq);
                }
                for (int r = 0; r < N; ++r) {
                    const double vrp = v(r, p), vrq = v(r, q);
                    v(r, p) = vrp - sn * (vrq + tau * vrp);
                    v(r, q) = vrq + sn * (vrp - tau * vrq);
                }
            }
        }
    }
    std::array<int, N> order;
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return m(i, i) > m(j, j); });
    EigenDecomposition<N> out;
    for (int j = 0; j < N; ++j) {
        out.values[j] = m(order[j], order[j]);
        out.vectors.set_col(j, v.col(order[j]));
    }
    return out;
}

/// Eigenvalues of a symmetric 2x2 matrix in descending order (closed form).
inline std::array<double, 2> sym_eigenvalues(const Mat<2, 2>& s) {
    const double mid = 0.5 * (s(0, 0) + s(1, 1));
    const double h = std::hypot(0.5 * (s(0, 0) - s(1, 1)), s(0, 1));
    return {mid + h, mid - h};
}

/// Eigenvalues of a symmetric 3x3 matrix in descending order, by the
/// trigonometric solution of the characteristic cubic. Near a repeated root
/// the trigonometric formula only resolves eigenvalues to about the square
/// root of machine precision, so that regime is delegated to the Jacobi
/// iteration instead.
inline std::array<double, 3> sym_eigenvalues(const Mat<3, 3>& s) {
    const double p1 = s(0, 1) * s(0, 1) + s(0, 2) * s(0, 2) + s(1, 2) * s(1, 2);
    if (p1 == 0.0) {
        std::array<double, 3> d{s(0, 0), s(1, 1), s(2, 2)};
        std::sort(d.begin(), d.end(), std::greater<double>());
        return d;
    }
    const double q = s.trace() / 3.0;
    const double p2 = (s(0, 0) - q) * (s(0, 0) - q) + (s(1, 1) - q) * (s(1, 1) - q) +
                      (s(2, 2) - q) * (s(2, 2) - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    if (p == 0.0) return {q, q, q};
    Mat<3, 3> b = s;
    for (int i = 0; i < 3; ++i) b(i, i) -= q;
    b *= 1.0 / p;
    const double r = std::clamp(det(b) / 2.0, -1.0, 1.0);
    if (std::abs(r) > 1.0 - 1e-4) return jacobi_eigen(s).values;
    const double phi = std::acos(r) / 3.0;
    const double e1 = q + 2.0 * p * std::cos(phi);
    const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    const double e2 = 3.0 * q - e1 - e3;
    return {e1, e2, e3};
}

namespace detail {

/// Flip a column so its first entry of visible magnitude is positive.
/// Returns true if the column was negated.
template <int N>
bool normalize_column_sign(Vec<N>& u) {
    for (int i = 0; i < N; ++i) {
        if (std::abs(u[i]) > 1e-12) {
            if (u[i] < 0.0) {
                u *= -1.0;
                return true;
            }
            return false;
        }
    }
    return false;
}

}  // namespace detail

/// Extend a (possibly empty) set of orthonormal columns to a full orthonormal
/// basis using Gram-Schmidt over canonical basis vectors with pivoting on the
/// largest residual. Deterministic: ties pick the lowest canonical index.
template <int N>
std::vector<Vec<N>> complete_orthonormal(std::vector<Vec<N>> cols) {
    if (static_cast<int>(cols.size()) > N)
        throw contract_error("complete_orthonormal: too many seed columns");
    while (static_cast<int>(cols.size()) < N) {
        int best = -1;
        double best_norm = -1.0;
        Vec<N> best_res;
        for (int k = 0; k < N; ++k) {
            Vec<N> r;
            r[k] = 1.0;
            for (const auto& c : cols) r -= c.dot(r) * c;
            const double nr = r.norm();
            if (nr > best_norm + 1e-12) {
                best_norm = nr;
                best = k;
                best_res = r;
            }
        }
        if (best < 0 || best_norm <= 1e-8)
            throw numerical_error("complete_orthonormal: seed columns are not independent");
        // second orthogonalization pass for hygiene
        for (const auto& c : cols) best_res -= c.dot(best_res) * c;
        cols.push_back(best_res / best_res.norm());
    }
    return cols;
}

template <int M, int K>
struct Svd {
    Mat<M, M> u;                  // full left factor
    std::array<double, K> sigma;  // descending, >= 0
    Mat<K, K> v;                  // right singular vectors as columns
};

/// Full singular value decomposition of a tall (M >= K) fixed-size matrix via
/// the eigendecomposition of A^T A; the left factor is completed to a full
/// orthonormal basis. Columns carry the sign convention "first entry of
/// visible magnitude is positive".
template <int M, int K>
Svd<M, K> svd_full(const Mat<M, K>& a) {
    static_assert(M >= K);
    const Mat<K, K> ata = a.transposed() * a;
    auto eig = jacobi_eigen(ata);
    Svd<M, K> out;
    out.v = eig.vectors;
    const double smax = std::sqrt(std::max(eig.values[0], 0.0));
    std::vector<Vec<M>> ucols;
    int rank = 0;
    for (int j = 0; j < K; ++j) {
        const double sigma = std::sqrt(std::max(eig.values[j], 0.0));
        out.sigma[j] = sigma;
        if (sigma > smax * 1e-12 && sigma > 0.0) {
            Vec<M> u = a * eig.vectors.col(j) / sigma;
            for (const auto& c : ucols) u -= c.dot(u) * c;
            const double nu = u.norm();
            if (nu > 0.5) {
                ucols.push_back(u / nu);
                ++rank;
            } else {
                out.sigma[j] = 0.0;
            }
        }
    }
    ucols = complete_orthonormal<M>(std::move(ucols));
    for (int j = 0; j < M; ++j) {
        Vec<M> u = ucols[static_cast<std::size_t>(j)];
        const bool flipped = detail::normalize_column_sign(u);
        if (flipped && j < rank) {
            Vec<K> vc = out.v.col(j);
            out.v.set_col(j, -vc);
        }
        out.u.set_col(j, u);
    }
    return out;
}

/// Orthogonal matrix (rotation or reflection) best aligning src onto dst in
/// the least-squares sense: minimizes sum_i ||U src_i - dst_i||^2.
template <int D>
Mat<D, D> procrustes(const std::vector<Vec<D>>& src, const std::vector<Vec<D>>& dst) {
    if (src.size() != dst.size())
        throw contract_error("procrustes: point sets differ in size");
    Mat<D, D> m;
    for (std::size_t i = 0; i < src.size(); ++i) m += outer(dst[i], src[i]);
    const auto f = svd_full(m);
    return f.u * f.v.transposed();
}

}  // namespace placeopt
