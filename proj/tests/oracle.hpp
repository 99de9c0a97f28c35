// Reference computations for the tests. Written with plain loops over
// explicit dense matrices so they share no code paths with the library.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            for (Eigen::Index k = 0; k < b.rows(); ++k)
                for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

inline Vec kron(const Vec& a, const Vec& b) {
    Vec out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        for (Eigen::Index k = 0; k < b.size(); ++k) out(i * b.size() + k) = a(i) * b(k);
    return out;
}

inline Mat eye(Eigen::Index n) { return Mat::Identity(n, n); }

/// Largest singular value via the largest eigenvalue of A^*A.
inline double norm2(const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a.adjoint() * a);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// tr_A of an operator on C^s ⊗ C^a, written as a double loop.
inline Mat trace_out_second(const Mat& m, Eigen::Index s, Eigen::Index a) {
    Mat out = Mat::Zero(s, s);
    for (Eigen::Index i = 0; i < s; ++i)
        for (Eigen::Index j = 0; j < s; ++j)
            for (Eigen::Index k = 0; k < a; ++k) out(i, j) += m(i * a + k, j * a + k);
    return out;
}

inline Mat trace_out_first(const Mat& m, Eigen::Index s, Eigen::Index a) {
    Mat out = Mat::Zero(a, a);
    for (Eigen::Index i = 0; i < a; ++i)
        for (Eigen::Index j = 0; j < a; ++j)
            for (Eigen::Index k = 0; k < s; ++k) out(i, j) += m(k * a + i, k * a + j);
    return out;
}

/// E = tr_A[U^*(1 ⊗ Z)U (1 ⊗ |φ⟩⟨φ|)], the effect produced by pointer effect Z.
inline Mat induced_effect(const Mat& u, const Mat& z, const Vec& phi, Eigen::Index s) {
    const Eigen::Index a = phi.size();
    const Mat heis = u.adjoint() * kron(eye(s), z) * u;
    const Mat sigma = phi * phi.adjoint();
    return trace_out_second(heis * kron(eye(s), sigma), s, a);
}

/// exp(iH) by a long Taylor series with scaling and squaring.
inline Mat expi(const Mat& h) {
    int squarings = 0;
    double nrm = norm2(h);
    while (nrm > 0.5) {
        nrm /= 2;
        ++squarings;
    }
    const Mat x = cd(0, 1) * h / std::pow(2.0, squarings);
    Mat term = eye(h.rows()), sum = eye(h.rows());
    for (int k = 1; k < 30; ++k) {
        term = term * x / static_cast<double>(k);
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

inline cd omega_pow(long k, long n) {
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(((k % n) + n) % n) / static_cast<double>(n));
}

/// Cyclic convolution on Z_n.
inline std::vector<double> cconv(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[(i + j) % n] += a[i] * b[j];
    return out;
}

/// |m⟩ = n^{-1/2} Σ_a ω^{-ma} |a⟩, written out directly.
inline Vec momentum_ket(long m, long n) {
    Vec v(n);
    for (long a = 0; a < n; ++a) v(a) = omega_pow(-m * a, n) / std::sqrt(double(n));
    return v;
}

inline Vec from_momentum(const Vec& amps) {
    const long n = amps.size();
    Vec v = Vec::Zero(n);
    for (long m = 0; m < n; ++m) v += amps(m) * momentum_ket(m, n);
    return v;
}

inline long inverse_mod(long k, long n) {
    const long r = ((k % n) + n) % n;
    for (long j = 1; j < n; ++j)
        if ((r * j) % n == 1) return j;
    return 0;
}

/// Kernel μ on Z_n with μ(x − q) = ⟨q|E(x)|q⟩ for the four-register lattice
/// model: the reference spread mirrored, convolved with the A-register
/// momentum profile read through −k⁻¹.
inline std::vector<double> ozawa_kernel(const Vec& phi, const Vec& xi_a, long k, long n) {
    const long kinv = inverse_mod(k, n);
    std::vector<double> rel(n, 0.0), mirror(n, 0.0);
    for (long m = 0; m < n; ++m) rel[((-kinv * m) % n + n) % n] += std::norm(xi_a(m));
    for (long r = 0; r < n; ++r) mirror[(n - r) % n] += std::norm(phi(r));
    return cconv(mirror, rel);
}

/// Dense n^4-dimensional construction of the same model: U from clock
/// operators, pointer projectors from explicit momentum kets, and effects
/// from the operator-level reproducibility formula. Index x is the reading.
inline std::vector<Mat> ozawa_dense_effects(long n, long k, const Vec& phi, const Vec& xi_a, const Vec& xi_b,
                                            Mat* coupling = nullptr) {
    auto clock_pow = [&](long e) {
        Mat c = Mat::Zero(n, n);
        for (long a = 0; a < n; ++a) c(a, a) = omega_pow(e * a, n);
        return c;
    };
    const long d = n * n * n * n;
    Mat u = Mat::Zero(d, d);
    for (long q = 0; q < n; ++q)
        for (long r = 0; r < n; ++r) {
            Mat pq = Mat::Zero(n, n), pr = Mat::Zero(n, n);
            pq(q, q) = 1.0;
            pr(r, r) = 1.0;
            u += kron(kron(kron(pq, pr), clock_pow(k * (q - r))), eye(n));
        }
    if (coupling) *coupling = u;
    const Vec app = kron(kron(phi, from_momentum(xi_a)), from_momentum(xi_b));
    const long kinv = inverse_mod(k, n);
    std::vector<Mat> out;
    for (long x = 0; x < n; ++x) {
        Mat z = Mat::Zero(n * n * n, n * n * n);
        for (long m = 0; m < n; ++m) {
            if (((-kinv * m) % n + n) % n != x) continue;
            const Vec km = momentum_ket(m, n);
            z += kron(kron(eye(n), km * km.adjoint()), eye(n));
        }
        out.push_back(induced_effect(u, z, app, n));
    }
    return out;
}

} // namespace oracle
