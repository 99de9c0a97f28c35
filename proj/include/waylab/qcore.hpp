// qcore.hpp
// Dense complex linear algebra on finite-dimensional Hilbert spaces:
// Kronecker products, partial traces, Hermitian spectral decompositions,
// unitary exponentials, and validated state types.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace waylab {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Raised when operand shapes do not line up.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an input fails a numerical validity check (unitarity,
/// positivity, normalisation, ...). The message carries the residual.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical tolerances. `validation` is used when checking user-supplied
/// objects, `construction` when checking objects we built ourselves.
struct Tolerances {
    double validation = 1e-10;
    double construction = 1e-12;
};

inline Tolerances& tolerances() {
    static Tolerances tol;
    return tol;
}

/// Upper bound on any total Hilbert-space dimension we are willing to
/// allocate densely. Read from WAYLAB_MAX_DIM, default 4096.
inline std::size_t max_total_dim() {
    if (const char* env = std::getenv("WAYLAB_MAX_DIM")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    return 4096;
}

// ---------------------------------------------------------------------------
// small helpers

inline ComplexMatrix identity(Eigen::Index dim) { return ComplexMatrix::Identity(dim, dim); }

inline ComplexMatrix adjoint(const ComplexMatrix& a) { return a.adjoint(); }

inline bool all_finite(const ComplexMatrix& a) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const cplx z = a.data()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

inline void require_square(const ComplexMatrix& a, const char* what) {
    if (a.rows() != a.cols() || a.rows() == 0)
        throw DimensionError(std::string(what) + ": expected a nonempty square matrix, got " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
}

inline void require_same_square(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
    require_square(a, what);
    require_square(b, what);
    if (a.rows() != b.rows())
        throw DimensionError(std::string(what) + ": dimension mismatch " + std::to_string(a.rows()) +
                             " vs " + std::to_string(b.rows()));
}

/// Largest absolute entry of a - a^*.
inline double hermiticity_residual(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) return INFINITY;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix& a, double tol = tolerances().validation) {
    return a.rows() == a.cols() && hermiticity_residual(a) <= tol;
}

// ---------------------------------------------------------------------------
// operations

/// Kronecker product with leg order (a, b).
inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline ComplexVector tensor(const ComplexVector& a, const ComplexVector& b) {
    ComplexVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

/// Fold of `tensor` over a list, leftmost factor first.
inline ComplexMatrix tensor_all(std::span<const ComplexMatrix> factors) {
    if (factors.empty()) return identity(1);
    ComplexMatrix out = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i) out = tensor(out, factors[i]);
    return out;
}

inline ComplexMatrix tensor_all(std::initializer_list<ComplexMatrix> factors) {
    return tensor_all(std::span<const ComplexMatrix>(factors.begin(), factors.size()));
}

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_square(a, b, "commutator");
    return a * b - b * a;
}

/// Operator norm: largest singular value.
inline double op_norm(const ComplexMatrix& a) {
    if (a.size() == 0) return 0.0;
    if (a.rows() == 1 || a.cols() == 1) return a.norm();
    Eigen::BDCSVD<ComplexMatrix> svd(a);
    return svd.singularValues()(0);
}

/// Spectral decomposition of a self-adjoint matrix.
struct HermEig {
    RealVector values;     // ascending
    ComplexMatrix vectors; // orthonormal columns
};

inline HermEig herm_eig(const ComplexMatrix& a, double tol = tolerances().validation) {
    require_square(a, "herm_eig");
    const double res = hermiticity_residual(a);
    if (res > tol)
        throw ValidationError("herm_eig: input is not self-adjoint (residual " + std::to_string(res) +
                              ")");
    // symmetrise so the solver only ever sees an exactly Hermitian matrix
    const ComplexMatrix h = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    if (es.info() != Eigen::Success) throw std::runtime_error("herm_eig: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

/// exp(i t h) for self-adjoint h, via the spectral decomposition.
inline ComplexMatrix mat_exp_i(const ComplexMatrix& h, double t) {
    const HermEig eig = herm_eig(h);
    ComplexVector phases(eig.values.size());
    for (Eigen::Index k = 0; k < phases.size(); ++k)
        phases(k) = std::polar(1.0, t * eig.values(k));
    return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

/// Applies f to the spectrum of a self-adjoint matrix.
template <typename F>
ComplexMatrix herm_function(const ComplexMatrix& h, F&& f) {
    const HermEig eig = herm_eig(h);
    ComplexVector fv(eig.values.size());
    for (Eigen::Index k = 0; k < fv.size(); ++k) fv(k) = f(eig.values(k));
    return eig.vectors * fv.asDiagonal() * eig.vectors.adjoint();
}

/// Positive square root of a positive semidefinite matrix; small negative
/// eigenvalues from rounding are clamped to zero.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& a) {
    return herm_function(a, [](double x) { return cplx(std::sqrt(std::max(x, 0.0)), 0.0); });
}

inline double min_eigenvalue(const ComplexMatrix& a) { return herm_eig(a).values(0); }

// ---------------------------------------------------------------------------
// domain types

/// Ordered tensor-leg dimensions. Leg 0 is the leftmost Kronecker factor.
class CompositeSpace {
public:
    CompositeSpace() = default;
    explicit CompositeSpace(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
        if (dims_.empty()) throw DimensionError("CompositeSpace: no factors");
        for (auto d : dims_)
            if (d == 0) throw DimensionError("CompositeSpace: zero-dimensional factor");
    }
    CompositeSpace(std::initializer_list<std::size_t> dims)
        : CompositeSpace(std::vector<std::size_t>(dims)) {}

    const std::vector<std::size_t>& factor_dims() const noexcept { return dims_; }
    std::size_t legs() const noexcept { return dims_.size(); }
    std::size_t dim(std::size_t leg) const { return dims_.at(leg); }
    std::size_t total_dim() const noexcept {
        return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>{});
    }

private:
    std::vector<std::size_t> dims_;
};

/// Unit vector in C^dim.
class StateVector {
public:
    StateVector() = default;
    explicit StateVector(ComplexVector amplitudes, double tol = tolerances().construction)
        : amp_(std::move(amplitudes)) {
        if (amp_.size() == 0) throw DimensionError("StateVector: empty");
        const double nrm = amp_.norm();
        if (!std::isfinite(nrm) || std::abs(nrm - 1.0) > tol)
            throw ValidationError("StateVector: norm " + std::to_string(nrm) + " is not 1");
    }

    /// Normalises `v`; throws on the zero vector.
    static StateVector normalised(const ComplexVector& v) {
        const double nrm = v.norm();
        if (!(nrm > 0.0) || !std::isfinite(nrm)) throw ValidationError("StateVector: zero vector");
        return StateVector(v / nrm);
    }

    static StateVector basis(std::size_t dim, std::size_t index) {
        if (index >= dim) throw DimensionError("StateVector::basis: index out of range");
        ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
        v(static_cast<Eigen::Index>(index)) = 1.0;
        return StateVector(std::move(v));
    }

    std::size_t dim() const noexcept { return static_cast<std::size_t>(amp_.size()); }
    const ComplexVector& amplitudes() const noexcept { return amp_; }
    ComplexMatrix projector() const { return amp_ * amp_.adjoint(); }

    cplx expect(const ComplexMatrix& op) const {
        if (op.rows() != amp_.size() || op.cols() != amp_.size())
            throw DimensionError("StateVector::expect: dimension mismatch");
        return amp_.dot(op * amp_);
    }

private:
    ComplexVector amp_;
};

inline StateVector tensor(const StateVector& a, const StateVector& b) {
    return StateVector(tensor(a.amplitudes(), b.amplitudes()));
}

/// Self-adjoint, positive, unit-trace matrix.
class DensityOperator {
public:
    DensityOperator() = default;
    explicit DensityOperator(ComplexMatrix m, double tol = tolerances().construction)
        : m_(std::move(m)) {
        require_square(m_, "DensityOperator");
        if (!all_finite(m_)) throw ValidationError("DensityOperator: non-finite entry");
        const double herm = hermiticity_residual(m_);
        if (herm > tol)
            throw ValidationError("DensityOperator: not self-adjoint (residual " +
                                  std::to_string(herm) + ")");
        const double tr_err = std::abs(m_.trace() - cplx(1.0, 0.0));
        if (tr_err > tol)
            throw ValidationError("DensityOperator: trace differs from 1 by " +
                                  std::to_string(tr_err));
        const double lo = min_eigenvalue(m_);
        if (lo < -tol)
            throw ValidationError("DensityOperator: negative eigenvalue " + std::to_string(lo));
    }

    explicit DensityOperator(const StateVector& psi) : m_(psi.projector()) {}

    std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    const ComplexMatrix& matrix() const noexcept { return m_; }

private:
    ComplexMatrix m_;
};

/// Reduced state on leg `keep` of `space`.
inline ComplexMatrix partial_trace(const ComplexMatrix& rho, const CompositeSpace& space,
                                   std::size_t keep) {
    require_square(rho, "partial_trace");
    if (static_cast<std::size_t>(rho.rows()) != space.total_dim())
        throw DimensionError("partial_trace: operator dimension " + std::to_string(rho.rows()) +
                             " does not match composite dimension " +
                             std::to_string(space.total_dim()));
    if (keep >= space.legs()) throw DimensionError("partial_trace: leg index out of range");

    std::size_t before = 1, after = 1;
    for (std::size_t l = 0; l < keep; ++l) before *= space.dim(l);
    for (std::size_t l = keep + 1; l < space.legs(); ++l) after *= space.dim(l);
    const auto d = static_cast<Eigen::Index>(space.dim(keep));
    const auto A = static_cast<Eigen::Index>(after);
    const auto B = static_cast<Eigen::Index>(before);

    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (Eigen::Index b = 0; b < B; ++b)
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) {
                cplx acc = 0.0;
                for (Eigen::Index a = 0; a < A; ++a)
                    acc += rho((b * d + i) * A + a, (b * d + j) * A + a);
                out(i, j) += acc;
            }
    return out;
}

inline DensityOperator partial_trace(const DensityOperator& rho, const CompositeSpace& space,
                                     std::size_t keep) {
    return DensityOperator(partial_trace(rho.matrix(), space, keep), tolerances().validation);
}

} // namespace waylab
