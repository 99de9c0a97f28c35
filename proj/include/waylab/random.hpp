// random.hpp
// Seeded generators for states, Hermitian matrices, Haar unitaries, and
// unitaries that commute with a given self-adjoint operator.

#pragma once

#include "qcore.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace waylab {

using Rng = std::mt19937_64;

inline ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    ComplexMatrix g(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = n01(rng);
            const double im = n01(rng);
            g(i, j) = cplx(re, im);
        }
    return g;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the phase fix).
inline ComplexMatrix haar_unitary(Eigen::Index dim, Rng& rng) {
    const ComplexMatrix g = ginibre(dim, dim, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ() * identity(dim);
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < dim; ++k) {
        const cplx d = r(k, k);
        const double a = std::abs(d);
        if (a > 0.0) q.col(k) *= d / a;
    }
    return q;
}

inline StateVector random_state(Eigen::Index dim, Rng& rng) {
    return StateVector::normalised(ginibre(dim, 1, rng).col(0));
}

inline ComplexMatrix random_hermitian(Eigen::Index dim, Rng& rng) {
    const ComplexMatrix g = ginibre(dim, dim, rng);
    return 0.5 * (g + g.adjoint());
}

/// Random full-rank density operator (normalised Wishart).
inline DensityOperator random_density(Eigen::Index dim, Rng& rng) {
    const ComplexMatrix g = ginibre(dim, dim, rng);
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint());
    return DensityOperator(rho, 1e-10);
}

/// Eigenspaces of a self-adjoint matrix: eigenvalues within `merge_tol`
/// share a block. Returns one orthonormal column block per distinct value.
struct Eigenspaces {
    std::vector<double> values;
    std::vector<ComplexMatrix> bases;
};

inline Eigenspaces eigenspaces(const ComplexMatrix& h, double merge_tol = 1e-8) {
    const HermEig eig = herm_eig(h);
    Eigenspaces out;
    Eigen::Index start = 0;
    const Eigen::Index n = eig.values.size();
    for (Eigen::Index k = 1; k <= n; ++k) {
        if (k == n || std::abs(eig.values(k) - eig.values(start)) > merge_tol) {
            out.values.push_back(eig.values.segment(start, k - start).mean());
            out.bases.push_back(eig.vectors.middleCols(start, k - start));
            start = k;
        }
    }
    return out;
}

/// Unitary that commutes with h exactly by construction: Haar-random on each
/// eigenspace, identity across them.
inline ComplexMatrix random_commuting_unitary(const ComplexMatrix& h, Rng& rng, double merge_tol = 1e-8) {
    const Eigenspaces es = eigenspaces(h, merge_tol);
    ComplexMatrix u = ComplexMatrix::Zero(h.rows(), h.cols());
    for (const auto& b : es.bases) {
        const ComplexMatrix block = haar_unitary(b.cols(), rng);
        u.noalias() += b * block * b.adjoint();
    }
    return u;
}

/// Integer-valued diagonal generator with entries drawn from [lo, hi].
inline ComplexMatrix random_integer_diagonal(Eigen::Index dim, int lo, int hi, Rng& rng) {
    std::uniform_int_distribution<int> pick(lo, hi);
    ComplexMatrix d = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) d(i, i) = static_cast<double>(pick(rng));
    return d;
}

} // namespace waylab
