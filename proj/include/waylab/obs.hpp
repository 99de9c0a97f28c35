// obs.hpp
// Discrete observables (POVMs with a numeric value map), Born statistics,
// cyclic smearing, spread measures, and observable comparison.

#pragma once

#include "qcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace waylab {

enum class Geometry { linear, cyclic };

/// Labelled outcomes with a physical value per label.
class OutcomeSet {
public:
    OutcomeSet() = default;
    OutcomeSet(std::vector<std::string> labels, std::vector<double> values,
               Geometry geometry = Geometry::linear)
        : labels_(std::move(labels)), values_(std::move(values)), geometry_(geometry) {
        if (labels_.empty()) throw DimensionError("OutcomeSet: no outcomes");
        if (labels_.size() != values_.size())
            throw DimensionError("OutcomeSet: label/value count mismatch");
        std::unordered_set<std::string> seen;
        for (const auto& l : labels_)
            if (!seen.insert(l).second) throw ValidationError("OutcomeSet: duplicate label '" + l + "'");
        for (double v : values_)
            if (!std::isfinite(v)) throw ValidationError("OutcomeSet: non-finite value");
    }

    /// Z_n with labels "0".."n-1" and values taken from the representatives
    /// in (-n/2, n/2].
    static OutcomeSet cyclic_lattice(std::size_t n) {
        std::vector<std::string> labels;
        std::vector<double> values;
        for (std::size_t k = 0; k < n; ++k) {
            labels.push_back(std::to_string(k));
            values.push_back(static_cast<double>(centered_rep(static_cast<long>(k), n)));
        }
        return OutcomeSet(std::move(labels), std::move(values), Geometry::cyclic);
    }

    /// Representative of k mod n in (-n/2, n/2].
    static long centered_rep(long k, std::size_t n) {
        const long nn = static_cast<long>(n);
        long r = ((k % nn) + nn) % nn;
        if (2 * r > nn) r -= nn;
        return r;
    }

    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::vector<double>& values() const noexcept { return values_; }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    double value(std::size_t i) const { return values_.at(i); }
    Geometry geometry() const noexcept { return geometry_; }
    bool cyclic() const noexcept { return geometry_ == Geometry::cyclic; }

    std::optional<std::size_t> index_of(const std::string& label) const {
        auto it = std::find(labels_.begin(), labels_.end(), label);
        if (it == labels_.end()) return std::nullopt;
        return static_cast<std::size_t>(it - labels_.begin());
    }

    bool operator==(const OutcomeSet& o) const {
        return labels_ == o.labels_ && values_ == o.values_ && geometry_ == o.geometry_;
    }

private:
    std::vector<std::string> labels_;
    std::vector<double> values_;
    Geometry geometry_ = Geometry::linear;
};

/// A POVM: one effect per outcome, all on a common dimension. Construction
/// checks shapes only; use validate_povm for the numerical conditions.
class DiscreteObservable {
public:
    DiscreteObservable() = default;
    DiscreteObservable(OutcomeSet outcomes, std::vector<ComplexMatrix> effects)
        : outcomes_(std::move(outcomes)), effects_(std::move(effects)) {
        if (effects_.size() != outcomes_.size())
            throw DimensionError("DiscreteObservable: " + std::to_string(effects_.size()) +
                                 " effects for " + std::to_string(outcomes_.size()) + " outcomes");
        for (const auto& e : effects_) {
            require_square(e, "DiscreteObservable");
            if (e.rows() != effects_.front().rows())
                throw DimensionError("DiscreteObservable: effects on differing dimensions");
            if (!all_finite(e)) throw ValidationError("DiscreteObservable: non-finite effect entry");
        }
    }

    const OutcomeSet& outcomes() const noexcept { return outcomes_; }
    const std::vector<ComplexMatrix>& effects() const noexcept { return effects_; }
    const ComplexMatrix& effect(std::size_t i) const { return effects_.at(i); }
    std::size_t size() const noexcept { return effects_.size(); }
    std::size_t dim() const noexcept {
        return effects_.empty() ? 0 : static_cast<std::size_t>(effects_.front().rows());
    }

    /// Σ value·effect.
    ComplexMatrix first_moment() const {
        ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim()),
                                              static_cast<Eigen::Index>(dim()));
        for (std::size_t i = 0; i < size(); ++i) m += outcomes_.value(i) * effects_[i];
        return m;
    }

private:
    OutcomeSet outcomes_;
    std::vector<ComplexMatrix> effects_;
};

/// Probability weights over an outcome set.
class ProbDist {
public:
    ProbDist() = default;
    ProbDist(OutcomeSet outcomes, std::vector<double> weights, double tol = 1e-12)
        : outcomes_(std::move(outcomes)), weights_(std::move(weights)) {
        if (weights_.size() != outcomes_.size())
            throw DimensionError("ProbDist: weight count does not match outcome count");
        double sum = 0.0;
        for (double w : weights_) {
            if (!(w >= 0.0)) throw ValidationError("ProbDist: negative or NaN weight");
            sum += w;
        }
        if (std::abs(sum - 1.0) > tol)
            throw ValidationError("ProbDist: weights sum to " + std::to_string(sum));
    }

    /// Uniform distribution over the given outcomes.
    static ProbDist uniform(OutcomeSet outcomes) {
        const std::size_t n = outcomes.size();
        return ProbDist(std::move(outcomes), std::vector<double>(n, 1.0 / static_cast<double>(n)));
    }

    const OutcomeSet& outcomes() const noexcept { return outcomes_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    double weight(std::size_t i) const { return weights_.at(i); }
    std::size_t size() const noexcept { return weights_.size(); }

    double mean() const {
        double m = 0.0;
        for (std::size_t i = 0; i < size(); ++i) m += weights_[i] * outcomes_.value(i);
        return m;
    }

private:
    OutcomeSet outcomes_;
    std::vector<double> weights_;
};

// ---------------------------------------------------------------------------

struct PovmReport {
    double max_positivity_violation = 0.0; // max over effects of max(0, -λ_min)
    double max_hermiticity_residual = 0.0;
    double normalisation_residual = 0.0; // op_norm(Σ E - I)
    bool ok = false;
};

inline PovmReport validate_povm(const DiscreteObservable& obs, double tol = tolerances().validation) {
    PovmReport r;
    const auto d = static_cast<Eigen::Index>(obs.dim());
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (const auto& e : obs.effects()) {
        const double herm = hermiticity_residual(e);
        r.max_hermiticity_residual = std::max(r.max_hermiticity_residual, herm);
        const ComplexMatrix h = 0.5 * (e + e.adjoint());
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
        r.max_positivity_violation = std::max(r.max_positivity_violation, -es.eigenvalues()(0));
        sum += e;
    }
    r.normalisation_residual = op_norm(sum - identity(d));
    r.ok = r.max_positivity_violation <= tol && r.max_hermiticity_residual <= tol &&
           r.normalisation_residual <= tol;
    return r;
}

/// True when every effect is idempotent within tol (and the POVM is valid).
inline bool is_sharp(const DiscreteObservable& obs, double tol = tolerances().validation) {
    if (!validate_povm(obs, tol).ok) return false;
    for (const auto& e : obs.effects())
        if ((e * e - e).cwiseAbs().maxCoeff() > tol) return false;
    return true;
}

/// PVM of a self-adjoint matrix. Eigenvalues within merge_tol of the
/// previous cluster are merged; outcome order is ascending, labels are the
/// eigenvalue printed with 12 significant digits.
inline DiscreteObservable spectral_pvm(const ComplexMatrix& a, double merge_tol = 1e-8) {
    const HermEig eig = herm_eig(a);
    std::vector<std::vector<Eigen::Index>> clusters;
    std::vector<double> values;
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
        const double v = eig.values(k);
        if (!clusters.empty() && std::abs(v - eig.values(clusters.back().front())) <= merge_tol) {
            clusters.back().push_back(k);
        } else {
            clusters.push_back({k});
        }
    }
    std::vector<std::string> labels;
    std::vector<ComplexMatrix> effects;
    for (const auto& c : clusters) {
        double mean = 0.0;
        ComplexMatrix p = ComplexMatrix::Zero(a.rows(), a.cols());
        for (auto k : c) {
            mean += eig.values(k);
            p += eig.vectors.col(k) * eig.vectors.col(k).adjoint();
        }
        mean /= static_cast<double>(c.size());
        values.push_back(mean);
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12g", std::abs(mean) < 1e-12 ? 0.0 : mean);
        labels.emplace_back(buf);
        effects.push_back(std::move(p));
    }
    return DiscreteObservable(OutcomeSet(std::move(labels), std::move(values)), std::move(effects));
}

/// Born-rule distribution tr[ρE(x)]. Negatives within -1e-12 clamp to 0.
inline ProbDist born(const ComplexMatrix& rho, const DiscreteObservable& obs) {
    if (rho.rows() != static_cast<Eigen::Index>(obs.dim()) || rho.cols() != rho.rows())
        throw DimensionError("born: state dimension " + std::to_string(rho.rows()) +
                             " vs observable dimension " + std::to_string(obs.dim()));
    std::vector<double> w;
    w.reserve(obs.size());
    for (const auto& e : obs.effects()) {
        double p = (rho * e).trace().real();
        if (p < 0.0 && p >= -1e-12) p = 0.0;
        if (p < 0.0) throw ValidationError("born: negative probability " + std::to_string(p));
        w.push_back(p);
    }
    return ProbDist(obs.outcomes(), std::move(w), 1e-10);
}

inline ProbDist born(const DensityOperator& rho, const DiscreteObservable& obs) {
    return born(rho.matrix(), obs);
}

inline ProbDist born(const StateVector& psi, const DiscreteObservable& obs) {
    return born(psi.projector(), obs);
}

/// Cyclic convolution of a sharp observable with a kernel:
/// effect(x) = Σ_y kernel(x ⊖ y) P(y).
inline DiscreteObservable smear_cyclic(const DiscreteObservable& pvm, const ProbDist& kernel) {
    const std::size_t n = pvm.size();
    if (!pvm.outcomes().cyclic() || !kernel.outcomes().cyclic())
        throw ValidationError("smear_cyclic: both observable and kernel need cyclic geometry");
    if (kernel.size() != n)
        throw ValidationError("smear_cyclic: kernel has " + std::to_string(kernel.size()) +
                              " cells, observable has " + std::to_string(n));
    if (!is_sharp(pvm)) throw ValidationError("smear_cyclic: input observable is not sharp");
    const auto d = static_cast<Eigen::Index>(pvm.dim());
    std::vector<ComplexMatrix> effects(n, ComplexMatrix::Zero(d, d));
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            const double w = kernel.weight((x + n - y) % n);
            if (w != 0.0) effects[x] += w * pvm.effect(y);
        }
    return DiscreteObservable(pvm.outcomes(), std::move(effects));
}

/// Cyclic convolution of two distributions on the same Z_n.
inline ProbDist convolve_cyclic(const ProbDist& a, const ProbDist& b) {
    const std::size_t n = a.size();
    if (b.size() != n || !a.outcomes().cyclic() || !b.outcomes().cyclic())
        throw ValidationError("convolve_cyclic: need two cyclic distributions on the same Z_n");
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w[(i + j) % n] += a.weight(i) * b.weight(j);
    return ProbDist(a.outcomes(), std::move(w), 1e-10);
}

inline double variance(const ProbDist& d) {
    const double m = d.mean();
    double v = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double dx = d.outcomes().value(i) - m;
        v += d.weight(i) * dx * dx;
    }
    return v;
}

/// Smallest number of consecutive cells (cyclically consecutive for cyclic
/// geometry) carrying mass at least 1 - eps.
inline std::size_t overall_width(const ProbDist& d, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("overall_width: eps must be in (0,1)");
    const std::size_t n = d.size();
    const double target = 1.0 - eps - 1e-12;
    const bool cyc = d.outcomes().cyclic();
    for (std::size_t w = 1; w <= n; ++w) {
        const std::size_t starts = cyc ? n : n - w + 1;
        for (std::size_t s = 0; s < starts; ++s) {
            double mass = 0.0;
            for (std::size_t k = 0; k < w; ++k) mass += d.weight((s + k) % n);
            if (mass >= target) return w;
        }
    }
    return n;
}

/// max_x op_norm(e1(x) - e2(x)): the worst-case Born-probability gap over
/// all states and single outcomes.
inline double observable_distance(const DiscreteObservable& e1, const DiscreteObservable& e2) {
    if (e1.size() != e2.size() || e1.outcomes().labels() != e2.outcomes().labels())
        throw DimensionError("observable_distance: outcome sets differ");
    if (e1.dim() != e2.dim()) throw DimensionError("observable_distance: dimension mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < e1.size(); ++i)
        worst = std::max(worst, op_norm(e1.effect(i) - e2.effect(i)));
    return worst;
}

/// True iff every pair of effects commutes within tol.
inline bool compatible(const DiscreteObservable& e1, const DiscreteObservable& e2,
                       double tol = tolerances().validation) {
    if (e1.dim() != e2.dim()) throw DimensionError("compatible: dimension mismatch");
    for (const auto& a : e1.effects())
        for (const auto& b : e2.effects())
            if ((a * b - b * a).cwiseAbs().maxCoeff() > tol) return false;
    return true;
}

/// PVM from an orthonormal basis (columns) grouped by a partition of the
/// column indices. Every column must appear exactly once.
inline DiscreteObservable pvm_from_basis(const ComplexMatrix& basis,
                                         const std::vector<std::vector<std::size_t>>& partition,
                                         OutcomeSet outcomes) {
    require_square(basis, "pvm_from_basis");
    if (partition.size() != outcomes.size())
        throw DimensionError("pvm_from_basis: partition size does not match outcome count");
    std::vector<int> used(static_cast<std::size_t>(basis.cols()), 0);
    std::vector<ComplexMatrix> effects;
    effects.reserve(partition.size());
    for (const auto& block : partition) {
        ComplexMatrix p = ComplexMatrix::Zero(basis.rows(), basis.rows());
        for (auto c : block) {
            if (c >= used.size()) throw DimensionError("pvm_from_basis: column index out of range");
            ++used[c];
            p.noalias() += basis.col(static_cast<Eigen::Index>(c)) *
                           basis.col(static_cast<Eigen::Index>(c)).adjoint();
        }
        effects.push_back(std::move(p));
    }
    for (int u : used)
        if (u != 1) throw ValidationError("pvm_from_basis: partition must use every column exactly once");
    return DiscreteObservable(std::move(outcomes), std::move(effects));
}

/// Computational-basis PVM on C^n with the given outcome set (one basis
/// vector per outcome).
inline DiscreteObservable basis_pvm(OutcomeSet outcomes) {
    const std::size_t n = outcomes.size();
    std::vector<std::vector<std::size_t>> partition(n);
    for (std::size_t i = 0; i < n; ++i) partition[i] = {i};
    return pvm_from_basis(identity(static_cast<Eigen::Index>(n)), partition, std::move(outcomes));
}

} // namespace waylab
