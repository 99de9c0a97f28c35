// relfr.hpp
// Relativisation with respect to a quantum reference frame, for the finite
// cyclic group Z_N:
//
//   yen(A) = Σ_k U_S(k) A U_S(k)^* ⊗ F(k),
//
// where F is a covariant POVM on the reference. Includes localising
// reference states, the restricted map Γ_η ∘ yen, and a square-root
// measurement scheme for relational observables.

#pragma once

#include "obs.hpp"
#include "qcore.hpp"
#include "random.hpp"
#include "scheme.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace waylab {

struct CyclicGroup {
    std::size_t order = 1;

    explicit CyclicGroup(std::size_t n) : order(n) {
        if (n == 0) throw ValidationError("CyclicGroup: order must be positive");
    }
    std::size_t compose(std::size_t j, std::size_t k) const { return (j + k) % order; }
    std::size_t inverse(std::size_t k) const { return (order - k % order) % order; }
};

/// Unitary representation k ↦ exp(2πi k (L − c) / N) of Z_N. The constant
/// c is the fractional part of the spectrum of L, and the shifted spectrum
/// must be integral so that U(N) = 1.
class Representation {
public:
    Representation(CyclicGroup group, ComplexMatrix generator, double tol = 1e-9)
        : group_(group), gen_(std::move(generator)) {
        const HermEig eig = herm_eig(gen_);
        const double lo = eig.values(0);
        shift_ = lo - std::floor(lo + 0.5);
        for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
            const double v = eig.values(i) - shift_;
            if (std::abs(v - std::round(v)) > tol)
                throw ValidationError("Representation: generator spectrum is not integral up to a common "
                                      "shift (eigenvalue " + std::to_string(eig.values(i)) + ")");
        }
        const auto d = gen_.rows();
        units_.reserve(group_.order);
        for (std::size_t k = 0; k < group_.order; ++k) {
            ComplexVector ph(d);
            for (Eigen::Index i = 0; i < d; ++i)
                ph(i) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) *
                                            std::round(eig.values(i) - shift_) /
                                            static_cast<double>(group_.order));
            units_.push_back(eig.vectors * ph.asDiagonal() * eig.vectors.adjoint());
        }
    }

    const CyclicGroup& group() const noexcept { return group_; }
    std::size_t order() const noexcept { return group_.order; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(gen_.rows()); }
    const ComplexMatrix& generator() const noexcept { return gen_; }
    double shift() const noexcept { return shift_; }
    const ComplexMatrix& unitary(std::size_t k) const { return units_.at(k % group_.order); }

    /// max over j,k of ‖U(j)U(k) − U(j+k)‖, plus ‖U(N) − 1‖ folded in.
    double homomorphism_residual() const {
        double worst = 0.0;
        for (std::size_t j = 0; j < order(); ++j)
            for (std::size_t k = 0; k < order(); ++k)
                worst = std::max(worst, op_norm(unitary(j) * unitary(k) - unitary(group_.compose(j, k))));
        return worst;
    }

private:
    CyclicGroup group_;
    ComplexMatrix gen_;
    double shift_ = 0.0;
    std::vector<ComplexMatrix> units_;
};

/// POVM on Z_N (outcome k ↔ group element k) covariant under `rep`:
/// U_R(k) F(j) U_R(k)^* = F(j + k).
class CovariantObservable {
public:
    CovariantObservable(Representation rep, DiscreteObservable obs, double tol = 1e-9)
        : rep_(std::move(rep)), obs_(std::move(obs)) {
        if (obs_.size() != rep_.order())
            throw DimensionError("CovariantObservable: outcome count must equal the group order");
        if (obs_.dim() != rep_.dim())
            throw DimensionError("CovariantObservable: observable and representation dimensions differ");
        const PovmReport pr = validate_povm(obs_);
        if (!pr.ok) throw ValidationError("CovariantObservable: not a valid POVM");
        const double cov = covariance_defect();
        if (cov > tol)
            throw ValidationError("CovariantObservable: covariance defect " + std::to_string(cov));
    }

    const Representation& rep() const noexcept { return rep_; }
    const DiscreteObservable& obs() const noexcept { return obs_; }
    const ComplexMatrix& effect(std::size_t k) const { return obs_.effect(k % rep_.order()); }
    std::size_t order() const noexcept { return rep_.order(); }
    std::size_t dim() const noexcept { return rep_.dim(); }

    double covariance_defect() const {
        double worst = 0.0;
        const std::size_t n = rep_.order();
        for (std::size_t k = 0; k < n; ++k) {
            const ComplexMatrix& u = rep_.unitary(k);
            for (std::size_t j = 0; j < n; ++j)
                worst = std::max(worst, op_norm(u * obs_.effect(j) * u.adjoint() - obs_.effect((j + k) % n)));
        }
        return worst;
    }

private:
    Representation rep_;
    DiscreteObservable obs_;
};

/// F_μ(k) = (1 − μ) F(k) + μ 1/N: the canonical covariant unsharpening.
inline CovariantObservable unsharp_reference(const CovariantObservable& f, double mu) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw ValidationError("unsharp_reference: mu must lie in [0,1]");
    const auto d = static_cast<Eigen::Index>(f.dim());
    const double n = static_cast<double>(f.order());
    std::vector<ComplexMatrix> effects;
    for (std::size_t k = 0; k < f.order(); ++k)
        effects.push_back((1.0 - mu) * f.effect(k) + (mu / n) * identity(d));
    return CovariantObservable(f.rep(), DiscreteObservable(f.obs().outcomes(), std::move(effects)));
}

namespace detail {
inline void check_group(const Representation& rep_s, const CovariantObservable& f) {
    if (rep_s.order() != f.order()) throw ValidationError("yen: system and reference groups differ");
}
} // namespace detail

inline ComplexMatrix yen(const ComplexMatrix& a, const Representation& rep_s, const CovariantObservable& f) {
    detail::check_group(rep_s, f);
    if (static_cast<std::size_t>(a.rows()) != rep_s.dim() || a.cols() != a.rows())
        throw DimensionError("yen: operator does not act on the system space");
    const auto ds = static_cast<Eigen::Index>(rep_s.dim());
    const auto dr = static_cast<Eigen::Index>(f.dim());
    ComplexMatrix out = ComplexMatrix::Zero(ds * dr, ds * dr);
    for (std::size_t k = 0; k < f.order(); ++k) {
        const ComplexMatrix& u = rep_s.unitary(k);
        out += tensor(u * a * u.adjoint(), f.effect(k));
    }
    return out;
}

inline DiscreteObservable yen_povm(const DiscreteObservable& e, const Representation& rep_s,
                                   const CovariantObservable& f) {
    std::vector<ComplexMatrix> effects;
    effects.reserve(e.size());
    for (const auto& eff : e.effects()) effects.push_back(yen(eff, rep_s, f));
    return DiscreteObservable(e.outcomes(), std::move(effects));
}

/// max_k ‖(U_S(k)⊗U_R(k)) X (U_S(k)⊗U_R(k))^* − X‖.
inline double invariance_defect(const ComplexMatrix& op_sr, const Representation& rep_s,
                                const Representation& rep_r) {
    if (rep_s.order() != rep_r.order()) throw ValidationError("invariance_defect: group mismatch");
    if (static_cast<std::size_t>(op_sr.rows()) != rep_s.dim() * rep_r.dim())
        throw DimensionError("invariance_defect: operator does not act on S⊗R");
    double worst = 0.0;
    for (std::size_t k = 0; k < rep_s.order(); ++k) {
        const ComplexMatrix u = tensor(rep_s.unitary(k), rep_r.unitary(k));
        worst = std::max(worst, op_norm(u * op_sr * u.adjoint() - op_sr));
    }
    return worst;
}

inline double homomorphism_defect(const ComplexMatrix& a, const ComplexMatrix& b, const Representation& rep_s,
                                  const CovariantObservable& f) {
    return op_norm(yen(a * b, rep_s, f) - yen(a, rep_s, f) * yen(b, rep_s, f));
}

/// Distribution k ↦ ⟨η|F(k)|η⟩.
inline std::vector<double> reference_weights(const CovariantObservable& f, const StateVector& eta) {
    if (eta.dim() != f.dim()) throw DimensionError("reference_weights: state dimension mismatch");
    std::vector<double> w(f.order());
    for (std::size_t k = 0; k < f.order(); ++k) w[k] = std::max(0.0, eta.expect(f.effect(k)).real());
    return w;
}

/// Γ_η ∘ yen: Σ_k ⟨η|F(k)|η⟩ U_S(k) a U_S(k)^*.
inline ComplexMatrix restricted_yen(const ComplexMatrix& a, const Representation& rep_s,
                                    const CovariantObservable& f, const StateVector& eta) {
    detail::check_group(rep_s, f);
    const std::vector<double> w = reference_weights(f, eta);
    ComplexMatrix out = ComplexMatrix::Zero(a.rows(), a.cols());
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k] == 0.0) continue;
        const ComplexMatrix& u = rep_s.unitary(k);
        out += w[k] * (u * a * u.adjoint());
    }
    return out;
}

inline DiscreteObservable restricted_yen_povm(const DiscreteObservable& e, const Representation& rep_s,
                                              const CovariantObservable& f, const StateVector& eta) {
    std::vector<ComplexMatrix> effects;
    effects.reserve(e.size());
    for (const auto& eff : e.effects()) effects.push_back(restricted_yen(eff, rep_s, f, eta));
    return DiscreteObservable(e.outcomes(), std::move(effects));
}

// ---------------------------------------------------------------------------
// localisation

/// Supports of size `budget` among `count` eigenspaces, windows first
/// (contiguous in eigenvalue order, non-wrapping ones first), then every other
/// subset when there are at most `max_subsets` of them.
inline std::vector<std::vector<std::size_t>> candidate_supports(std::size_t count, std::size_t budget,
                                                                std::size_t max_subsets = 5000) {
    std::vector<std::vector<std::size_t>> out;
    if (budget == 0 || count == 0) return out;
    budget = std::min(budget, count);
    if (budget == count) {
        std::vector<std::size_t> all(count);
        for (std::size_t i = 0; i < count; ++i) all[i] = i;
        out.push_back(std::move(all));
        return out;
    }
    for (std::size_t s = 0; s < count; ++s) {
        std::vector<std::size_t> w;
        for (std::size_t k = 0; k < budget; ++k) w.push_back((s + k) % count);
        std::sort(w.begin(), w.end());
        out.push_back(std::move(w));
    }
    // binomial, saturating
    double combos = 1.0;
    for (std::size_t k = 0; k < budget; ++k)
        combos = combos * static_cast<double>(count - k) / static_cast<double>(k + 1);
    if (combos > static_cast<double>(max_subsets)) return out;

    std::vector<std::size_t> idx(budget);
    for (std::size_t i = 0; i < budget; ++i) idx[i] = i;
    while (true) {
        if (std::find(out.begin(), out.end(), idx) == out.end()) out.push_back(idx);
        std::size_t i = budget;
        while (i > 0 && idx[i - 1] == count - budget + (i - 1)) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < budget; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

/// Orthonormal basis of the span of the selected eigenspaces.
inline ComplexMatrix support_basis(const Eigenspaces& es, const std::vector<std::size_t>& support) {
    Eigen::Index cols = 0;
    for (auto s : support) cols += es.bases[s].cols();
    ComplexMatrix b(es.bases.front().rows(), cols);
    Eigen::Index c = 0;
    for (auto s : support) {
        b.middleCols(c, es.bases[s].cols()) = es.bases[s];
        c += es.bases[s].cols();
    }
    return b;
}

struct LocalisedState {
    StateVector state;
    double probability = 0.0;          // ⟨η|F(at)|η⟩
    std::vector<std::size_t> support;  // eigenspace indices of the reference generator
};

/// The state maximising ⟨η|F(at)|η⟩ among states supported on at most
/// `budget` eigenspaces of the reference generator (nullopt = unlimited).
inline LocalisedState localised_state_detail(const CovariantObservable& f, std::size_t at,
                                             std::optional<std::size_t> budget) {
    const Eigenspaces es = eigenspaces(f.rep().generator());
    const std::size_t count = es.bases.size();
    if (budget && *budget == 0) throw ValidationError("localised_state: budget must be at least 1");
    if (budget && *budget > f.dim())
        throw ValidationError("localised_state: budget exceeds the reference dimension");
    const std::size_t b = budget ? std::min(*budget, count) : count;
    const ComplexMatrix& eff = f.effect(at);

    std::optional<LocalisedState> best;
    for (const auto& support : candidate_supports(count, b)) {
        const ComplexMatrix basis = support_basis(es, support);
        const ComplexMatrix reduced = basis.adjoint() * eff * basis;
        const HermEig eig = herm_eig(0.5 * (reduced + reduced.adjoint()));
        const Eigen::Index top = eig.values.size() - 1;
        const double p = eig.values(top);
        if (!best || p > best->probability + 1e-12) {
            ComplexVector v = basis * eig.vectors.col(top);
            best = LocalisedState{StateVector::normalised(v), p, support};
        }
    }
    return *best;
}

inline StateVector localised_state(const CovariantObservable& f, std::size_t at,
                                   std::optional<std::size_t> budget) {
    return localised_state_detail(f, at, budget).state;
}

// ---------------------------------------------------------------------------
// relational measurement

/// Square-root (Lüders-type) scheme for a POVM on S⊗R: pointer C^K with
/// K = outcome count, ψ ⊗ e₀ ↦ Σ_x √E(x) ψ ⊗ e_x, completed to a unitary by
/// an orthonormal extension. Only the PRC (and repeatability for PVMs) is
/// guaranteed; the completion is not chosen to respect any symmetry.
inline MeasurementScheme relational_scheme(const DiscreteObservable& e_tilde) {
    const PovmReport pr = validate_povm(e_tilde);
    if (!pr.ok) throw ValidationError("relational_scheme: input is not a valid POVM");
    const auto d = static_cast<Eigen::Index>(e_tilde.dim());
    const auto k = static_cast<Eigen::Index>(e_tilde.size());
    if (static_cast<std::size_t>(d * k) > max_total_dim())
        throw DimensionError("relational_scheme: total dimension " + std::to_string(d * k) +
                             " exceeds the configured maximum " + std::to_string(max_total_dim()));

    ComplexMatrix w = ComplexMatrix::Zero(d * k, d);
    for (Eigen::Index x = 0; x < k; ++x) {
        const ComplexMatrix root = psd_sqrt(e_tilde.effect(static_cast<std::size_t>(x)));
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) w(i * k + x, j) = root(i, j);
    }
    ComplexMatrix u(d * k, d * k);
    if (k == 1) {
        u = w;
    } else {
        Eigen::HouseholderQR<ComplexMatrix> qr(w);
        const ComplexMatrix q = qr.householderQ() * identity(d * k);
        Eigen::Index next = d; // complement columns of q
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index a = 0; a < k; ++a) {
                if (a == 0)
                    u.col(j * k) = w.col(j);
                else
                    u.col(j * k + a) = q.col(next++);
            }
    }
    std::vector<std::string> relabel = e_tilde.outcomes().labels();
    BasisPvm pointer = BasisPvm::computational(e_tilde.outcomes());
    return MeasurementScheme(static_cast<std::size_t>(d), static_cast<std::size_t>(k), Coupling(std::move(u)),
                             std::move(pointer), StateVector::basis(static_cast<std::size_t>(k), 0),
                             std::move(relabel));
}

struct LocalisationRow {
    std::optional<std::size_t> budget; // nullopt = unlimited
    double probability = 0.0;
    double residual = 0.0;
};

/// For each budget, how far Γ_η ∘ yen ∘ e is from e when η is the best
/// reference state localised at the group identity.
inline std::vector<LocalisationRow> high_localisation_audit(const DiscreteObservable& e,
                                                            const Representation& rep_s,
                                                            const CovariantObservable& f,
                                                            const std::vector<std::optional<std::size_t>>& budgets) {
    std::vector<LocalisationRow> rows;
    for (const auto& b : budgets) {
        const LocalisedState ls = localised_state_detail(f, 0, b);
        const DiscreteObservable approx = restricted_yen_povm(e, rep_s, f, ls.state);
        rows.push_back({b, ls.probability, observable_distance(approx, e)});
    }
    return rows;
}

} // namespace waylab
