// scheme.hpp
// Measurement schemes ⟨H_A, U, Z, φ_A, f⟩ and their audits: the measured
// observable extracted from the probability reproducibility condition,
// repeatability, conservation, and the (weak) Yanase condition.
//
// Leg order is always (system, apparatus). A vector index on S⊗A is
// i * apparatus_dim + α.

#pragma once

#include "obs.hpp"
#include "qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace waylab {

/// Unitary on S⊗A, stored densely or, when it is diagonal in the product
/// basis, as a vector of phases. Large diagonal couplings (the four-register
/// lattice models) never need their n⁴×n⁴ matrix materialised.
class Coupling {
public:
    struct Dense {
        ComplexMatrix matrix;
    };
    struct Diagonal {
        ComplexVector phases;
    };

    Coupling() = default;
    explicit Coupling(ComplexMatrix u) : rep_(Dense{std::move(u)}) {
        require_square(std::get<Dense>(rep_).matrix, "Coupling");
    }
    static Coupling diagonal(ComplexVector phases) {
        Coupling c;
        c.rep_ = Diagonal{std::move(phases)};
        return c;
    }

    bool is_diagonal() const noexcept { return std::holds_alternative<Diagonal>(rep_); }
    const ComplexMatrix& dense_matrix() const { return std::get<Dense>(rep_).matrix; }
    const ComplexVector& phases() const { return std::get<Diagonal>(rep_).phases; }

    std::size_t dim() const {
        return is_diagonal() ? static_cast<std::size_t>(phases().size())
                             : static_cast<std::size_t>(dense_matrix().rows());
    }

    ComplexMatrix dense() const {
        if (!is_diagonal()) return dense_matrix();
        return phases().asDiagonal();
    }

    /// U · v for a block of column vectors.
    ComplexMatrix apply(const ComplexMatrix& v) const {
        if (is_diagonal()) return phases().asDiagonal() * v;
        return dense_matrix() * v;
    }

    /// U^* K U.
    ComplexMatrix conjugate(const ComplexMatrix& k) const {
        if (is_diagonal()) {
            const ComplexVector& d = phases();
            return d.conjugate().asDiagonal() * k * d.asDiagonal();
        }
        return dense_matrix().adjoint() * k * dense_matrix();
    }

    /// Largest deviation from unitarity.
    double unitarity_residual() const {
        if (is_diagonal()) {
            double worst = 0.0;
            for (Eigen::Index i = 0; i < phases().size(); ++i)
                worst = std::max(worst, std::abs(std::abs(phases()(i)) - 1.0));
            return worst;
        }
        const auto& u = dense_matrix();
        return op_norm(u.adjoint() * u - identity(u.rows()));
    }

    bool operator==(const Coupling& o) const {
        if (is_diagonal() != o.is_diagonal()) return false;
        return is_diagonal() ? phases() == o.phases() : dense_matrix() == o.dense_matrix();
    }

private:
    std::variant<Dense, Diagonal> rep_;
};

/// Sharp observable given as an orthonormal basis plus a partition of its
/// columns into outcomes.
class BasisPvm {
public:
    BasisPvm() = default;
    BasisPvm(ComplexMatrix basis, std::vector<std::vector<std::size_t>> partition, OutcomeSet outcomes,
             double tol = tolerances().validation)
        : basis_(std::move(basis)), partition_(std::move(partition)) {
        require_square(basis_, "BasisPvm");
        const double res = op_norm(basis_.adjoint() * basis_ - identity(basis_.rows()));
        if (res > tol)
            throw ValidationError("BasisPvm: basis is not orthonormal (residual " + std::to_string(res) +
                                  ")");
        obs_ = pvm_from_basis(basis_, partition_, std::move(outcomes));
    }

    /// Computational-basis PVM, one basis vector per outcome.
    static BasisPvm computational(OutcomeSet outcomes) {
        const std::size_t n = outcomes.size();
        std::vector<std::vector<std::size_t>> part(n);
        for (std::size_t i = 0; i < n; ++i) part[i] = {i};
        return BasisPvm(identity(static_cast<Eigen::Index>(n)), std::move(part), std::move(outcomes));
    }

    /// PVM of a self-adjoint matrix, ascending outcome order.
    static BasisPvm spectral(const ComplexMatrix& a, double merge_tol = 1e-8) {
        const HermEig eig = herm_eig(a);
        const DiscreteObservable pvm = spectral_pvm(a, merge_tol);
        std::vector<std::vector<std::size_t>> part;
        std::size_t k = 0;
        for (std::size_t c = 0; c < pvm.size(); ++c) {
            const auto rank = static_cast<std::size_t>(std::lround(pvm.effect(c).trace().real()));
            std::vector<std::size_t> block;
            for (std::size_t r = 0; r < rank; ++r) block.push_back(k++);
            part.push_back(std::move(block));
        }
        return BasisPvm(eig.vectors, std::move(part), pvm.outcomes());
    }

    /// Recover a basis from a sharp observable: the range of each projection.
    static BasisPvm from_observable(const DiscreteObservable& pvm) {
        if (!is_sharp(pvm)) throw ValidationError("BasisPvm: observable is not sharp");
        const auto d = static_cast<Eigen::Index>(pvm.dim());
        ComplexMatrix basis(d, d);
        std::vector<std::vector<std::size_t>> part;
        Eigen::Index k = 0;
        for (const auto& eff : pvm.effects()) {
            const HermEig eig = herm_eig(eff);
            std::vector<std::size_t> block;
            for (Eigen::Index i = 0; i < d; ++i)
                if (eig.values(i) > 0.5) {
                    if (k >= d) throw ValidationError("BasisPvm: projection ranks exceed the dimension");
                    basis.col(k) = eig.vectors.col(i);
                    block.push_back(static_cast<std::size_t>(k++));
                }
            part.push_back(std::move(block));
        }
        if (k != d) throw ValidationError("BasisPvm: projection ranks do not add up to the dimension");
        return BasisPvm(std::move(basis), std::move(part), pvm.outcomes());
    }

    const ComplexMatrix& basis() const noexcept { return basis_; }
    const std::vector<std::vector<std::size_t>>& partition() const noexcept { return partition_; }
    const DiscreteObservable& observable() const noexcept { return obs_; }
    const OutcomeSet& outcomes() const noexcept { return obs_.outcomes(); }
    std::size_t size() const noexcept { return obs_.size(); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(basis_.rows()); }
    const ComplexMatrix& effect(std::size_t i) const { return obs_.effect(i); }

private:
    ComplexMatrix basis_;
    std::vector<std::vector<std::size_t>> partition_;
    DiscreteObservable obs_;
};

/// The additive conserved quantity L = L_S ⊗ 1 + 1 ⊗ L_A. When `period` is
/// set the conservation law is the cyclic one, [U, exp(2πi L / period)] = 0.
struct ConservedPair {
    ComplexMatrix l_sys;
    ComplexMatrix l_app;
    std::optional<std::size_t> period;

    ConservedPair() = default;
    ConservedPair(ComplexMatrix ls, ComplexMatrix la, std::optional<std::size_t> per = std::nullopt)
        : l_sys(std::move(ls)), l_app(std::move(la)), period(per) {
        require_square(l_sys, "ConservedPair.l_sys");
        require_square(l_app, "ConservedPair.l_app");
        const double tol = tolerances().validation;
        if (hermiticity_residual(l_sys) > tol) throw ValidationError("ConservedPair: l_sys not self-adjoint");
        if (hermiticity_residual(l_app) > tol) throw ValidationError("ConservedPair: l_app not self-adjoint");
        if (period && *period == 0) throw ValidationError("ConservedPair: period must be positive");
    }

    ComplexMatrix total() const {
        return tensor(l_sys, identity(l_app.rows())) + tensor(identity(l_sys.rows()), l_app);
    }

    /// exp(2πi L_S / period) ⊗ exp(2πi L_A / period); only meaningful with a period.
    ComplexMatrix group_generator() const {
        const double t = 2.0 * std::numbers::pi / static_cast<double>(period.value());
        return tensor(mat_exp_i(l_sys, t), mat_exp_i(l_app, t));
    }
    ComplexMatrix app_group_generator() const {
        return mat_exp_i(l_app, 2.0 * std::numbers::pi / static_cast<double>(period.value()));
    }
};

/// ⟨system_dim, apparatus_dim, U, Z, φ_A, f⟩. The relabel map f sends each
/// pointer outcome (by index) to a target outcome label.
class MeasurementScheme {
public:
    MeasurementScheme() = default;
    MeasurementScheme(std::size_t system_dim, std::size_t apparatus_dim, Coupling coupling,
                      BasisPvm pointer, StateVector apparatus_state, std::vector<std::string> relabel,
                      double tol = tolerances().validation)
        : sys_(system_dim), app_(apparatus_dim), coupling_(std::move(coupling)),
          pointer_(std::move(pointer)), phi_(std::move(apparatus_state)), relabel_(std::move(relabel)) {
        if (sys_ == 0 || app_ == 0) throw DimensionError("MeasurementScheme: zero dimension");
        if (coupling_.dim() != sys_ * app_)
            throw DimensionError("MeasurementScheme: coupling dimension " + std::to_string(coupling_.dim()) +
                                 " != " + std::to_string(sys_) + "x" + std::to_string(app_));
        const double res = coupling_.unitarity_residual();
        if (!(res <= tol))
            throw ValidationError("MeasurementScheme: coupling is not unitary (residual " +
                                  std::to_string(res) + ")");
        if (pointer_.dim() != app_) throw DimensionError("MeasurementScheme: pointer dimension mismatch");
        if (phi_.dim() != app_) throw DimensionError("MeasurementScheme: apparatus state dimension mismatch");
        if (relabel_.size() != pointer_.size())
            throw DimensionError("MeasurementScheme: relabel must cover every pointer outcome");
    }

    std::size_t system_dim() const noexcept { return sys_; }
    std::size_t apparatus_dim() const noexcept { return app_; }
    const Coupling& coupling() const noexcept { return coupling_; }
    const BasisPvm& pointer() const noexcept { return pointer_; }
    const StateVector& apparatus_state() const noexcept { return phi_; }
    const std::vector<std::string>& relabel() const noexcept { return relabel_; }

    /// Target outcomes implied by the relabel map: distinct images in order
    /// of first appearance, valued by the first pointer outcome mapped there.
    OutcomeSet default_targets() const {
        std::vector<std::string> labels;
        std::vector<double> values;
        for (std::size_t x = 0; x < relabel_.size(); ++x)
            if (std::find(labels.begin(), labels.end(), relabel_[x]) == labels.end()) {
                labels.push_back(relabel_[x]);
                values.push_back(pointer_.outcomes().value(x));
            }
        return OutcomeSet(std::move(labels), std::move(values));
    }

    /// V_φ: ψ ↦ ψ ⊗ φ_A as a (s·a) × s matrix.
    ComplexMatrix embedding() const {
        const auto s = static_cast<Eigen::Index>(sys_);
        const auto a = static_cast<Eigen::Index>(app_);
        ComplexMatrix v = ComplexMatrix::Zero(s * a, s);
        for (Eigen::Index i = 0; i < s; ++i) v.block(i * a, i, a, 1) = phi_.amplitudes();
        return v;
    }

    /// U V_φ.
    ComplexMatrix evolved_embedding() const { return coupling_.apply(embedding()); }

private:
    std::size_t sys_ = 0;
    std::size_t app_ = 0;
    Coupling coupling_;
    BasisPvm pointer_;
    StateVector phi_;
    std::vector<std::string> relabel_;
};

namespace detail {

/// (A ⊗ B) applied to every column of w, columns living on C^s ⊗ C^a.
inline ComplexMatrix apply_product(const ComplexMatrix& a_sys, const ComplexMatrix& b_app,
                                   const ComplexMatrix& w, Eigen::Index s, Eigen::Index a) {
    ComplexMatrix out(w.rows(), w.cols());
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
        Eigen::Map<const ComplexMatrix> m(w.col(c).data(), a, s);
        Eigen::Map<ComplexMatrix> o(out.col(c).data(), a, s);
        o.noalias() = b_app * m * a_sys.transpose();
    }
    return out;
}

/// Pointer-basis coefficients of U V_φ: for system column j, an a×s block
/// C_j with C_j(β, i) = ⟨b_β| (U V_φ e_j)_{i,·}⟩. Returned side by side.
inline ComplexMatrix pointer_coefficients(const MeasurementScheme& m, const ComplexMatrix& w) {
    const auto s = static_cast<Eigen::Index>(m.system_dim());
    const auto a = static_cast<Eigen::Index>(m.apparatus_dim());
    Eigen::Map<const ComplexMatrix> wm(w.data(), a, s * s);
    return m.pointer().basis().adjoint() * wm;
}

inline std::vector<std::size_t> resolve_relabel(const MeasurementScheme& m, const OutcomeSet& targets) {
    std::vector<std::size_t> idx;
    idx.reserve(m.relabel().size());
    for (const auto& lbl : m.relabel()) {
        auto t = targets.index_of(lbl);
        if (!t) throw ValidationError("relabel target '" + lbl + "' is not among the target outcomes");
        idx.push_back(*t);
    }
    return idx;
}

} // namespace detail

// ---------------------------------------------------------------------------
// operations

/// Γ_σ(Λ): the unique operator on S with tr[ρ Γ_σ(Λ)] = tr[(ρ⊗σ) Λ] for all ρ.
inline ComplexMatrix restrict(const ComplexMatrix& lam, const ComplexMatrix& sigma) {
    require_square(lam, "restrict");
    require_square(sigma, "restrict");
    const Eigen::Index a = sigma.rows();
    if (lam.rows() % a != 0)
        throw DimensionError("restrict: operator dimension " + std::to_string(lam.rows()) +
                             " does not factor through " + std::to_string(a));
    const Eigen::Index s = lam.rows() / a;
    ComplexMatrix out(s, s);
    for (Eigen::Index i = 0; i < s; ++i)
        for (Eigen::Index j = 0; j < s; ++j) {
            // Σ_{αβ} Λ_{(i,α),(j,β)} σ_{βα} = tr[Λ_ij σ]
            out(i, j) = (lam.block(i * a, j * a, a, a) * sigma).trace();
        }
    return out;
}

inline ComplexMatrix restrict(const ComplexMatrix& lam, const DensityOperator& sigma) {
    return restrict(lam, sigma.matrix());
}

/// Γ_φ for a vector state: V_φ^* Λ V_φ.
inline ComplexMatrix restrict(const ComplexMatrix& lam, const StateVector& phi) {
    require_square(lam, "restrict");
    const auto a = static_cast<Eigen::Index>(phi.dim());
    if (lam.rows() % a != 0) throw DimensionError("restrict: dimension does not factor");
    const Eigen::Index s = lam.rows() / a;
    const ComplexVector& v = phi.amplitudes();
    ComplexMatrix out(s, s);
    for (Eigen::Index i = 0; i < s; ++i)
        for (Eigen::Index j = 0; j < s; ++j) out(i, j) = v.dot(lam.block(i * a, j * a, a, a) * v);
    return out;
}

/// Z(x)(τ) = U^* (1 ⊗ Z(x)) U on S⊗A.
inline ComplexMatrix heisenberg_pointer(const MeasurementScheme& m, std::size_t x) {
    if (x >= m.pointer().size()) throw DimensionError("heisenberg_pointer: unknown pointer outcome");
    const auto s = static_cast<Eigen::Index>(m.system_dim());
    return m.coupling().conjugate(tensor(identity(s), m.pointer().effect(x)));
}

inline ComplexMatrix heisenberg_pointer(const MeasurementScheme& m, const std::string& label) {
    auto x = m.pointer().outcomes().index_of(label);
    if (!x) throw ValidationError("heisenberg_pointer: unknown pointer outcome '" + label + "'");
    return heisenberg_pointer(m, *x);
}

/// The observable fixed by the scheme through the operator-level PRC:
/// E(y) = V_φ^* U^* (1 ⊗ Z(f⁻¹(y))) U V_φ.
inline DiscreteObservable measured_observable(const MeasurementScheme& m, const OutcomeSet& targets) {
    const auto target_of = detail::resolve_relabel(m, targets);
    const auto s = static_cast<Eigen::Index>(m.system_dim());
    const auto a = static_cast<Eigen::Index>(m.apparatus_dim());
    const ComplexMatrix w = m.evolved_embedding();
    const ComplexMatrix coef = detail::pointer_coefficients(m, w); // a × (s·s)

    std::vector<ComplexMatrix> effects(targets.size(), ComplexMatrix::Zero(s, s));
    // Rows of the coefficient block that belong to each target outcome.
    std::vector<std::vector<Eigen::Index>> rows(targets.size());
    for (std::size_t x = 0; x < m.pointer().size(); ++x)
        for (auto b : m.pointer().partition()[x]) rows[target_of[x]].push_back(static_cast<Eigen::Index>(b));

    for (std::size_t y = 0; y < targets.size(); ++y) {
        if (rows[y].empty()) continue;
        // gather K_y: (|rows|·s) × s, column j stacks C_j(rows, :)
        const auto r = static_cast<Eigen::Index>(rows[y].size());
        ComplexMatrix k(r * s, s);
        for (Eigen::Index j = 0; j < s; ++j)
            for (Eigen::Index i = 0; i < s; ++i)
                for (Eigen::Index t = 0; t < r; ++t) k(i * r + t, j) = coef(rows[y][t], j * s + i);
        effects[y].noalias() = k.adjoint() * k;
    }
    (void)a;
    return DiscreteObservable(targets, std::move(effects));
}

inline DiscreteObservable measured_observable(const MeasurementScheme& m) {
    return measured_observable(m, m.default_targets());
}

/// Distance from the measured observable to the target; 0 iff the PRC holds
/// exactly for every input state.
inline double prc_defect(const MeasurementScheme& m, const DiscreteObservable& target) {
    if (target.dim() != m.system_dim()) throw DimensionError("prc_defect: target dimension mismatch");
    return observable_distance(measured_observable(m, target.outcomes()), target);
}

/// max_y ‖V_φ^* U^* (E(y) ⊗ Z(f⁻¹(y))) U V_φ − E(y)‖.
inline double repeatability_defect(const MeasurementScheme& m, const OutcomeSet& targets) {
    const DiscreteObservable e = measured_observable(m, targets);
    const auto target_of = detail::resolve_relabel(m, targets);
    const auto s = static_cast<Eigen::Index>(m.system_dim());
    const auto a = static_cast<Eigen::Index>(m.apparatus_dim());
    const ComplexMatrix w = m.evolved_embedding();
    double worst = 0.0;
    for (std::size_t y = 0; y < targets.size(); ++y) {
        ComplexMatrix z = ComplexMatrix::Zero(a, a);
        for (std::size_t x = 0; x < m.pointer().size(); ++x)
            if (target_of[x] == y) z += m.pointer().effect(x);
        const ComplexMatrix joint = w.adjoint() * detail::apply_product(e.effect(y), z, w, s, a);
        worst = std::max(worst, op_norm(joint - e.effect(y)));
    }
    return worst;
}

inline double repeatability_defect(const MeasurementScheme& m) {
    return repeatability_defect(m, m.default_targets());
}

namespace detail {
inline void check_pair(const MeasurementScheme& m, const ConservedPair& c) {
    if (static_cast<std::size_t>(c.l_sys.rows()) != m.system_dim() ||
        static_cast<std::size_t>(c.l_app.rows()) != m.apparatus_dim())
        throw DimensionError("conserved pair dimensions do not match the scheme");
}
} // namespace detail

namespace detail {

/// Largest singular value of a linear map given only by its action and the
/// action of its adjoint, by power iteration on C^*C. Converges from below.
template <typename Apply, typename ApplyAdj>
double power_norm(Apply apply, ApplyAdj apply_adj, Eigen::Index dim, int iterations = 300) {
    ComplexMatrix v(dim, 1);
    for (Eigen::Index i = 0; i < dim; ++i) v(i, 0) = cplx(1.0 + 0.37 * std::sin(1.3 * static_cast<double>(i)),
                                                        0.21 * std::cos(0.7 * static_cast<double>(i)));
    v /= v.norm();
    double sigma = 0.0;
    for (int it = 0; it < iterations; ++it) {
        const ComplexMatrix cv = apply(v);
        sigma = std::max(sigma, cv.norm());
        ComplexMatrix w = apply_adj(cv);
        const double nw = w.norm();
        if (nw == 0.0) break;
        v = w / nw;
    }
    return sigma;
}

/// Above this total dimension conservation defects are estimated without
/// materialising L on S⊗A.
inline constexpr std::size_t dense_defect_limit = 1024;

} // namespace detail

/// ‖[U, L]‖, or ‖[U, exp(2πiL/period)]‖ for a cyclic conservation law.
inline double conservation_defect(const MeasurementScheme& m, const ConservedPair& c) {
    detail::check_pair(m, c);
    const auto s = static_cast<Eigen::Index>(m.system_dim());
    const auto a = static_cast<Eigen::Index>(m.apparatus_dim());
    if (m.system_dim() * m.apparatus_dim() > detail::dense_defect_limit) {
        const double t = c.period ? 2.0 * std::numbers::pi / static_cast<double>(*c.period) : 0.0;
        const ComplexMatrix gs = c.period ? mat_exp_i(c.l_sys, t) : c.l_sys;
        const ComplexMatrix ga = c.period ? mat_exp_i(c.l_app, t) : c.l_app;
        const ComplexMatrix is = identity(s), ia = identity(a);
        auto apply_l = [&](const ComplexMatrix& v, bool adj) -> ComplexMatrix {
            if (c.period)
                return adj ? detail::apply_product(gs.adjoint(), ga.adjoint(), v, s, a)
                           : detail::apply_product(gs, ga, v, s, a);
            return detail::apply_product(gs, ia, v, s, a) + detail::apply_product(is, ga, v, s, a);
        };
        auto apply_u = [&](const ComplexMatrix& v, bool adj) -> ComplexMatrix {
            if (m.coupling().is_diagonal())
                return adj ? ComplexMatrix(m.coupling().phases().conjugate().asDiagonal() * v)
                           : ComplexMatrix(m.coupling().phases().asDiagonal() * v);
            return adj ? ComplexMatrix(m.coupling().dense_matrix().adjoint() * v)
                       : ComplexMatrix(m.coupling().dense_matrix() * v);
        };
        // C = UL − LU, C^* = L^*U^* − U^*L^*
        auto apply_c = [&](const ComplexMatrix& v) {
            return ComplexMatrix(apply_u(apply_l(v, false), false) - apply_l(apply_u(v, false), false));
        };
        auto apply_cadj = [&](const ComplexMatrix& v) {
            return ComplexMatrix(apply_l(apply_u(v, true), true) - apply_u(apply_l(v, true), true));
        };
        return detail::power_norm(apply_c, apply_cadj, s * a);
    }
    const ComplexMatrix l = c.period ? c.group_generator() : c.total();
    if (m.coupling().is_diagonal()) {
        const ComplexVector& d = m.coupling().phases();
        ComplexMatrix comm(l.rows(), l.cols());
        for (Eigen::Index i = 0; i < l.rows(); ++i)
            for (Eigen::Index j = 0; j < l.cols(); ++j) comm(i, j) = (d(i) - d(j)) * l(i, j);
        return op_norm(comm);
    }
    const ComplexMatrix& u = m.coupling().dense_matrix();
    return op_norm(u * l - l * u);
}

/// Σ_x value(x) Z(x): the pointer as a self-adjoint operator on A.
inline ComplexMatrix pointer_operator(const MeasurementScheme& m) {
    const auto a = static_cast<Eigen::Index>(m.apparatus_dim());
    ComplexMatrix z = ComplexMatrix::Zero(a, a);
    for (std::size_t x = 0; x < m.pointer().size(); ++x) z += m.pointer().outcomes().value(x) * m.pointer().effect(x);
    return z;
}

/// ‖[Z, L_A]‖ for the pointer operator Z (or against exp(2πiL_A/period)).
inline double yanase_defect(const MeasurementScheme& m, const ConservedPair& c) {
    detail::check_pair(m, c);
    const ComplexMatrix la = c.period ? c.app_group_generator() : c.l_app;
    const ComplexMatrix z = pointer_operator(m);
    return op_norm(z * la - la * z);
}

/// ‖[Z(τ), L]‖ with Z(τ) = U^*(1 ⊗ Z)U: invariance of the evolved pointer.
inline double weak_yanase_defect(const MeasurementScheme& m, const ConservedPair& c) {
    detail::check_pair(m, c);
    const ComplexMatrix l = c.period ? c.group_generator() : c.total();
    const auto s = static_cast<Eigen::Index>(m.system_dim());
    const ComplexMatrix h = m.coupling().conjugate(tensor(identity(s), pointer_operator(m)));
    return op_norm(h * l - l * h);
}

/// max over ℓ and outcomes of ‖e^{iℓL} E(y) e^{-iℓL} − E(y)‖.
inline double observable_invariance_defect(const DiscreteObservable& e, const ComplexMatrix& l,
                                           std::span<const double> ells) {
    if (static_cast<std::size_t>(l.rows()) != e.dim())
        throw DimensionError("observable_invariance_defect: dimension mismatch");
    double worst = 0.0;
    for (double ell : ells) {
        const ComplexMatrix u = mat_exp_i(l, ell);
        for (const auto& eff : e.effects()) worst = std::max(worst, op_norm(u * eff * u.adjoint() - eff));
    }
    return worst;
}

} // namespace waylab
