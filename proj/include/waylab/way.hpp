// way.hpp
// Wigner–Araki–Yanase analysis: the noise-operator error bound, audits of
// the theorem's hypotheses on a given scheme, a randomized search for
// counterexamples, and error-versus-spread sweeps over reference states.

#pragma once

#include "models.hpp"
#include "obs.hpp"
#include "qcore.hpp"
#include "random.hpp"
#include "relfr.hpp"
#include "scheme.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace waylab {

// ---------------------------------------------------------------------------
// noise operator

struct NoiseReport {
    double epsilon_sq = 0.0; // ⟨N²⟩
    double bound_rhs = 0.0;  // |⟨[N, L]⟩|² / (4 ΔL²)
    double delta_l_sq = 0.0; // Var_φ(L_S) + Var_{φ_A}(L_A)
    cplx commutator_expect{0.0, 0.0};
    bool degenerate = false; // ΔL² = 0, bound reported as 0
};

/// Ẑ(τ) = Σ_x value(f(x)) U^*(1 ⊗ Z(x))U.
inline ComplexMatrix numeric_pointer(const MeasurementScheme& m, const OutcomeSet& targets) {
    const auto target_of = detail::resolve_relabel(m, targets);
    const auto a = static_cast<Eigen::Index>(m.apparatus_dim());
    ComplexMatrix z = ComplexMatrix::Zero(a, a);
    for (std::size_t x = 0; x < m.pointer().size(); ++x) z += targets.value(target_of[x]) * m.pointer().effect(x);
    return m.coupling().conjugate(tensor(identity(static_cast<Eigen::Index>(m.system_dim())), z));
}

/// Noise N = Ẑ(τ) − a⊗1 and the uncertainty bound, all in φ⊗φ_A.
inline NoiseReport noise_report(const MeasurementScheme& m, const ConservedPair& c, const ComplexMatrix& a,
                                const StateVector& phi, const OutcomeSet& targets) {
    detail::check_pair(m, c);
    if (static_cast<std::size_t>(a.rows()) != m.system_dim() || phi.dim() != m.system_dim())
        throw DimensionError("noise_report: observable or state does not act on the system");
    if (!is_hermitian(a)) throw ValidationError("noise_report: observable is not self-adjoint");
    const auto s = static_cast<Eigen::Index>(m.system_dim());
    const auto d = static_cast<Eigen::Index>(m.apparatus_dim());

    const ComplexMatrix noise = numeric_pointer(m, targets) - tensor(a, identity(d));
    const ComplexMatrix l = c.total();
    const ComplexVector psi = tensor(phi.amplitudes(), m.apparatus_state().amplitudes());
    const ComplexVector npsi = noise * psi;
    const ComplexVector lpsi = l * psi;

    NoiseReport r;
    r.epsilon_sq = npsi.squaredNorm();
    // ⟨[N, L]⟩ = ⟨Nψ|Lψ⟩ − ⟨Lψ|Nψ⟩
    r.commutator_expect = npsi.dot(lpsi) - lpsi.dot(npsi);
    auto var = [](const ComplexMatrix& op, const ComplexVector& v) {
        const ComplexVector ov = op * v;
        const double mean = v.dot(ov).real();
        return std::max(0.0, ov.squaredNorm() - mean * mean);
    };
    r.delta_l_sq = var(c.l_sys, phi.amplitudes()) + var(c.l_app, m.apparatus_state().amplitudes());
    (void)s;
    if (r.delta_l_sq <= 1e-14) {
        r.degenerate = true;
        r.bound_rhs = 0.0;
    } else {
        r.bound_rhs = std::norm(r.commutator_expect) / (4.0 * r.delta_l_sq);
    }
    return r;
}

inline NoiseReport noise_report(const MeasurementScheme& m, const ConservedPair& c, const ComplexMatrix& a,
                                const StateVector& phi) {
    return noise_report(m, c, a, phi, m.default_targets());
}

/// Deterministic grid of system states: the computational basis, the
/// equal-weight superpositions with relative phases i^k, then seeded random
/// states until `count` states are produced.
inline std::vector<StateVector> state_grid(std::size_t dim, std::size_t count, std::uint64_t seed) {
    std::vector<StateVector> out;
    for (std::size_t i = 0; i < dim && out.size() < count; ++i) out.push_back(StateVector::basis(dim, i));
    for (int k = 0; k < 4 && out.size() < count; ++k) {
        ComplexVector v(static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < dim; ++i) v(static_cast<Eigen::Index>(i)) = std::pow(cplx(0, 1), k * static_cast<int>(i));
        out.push_back(StateVector::normalised(v));
    }
    Rng rng(seed);
    while (out.size() < count) out.push_back(random_state(static_cast<Eigen::Index>(dim), rng));
    return out;
}

// ---------------------------------------------------------------------------
// audits

enum class Verdict { consistent, hypothesis_violated, exact_measurement_of_noninvariant };

inline std::string verdict_name(Verdict v) {
    switch (v) {
    case Verdict::consistent: return "consistent";
    case Verdict::hypothesis_violated: return "hypothesis_violated";
    case Verdict::exact_measurement_of_noninvariant: return "exact_measurement_of_noninvariant";
    }
    return "?";
}

struct WayAudit {
    // Conservation fields are empty when no conserved pair was supplied.
    std::optional<bool> conservation_ok;
    std::optional<bool> yanase_ok;
    std::optional<double> conservation_defect;
    std::optional<double> yanase_defect;
    std::optional<double> commutator_norm; // ‖[A, L_S]‖, A = Σ value(y) E(y)
    double repeatability_defect = 0.0;
    double prc_defect_vs_target = 0.0;
    Verdict verdict = Verdict::consistent;
    std::vector<std::string> violated; // "conservation", "yanase", "exactness"
};

/// The theorem's contrapositive checked on one instance: if U conserves L
/// and the scheme is repeatable or meets the Yanase condition, an exact
/// measurement of the target forces [A, L_S] = 0.
inline WayAudit way_audit(const MeasurementScheme& m, const std::optional<ConservedPair>& c,
                          const DiscreteObservable& target, double tol = tolerances().validation) {
    if (!is_sharp(target)) throw ValidationError("way_audit: target is not a PVM");
    WayAudit r;
    r.prc_defect_vs_target = prc_defect(m, target);
    r.repeatability_defect = repeatability_defect(m, target.outcomes());
    const bool exact = r.prc_defect_vs_target <= tol;
    const bool repeatable = r.repeatability_defect <= tol;
    if (!c) return r;

    r.conservation_defect = conservation_defect(m, *c);
    r.yanase_defect = yanase_defect(m, *c);
    r.conservation_ok = *r.conservation_defect <= tol;
    r.yanase_ok = *r.yanase_defect <= tol;
    const ComplexMatrix a = target.first_moment();
    r.commutator_norm = op_norm(a * c->l_sys - c->l_sys * a);

    const bool hypotheses = *r.conservation_ok && (*r.yanase_ok || repeatable);
    if (hypotheses) {
        if (exact && *r.commutator_norm > 1e-8) r.verdict = Verdict::exact_measurement_of_noninvariant;
        return r;
    }
    r.verdict = Verdict::hypothesis_violated;
    if (!*r.conservation_ok) r.violated.push_back("conservation");
    if (!*r.yanase_ok && !repeatable) r.violated.push_back("yanase");
    if (!exact) r.violated.push_back("exactness");
    return r;
}

// ---------------------------------------------------------------------------
// randomized search for WAY counterexamples

struct WaySearchOptions {
    std::size_t trials = 200;
    std::uint64_t seed = 1;
    std::size_t max_dim = 4; // per factor
};

struct WaySearchResult {
    std::size_t trials = 0;
    std::size_t admissible = 0;          // conservation and Yanase both hold
    std::size_t noncommuting_checked = 0; // targets with ‖[A, L_S]‖ > 1e-6
    double min_prc_defect = 1e300;       // over noncommuting targets
    std::size_t counterexamples = 0;     // prc_defect < 1e-8 on a noncommuting target
};

namespace detail {

/// Orthonormal eigenbasis of h, randomly rotated inside each eigenspace.
inline ComplexMatrix random_eigenbasis(const ComplexMatrix& h, Rng& rng) {
    const Eigenspaces es = eigenspaces(h);
    ComplexMatrix out(h.rows(), h.cols());
    Eigen::Index c = 0;
    for (const auto& b : es.bases) {
        out.middleCols(c, b.cols()) = b * haar_unitary(b.cols(), rng);
        c += b.cols();
    }
    return out;
}

inline std::vector<std::vector<std::size_t>> round_robin(std::size_t cols, std::size_t k, Rng& rng) {
    std::vector<std::size_t> order(cols);
    for (std::size_t i = 0; i < cols; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<std::size_t>> part(k);
    for (std::size_t i = 0; i < cols; ++i) part[i % k].push_back(order[i]);
    return part;
}

inline OutcomeSet integer_outcomes(std::size_t k) {
    std::vector<std::string> labels;
    std::vector<double> values;
    for (std::size_t i = 0; i < k; ++i) {
        labels.push_back(std::to_string(i));
        values.push_back(static_cast<double>(i));
    }
    return OutcomeSet(std::move(labels), std::move(values));
}

/// PVM close to a POVM: each eigenvector of Σ_y y E(y) goes to the outcome
/// whose effect weighs it most. Empty when some outcome receives nothing.
inline std::optional<DiscreteObservable> sharpen(const DiscreteObservable& e) {
    const ComplexMatrix moment = e.first_moment();
    const HermEig eig = herm_eig(0.5 * (moment + moment.adjoint()));
    std::vector<std::vector<std::size_t>> part(e.size());
    for (Eigen::Index i = 0; i < eig.vectors.cols(); ++i) {
        const ComplexVector v = eig.vectors.col(i);
        std::size_t best = 0;
        double bw = -1.0;
        for (std::size_t y = 0; y < e.size(); ++y) {
            const double w = v.dot(e.effect(y) * v).real();
            if (w > bw) {
                bw = w;
                best = y;
            }
        }
        part[best].push_back(static_cast<std::size_t>(i));
    }
    for (const auto& p : part)
        if (p.empty()) return std::nullopt;
    return pvm_from_basis(eig.vectors, part, e.outcomes());
}

} // namespace detail

/// Random schemes that satisfy conservation and the Yanase condition by
/// construction: generators L_S, L_A with degenerate integer spectra, a
/// coupling Haar-random on each eigenspace of L, and a pointer built from
/// an eigenbasis of L_A. Targets are random PVMs and the sharpened measured
/// observable. Any exact measurement of a noncommuting target is counted.
inline WaySearchResult randomized_way_search(const WaySearchOptions& opt) {
    WaySearchResult res;
    for (std::size_t t = 0; t < opt.trials; ++t) {
        Rng rng(opt.seed * 1000003ULL + t);
        std::uniform_int_distribution<std::size_t> pick_dim(2, std::max<std::size_t>(2, opt.max_dim));
        const std::size_t s = pick_dim(rng);
        const std::size_t a = pick_dim(rng);
        const auto si = static_cast<Eigen::Index>(s);
        const auto ai = static_cast<Eigen::Index>(a);

        const ComplexMatrix vs = haar_unitary(si, rng);
        const ComplexMatrix ls = vs * random_integer_diagonal(si, 0, 2, rng) * vs.adjoint();
        const ComplexMatrix va = haar_unitary(ai, rng);
        const ComplexMatrix la = va * random_integer_diagonal(ai, 0, 2, rng) * va.adjoint();
        const ConservedPair pair(0.5 * (ls + ls.adjoint()), 0.5 * (la + la.adjoint()));
        const ComplexMatrix u = random_commuting_unitary(pair.total(), rng);

        std::uniform_int_distribution<std::size_t> pick_k(2, a);
        const std::size_t k = pick_k(rng);
        const ComplexMatrix pbasis = detail::random_eigenbasis(pair.l_app, rng);
        BasisPvm pointer(pbasis, detail::round_robin(a, k, rng), detail::integer_outcomes(k));

        std::uniform_int_distribution<std::size_t> pick_kt(2, std::min(k, s));
        const std::size_t kt = pick_kt(rng);
        std::vector<std::string> relabel;
        for (std::size_t x = 0; x < k; ++x) relabel.push_back(std::to_string(x % kt));
        const OutcomeSet targets = detail::integer_outcomes(kt);

        MeasurementScheme m(s, a, Coupling(u), std::move(pointer), random_state(ai, rng), std::move(relabel));
        ++res.trials;
        if (conservation_defect(m, pair) >= 1e-10 || yanase_defect(m, pair) >= 1e-10) continue;
        ++res.admissible;

        std::vector<DiscreteObservable> candidates;
        candidates.push_back(pvm_from_basis(haar_unitary(si, rng), detail::round_robin(s, kt, rng), targets));
        if (auto sharp = detail::sharpen(measured_observable(m, targets))) candidates.push_back(*sharp);

        for (const auto& target : candidates) {
            const ComplexMatrix am = target.first_moment();
            if (op_norm(am * pair.l_sys - pair.l_sys * am) <= 1e-6) continue;
            ++res.noncommuting_checked;
            const double prc = prc_defect(m, target);
            res.min_prc_defect = std::min(res.min_prc_defect, prc);
            if (prc < 1e-8) ++res.counterexamples;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// error versus spread

struct SweepRow {
    std::size_t budget = 0;
    double spread_variance = 0.0;
    std::size_t spread_width = 0;
    double min_error = 0.0;
};

struct SweepOptions {
    double eps = 0.05;           // overall-width confidence parameter
    std::uint64_t seed = 0;      // random restarts
    std::size_t refine_supports = 3;
    std::size_t random_restarts = 2;
};

/// Reference-frame families with a sweep: "qubit-rotor", "position-lattice".
inline FrameModel sweep_family(const std::string& id, std::size_t n) {
    const std::string s = normalise_id(id);
    if (s == "qubit_rotor") return make_qubit_rotor(n);
    if (s == "position_lattice") return make_position_frame(n);
    throw ValidationError("unknown model family '" + id + "'");
}

namespace detail {

class NelderMead {
public:
    using Objective = std::function<double(const ComplexVector&)>;

    /// Minimise over unnormalised coefficient vectors (the objective
    /// normalises). Returns the best point seen.
    static std::pair<ComplexVector, double> minimise(const Objective& f, const ComplexVector& start, double step,
                                                     std::size_t max_iter) {
        const auto dim = static_cast<std::size_t>(start.size());
        const std::size_t np = 2 * dim;
        Ctx ctx{&f, dim};
        gsl_multimin_function fn{&Ctx::eval, np, &ctx};
        gsl_vector* x = gsl_vector_alloc(np);
        gsl_vector* ss = gsl_vector_alloc(np);
        for (std::size_t i = 0; i < dim; ++i) {
            gsl_vector_set(x, 2 * i, start(static_cast<Eigen::Index>(i)).real());
            gsl_vector_set(x, 2 * i + 1, start(static_cast<Eigen::Index>(i)).imag());
        }
        gsl_vector_set_all(ss, step);
        gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, np);
        gsl_multimin_fminimizer_set(s, &fn, x, ss);
        for (std::size_t it = 0; it < max_iter; ++it) {
            if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
            if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-13) == GSL_SUCCESS) break;
        }
        const ComplexVector best = Ctx::unpack(gsl_multimin_fminimizer_x(s), dim);
        const double val = f(best);
        gsl_multimin_fminimizer_free(s);
        gsl_vector_free(ss);
        gsl_vector_free(x);
        return {best, val};
    }

private:
    struct Ctx {
        const Objective* f;
        std::size_t dim;

        static ComplexVector unpack(const gsl_vector* v, std::size_t dim) {
            ComplexVector c(static_cast<Eigen::Index>(dim));
            for (std::size_t i = 0; i < dim; ++i)
                c(static_cast<Eigen::Index>(i)) = cplx(gsl_vector_get(v, 2 * i), gsl_vector_get(v, 2 * i + 1));
            return c;
        }
        static double eval(const gsl_vector* v, void* p) {
            const auto* ctx = static_cast<const Ctx*>(p);
            return (*ctx->f)(unpack(v, ctx->dim));
        }
    };
};

struct Candidate {
    std::vector<std::size_t> support;
    ComplexVector coeffs; // in the support basis
    double value = 0.0;
};

} // namespace detail

/// For each budget M, the smallest observable_distance between
/// Γ_η ∘ yen(target) and the target over reference states η supported on at
/// most M eigenspaces of the reference generator. Seeds: the phase-uniform
/// and the maximally localised state on every candidate support, plus the
/// previous budget's optimum; the best few supports are refined by
/// Nelder–Mead. Budgets are processed in increasing order, so the reported
/// minimum never increases.
inline std::vector<SweepRow> error_vs_spread_sweep(const FrameModel& fm, std::vector<std::size_t> budgets,
                                                   const SweepOptions& opt = {}) {
    std::sort(budgets.begin(), budgets.end());
    const Eigenspaces es = eigenspaces(fm.f.rep().generator());
    const std::size_t count = es.bases.size();
    for (auto b : budgets)
        if (b == 0 || b > count)
            throw ValidationError("error_vs_spread_sweep: budget " + std::to_string(b) + " outside [1, " +
                                  std::to_string(count) + "]");

    auto state_of = [&](const std::vector<std::size_t>& support, const ComplexVector& coeffs) -> ComplexVector {
        return support_basis(es, support) * coeffs;
    };
    auto objective_on = [&](const std::vector<std::size_t>& support) {
        const ComplexMatrix basis = support_basis(es, support);
        return [&fm, basis](const ComplexVector& c) {
            const double nrm = c.norm();
            if (!(nrm > 1e-9)) return 10.0;
            const StateVector eta = StateVector::normalised(basis * c);
            return observable_distance(restricted_yen_povm(fm.target, fm.rep_s, fm.f, eta), fm.target);
        };
    };

    Rng rng(opt.seed);
    std::optional<std::pair<std::vector<std::size_t>, ComplexVector>> prev; // support, coefficients
    std::vector<SweepRow> rows;
    for (std::size_t budget : budgets) {
        std::optional<detail::Candidate> best;
        auto offer = [&](const detail::Candidate& c) {
            if (!best || c.value < best->value - 1e-13) best = c;
        };

        if (prev) {
            auto f = objective_on(prev->first);
            offer({prev->first, prev->second, f(prev->second)});
        }

        std::vector<detail::Candidate> seeds;
        for (const auto& support : candidate_supports(count, budget)) {
            const ComplexMatrix basis = support_basis(es, support);
            auto f = objective_on(support);
            ComplexVector flat = ComplexVector::Ones(basis.cols());
            detail::Candidate c{support, flat, f(flat)};
            const ComplexMatrix reduced = basis.adjoint() * fm.f.effect(0) * basis;
            const HermEig eig = herm_eig(0.5 * (reduced + reduced.adjoint()));
            const ComplexVector loc = eig.vectors.col(eig.values.size() - 1);
            const double lv = f(loc);
            if (lv < c.value) c = {support, loc, lv};
            seeds.push_back(c);
        }
        std::stable_sort(seeds.begin(), seeds.end(),
                         [](const auto& x, const auto& y) { return x.value < y.value; });
        for (const auto& s : seeds) offer(s);

        std::vector<detail::Candidate> refine;
        for (std::size_t i = 0; i < std::min(opt.refine_supports, seeds.size()); ++i) refine.push_back(seeds[i]);
        if (prev) {
            // embed the previous optimum into supports that contain it
            std::size_t added = 0;
            for (const auto& support : candidate_supports(count, budget)) {
                if (added >= opt.refine_supports) break;
                if (!std::includes(support.begin(), support.end(), prev->first.begin(), prev->first.end()))
                    continue;
                const ComplexMatrix basis = support_basis(es, support);
                const ComplexVector coeffs = basis.adjoint() * state_of(prev->first, prev->second);
                refine.push_back({support, coeffs, 0.0});
                ++added;
            }
        }

        for (const auto& c : refine) {
            auto f = objective_on(c.support);
            const std::size_t iters = 2000 + 400 * static_cast<std::size_t>(c.coeffs.size());
            ComplexVector x = c.coeffs / c.coeffs.norm();
            double v = f(x);
            for (int round = 0; round < 3; ++round) {
                auto [nx, nv] = detail::NelderMead::minimise(f, x, round == 0 ? 0.2 : 0.02, iters);
                if (!(nv < v - 1e-15)) break;
                x = nx / nx.norm();
                v = f(x);
            }
            offer({c.support, x, v});
        }
        if (best) {
            auto f = objective_on(best->support);
            for (std::size_t r = 0; r < opt.random_restarts; ++r) {
                ComplexVector start = ginibre(best->coeffs.size(), 1, rng).col(0);
                auto [nx, nv] = detail::NelderMead::minimise(f, start, 0.2,
                                                             2000 + 400 * static_cast<std::size_t>(start.size()));
                const ComplexVector x = nx / nx.norm();
                offer({best->support, x, f(x)});
            }
        }

        const ComplexVector eta = state_of(best->support, best->coeffs).normalized();
        std::vector<std::string> labels;
        std::vector<double> values, weights;
        for (std::size_t e = 0; e < count; ++e) {
            labels.push_back(std::to_string(e));
            values.push_back(es.values[e]);
            weights.push_back((es.bases[e].adjoint() * eta).squaredNorm());
        }
        const ProbDist spread(OutcomeSet(labels, values), weights, 1e-9);
        rows.push_back({budget, variance(spread), overall_width(spread, opt.eps), best->value});
        prev = std::make_pair(best->support, best->coeffs);
    }
    return rows;
}

inline std::vector<SweepRow> error_vs_spread_sweep(const std::string& family, std::size_t n,
                                                   const std::vector<std::size_t>& budgets,
                                                   const SweepOptions& opt = {}) {
    return error_vs_spread_sweep(sweep_family(family, n), budgets, opt);
}

} // namespace waylab
