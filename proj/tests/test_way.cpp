#include "waylab/models.hpp"
#include "waylab/random.hpp"
#include "waylab/way.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace waylab;

namespace {

struct Instance {
    MeasurementScheme scheme;
    ConservedPair pair;
};

/// Haar coupling (or one commuting with L when `conserving`), random pointer
/// with numeric outcomes, random generators.
Instance random_instance(std::size_t s, std::size_t a, bool conserving, Rng& rng) {
    const auto si = static_cast<Eigen::Index>(s), ai = static_cast<Eigen::Index>(a);
    ConservedPair pair(random_hermitian(si, rng), random_hermitian(ai, rng));
    if (conserving) {
        const ComplexMatrix vs = haar_unitary(si, rng), va = haar_unitary(ai, rng);
        const ComplexMatrix ls = vs * random_integer_diagonal(si, 0, 2, rng) * vs.adjoint();
        const ComplexMatrix la = va * random_integer_diagonal(ai, 0, 2, rng) * va.adjoint();
        pair = ConservedPair(0.5 * (ls + ls.adjoint()), 0.5 * (la + la.adjoint()));
    }
    const ComplexMatrix u = conserving ? random_commuting_unitary(pair.total(), rng) : haar_unitary(si * ai, rng);
    std::vector<std::vector<std::size_t>> part(2);
    for (std::size_t i = 0; i < a; ++i) part[i % 2].push_back(i);
    BasisPvm pointer(haar_unitary(ai, rng), part, OutcomeSet({"lo", "hi"}, {-0.7, 1.3}));
    return {MeasurementScheme(s, a, Coupling(u), pointer, random_state(ai, rng), {"lo", "hi"}), pair};
}

struct OracleNoise {
    double eps_sq, delta_l_sq;
    oracle::cd comm;
};

OracleNoise noise_oracle(const Instance& in, const oracle::Mat& a, const oracle::Vec& phi) {
    const MeasurementScheme& m = in.scheme;
    const auto s = static_cast<Eigen::Index>(m.system_dim()), d = static_cast<Eigen::Index>(m.apparatus_dim());
    oracle::Mat z = oracle::Mat::Zero(d, d);
    for (std::size_t x = 0; x < m.pointer().size(); ++x) z += m.pointer().outcomes().value(x) * m.pointer().effect(x);
    const oracle::Mat u = m.coupling().dense();
    const oracle::Mat n = u.adjoint() * oracle::kron(oracle::eye(s), z) * u - oracle::kron(a, oracle::eye(d));
    const oracle::Mat l = oracle::kron(in.pair.l_sys, oracle::eye(d)) + oracle::kron(oracle::eye(s), in.pair.l_app);
    const oracle::Vec psi = oracle::kron(phi, oracle::Vec(m.apparatus_state().amplitudes()));
    const oracle::cd mean_l = psi.dot(l * psi);
    const oracle::cd mean_l2 = psi.dot(l * l * psi);
    return {psi.dot(n * n * psi).real(), (mean_l2 - mean_l * mean_l).real(), psi.dot((n * l - l * n) * psi)};
}

} // namespace

TEST(Noise, SwapHasNoNoise) {
    const DiscreteObservable sx = spectral_pvm(pauli_x());
    const MeasurementScheme m = make_swap(2, sx);
    const ConservedPair c(pauli_z(), pauli_z());
    ComplexVector plus(2);
    plus << 1.0, 1.0;
    const NoiseReport r = noise_report(m, c, sx.first_moment(), StateVector::normalised(plus));
    EXPECT_LT(r.epsilon_sq, 1e-28);
    EXPECT_NEAR(r.delta_l_sq, 1.0, 1e-14);
    EXPECT_FALSE(r.degenerate);
    EXPECT_LT(r.bound_rhs, 1e-28);
}

TEST(Noise, DegenerateWhenGeneratorsAreSharp) {
    const DiscreteObservable sx = spectral_pvm(pauli_x());
    const NoiseReport r =
        noise_report(make_swap(2, sx), ConservedPair(pauli_z(), pauli_z()), sx.first_moment(), StateVector::basis(2, 0));
    EXPECT_TRUE(r.degenerate);
    EXPECT_EQ(r.bound_rhs, 0.0);
}

TEST(Noise, MatchesIndependentComputation) {
    Rng rng(1);
    for (int t = 0; t < 20; ++t) {
        const Instance in = random_instance(2, 3, false, rng);
        const ComplexMatrix a = random_hermitian(2, rng);
        const StateVector phi = random_state(2, rng);
        const NoiseReport r = noise_report(in.scheme, in.pair, a, phi);
        const OracleNoise o = noise_oracle(in, a, phi.amplitudes());
        EXPECT_NEAR(r.epsilon_sq, o.eps_sq, 1e-12);
        EXPECT_NEAR(r.delta_l_sq, o.delta_l_sq, 1e-12);
        EXPECT_LT(std::abs(r.commutator_expect - o.comm), 1e-12);
    }
}

TEST(Noise, RobertsonNeverViolated) {
    Rng rng(2);
    std::size_t violations = 0;
    for (int t = 0; t < 500; ++t) {
        const Instance in = random_instance(2 + t % 2, 2 + t % 3, t % 2 == 0, rng);
        const ComplexMatrix a = random_hermitian(static_cast<Eigen::Index>(in.scheme.system_dim()), rng);
        const NoiseReport r =
            noise_report(in.scheme, in.pair, a, random_state(static_cast<Eigen::Index>(in.scheme.system_dim()), rng));
        if (r.epsilon_sq * r.delta_l_sq + 1e-9 < std::norm(r.commutator_expect) / 4.0) ++violations;
    }
    EXPECT_EQ(violations, 0u);
}

TEST(Noise, CommutatorIdentityUnderConservation) {
    // [N, L] = U^*(1 ⊗ [Ẑ, L_A])U − [A, L_S] ⊗ 1 whenever [U, L] = 0
    Rng rng(3);
    for (int t = 0; t < 10; ++t) {
        const Instance in = random_instance(3, 3, true, rng);
        ASSERT_LT(conservation_defect(in.scheme, in.pair), 1e-10);
        const ComplexMatrix a = random_hermitian(3, rng);
        const oracle::Mat zhat = numeric_pointer(in.scheme, in.scheme.default_targets());
        const oracle::Mat n = zhat - oracle::kron(a, oracle::eye(3));
        const oracle::Mat l = in.pair.total();
        oracle::Mat z = oracle::Mat::Zero(3, 3);
        for (std::size_t x = 0; x < 2; ++x) z += in.scheme.pointer().outcomes().value(x) * in.scheme.pointer().effect(x);
        const oracle::Mat u = in.scheme.coupling().dense();
        const oracle::Mat rhs = u.adjoint() * oracle::kron(oracle::eye(3), z * in.pair.l_app - in.pair.l_app * z) * u -
                                oracle::kron(a * in.pair.l_sys - in.pair.l_sys * a, oracle::eye(3));
        EXPECT_LT(op_norm(n * l - l * n - rhs), 1e-10);
    }
}

TEST(StateGrid, DeterministicAndStructured) {
    const auto g = state_grid(3, 10, 7);
    ASSERT_EQ(g.size(), 10u);
    EXPECT_EQ(g[1].amplitudes(), StateVector::basis(3, 1).amplitudes());
    const auto h = state_grid(3, 10, 7);
    EXPECT_EQ(g[9].amplitudes(), h[9].amplitudes());
}

TEST(WayAudit, SwapViolatesOnlyYanase) {
    const DiscreteObservable sx = spectral_pvm(pauli_x());
    const WayAudit r = way_audit(make_swap(2, sx), ConservedPair(pauli_z(), pauli_z()), sx);
    EXPECT_EQ(r.verdict, Verdict::hypothesis_violated);
    EXPECT_EQ(r.violated, (std::vector<std::string>{"yanase"}));
    EXPECT_NEAR(*r.yanase_defect, 2.0, 1e-12);
    EXPECT_NEAR(*r.commutator_norm, 2.0, 1e-12);
    EXPECT_NEAR(r.repeatability_defect, 0.5, 1e-12);
}

TEST(WayAudit, CnotIsConsistent) {
    const DiscreteObservable sz = spectral_pvm(pauli_z());
    const WayAudit r = way_audit(make_lueders(sz), ConservedPair(pauli_z(), ComplexMatrix::Zero(2, 2)), sz);
    EXPECT_EQ(r.verdict, Verdict::consistent);
    EXPECT_TRUE(r.violated.empty());
    EXPECT_TRUE(*r.conservation_ok);
}

TEST(WayAudit, LuedersForNoninvariantTargetBreaksConservation) {
    const DiscreteObservable sx = spectral_pvm(pauli_x());
    const WayAudit r = way_audit(make_lueders(sx), ConservedPair(pauli_z(), ComplexMatrix::Zero(2, 2)), sx);
    EXPECT_EQ(r.verdict, Verdict::hypothesis_violated);
    EXPECT_EQ(r.violated, (std::vector<std::string>{"conservation"}));
}

TEST(WayAudit, WithoutPairConservationFieldsAreEmpty) {
    const DiscreteObservable sx = spectral_pvm(pauli_x());
    const WayAudit r = way_audit(make_swap(2, sx), std::nullopt, sx);
    EXPECT_EQ(r.verdict, Verdict::consistent);
    EXPECT_FALSE(r.conservation_defect.has_value());
    EXPECT_FALSE(r.yanase_ok.has_value());
    EXPECT_THROW(way_audit(make_swap(2, sx), std::nullopt,
                           DiscreteObservable(sx.outcomes(), {0.5 * identity(2), 0.5 * identity(2)})),
                 ValidationError);
}

TEST(WaySearch, FindsNoCounterexample) {
    WaySearchOptions opt;
    opt.trials = 60;
    opt.seed = 11;
    const WaySearchResult r = randomized_way_search(opt);
    EXPECT_EQ(r.trials, 60u);
    EXPECT_EQ(r.admissible, 60u);
    EXPECT_GT(r.noncommuting_checked, 30u);
    EXPECT_EQ(r.counterexamples, 0u);
    EXPECT_GT(r.min_prc_defect, 1e-8);
    const WaySearchResult again = randomized_way_search(opt);
    EXPECT_EQ(again.min_prc_defect, r.min_prc_defect);
}

TEST(Sweep, RotorMatchesClosedForm) {
    // best distance with M adjacent angular-momentum states: (1 − cos(π/(M+1)))/2
    const auto rows = error_vs_spread_sweep("qubit-rotor", 8, {1, 2, 3, 4, 5, 6, 7, 8});
    ASSERT_EQ(rows.size(), 8u);
    for (const auto& r : rows) {
        const double expect =
            r.budget == 8 ? 0.0 : 0.5 * (1.0 - std::cos(std::numbers::pi / static_cast<double>(r.budget + 1)));
        EXPECT_NEAR(r.min_error, expect, 1e-8) << "budget " << r.budget;
        EXPECT_LE(r.spread_width, r.budget);
    }
    EXPECT_NEAR(rows.front().min_error, 0.5, 1e-10);
    EXPECT_EQ(rows.front().spread_variance, 0.0);
}

TEST(Sweep, MonotoneInBudget) {
    for (std::size_t n : {8u, 12u, 16u}) {
        std::vector<std::size_t> budgets;
        for (std::size_t b = 1; b <= n; b += (n > 8 ? 3 : 1)) budgets.push_back(b);
        budgets.push_back(n);
        const auto rows = error_vs_spread_sweep("qubit_rotor", n, budgets);
        for (std::size_t i = 1; i < rows.size(); ++i)
            EXPECT_LE(rows[i].min_error, rows[i - 1].min_error) << "n=" << n << " budget " << rows[i].budget;
        EXPECT_LT(rows.back().min_error, 1e-12);
    }
}

TEST(Sweep, PositionLattice) {
    const auto rows = error_vs_spread_sweep("position-lattice", 4, {1, 2, 4});
    EXPECT_GT(rows.front().min_error, 0.5);
    EXPECT_LT(rows.back().min_error, 1e-12);
}

TEST(Sweep, RejectsUnknownFamilyAndBadBudget) {
    EXPECT_THROW(error_vs_spread_sweep("lueders", 4, {1}), ValidationError);
    EXPECT_THROW(error_vs_spread_sweep("qubit-rotor", 4, {0}), ValidationError);
    EXPECT_THROW(error_vs_spread_sweep("qubit-rotor", 4, {5}), ValidationError);
}

TEST(Sweep, SeedReproducible) {
    SweepOptions opt;
    opt.seed = 9;
    const auto a = error_vs_spread_sweep("qubit-rotor", 6, {2, 3}, opt);
    const auto b = error_vs_spread_sweep("qubit-rotor", 6, {2, 3}, opt);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].min_error, b[i].min_error);
}
