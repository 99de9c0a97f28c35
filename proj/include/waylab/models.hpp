// models.hpp
// Concrete schemes at desk scale: SWAP, Lüders, the von Neumann and
// Ozawa position couplings on Z_n lattices, and the reference-frame
// families (qubit-rotor, position lattice) used by the relativisation code.

#pragma once

#include "obs.hpp"
#include "qcore.hpp"
#include "relfr.hpp"
#include "scheme.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace waylab {

// ---------------------------------------------------------------------------
// Z_n lattice helpers. Positions |q⟩, q = 0..n-1, shift X|q⟩ = |q+1⟩.
// Momentum eigenvectors |m⟩ = n^{-1/2} Σ_q ω^{-mq} |q⟩ satisfy X|m⟩ = ω^m|m⟩,
// so P = Σ_m m |m⟩⟨m| has integer spectrum and exp(2πiP/n) = X.

inline cplx root_of_unity(long k, std::size_t n) {
    const long nn = static_cast<long>(n);
    const long r = ((k % nn) + nn) % nn;
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n));
}

inline ComplexMatrix shift_operator(std::size_t n) {
    const auto d = static_cast<Eigen::Index>(n);
    ComplexMatrix x = ComplexMatrix::Zero(d, d);
    for (Eigen::Index q = 0; q < d; ++q) x((q + 1) % d, q) = 1.0;
    return x;
}

/// Columns are the momentum eigenvectors |m⟩.
inline ComplexMatrix fourier_basis(std::size_t n) {
    const auto d = static_cast<Eigen::Index>(n);
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    ComplexMatrix f(d, d);
    for (Eigen::Index q = 0; q < d; ++q)
        for (Eigen::Index m = 0; m < d; ++m) f(q, m) = s * root_of_unity(-static_cast<long>(m * q), n);
    return f;
}

inline ComplexMatrix position_generator(std::size_t n) {
    const auto d = static_cast<Eigen::Index>(n);
    ComplexMatrix q = ComplexMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) q(i, i) = static_cast<double>(i);
    return q;
}

inline ComplexMatrix momentum_generator(std::size_t n) {
    const ComplexMatrix f = fourier_basis(n);
    const ComplexMatrix p = f * position_generator(n) * f.adjoint();
    return 0.5 * (p + p.adjoint());
}

/// Inverse of k modulo n; the coupling index must be a unit of Z_n.
inline long lattice_inverse(long k, std::size_t n) {
    const long nn = static_cast<long>(n);
    const long r = ((k % nn) + nn) % nn;
    if (r == 0 || std::gcd(r, nn) != 1)
        throw ValidationError("invalid λ quantization: lam_index " + std::to_string(k) +
                              " is not invertible modulo " + std::to_string(n));
    for (long j = 1; j < nn; ++j)
        if ((r * j) % nn == 1) return j;
    return 1; // n == 1 never reaches here (n >= 2 enforced by callers)
}

inline long mod_n(long k, std::size_t n) {
    const long nn = static_cast<long>(n);
    return ((k % nn) + nn) % nn;
}

/// Position PVM on C^n with cyclic outcomes.
inline DiscreteObservable position_pvm(std::size_t n) { return basis_pvm(OutcomeSet::cyclic_lattice(n)); }

/// PVM of the difference q - r (mod n) on C^n ⊗ C^n.
inline DiscreteObservable relative_position_pvm(std::size_t n) {
    const auto d = static_cast<Eigen::Index>(n);
    std::vector<ComplexMatrix> effects(n, ComplexMatrix::Zero(d * d, d * d));
    for (Eigen::Index q = 0; q < d; ++q)
        for (Eigen::Index r = 0; r < d; ++r)
            effects[static_cast<std::size_t>(mod_n(q - r, n))](q * d + r, q * d + r) = 1.0;
    return DiscreteObservable(OutcomeSet::cyclic_lattice(n), std::move(effects));
}

inline std::vector<std::string> lattice_labels(std::size_t n) { return OutcomeSet::cyclic_lattice(n).labels(); }

inline ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
inline ComplexMatrix pauli_y() {
    ComplexMatrix m(2, 2);
    m << 0, cplx(0, -1), cplx(0, 1), 0;
    return m;
}
inline ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

// ---------------------------------------------------------------------------
// SWAP and Lüders

inline ComplexMatrix swap_matrix(std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    ComplexMatrix s = ComplexMatrix::Zero(d * d, d * d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) s(j * d + i, i * d + j) = 1.0;
    return s;
}

/// SWAP coupling on C^dim ⊗ C^dim. The measured observable is the pointer
/// PVM itself, moved onto the system.
inline MeasurementScheme make_swap(std::size_t dim, const BasisPvm& pointer,
                                   std::optional<StateVector> apparatus_state = std::nullopt) {
    if (pointer.dim() != dim)
        throw DimensionError("make_swap: pointer acts on dimension " + std::to_string(pointer.dim()) +
                             ", expected " + std::to_string(dim));
    StateVector phi = apparatus_state ? *apparatus_state : StateVector::basis(dim, 0);
    return MeasurementScheme(dim, dim, Coupling(swap_matrix(dim)), pointer, std::move(phi),
                             pointer.outcomes().labels());
}

inline MeasurementScheme make_swap(std::size_t dim, const DiscreteObservable& pointer) {
    return make_swap(dim, BasisPvm::from_observable(pointer));
}

/// ψ ⊗ e₀ ↦ Σ_i P_i ψ ⊗ e_i, realised as U = Σ_i P_i ⊗ X^i with X the cyclic
/// shift on C^k. For a qubit σ_z PVM this is CNOT.
inline MeasurementScheme make_lueders(const DiscreteObservable& pvm) {
    if (!is_sharp(pvm)) throw ValidationError("make_lueders: input observable is not sharp");
    const std::size_t k = pvm.size();
    const auto s = static_cast<Eigen::Index>(pvm.dim());
    const ComplexMatrix x = shift_operator(k);
    ComplexMatrix u = ComplexMatrix::Zero(s * static_cast<Eigen::Index>(k), s * static_cast<Eigen::Index>(k));
    ComplexMatrix xi = identity(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
        u += tensor(pvm.effect(i), xi);
        xi = x * xi;
    }
    return MeasurementScheme(pvm.dim(), k, Coupling(std::move(u)), BasisPvm::computational(pvm.outcomes()),
                             StateVector::basis(k, 0), pvm.outcomes().labels());
}

// ---------------------------------------------------------------------------
// lattice position measurements

/// Everything a caller needs to audit a model: the scheme, its target, and
/// the conserved quantity the model is meant to respect (or not).
struct ModelInstance {
    MeasurementScheme scheme;
    DiscreteObservable target;
    std::optional<ConservedPair> conserved;
};

inline void require_lattice(std::size_t n, const char* who) {
    if (n < 2) throw ValidationError(std::string(who) + ": n must be at least 2");
}

/// U = Σ_q |q⟩⟨q| ⊗ X^{kq}: the lattice form of exp(iλ Q⊗P_A) with
/// λ = 2πk/n. The pointer is the apparatus position; reading a is mapped
/// to k^{-1} a (mod n). φ_A defaults to the position eigenstate at 0.
inline ModelInstance make_von_neumann_lattice(std::size_t n, long lam_index,
                                              std::optional<StateVector> apparatus_state = std::nullopt) {
    require_lattice(n, "make_von_neumann_lattice");
    const long kinv = lattice_inverse(lam_index, n);
    const auto d = static_cast<Eigen::Index>(n);
    const ComplexMatrix x = shift_operator(n);
    ComplexMatrix u = ComplexMatrix::Zero(d * d, d * d);
    for (Eigen::Index q = 0; q < d; ++q) {
        ComplexMatrix proj = ComplexMatrix::Zero(d, d);
        proj(q, q) = 1.0;
        ComplexMatrix xp = identity(d);
        for (long t = 0; t < mod_n(lam_index * q, n); ++t) xp = x * xp;
        u += tensor(proj, xp);
    }
    std::vector<std::string> relabel;
    for (std::size_t a = 0; a < n; ++a)
        relabel.push_back(std::to_string(mod_n(kinv * static_cast<long>(a), n)));
    StateVector phi = apparatus_state ? *apparatus_state : StateVector::basis(n, 0);
    if (phi.dim() != n) throw DimensionError("make_von_neumann_lattice: apparatus state dimension");
    const ComplexMatrix p = momentum_generator(n);
    return ModelInstance{MeasurementScheme(n, n, Coupling(std::move(u)),
                                           BasisPvm::computational(OutcomeSet::cyclic_lattice(n)),
                                           std::move(phi), std::move(relabel)),
                         position_pvm(n), ConservedPair(p, p, n)};
}

enum class OzawaReading { absolute, relative };

struct OzawaParams {
    std::size_t n = 5;
    long lam_index = 1;
    OzawaReading reading = OzawaReading::absolute;
    std::optional<ComplexVector> phi;  // reference R, position amplitudes
    std::optional<ComplexVector> xi_a; // register A, momentum amplitudes
    std::optional<ComplexVector> xi_b; // register B, momentum amplitudes
};

/// Amplitudes 3^{-1/2} on the cells {-1, 0, 1} of Z_n.
inline ComplexVector three_point_amplitudes(std::size_t n) {
    ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(n));
    const double a = 1.0 / std::sqrt(3.0);
    v(0) = a;
    v(1) = a;
    v(static_cast<Eigen::Index>(n) - 1) = a;
    return v;
}

/// Four Z_n registers S, R, A, B (in that order, position bases). A and B
/// are the pair rotated so that register A carries the difference
/// coordinate coupled to Q − Q_R:
///
///   U |q, r, a, b⟩ = ω^{k (q − r) a} |q, r, a, b⟩.
///
/// The pointer is the momentum of A, which moves by −k(q − r); reading m
/// maps to −k^{-1} m. Register B does not take part in the coupling.
///
/// Absolute reading: system S, apparatus R⊗A⊗B, target = position of S.
/// Relative reading: system S⊗R, apparatus A⊗B, target = position of S − R.
/// Both conserve the total shift exp(2πi(P_S + P_R + P_B)/n) exactly.
inline ModelInstance make_ozawa_lattice(const OzawaParams& p) {
    const std::size_t n = p.n;
    if (n < 3 || n > 8) throw ValidationError("make_ozawa_lattice: n must lie in [3, 8]");
    const long kinv = lattice_inverse(p.lam_index, n);
    const auto d = static_cast<Eigen::Index>(n);
    if (static_cast<std::size_t>(d * d * d * d) > max_total_dim())
        throw DimensionError("make_ozawa_lattice: n^4 exceeds the configured maximum dimension");

    auto state_of = [&](const std::optional<ComplexVector>& v, ComplexVector fallback, const char* what) {
        ComplexVector a = v ? *v : std::move(fallback);
        if (a.size() != d) throw DimensionError(std::string("make_ozawa_lattice: ") + what + " has wrong length");
        return a;
    };
    const ComplexMatrix f = fourier_basis(n);
    const ComplexVector phi = state_of(p.phi, three_point_amplitudes(n), "phi");
    const ComplexVector xa = f * state_of(p.xi_a, three_point_amplitudes(n), "xi_a");
    ComplexVector uniform = ComplexVector::Zero(d);
    uniform(0) = 1.0; // uniform in position = zero-momentum eigenstate
    const ComplexVector xb = f * state_of(p.xi_b, uniform, "xi_b");

    ComplexVector phases(d * d * d * d);
    for (Eigen::Index q = 0; q < d; ++q)
        for (Eigen::Index r = 0; r < d; ++r)
            for (Eigen::Index a = 0; a < d; ++a) {
                const cplx w = root_of_unity(p.lam_index * (q - r) * a, n);
                for (Eigen::Index b = 0; b < d; ++b) phases(((q * d + r) * d + a) * d + b) = w;
            }

    std::vector<std::string> relabel;
    for (std::size_t m = 0; m < n; ++m) relabel.push_back(std::to_string(mod_n(-kinv * static_cast<long>(m), n)));
    const OutcomeSet pointer_outcomes = OutcomeSet::cyclic_lattice(n);
    const ComplexMatrix pn = momentum_generator(n);
    const ComplexMatrix in = identity(d);

    // Pointer basis on [R ⊗] A ⊗ B: momentum of A, position elsewhere.
    auto pointer_basis = [&](bool with_r) {
        const ComplexMatrix basis = with_r ? tensor_all({in, f, in}) : tensor(f, in);
        const std::size_t blocks = with_r ? n : 1;
        std::vector<std::vector<std::size_t>> part(n);
        for (std::size_t r = 0; r < blocks; ++r)
            for (std::size_t m = 0; m < n; ++m)
                for (std::size_t b = 0; b < n; ++b) part[m].push_back((r * n + m) * n + b);
        return BasisPvm(basis, std::move(part), pointer_outcomes);
    };

    if (p.reading == OzawaReading::absolute) {
        StateVector app = StateVector::normalised(tensor(tensor(phi, xa), xb));
        ConservedPair c(pn, tensor_all({pn, in, in}) + tensor_all({in, in, pn}), n);
        return ModelInstance{MeasurementScheme(n, n * n * n, Coupling::diagonal(std::move(phases)),
                                               pointer_basis(true), std::move(app), std::move(relabel)),
                             position_pvm(n), std::move(c)};
    }
    StateVector app = StateVector::normalised(tensor(xa, xb));
    ConservedPair c(tensor(pn, in) + tensor(in, pn), tensor(in, pn), n);
    return ModelInstance{MeasurementScheme(n * n, n * n, Coupling::diagonal(std::move(phases)), pointer_basis(false),
                                           std::move(app), std::move(relabel)),
                         relative_position_pvm(n), std::move(c)};
}

// ---------------------------------------------------------------------------
// reference-frame families

struct FrameModel {
    Representation rep_s;
    CovariantObservable f;
    DiscreteObservable target;
};

/// Qubit S with L_S = diag(0,1), rotor R = C^n with L_R = diag(0..n-1), F the
/// angle PVM |θ_j⟩ = n^{-1/2} Σ_m ω^{jm} |m⟩, target the σ_x PVM.
inline FrameModel make_qubit_rotor(std::size_t n) {
    require_lattice(n, "make_qubit_rotor");
    const auto d = static_cast<Eigen::Index>(n);
    ComplexMatrix ls = ComplexMatrix::Zero(2, 2);
    ls(1, 1) = 1.0;
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    ComplexMatrix theta(d, d);
    for (Eigen::Index m = 0; m < d; ++m)
        for (Eigen::Index j = 0; j < d; ++j) theta(m, j) = s * root_of_unity(static_cast<long>(j * m), n);
    std::vector<std::vector<std::size_t>> part(n);
    for (std::size_t j = 0; j < n; ++j) part[j] = {j};
    const DiscreteObservable angle = pvm_from_basis(theta, part, OutcomeSet::cyclic_lattice(n));
    CyclicGroup g(n);
    return FrameModel{Representation(g, ls), CovariantObservable(Representation(g, position_generator(n)), angle),
                      spectral_pvm(pauli_x())};
}

/// S = R = C^n, both with the momentum generator (so U(k) = X^k), F the
/// position PVM of R, target the position PVM of S.
inline FrameModel make_position_frame(std::size_t n) {
    require_lattice(n, "make_position_frame");
    CyclicGroup g(n);
    const ComplexMatrix p = momentum_generator(n);
    return FrameModel{Representation(g, p), CovariantObservable(Representation(g, p), position_pvm(n)),
                      position_pvm(n)};
}

// ---------------------------------------------------------------------------
// descriptors

enum class ModelFamily { swap, lueders, von_neumann_lattice, ozawa_lattice, qubit_rotor };

inline std::string normalise_id(std::string id) {
    std::replace(id.begin(), id.end(), '-', '_');
    return id;
}

inline ModelFamily parse_family(const std::string& id) {
    const std::string s = normalise_id(id);
    if (s == "swap") return ModelFamily::swap;
    if (s == "lueders") return ModelFamily::lueders;
    if (s == "von_neumann_lattice") return ModelFamily::von_neumann_lattice;
    if (s == "ozawa_lattice") return ModelFamily::ozawa_lattice;
    if (s == "qubit_rotor") return ModelFamily::qubit_rotor;
    throw ValidationError("unknown model family '" + id + "'");
}

inline std::string family_name(ModelFamily f) {
    switch (f) {
    case ModelFamily::swap: return "swap";
    case ModelFamily::lueders: return "lueders";
    case ModelFamily::von_neumann_lattice: return "von_neumann_lattice";
    case ModelFamily::ozawa_lattice: return "ozawa_lattice";
    case ModelFamily::qubit_rotor: return "qubit_rotor";
    }
    return "?";
}

struct ModelDescriptor {
    ModelFamily family = ModelFamily::swap;
    std::size_t n = 2;
    long lam_index = 1;
    OzawaReading reading = OzawaReading::absolute;
};

/// The scheme-based families. SWAP measures σ_x against σ_z conservation;
/// Lüders measures σ_z with l_app = 0. The qubit-rotor family is not a
/// scheme: use make_qubit_rotor (or relational_scheme on top of it).
inline ModelInstance build_model(const ModelDescriptor& md) {
    switch (md.family) {
    case ModelFamily::swap: {
        const DiscreteObservable sx = spectral_pvm(pauli_x());
        return ModelInstance{make_swap(2, BasisPvm::spectral(pauli_x())), sx,
                             ConservedPair(pauli_z(), pauli_z())};
    }
    case ModelFamily::lueders: {
        const DiscreteObservable sz = spectral_pvm(pauli_z());
        return ModelInstance{make_lueders(sz), sz, ConservedPair(pauli_z(), ComplexMatrix::Zero(2, 2))};
    }
    case ModelFamily::von_neumann_lattice: return make_von_neumann_lattice(md.n, md.lam_index);
    case ModelFamily::ozawa_lattice: {
        OzawaParams p;
        p.n = md.n;
        p.lam_index = md.lam_index;
        p.reading = md.reading;
        return make_ozawa_lattice(p);
    }
    case ModelFamily::qubit_rotor: {
        // The relational scheme for the yen-transformed σ_x PVM, measured on S⊗R.
        const FrameModel fm = make_qubit_rotor(md.n);
        const DiscreteObservable rel = yen_povm(fm.target, fm.rep_s, fm.f);
        return ModelInstance{relational_scheme(rel), rel, std::nullopt};
    }
    }
    throw ValidationError("build_model: unhandled family");
}

} // namespace waylab
