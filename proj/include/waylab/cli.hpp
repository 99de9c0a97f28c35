// cli.hpp
// Batch runner behind the `waylab` executable. Each command writes either a
// JSON report (audit, relativise, search, export) or CSV (sweep, bound) to
// the configured output, and returns the process exit code:
//
//   0  completed
//   1  invalid input
//   2  an invariant-violation finding (a bug signal)

#pragma once

#include "io.hpp"
#include "models.hpp"
#include "relfr.hpp"
#include "way.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace waylab {

enum class Command { audit, sweep, bound, relativise, search, export_model };

struct RunConfig {
    Command command = Command::audit;
    std::string scheme_path;        // --scheme
    std::string model;              // --model
    std::size_t n = 0;              // --n (0 = family default)
    long lam_index = 1;             // --lam-index
    std::string reading = "absolute";
    std::string budgets;            // --budgets, "1..8" or "1,2,4"
    double eps = 0.05;              // --eps
    std::optional<double> tol;      // --tol
    std::uint64_t seed = 0;         // --seed
    std::string out;                // --out, empty = stdout
    std::string states = "grid16";  // bound: --states gridK
    std::string demo = "z2";        // relativise: --demo
    std::size_t trials = 200;       // search: --trials
};

namespace cli {

inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// "a..b" (inclusive) or a comma list.
inline std::vector<std::size_t> parse_budgets(const std::string& text) {
    std::vector<std::size_t> out;
    auto to_size = [&](const std::string& s) {
        std::size_t pos = 0;
        long long v = -1;
        try {
            v = std::stoll(s, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != s.size() || v <= 0) throw ValidationError("--budgets: cannot parse '" + s + "'");
        return static_cast<std::size_t>(v);
    };
    if (text.empty()) throw ValidationError("--budgets is required");
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        const std::size_t a = to_size(text.substr(0, dots));
        const std::size_t b = to_size(text.substr(dots + 2));
        if (b < a) throw ValidationError("--budgets: empty range '" + text + "'");
        for (std::size_t k = a; k <= b; ++k) out.push_back(k);
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_size(item));
    return out;
}

inline std::size_t parse_grid(const std::string& s) {
    if (s.rfind("grid", 0) != 0) throw ValidationError("--states: expected gridK, got '" + s + "'");
    try {
        std::size_t pos = 0;
        const long long k = std::stoll(s.substr(4), &pos);
        if (pos == s.size() - 4 && k > 0) return static_cast<std::size_t>(k);
    } catch (const std::exception&) {
    }
    throw ValidationError("--states: expected gridK, got '" + s + "'");
}

inline ModelDescriptor descriptor(const RunConfig& cfg) {
    ModelDescriptor md;
    md.family = parse_family(cfg.model);
    switch (md.family) {
    case ModelFamily::swap:
    case ModelFamily::lueders: md.n = 2; break;
    case ModelFamily::von_neumann_lattice: md.n = cfg.n ? cfg.n : 5; break;
    case ModelFamily::ozawa_lattice: md.n = cfg.n ? cfg.n : 5; break;
    case ModelFamily::qubit_rotor: md.n = cfg.n ? cfg.n : 4; break;
    }
    md.lam_index = cfg.lam_index;
    if (cfg.reading == "absolute")
        md.reading = OzawaReading::absolute;
    else if (cfg.reading == "relative")
        md.reading = OzawaReading::relative;
    else
        throw ValidationError("--reading: expected 'absolute' or 'relative'");
    return md;
}

inline SchemeFile load(const RunConfig& cfg) {
    if (!cfg.scheme_path.empty() && !cfg.model.empty())
        throw ValidationError("give either --scheme or --model, not both");
    if (!cfg.scheme_path.empty()) {
        if (!std::filesystem::exists(cfg.scheme_path))
            throw ValidationError("scheme file '" + cfg.scheme_path + "' does not exist");
        return parse_scheme_file(cfg.scheme_path);
    }
    if (!cfg.model.empty()) {
        const ModelDescriptor md = descriptor(cfg);
        ModelInstance mi = build_model(md);
        return SchemeFile{mi.scheme, mi.target.outcomes(), mi.target, mi.conserved, md};
    }
    throw ValidationError("one of --scheme or --model is required");
}

inline json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
inline json opt_json(const std::optional<bool>& v) { return v ? json(*v) : json(nullptr); }

/// Rows of "re+imi" strings, for human-readable demo output.
inline json matrix_rows(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            char buf[64];
            const double re = std::abs(m(i, j).real()) < 1e-12 ? 0.0 : m(i, j).real();
            const double im = std::abs(m(i, j).imag()) < 1e-12 ? 0.0 : m(i, j).imag();
            if (im == 0.0)
                std::snprintf(buf, sizeof buf, "%.6g", re);
            else
                std::snprintf(buf, sizeof buf, "%.6g%+.6gi", re, im);
            row.push_back(buf);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// commands

inline int run_audit(const RunConfig& cfg, std::ostream& os) {
    const SchemeFile sf = load(cfg);
    json report;
    report["system_dim"] = sf.scheme.system_dim();
    report["apparatus_dim"] = sf.scheme.apparatus_dim();
    const double tol = cfg.tol.value_or(tolerances().validation);
    int code = 0;
    if (sf.target && is_sharp(*sf.target)) {
        const WayAudit a = way_audit(sf.scheme, sf.conserved, *sf.target, tol);
        report["conservation_ok"] = opt_json(a.conservation_ok);
        report["yanase_ok"] = opt_json(a.yanase_ok);
        report["conservation_defect"] = opt_json(a.conservation_defect);
        report["yanase_defect"] = opt_json(a.yanase_defect);
        report["commutator_norm"] = opt_json(a.commutator_norm);
        report["repeatability_defect"] = a.repeatability_defect;
        report["prc_defect_vs_target"] = a.prc_defect_vs_target;
        report["verdict"] = verdict_name(a.verdict);
        report["violated"] = a.violated;
        if (a.verdict == Verdict::exact_measurement_of_noninvariant) code = 2;
    } else {
        // No sharp target: report the measured observable's own properties.
        const DiscreteObservable e = measured_observable(sf.scheme, sf.targets);
        report["measured_is_sharp"] = is_sharp(e);
        report["repeatability_defect"] = repeatability_defect(sf.scheme, sf.targets);
        if (sf.target) report["prc_defect_vs_target"] = observable_distance(e, *sf.target);
        if (sf.conserved) {
            report["conservation_defect"] = conservation_defect(sf.scheme, *sf.conserved);
            report["yanase_defect"] = yanase_defect(sf.scheme, *sf.conserved);
        }
        report["verdict"] = nullptr;
    }
    os << report.dump(2) << "\n";
    return code;
}

inline int run_sweep(const RunConfig& cfg, std::ostream& os) {
    if (cfg.model.empty()) throw ValidationError("sweep needs --model (qubit-rotor or position-lattice)");
    const std::size_t n = cfg.n ? cfg.n : 8;
    SweepOptions opt;
    opt.eps = cfg.eps;
    opt.seed = cfg.seed;
    const auto rows = error_vs_spread_sweep(cfg.model, n, parse_budgets(cfg.budgets), opt);
    os << "budget,spread_variance,spread_width,min_error\n";
    int code = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        os << r.budget << ',' << fmt(r.spread_variance) << ',' << r.spread_width << ',' << fmt(r.min_error) << '\n';
        if (i > 0 && r.min_error > rows[i - 1].min_error + 1e-12) code = 2;
    }
    return code;
}

inline int run_bound(const RunConfig& cfg, std::ostream& os) {
    const SchemeFile sf = load(cfg);
    if (!sf.conserved) throw ValidationError("bound needs a conserved pair in the scheme");
    const ComplexMatrix a = sf.target ? sf.target->first_moment()
                                      : measured_observable(sf.scheme, sf.targets).first_moment();
    const auto states = state_grid(sf.scheme.system_dim(), parse_grid(cfg.states), cfg.seed);
    os << "state,epsilon_sq,bound_rhs,delta_l_sq,commutator_re,commutator_im,degenerate\n";
    int code = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const NoiseReport r = noise_report(sf.scheme, *sf.conserved, 0.5 * (a + a.adjoint()), states[i], sf.targets);
        os << i << ',' << fmt(r.epsilon_sq) << ',' << fmt(r.bound_rhs) << ',' << fmt(r.delta_l_sq) << ','
           << fmt(r.commutator_expect.real()) << ',' << fmt(r.commutator_expect.imag()) << ','
           << (r.degenerate ? 1 : 0) << '\n';
        if (r.epsilon_sq * r.delta_l_sq + 1e-9 < std::norm(r.commutator_expect) / 4.0) code = 2;
    }
    return code;
}

inline int run_relativise(const RunConfig& cfg, std::ostream& os) {
    json report;
    report["demo"] = cfg.demo;
    int code = 0;
    if (cfg.demo == "z2") {
        // U_S(1) = σ_z, U_R(1) = σ_x, F = computational PVM
        CyclicGroup g(2);
        ComplexMatrix ls = ComplexMatrix::Zero(2, 2);
        ls(1, 1) = 1.0;
        const ComplexMatrix lr = 0.5 * (identity(2) - pauli_x());
        const Representation rs(g, ls), rr(g, lr);
        const CovariantObservable f(rr, basis_pvm(OutcomeSet::cyclic_lattice(2)));
        const ComplexMatrix y = yen(pauli_x(), rs, f);
        const double dev = op_norm(y - tensor(pauli_x(), pauli_z()));
        const double inv = invariance_defect(y, rs, rr);
        report["input"] = "sigma_x";
        report["yen"] = matrix_rows(y);
        report["expected"] = "sigma_x (x) sigma_z";
        report["deviation_from_expected"] = dev;
        report["invariance_defect"] = inv;
        if (dev > 1e-12 || inv > 1e-9) code = 2;
    } else if (cfg.demo == "position") {
        const std::size_t n = cfg.n ? cfg.n : 4;
        const FrameModel fm = make_position_frame(n);
        const DiscreteObservable rel = yen_povm(position_pvm(n), fm.rep_s, fm.f);
        const double dev = observable_distance(rel, relative_position_pvm(n));
        double inv = 0.0;
        for (const auto& e : rel.effects()) inv = std::max(inv, invariance_defect(e, fm.rep_s, fm.f.rep()));
        report["n"] = n;
        report["deviation_from_relative_position"] = dev;
        report["invariance_defect"] = inv;
        if (dev > 1e-9 || inv > 1e-9) code = 2;
    } else if (cfg.demo == "rotor") {
        const std::size_t n = cfg.n ? cfg.n : 8;
        const FrameModel fm = make_qubit_rotor(n);
        std::vector<std::optional<std::size_t>> budgets;
        for (std::size_t b = 1; b <= n; ++b) budgets.emplace_back(b);
        budgets.emplace_back(std::nullopt);
        json rows = json::array();
        double prev = 1e300;
        for (const auto& r : high_localisation_audit(fm.target, fm.rep_s, fm.f, budgets)) {
            rows.push_back({{"budget", r.budget ? json(*r.budget) : json("unlimited")},
                            {"localisation_probability", r.probability},
                            {"residual", r.residual}});
            if (r.residual > prev + 1e-12) code = 2;
            prev = r.residual;
        }
        report["n"] = n;
        report["rows"] = std::move(rows);
    } else {
        throw ValidationError("--demo: expected z2, position or rotor");
    }
    os << report.dump(2) << "\n";
    return code;
}

inline int run_search(const RunConfig& cfg, std::ostream& os) {
    WaySearchOptions opt;
    opt.trials = cfg.trials;
    opt.seed = cfg.seed;
    const WaySearchResult r = randomized_way_search(opt);
    json report = {{"trials", r.trials},
                   {"admissible", r.admissible},
                   {"noncommuting_checked", r.noncommuting_checked},
                   {"min_prc_defect", r.min_prc_defect},
                   {"counterexamples", r.counterexamples}};
    os << report.dump(2) << "\n";
    return r.counterexamples == 0 ? 0 : 2;
}

inline int run_export(const RunConfig& cfg, std::ostream& os) {
    if (cfg.model.empty()) throw ValidationError("export needs --model");
    os << model_to_json(descriptor(cfg)).dump(1) << "\n";
    return 0;
}

} // namespace cli

/// Runs one command. Errors in the input are reported on `err` with exit 1.
inline int run(const RunConfig& cfg, std::ostream& out_default = std::cout, std::ostream& err = std::cerr) {
    try {
        if (cfg.tol && !(*cfg.tol > 0.0)) throw ValidationError("--tol must be positive");
        if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw ValidationError("--eps must lie in (0, 1)");
        std::ofstream file;
        std::ostream* os = &out_default;
        if (!cfg.out.empty()) {
            file.open(cfg.out);
            if (!file) throw ValidationError("cannot write '" + cfg.out + "'");
            os = &file;
        }
        switch (cfg.command) {
        case Command::audit: return cli::run_audit(cfg, *os);
        case Command::sweep: return cli::run_sweep(cfg, *os);
        case Command::bound: return cli::run_bound(cfg, *os);
        case Command::relativise: return cli::run_relativise(cfg, *os);
        case Command::search: return cli::run_search(cfg, *os);
        case Command::export_model: return cli::run_export(cfg, *os);
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace waylab
