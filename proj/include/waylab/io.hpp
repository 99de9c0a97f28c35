// io.hpp
// JSON scheme files.
//
//   {
//     "system_dim": 2, "apparatus_dim": 2,
//     "coupling": {"dense": M} | {"diagonal": V},
//     "pointer": {"basis": M, "partition": [[0], [1]], "outcomes": O},
//     "apparatus_state": V,
//     "relabel": ["-1", "1"],
//     "targets": O,                                   (optional)
//     "target": {"outcomes": O, "effects": [M, ...]}, (optional)
//     "conserved": {"l_sys": M, "l_app": M, "period": 5}, (optional, period optional)
//     "model": {"family": "swap", "n": 2, "lam_index": 1, "reading": "absolute"} (optional)
//   }
//
// M = {"rows": r, "cols": c, "data": [[re, im], ...]} in row-major order,
// V = [[re, im], ...], O = {"labels": [...], "values": [...], "geometry": "linear"|"cyclic"}.

#pragma once

#include "models.hpp"
#include "obs.hpp"
#include "qcore.hpp"
#include "scheme.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace waylab {

using json = nlohmann::json;

/// Parse failure naming the offending field.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& field, const std::string& what)
        : ValidationError("field '" + field + "': " + what) {}
};

namespace io {

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const ComplexMatrix& m) {
    json data = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(to_json(m(i, j)));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline json vector_to_json(const ComplexVector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
    return out;
}

inline json to_json(const OutcomeSet& o) {
    return {{"labels", o.labels()}, {"values", o.values()}, {"geometry", o.cyclic() ? "cyclic" : "linear"}};
}

inline cplx complex_from(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError(field, "expected a [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(path + key, "missing");
    return j.at(key);
}

inline std::size_t positive_size(const json& j, const std::string& field) {
    if (!j.is_number_integer() || j.get<long long>() <= 0) throw ParseError(field, "expected a positive integer");
    return j.get<std::size_t>();
}

inline ComplexMatrix matrix_from(const json& j, const std::string& field) {
    const std::size_t r = positive_size(require(j, "rows", field + "."), field + ".rows");
    const std::size_t c = positive_size(require(j, "cols", field + "."), field + ".cols");
    const json& data = require(j, "data", field + ".");
    if (!data.is_array() || data.size() != r * c)
        throw ParseError(field + ".data", "expected " + std::to_string(r * c) + " entries");
    ComplexMatrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (std::size_t k = 0; k < r * c; ++k)
        m(static_cast<Eigen::Index>(k / c), static_cast<Eigen::Index>(k % c)) =
            complex_from(data[k], field + ".data[" + std::to_string(k) + "]");
    return m;
}

inline ComplexVector vector_from(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) throw ParseError(field, "expected a non-empty array of [re, im] pairs");
    ComplexVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k)
        v(static_cast<Eigen::Index>(k)) = complex_from(j[k], field + "[" + std::to_string(k) + "]");
    return v;
}

inline OutcomeSet outcomes_from(const json& j, const std::string& field) {
    try {
        auto labels = require(j, "labels", field + ".").get<std::vector<std::string>>();
        auto values = require(j, "values", field + ".").get<std::vector<double>>();
        Geometry g = Geometry::linear;
        if (j.contains("geometry")) {
            const auto s = j.at("geometry").get<std::string>();
            if (s == "cyclic")
                g = Geometry::cyclic;
            else if (s != "linear")
                throw ParseError(field + ".geometry", "expected 'linear' or 'cyclic'");
        }
        return OutcomeSet(std::move(labels), std::move(values), g);
    } catch (const json::exception& e) {
        throw ParseError(field, e.what());
    } catch (const ParseError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ParseError(field, e.what());
    }
}

template <typename F>
auto wrap(const std::string& field, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ParseError&) {
        throw;
    } catch (const json::exception& e) {
        throw ParseError(field, e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(field, e.what());
    }
}

inline json to_json(const ModelDescriptor& md) {
    return {{"family", family_name(md.family)},
            {"n", md.n},
            {"lam_index", md.lam_index},
            {"reading", md.reading == OzawaReading::absolute ? "absolute" : "relative"}};
}

inline ModelDescriptor model_from(const json& j, const std::string& field) {
    return wrap(field, [&] {
        ModelDescriptor md;
        md.family = parse_family(require(j, "family", field + ".").get<std::string>());
        if (j.contains("n")) md.n = positive_size(j.at("n"), field + ".n");
        if (j.contains("lam_index")) md.lam_index = j.at("lam_index").get<long>();
        if (j.contains("reading")) {
            const auto r = j.at("reading").get<std::string>();
            if (r == "absolute")
                md.reading = OzawaReading::absolute;
            else if (r == "relative")
                md.reading = OzawaReading::relative;
            else
                throw ParseError(field + ".reading", "expected 'absolute' or 'relative'");
        }
        return md;
    });
}

} // namespace io

/// Everything a scheme file can carry.
struct SchemeFile {
    MeasurementScheme scheme;
    OutcomeSet targets;
    std::optional<DiscreteObservable> target;
    std::optional<ConservedPair> conserved;
    std::optional<ModelDescriptor> model;
};

inline json scheme_to_json(const MeasurementScheme& m, const std::optional<DiscreteObservable>& target,
                           const std::optional<ConservedPair>& conserved,
                           const std::optional<ModelDescriptor>& model = std::nullopt) {
    json j;
    j["system_dim"] = m.system_dim();
    j["apparatus_dim"] = m.apparatus_dim();
    if (m.coupling().is_diagonal())
        j["coupling"] = {{"diagonal", io::vector_to_json(m.coupling().phases())}};
    else
        j["coupling"] = {{"dense", io::to_json(m.coupling().dense_matrix())}};
    j["pointer"] = {{"basis", io::to_json(m.pointer().basis())},
                    {"partition", m.pointer().partition()},
                    {"outcomes", io::to_json(m.pointer().outcomes())}};
    j["apparatus_state"] = io::vector_to_json(m.apparatus_state().amplitudes());
    j["relabel"] = m.relabel();
    if (target) {
        json effects = json::array();
        for (const auto& e : target->effects()) effects.push_back(io::to_json(e));
        j["targets"] = io::to_json(target->outcomes());
        j["target"] = {{"outcomes", io::to_json(target->outcomes())}, {"effects", std::move(effects)}};
    }
    if (conserved) {
        j["conserved"] = {{"l_sys", io::to_json(conserved->l_sys)}, {"l_app", io::to_json(conserved->l_app)}};
        if (conserved->period) j["conserved"]["period"] = *conserved->period;
    }
    if (model) j["model"] = io::to_json(*model);
    return j;
}

inline json model_to_json(const ModelDescriptor& md) {
    const ModelInstance mi = build_model(md);
    return scheme_to_json(mi.scheme, mi.target, mi.conserved, md);
}

/// Validates every block; errors name the field.
inline SchemeFile parse_scheme_json(const json& j) {
    using namespace io;
    if (!j.is_object()) throw ParseError("<root>", "expected a JSON object");

    // A bare model block builds the model.
    if (j.contains("model") && !j.contains("coupling")) {
        const ModelDescriptor md = model_from(j.at("model"), "model");
        ModelInstance mi = wrap("model", [&] { return build_model(md); });
        return SchemeFile{mi.scheme, mi.target.outcomes(), mi.target, mi.conserved, md};
    }

    const std::size_t s = positive_size(require(j, "system_dim", ""), "system_dim");
    const std::size_t a = positive_size(require(j, "apparatus_dim", ""), "apparatus_dim");
    if (s * a > max_total_dim())
        throw ParseError("apparatus_dim", "total dimension " + std::to_string(s * a) + " exceeds the maximum " +
                                              std::to_string(max_total_dim()));

    const json& cj = require(j, "coupling", "");
    Coupling coupling;
    if (cj.contains("dense")) {
        coupling = Coupling(matrix_from(cj.at("dense"), "coupling.dense"));
    } else if (cj.contains("diagonal")) {
        coupling = Coupling::diagonal(vector_from(cj.at("diagonal"), "coupling.diagonal"));
    } else {
        throw ParseError("coupling", "expected a 'dense' or 'diagonal' block");
    }
    if (coupling.dim() != s * a)
        throw ParseError("coupling", "dimension " + std::to_string(coupling.dim()) + " != system_dim*apparatus_dim = " +
                                         std::to_string(s * a));
    const double ures = coupling.unitarity_residual();
    if (!(ures <= tolerances().validation))
        throw ParseError("coupling", "not unitary (residual " + std::to_string(ures) + ")");

    const json& pj = require(j, "pointer", "");
    const ComplexMatrix pbasis = matrix_from(require(pj, "basis", "pointer."), "pointer.basis");
    if (static_cast<std::size_t>(pbasis.rows()) != a)
        throw ParseError("pointer.basis", "must be apparatus_dim x apparatus_dim");
    const auto partition = wrap("pointer.partition", [&] {
        return require(pj, "partition", "pointer.").get<std::vector<std::vector<std::size_t>>>();
    });
    const OutcomeSet pout = outcomes_from(require(pj, "outcomes", "pointer."), "pointer.outcomes");
    BasisPvm pointer = wrap("pointer", [&] { return BasisPvm(pbasis, partition, pout); });

    const ComplexVector phi = vector_from(require(j, "apparatus_state", ""), "apparatus_state");
    if (static_cast<std::size_t>(phi.size()) != a) throw ParseError("apparatus_state", "length must equal apparatus_dim");
    StateVector state = wrap("apparatus_state", [&] { return StateVector(phi); });

    const auto relabel =
        wrap("relabel", [&] { return require(j, "relabel", "").get<std::vector<std::string>>(); });

    MeasurementScheme scheme =
        wrap("scheme", [&] { return MeasurementScheme(s, a, coupling, pointer, state, relabel); });

    SchemeFile out{std::move(scheme), {}, std::nullopt, std::nullopt, std::nullopt};
    if (j.contains("target")) {
        const json& tj = j.at("target");
        const OutcomeSet tout = outcomes_from(require(tj, "outcomes", "target."), "target.outcomes");
        const json& ej = require(tj, "effects", "target.");
        if (!ej.is_array()) throw ParseError("target.effects", "expected an array of matrices");
        std::vector<ComplexMatrix> effects;
        for (std::size_t k = 0; k < ej.size(); ++k)
            effects.push_back(matrix_from(ej[k], "target.effects[" + std::to_string(k) + "]"));
        out.target = wrap("target", [&] { return DiscreteObservable(tout, effects); });
        if (out.target->dim() != s) throw ParseError("target", "effects must act on the system");
        const PovmReport pr = validate_povm(*out.target);
        if (!pr.ok) throw ParseError("target", "not a valid POVM");
    }
    if (j.contains("targets"))
        out.targets = outcomes_from(j.at("targets"), "targets");
    else
        out.targets = out.target ? out.target->outcomes() : out.scheme.default_targets();
    if (out.target && !(out.target->outcomes() == out.targets))
        throw ParseError("targets", "differs from target.outcomes");
    for (const auto& lbl : out.scheme.relabel())
        if (!out.targets.index_of(lbl)) throw ParseError("relabel", "label '" + lbl + "' is not a target outcome");

    if (j.contains("conserved")) {
        const json& cj2 = j.at("conserved");
        const ComplexMatrix ls = matrix_from(require(cj2, "l_sys", "conserved."), "conserved.l_sys");
        const ComplexMatrix la = matrix_from(require(cj2, "l_app", "conserved."), "conserved.l_app");
        std::optional<std::size_t> period;
        if (cj2.contains("period")) period = positive_size(cj2.at("period"), "conserved.period");
        out.conserved = wrap("conserved", [&] { return ConservedPair(ls, la, period); });
        if (static_cast<std::size_t>(ls.rows()) != s || static_cast<std::size_t>(la.rows()) != a)
            throw ParseError("conserved", "l_sys / l_app dimensions do not match the scheme");
    }
    if (j.contains("model")) out.model = model_from(j.at("model"), "model");
    return out;
}

inline SchemeFile parse_scheme_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("<file>", "cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("<file>", std::string("malformed JSON: ") + e.what());
    }
    return parse_scheme_json(j);
}

} // namespace waylab
