#include "dh/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_set>

#include "dh/dynamics.hpp"
#include "dh/errors.hpp"
#include "dh/oracle.hpp"

namespace dh {
namespace {

using nlohmann::json;

// Descriptor-vs-dense cross-checks build full 4^n matrices, so they cut off
// earlier than the state-vector comparison.
constexpr std::size_t kOracleDescriptorLimit = 8;

Letter letter_from_string(const std::string& s) {
    if (s == "X") return Letter::X;
    if (s == "Y") return Letter::Y;
    if (s == "Z") return Letter::Z;
    throw UsageError("unknown measurement basis '" + s + "' (expected X, Y, or Z)");
}

std::string letter_to_string(Letter l) {
    switch (l) {
        case Letter::I: return "I";
        case Letter::X: return "X";
        case Letter::Y: return "Y";
        case Letter::Z: return "Z";
    }
    throw InternalError("bad letter");
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

double distribution_gap(const OutcomeDistribution& p, const OutcomeDistribution& q) {
    double gap = 0.0;
    for (const auto& [label, value] : p) {
        const auto it = q.find(label);
        gap = std::max(gap, std::abs(value - (it == q.end() ? 0.0 : it->second)));
    }
    for (const auto& [label, value] : q)
        if (!p.contains(label)) gap = std::max(gap, std::abs(value));
    return gap;
}

// ----- json <-> core types ---------------------------------------------------

json gate_to_json(const GateOp& g) {
    json j;
    j["gate"] = kind_name(g.kind);
    j["targets"] = g.targets;
    if (g.kind == GateKind::Rx || g.kind == GateKind::Ry || g.kind == GateKind::Rz) {
        j["angle"] = g.angle;
        if (!g.param.empty()) j["param"] = g.param;
    }
    if (g.kind == GateKind::General) {
        json rows = json::array();
        for (Eigen::Index r = 0; r < g.matrix.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < g.matrix.cols(); ++c)
                row.push_back(json::array({g.matrix(r, c).real(), g.matrix(r, c).imag()}));
            rows.push_back(row);
        }
        j["matrix"] = rows;
    }
    return j;
}

GateOp gate_from_json(const json& j) {
    const GateKind kind = kind_from_name(j.at("gate").get<std::string>());
    const std::vector<std::size_t> t = j.at("targets").get<std::vector<std::size_t>>();
    const auto one = [&]() -> std::size_t {
        if (t.size() != 1) throw UsageError("gate '" + kind_name(kind) + "' takes one target");
        return t[0];
    };
    const auto two = [&]() -> std::pair<std::size_t, std::size_t> {
        if (t.size() != 2) throw UsageError("gate '" + kind_name(kind) + "' takes two targets");
        return {t[0], t[1]};
    };
    switch (kind) {
        case GateKind::X: return GateOp::x(one());
        case GateKind::Y: return GateOp::y(one());
        case GateKind::Z: return GateOp::z(one());
        case GateKind::H: return GateOp::h(one());
        case GateKind::S: return GateOp::s(one());
        case GateKind::Sdg: return GateOp::sdg(one());
        case GateKind::T: return GateOp::t(one());
        case GateKind::Tdg: return GateOp::tdg(one());
        case GateKind::Cnot: {
            auto [c, tq] = two();
            return GateOp::cnot(c, tq);
        }
        case GateKind::Cz: {
            auto [a, b] = two();
            return GateOp::cz(a, b);
        }
        case GateKind::Swap: {
            auto [a, b] = two();
            return GateOp::swap(a, b);
        }
        case GateKind::Rx:
        case GateKind::Ry:
        case GateKind::Rz: {
            const double angle = j.at("angle").get<double>();
            const std::string param = j.value("param", std::string{});
            if (kind == GateKind::Rx) return GateOp::rx(one(), angle, param);
            if (kind == GateKind::Ry) return GateOp::ry(one(), angle, param);
            return GateOp::rz(one(), angle, param);
        }
        case GateKind::General: {
            const json& rows = j.at("matrix");
            const Eigen::Index dim = static_cast<Eigen::Index>(rows.size());
            Eigen::MatrixXcd m(dim, dim);
            for (Eigen::Index r = 0; r < dim; ++r) {
                const json& row = rows.at(static_cast<std::size_t>(r));
                if (static_cast<Eigen::Index>(row.size()) != dim)
                    throw UsageError("general gate matrix must be square");
                for (Eigen::Index c = 0; c < dim; ++c)
                    m(r, c) = cplx(row.at(static_cast<std::size_t>(c)).at(0).get<double>(),
                                   row.at(static_cast<std::size_t>(c)).at(1).get<double>());
            }
            return GateOp::general(t, m);
        }
    }
    throw InternalError("unhandled gate kind");
}

std::vector<GateOp> gates_from_json(const json& arr) {
    std::vector<GateOp> gates;
    for (const json& g : arr) gates.push_back(gate_from_json(g));
    return gates;
}

json gates_to_json(const std::vector<GateOp>& gates) {
    json arr = json::array();
    for (const GateOp& g : gates) arr.push_back(gate_to_json(g));
    return arr;
}

json prep_to_json(const PrepDirective& d) {
    json j;
    if (!d.is_mixture) {
        j["qubit"] = d.qubit;
        j["state"] = d.state;
        return j;
    }
    json alts = json::array();
    for (const auto& alt : d.mixture.alternatives)
        alts.push_back({{"probability", alt.probability}, {"gates", gates_to_json(alt.gates)}});
    j["mixture"] = alts;
    return j;
}

PrepDirective prep_from_json(const json& j) {
    PrepDirective d;
    if (j.contains("mixture")) {
        d.is_mixture = true;
        for (const json& alt : j.at("mixture")) {
            TransformationContext::Alternative a;
            a.probability = alt.at("probability").get<double>();
            a.gates = gates_from_json(alt.at("gates"));
            d.mixture.alternatives.push_back(std::move(a));
        }
        return d;
    }
    d.qubit = j.at("qubit").get<std::size_t>();
    d.state = j.at("state").get<std::string>();
    return d;
}

json measurement_to_json(const MeasurementDef& m) {
    json j;
    j["name"] = m.name;
    switch (m.kind) {
        case MeasurementDef::Kind::Preset:
            j["preset"] = letter_to_string(m.preset);
            j["qubits"] = m.qubits;
            break;
        case MeasurementDef::Kind::Observable: {
            json terms = json::array();
            for (const auto& t : m.terms)
                terms.push_back({{"coeff", t.coeff}, {"letters", t.letters}});
            j["terms"] = terms;
            j["qubits"] = m.qubits;
            break;
        }
        case MeasurementDef::Kind::Tables:
            j["outcomes"] = m.outcomes;
            j["alpha"] = m.alpha;
            j["qubits"] = m.qubits;
            break;
        case MeasurementDef::Kind::Joint: {
            json parts = json::array();
            for (const auto& p : m.parts) parts.push_back(measurement_to_json(p));
            j["joint"] = parts;
            break;
        }
    }
    return j;
}

MeasurementDef measurement_from_json(const json& j) {
    MeasurementDef m;
    m.name = j.at("name").get<std::string>();
    if (j.contains("preset")) {
        m.kind = MeasurementDef::Kind::Preset;
        m.preset = letter_from_string(j.at("preset").get<std::string>());
        m.qubits = j.at("qubits").get<std::vector<std::size_t>>();
    } else if (j.contains("terms")) {
        m.kind = MeasurementDef::Kind::Observable;
        for (const json& t : j.at("terms"))
            m.terms.push_back({t.at("coeff").get<double>(), t.at("letters").get<std::string>()});
        m.qubits = j.at("qubits").get<std::vector<std::size_t>>();
    } else if (j.contains("alpha")) {
        m.kind = MeasurementDef::Kind::Tables;
        m.outcomes = j.at("outcomes").get<std::vector<std::string>>();
        m.alpha = j.at("alpha").get<std::vector<std::vector<double>>>();
        m.qubits = j.at("qubits").get<std::vector<std::size_t>>();
    } else if (j.contains("joint")) {
        m.kind = MeasurementDef::Kind::Joint;
        for (const json& p : j.at("joint")) m.parts.push_back(measurement_from_json(p));
    } else {
        throw UsageError("measurement '" + m.name + "' needs 'preset', 'terms', or 'joint'");
    }
    return m;
}

Region region_from_json(const json& j) {
    return Region::of(j.get<std::vector<std::size_t>>());
}

// ----- measurement construction ----------------------------------------------

MeasurementSpec build_spec(const MeasurementDef& m) {
    switch (m.kind) {
        case MeasurementDef::Kind::Preset:
            if (m.qubits.size() != 1)
                throw UsageError("preset measurement '" + m.name + "' takes exactly one qubit");
            return MeasurementSpec::preset(m.qubits[0], m.preset);
        case MeasurementDef::Kind::Observable: {
            if (m.qubits.empty())
                throw UsageError("observable measurement '" + m.name + "' needs qubits");
            if (!std::ranges::is_sorted(m.qubits) ||
                std::ranges::adjacent_find(m.qubits) != m.qubits.end())
                throw UsageError("observable qubits must be strictly ascending in '" + m.name +
                                 "'");
            if (m.terms.empty())
                throw UsageError("observable measurement '" + m.name + "' needs terms");
            const std::size_t k = m.qubits.size();
            const std::size_t dim = 1ull << k;
            Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
            for (const auto& term : m.terms) {
                if (term.letters.size() != k)
                    throw UsageError("term letters must match qubit count in '" + m.name + "'");
                Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(1, 1);
                for (char c : term.letters) {
                    Letter l;
                    switch (c) {
                        case 'I': l = Letter::I; break;
                        case 'X': l = Letter::X; break;
                        case 'Y': l = Letter::Y; break;
                        case 'Z': l = Letter::Z; break;
                        default:
                            throw UsageError("bad letter '" + std::string(1, c) + "' in '" +
                                             m.name + "'");
                    }
                    p = kron(p, pauli_letter_matrix(l));
                }
                a += term.coeff * p;
            }
            return MeasurementSpec::from_observable(Region::of(m.qubits), a);
        }
        case MeasurementDef::Kind::Tables: {
            if (m.qubits.empty() || !std::ranges::is_sorted(m.qubits) ||
                std::ranges::adjacent_find(m.qubits) != m.qubits.end())
                throw UsageError("table qubits must be strictly ascending in '" + m.name + "'");
            if (m.outcomes.size() != m.alpha.size())
                throw UsageError("outcome/table count mismatch in '" + m.name + "'");
            std::vector<Eigen::MatrixXcd> elements;
            elements.reserve(m.alpha.size());
            for (const auto& table : m.alpha)
                elements.push_back(reconstruct_povm(table, m.qubits.size()));
            return MeasurementSpec::from_matrices(Region::of(m.qubits), m.outcomes, elements);
        }
        case MeasurementDef::Kind::Joint:
            throw InternalError("build_spec called on a joint measurement");
    }
    throw InternalError("unhandled measurement kind");
}

// ----- pipeline branches ------------------------------------------------------

// One epistemic branch plus the gate history the dense engine needs to
// replay it (pure preparations ride along as 2x2 general gates).
struct RunBranch {
    double weight = 1.0;
    OnticState state;
    std::vector<GateOp> history;
};

std::vector<RunBranch> prepare_branches(std::size_t n, const std::vector<PrepDirective>& prep) {
    std::vector<RunBranch> branches;
    branches.push_back({1.0, fresh_universe(n), {}});
    for (const auto& directive : prep) {
        if (!directive.is_mixture) {
            const Eigen::Matrix2cd u = named_state_unitary(directive.state);
            for (auto& b : branches) {
                b.state = prepare_pure(b.state, directive.qubit, u);
                b.history.push_back(GateOp::general({directive.qubit}, u));
            }
            continue;
        }
        directive.mixture.validate(n);
        std::vector<RunBranch> next;
        for (const auto& b : branches)
            for (const auto& alt : directive.mixture.alternatives) {
                const double w = b.weight * alt.probability;
                if (w < 1e-12) continue;
                RunBranch nb{w, apply_circuit(b.state, alt.gates), b.history};
                nb.history.insert(nb.history.end(), alt.gates.begin(), alt.gates.end());
                next.push_back(std::move(nb));
            }
        branches = std::move(next);
    }
    return branches;
}

void apply_to_branches(std::vector<RunBranch>& branches, const std::vector<GateOp>& gates) {
    for (auto& b : branches) {
        b.state = apply_circuit(b.state, gates);
        b.history.insert(b.history.end(), gates.begin(), gates.end());
    }
}

EpistemicState to_epistemic(const std::vector<RunBranch>& branches) {
    std::vector<EpistemicState::Branch> out;
    out.reserve(branches.size());
    for (const auto& b : branches) out.push_back({b.weight, b.state});
    return EpistemicState(std::move(out));
}

// ----- locality report plumbing ----------------------------------------------

LocalityReport merge_reports(const std::vector<LocalityReport>& parts) {
    if (parts.empty()) throw InternalError("merge_reports on empty list");
    LocalityReport merged = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const LocalityReport& r = parts[i];
        merged.trials += r.trials;
        merged.max_gap = std::max(merged.max_gap, r.max_gap);
        if (!r.holds && merged.holds) {
            merged.holds = false;
            merged.witness = r.witness;
            if (merged.witness)
                merged.witness->description =
                    "branch " + std::to_string(i) + ": " + merged.witness->description;
        }
    }
    return merged;
}

json trace_to_json(const DependencyMap& map) {
    json j;
    j["tolerance"] = map.tolerance;
    json params = json::array();
    for (const auto& p : map.parameters) {
        json entry;
        entry["parameter"] = p.parameter;
        json elems = json::array();
        for (const auto& e : p.descriptor_elements)
            elems.push_back(json::array({e.qubit, std::string(1, e.element)}));
        entry["descriptor_elements"] = elems;
        entry["local_statistics"] = p.local_statistics;
        json joints = json::array();
        for (const auto& [a, b] : p.joint_statistics) joints.push_back(json::array({a, b}));
        entry["joint_statistics"] = joints;
        entry["locally_inaccessible"] = p.locally_inaccessible;
        params.push_back(std::move(entry));
    }
    j["parameters"] = params;
    return j;
}

// ----- oracle comparison ------------------------------------------------------

std::vector<std::pair<std::string, oracle::DenseOperator>> spec_to_povm(
    const MeasurementSpec& spec) {
    std::vector<std::pair<std::string, oracle::DenseOperator>> out;
    for (std::size_t m = 0; m < spec.outcomes.size(); ++m)
        out.push_back({spec.outcomes[m],
                       {reconstruct_povm(spec.alpha[m], spec.region.size()), spec.region.indices}});
    return out;
}

std::vector<std::pair<std::string, oracle::DenseOperator>> joint_povm(const MeasurementSpec& a,
                                                                      const MeasurementSpec& b) {
    std::vector<std::pair<std::string, oracle::DenseOperator>> out;
    for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
        const Eigen::MatrixXcd ma = reconstruct_povm(a.alpha[i], a.region.size());
        for (std::size_t j = 0; j < b.outcomes.size(); ++j) {
            const Eigen::MatrixXcd mb = reconstruct_povm(b.alpha[j], b.region.size());
            std::vector<std::size_t> targets = a.region.indices;
            targets.insert(targets.end(), b.region.indices.begin(), b.region.indices.end());
            out.push_back({a.outcomes[i] + "," + b.outcomes[j], {kron(ma, mb), targets}});
        }
    }
    return out;
}

}  // namespace

json locality_report_to_json(const LocalityReport& r) {
    json j;
    j["property"] = property_name(r.property);
    j["holds"] = r.holds;
    j["trials"] = r.trials;
    j["tolerance"] = r.tolerance;
    j["max_gap"] = r.max_gap;
    if (r.witness) {
        j["witness"] = {{"description", r.witness->description},
                        {"gap", r.witness->gap},
                        {"seed", r.witness->seed},
                        {"trial", r.witness->trial}};
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

json scenario_to_json(const Scenario& sc) {
    json j;
    j["name"] = sc.name;
    j["description"] = sc.description;
    j["n_qubits"] = sc.n_qubits;
    j["seed"] = sc.seed;
    j["tolerance"] = sc.tolerance;
    j["oracle_check"] = sc.oracle_check;
    j["dl_trials"] = sc.dl_trials;
    j["report_state"] = sc.report_state;
    if (sc.variants.empty()) {
        json prep = json::array();
        for (const auto& d : sc.preparation) prep.push_back(prep_to_json(d));
        j["preparation"] = prep;
        j["circuit"] = gates_to_json(sc.circuit);
    } else {
        json variants = json::array();
        for (const auto& v : sc.variants) {
            json vj;
            vj["name"] = v.name;
            json prep = json::array();
            for (const auto& d : v.preparation) prep.push_back(prep_to_json(d));
            vj["preparation"] = prep;
            vj["circuit"] = gates_to_json(v.circuit);
            variants.push_back(std::move(vj));
        }
        j["variants"] = variants;
    }
    json meas = json::array();
    for (const auto& m : sc.measurements) meas.push_back(measurement_to_json(m));
    j["measurements"] = meas;
    j["checks"] = sc.checks;
    if (sc.region_a) j["region_a"] = sc.region_a->indices;
    if (sc.region_b) j["region_b"] = sc.region_b->indices;
    if (sc.dl_region_a) j["dl_region_a"] = sc.dl_region_a->indices;
    if (sc.dl_region_b) j["dl_region_b"] = sc.dl_region_b->indices;
    if (!sc.settings_a.empty()) {
        json arr = json::array();
        for (const auto& m : sc.settings_a) arr.push_back(measurement_to_json(m));
        j["settings_a"] = arr;
    }
    if (!sc.settings_b.empty()) {
        json arr = json::array();
        for (const auto& m : sc.settings_b) arr.push_back(measurement_to_json(m));
        j["settings_b"] = arr;
    }
    if (sc.partition) {
        json arr = json::array();
        for (const auto& r : *sc.partition) arr.push_back(r.indices);
        j["partition"] = arr;
    }
    if (sc.chsh) j["chsh"] = {{"first", sc.chsh->first}, {"second", sc.chsh->second}};
    if (sc.transfer)
        j["transfer"] = {{"input", sc.transfer->input},
                         {"output", sc.transfer->output},
                         {"prefix", sc.transfer->prefix}};
    if (!sc.trace_probes.empty()) {
        json probes = json::array();
        for (const auto& p : sc.trace_probes)
            probes.push_back({{"parameter", p.parameter}, {"values", p.values}});
        j["trace"] = {{"probes", probes}};
    }
    if (sc.probe_region) j["probe_region"] = sc.probe_region->indices;
    return j;
}

namespace {

void validate_scenario(const Scenario& sc) {
    if (sc.name.empty()) throw UsageError("scenario needs a name");
    if (sc.n_qubits == 0) throw UsageError("n_qubits must be positive");
    if (!(sc.tolerance > 0.0)) throw UsageError("tolerance must be positive");

    const auto check_prep = [&](const std::vector<PrepDirective>& prep) {
        for (const auto& d : prep) {
            if (d.is_mixture) {
                d.mixture.validate(sc.n_qubits);
            } else {
                if (d.qubit >= sc.n_qubits) throw UsageError("preparation qubit out of range");
                named_state_unitary(d.state);  // throws on unknown name
            }
        }
    };
    const auto check_gates = [&](const std::vector<GateOp>& gates) {
        for (const auto& g : gates) validate_targets(g, sc.n_qubits);
    };

    if (sc.variants.empty()) {
        check_prep(sc.preparation);
        check_gates(sc.circuit);
    } else {
        if (sc.variants.size() < 2)
            throw UsageError("variants need at least two alternatives to compare");
        if (!sc.probe_region)
            throw UsageError("variants require a probe_region for the comparison");
        std::unordered_set<std::string> names;
        for (const auto& v : sc.variants) {
            if (v.name.empty()) throw UsageError("variant needs a name");
            if (!names.insert(v.name).second)
                throw UsageError("duplicate variant name '" + v.name + "'");
            check_prep(v.preparation);
            check_gates(v.circuit);
        }
    }

    const std::set<std::string> known{"S", "SL", "DL", "PI", "F", "LC", "trace"};
    bool statistical = false, dynamical = false, traced = false;
    for (const auto& c : sc.checks) {
        if (!known.contains(c)) throw UsageError("unknown check '" + c + "'");
        if (c == "SL" || c == "PI" || c == "F" || c == "LC") statistical = true;
        if (c == "DL") dynamical = true;
        if (c == "trace") traced = true;
    }
    const auto check_region = [&](const std::optional<Region>& r, const char* what) {
        if (!r) return;
        for (std::size_t q : r->indices)
            if (q >= sc.n_qubits) throw UsageError(std::string(what) + " index out of range");
    };
    check_region(sc.region_a, "region_a");
    check_region(sc.region_b, "region_b");
    check_region(sc.dl_region_a, "dl_region_a");
    check_region(sc.dl_region_b, "dl_region_b");
    check_region(sc.probe_region, "probe_region");
    if (statistical && (!sc.region_a || !sc.region_b))
        throw UsageError("SL/PI/F/LC checks require region_a and region_b");
    if (dynamical && !(sc.dl_region_a || sc.region_a) && !(sc.dl_region_b || sc.region_b))
        throw UsageError("DL check requires regions");
    if (dynamical) {
        if (!(sc.dl_region_a || sc.region_a) || !(sc.dl_region_b || sc.region_b))
            throw UsageError("DL check requires both regions");
    }
    if (traced && sc.trace_probes.empty())
        throw UsageError("trace check requires trace probes");
    if (traced && !sc.variants.empty())
        throw UsageError("trace check is only supported without variants");
    if (sc.partition) {
        for (const auto& r : *sc.partition) check_region(r, "partition");
    }
    if (sc.chsh) {
        if (sc.chsh->first >= sc.n_qubits || sc.chsh->second >= sc.n_qubits)
            throw UsageError("chsh qubit out of range");
        if (sc.chsh->first == sc.chsh->second)
            throw UsageError("chsh qubits must differ");
    }
    if (sc.transfer) {
        if (sc.transfer->input >= sc.n_qubits || sc.transfer->output >= sc.n_qubits)
            throw UsageError("transfer qubit out of range");
        if (sc.transfer->prefix > sc.circuit.size())
            throw UsageError("transfer prefix exceeds circuit length");
        if (!sc.variants.empty())
            throw UsageError("transfer check is only supported without variants");
    }
    for (const auto& p : sc.trace_probes) {
        if (p.parameter.empty()) throw UsageError("trace probe needs a parameter id");
        if (p.values.size() < 2) throw UsageError("trace probe needs at least two values");
    }
}

}  // namespace

Scenario scenario_from_json(const json& j) {
    Scenario sc;
    try {
        if (!j.is_object()) throw UsageError("scenario must be a JSON object");
        sc.name = j.at("name").get<std::string>();
        sc.description = j.value("description", std::string{});
        sc.n_qubits = j.at("n_qubits").get<std::size_t>();
        sc.seed = j.value("seed", std::uint64_t{1});
        sc.tolerance = j.value("tolerance", 1e-9);
        sc.oracle_check = j.value("oracle_check", true);
        sc.dl_trials = j.value("dl_trials", std::size_t{100});
        sc.report_state = j.value("report_state", false);

        if (j.contains("preparation"))
            for (const json& d : j.at("preparation")) sc.preparation.push_back(prep_from_json(d));
        if (j.contains("circuit")) sc.circuit = gates_from_json(j.at("circuit"));
        if (j.contains("measurements"))
            for (const json& m : j.at("measurements"))
                sc.measurements.push_back(measurement_from_json(m));
        if (j.contains("checks")) sc.checks = j.at("checks").get<std::vector<std::string>>();
        if (j.contains("region_a")) sc.region_a = region_from_json(j.at("region_a"));
        if (j.contains("region_b")) sc.region_b = region_from_json(j.at("region_b"));
        if (j.contains("dl_region_a")) sc.dl_region_a = region_from_json(j.at("dl_region_a"));
        if (j.contains("dl_region_b")) sc.dl_region_b = region_from_json(j.at("dl_region_b"));
        if (j.contains("settings_a"))
            for (const json& m : j.at("settings_a"))
                sc.settings_a.push_back(measurement_from_json(m));
        if (j.contains("settings_b"))
            for (const json& m : j.at("settings_b"))
                sc.settings_b.push_back(measurement_from_json(m));
        if (j.contains("partition")) {
            std::vector<Region> parts;
            for (const json& r : j.at("partition")) parts.push_back(region_from_json(r));
            sc.partition = std::move(parts);
        }
        if (j.contains("chsh"))
            sc.chsh = ChshSpec{j.at("chsh").at("first").get<std::size_t>(),
                               j.at("chsh").at("second").get<std::size_t>()};
        if (j.contains("transfer"))
            sc.transfer = TransferSpec{j.at("transfer").at("input").get<std::size_t>(),
                                       j.at("transfer").at("output").get<std::size_t>(),
                                       j.at("transfer").at("prefix").get<std::size_t>()};
        if (j.contains("trace"))
            for (const json& p : j.at("trace").at("probes"))
                sc.trace_probes.push_back({p.at("parameter").get<std::string>(),
                                           p.at("values").get<std::vector<double>>()});
        if (j.contains("probe_region")) sc.probe_region = region_from_json(j.at("probe_region"));
        if (j.contains("variants"))
            for (const json& v : j.at("variants")) {
                VariantDef vd;
                vd.name = v.at("name").get<std::string>();
                if (v.contains("preparation"))
                    for (const json& d : v.at("preparation"))
                        vd.preparation.push_back(prep_from_json(d));
                if (v.contains("circuit")) vd.circuit = gates_from_json(v.at("circuit"));
                sc.variants.push_back(std::move(vd));
            }
    } catch (const json::exception& e) {
        throw UsageError(std::string("scenario schema: ") + e.what());
    }
    validate_scenario(sc);
    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open scenario file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw UsageError("scenario file '" + path + "' is not valid JSON: " + e.what());
    }
    return scenario_from_json(j);
}

namespace {

// ----- the runner -------------------------------------------------------------

std::vector<MeasurementSpec> side_settings(const Scenario& sc,
                                           const std::vector<MeasurementDef>& defs,
                                           const Region& region) {
    std::vector<MeasurementSpec> specs;
    if (!defs.empty()) {
        for (const auto& d : defs) {
            if (d.kind == MeasurementDef::Kind::Joint)
                throw UsageError("settings must be single-region measurements");
            specs.push_back(build_spec(d));
        }
    } else {
        specs.push_back(MeasurementSpec::preset(region.indices.front(), Letter::Z));
        specs.push_back(MeasurementSpec::preset(region.indices.front(), Letter::X));
    }
    for (const auto& s : specs)
        for (std::size_t q : s.region.indices)
            if (q >= sc.n_qubits) throw UsageError("setting qubit out of range");
    return specs;
}

json distribution_to_json(const OutcomeDistribution& d) {
    json j = json::object();
    for (const auto& [label, p] : d) j[label] = p;
    return j;
}

OutcomeDistribution distribution_from_report(const json& j) {
    OutcomeDistribution d;
    for (const auto& [label, p] : j.items()) d[label] = p.get<double>();
    return d;
}

struct VariantRun {
    std::vector<RunBranch> branches;       // final
    EpistemicState after_prep;
    EpistemicState final_state;
    json body;
};

OutcomeDistribution preset_statistics(const EpistemicState& e, std::size_t qubit, Letter basis) {
    return measure(MeasurementSpec::preset(qubit, basis), e);
}

VariantRun run_pipeline(const Scenario& sc, const std::vector<PrepDirective>& prep,
                        const std::vector<GateOp>& circuit) {
    VariantRun run{{}, EpistemicState::pure(fresh_universe(sc.n_qubits)),
                   EpistemicState::pure(fresh_universe(sc.n_qubits)), json::object()};
    run.branches = prepare_branches(sc.n_qubits, prep);
    run.after_prep = to_epistemic(run.branches);
    apply_to_branches(run.branches, circuit);
    run.final_state = to_epistemic(run.branches);
    json& body = run.body;

    // Measurements.
    json meas = json::object();
    for (const auto& def : sc.measurements) {
        if (def.kind == MeasurementDef::Kind::Joint) {
            if (def.parts.size() != 2)
                throw UsageError("joint measurement '" + def.name + "' needs two parts");
            const MeasurementSpec a = build_spec(def.parts[0]);
            const MeasurementSpec b = build_spec(def.parts[1]);
            meas[def.name] = distribution_to_json(joint_distribution(a, b, run.final_state));
        } else {
            meas[def.name] = distribution_to_json(measure(build_spec(def), run.final_state));
        }
    }
    body["measurements"] = meas;

    // Checks.
    json checks = json::object();
    for (const auto& name : sc.checks) {
        if (name == "S") {
            std::vector<Region> partition;
            if (sc.partition) {
                partition = *sc.partition;
            } else {
                for (std::size_t q = 0; q < sc.n_qubits; ++q) partition.push_back(Region::of({q}));
            }
            std::vector<LocalityReport> parts;
            for (const auto& b : run.branches)
                parts.push_back(check_separability(b.state, partition));
            checks["S"] = locality_report_to_json(merge_reports(parts));
        } else if (name == "DL") {
            const Region ra = sc.dl_region_a ? *sc.dl_region_a : *sc.region_a;
            const Region rb = sc.dl_region_b ? *sc.dl_region_b : *sc.region_b;
            std::vector<LocalityReport> parts;
            for (std::size_t i = 0; i < run.branches.size(); ++i)
                parts.push_back(check_dynamical_locality(run.branches[i].state, ra, rb,
                                                         sc.dl_trials, sc.seed + i));
            checks["DL"] = locality_report_to_json(merge_reports(parts));
        } else if (name == "SL") {
            const auto sa = side_settings(sc, sc.settings_a, *sc.region_a);
            const auto sb = side_settings(sc, sc.settings_b, *sc.region_b);
            checks["SL"] = locality_report_to_json(
                check_signal_locality(run.final_state, sa, sb, sc.tolerance));
        } else if (name == "PI" || name == "F" || name == "LC") {
            const auto sa = side_settings(sc, sc.settings_a, *sc.region_a);
            const auto sb = side_settings(sc, sc.settings_b, *sc.region_b);
            std::vector<LocalityReport> parts;
            for (const auto& b : run.branches) {
                if (name == "PI")
                    parts.push_back(check_parameter_independence(b.state, sa, sb, sc.tolerance));
                else if (name == "F")
                    parts.push_back(check_factorization(b.state, sa, sb, sc.tolerance));
                else
                    parts.push_back(check_local_causality(b.state, sa, sb, sc.tolerance));
            }
            checks[name] = locality_report_to_json(merge_reports(parts));
        } else if (name == "trace") {
            checks["trace"] = trace_to_json(trace_information_flow(
                run.after_prep, circuit, sc.trace_probes, sc.tolerance));
        }
    }
    body["checks"] = checks;

    // CHSH.
    if (sc.chsh) {
        const auto a = chsh_first_party_settings(sc.chsh->first);
        const auto b = chsh_second_party_settings(sc.chsh->second);
        const ChshResult res = chsh_experiment(run.final_state, a, b);
        body["chsh"] = {{"first", sc.chsh->first},
                        {"second", sc.chsh->second},
                        {"correlators",
                         {{res.correlators[0][0], res.correlators[0][1]},
                          {res.correlators[1][0], res.correlators[1][1]}}},
                        {"s", res.s}};
    }

    // State transfer.
    if (sc.transfer) {
        std::vector<RunBranch> mid = prepare_branches(sc.n_qubits, prep);
        apply_to_branches(mid, std::vector<GateOp>(circuit.begin(),
                                                   circuit.begin() +
                                                       static_cast<std::ptrdiff_t>(
                                                           sc.transfer->prefix)));
        const EpistemicState reference = to_epistemic(mid);
        double gap = 0.0;
        json per_basis = json::object();
        for (Letter basis : {Letter::X, Letter::Y, Letter::Z}) {
            const OutcomeDistribution want =
                preset_statistics(reference, sc.transfer->input, basis);
            const OutcomeDistribution got =
                preset_statistics(run.final_state, sc.transfer->output, basis);
            const double g = distribution_gap(want, got);
            gap = std::max(gap, g);
            per_basis[letter_to_string(basis)] = {{"expected", distribution_to_json(want)},
                                                  {"observed", distribution_to_json(got)},
                                                  {"gap", g}};
        }
        body["transfer_check"] = {{"input", sc.transfer->input},
                                  {"output", sc.transfer->output},
                                  {"prefix", sc.transfer->prefix},
                                  {"max_gap", gap},
                                  {"holds", gap <= sc.tolerance},
                                  {"bases", per_basis}};
    }

    // Dense-engine comparison.
    json oracle_block = json::object();
    if (!sc.oracle_check) {
        oracle_block["enabled"] = false;
    } else if (sc.n_qubits > oracle::dense_limit()) {
        oracle_block["enabled"] = false;
        oracle_block["reason"] = "n_qubits exceeds the dense limit";
    } else {
        oracle_block["enabled"] = true;
        std::vector<oracle::StateVector> vectors;
        vectors.reserve(run.branches.size());
        for (const auto& b : run.branches)
            vectors.push_back(oracle::evolve(oracle::reference_state(sc.n_qubits), b.history));

        double prob_dev = 0.0;
        for (const auto& def : sc.measurements) {
            std::vector<std::pair<std::string, oracle::DenseOperator>> povm;
            if (def.kind == MeasurementDef::Kind::Joint)
                povm = joint_povm(build_spec(def.parts[0]), build_spec(def.parts[1]));
            else
                povm = spec_to_povm(build_spec(def));
            std::map<std::string, double> expected;
            for (std::size_t i = 0; i < run.branches.size(); ++i)
                for (const auto& [label, p] : oracle::born_probabilities(vectors[i], povm))
                    expected[label] += run.branches[i].weight * p;
            const OutcomeDistribution reported =
                distribution_from_report(body["measurements"][def.name]);
            for (const auto& [label, p] : expected)
                prob_dev = std::max(prob_dev, std::abs(p - reported.at(label)));
        }
        oracle_block["max_probability_deviation"] = prob_dev;

        if (sc.n_qubits <= kOracleDescriptorLimit) {
            double desc_dev = 0.0;
            for (const auto& b : run.branches)
                for (std::size_t q = 0; q < sc.n_qubits; ++q)
                    for (Letter l : {Letter::X, Letter::Y, Letter::Z}) {
                        const PauliSum expected = oracle::conjugate_dense(
                            PauliSum::single(sc.n_qubits, q, l), b.history);
                        desc_dev = std::max(
                            desc_dev,
                            max_coeff_delta(expected, b.state.descriptor(q).element(l)));
                    }
            oracle_block["max_descriptor_deviation"] = desc_dev;
        }
    }
    body["oracle"] = oracle_block;

    // Final-state dump.
    if (sc.report_state) {
        json branches = json::array();
        for (const auto& b : run.branches) {
            json descriptors = json::object();
            for (const auto& [q, d] : b.state.descriptors())
                descriptors[std::to_string(q)] = {
                    {"x", d.x_bar.str()}, {"y", d.y_bar.str()}, {"z", d.z_bar.str()}};
            branches.push_back({{"weight", b.weight}, {"descriptors", descriptors}});
        }
        body["final_state"] = {{"branches", branches}};
    }
    return run;
}

std::size_t max_term_count(const std::vector<RunBranch>& branches) {
    std::size_t m = 0;
    for (const auto& b : branches)
        for (const auto& [q, d] : b.state.descriptors())
            for (std::size_t e = 0; e < 3; ++e) m = std::max(m, d.element(e).term_count());
    return m;
}

}  // namespace

json run_scenario(const Scenario& sc) {
    validate_scenario(sc);
    const auto start = std::chrono::steady_clock::now();

    json report;
    report["scenario"] = sc.name;
    report["description"] = sc.description;
    report["n_qubits"] = sc.n_qubits;
    report["seed"] = sc.seed;
    report["tolerance"] = sc.tolerance;

    std::size_t max_terms = 0;
    if (sc.variants.empty()) {
        VariantRun run = run_pipeline(sc, sc.preparation, sc.circuit);
        for (auto& [key, value] : run.body.items()) report[key] = value;
        max_terms = max_term_count(run.branches);
    } else {
        json variants = json::object();
        std::vector<std::pair<std::string, VariantRun>> runs;
        for (const auto& v : sc.variants) {
            runs.emplace_back(v.name, run_pipeline(sc, v.preparation, v.circuit));
            variants[v.name] = runs.back().second.body;
            max_terms = std::max(max_terms, max_term_count(runs.back().second.branches));
        }
        report["variants"] = variants;

        json pairs = json::array();
        for (std::size_t i = 0; i < runs.size(); ++i)
            for (std::size_t k = i + 1; k < runs.size(); ++k) {
                const bool states_equal =
                    runs[i].second.final_state == runs[k].second.final_state;
                double gap = 0.0;
                for (std::size_t q : sc.probe_region->indices)
                    for (Letter basis : {Letter::X, Letter::Y, Letter::Z})
                        gap = std::max(
                            gap, distribution_gap(
                                     preset_statistics(runs[i].second.final_state, q, basis),
                                     preset_statistics(runs[k].second.final_state, q, basis)));
                pairs.push_back({{"first", runs[i].first},
                                 {"second", runs[k].first},
                                 {"states_equal", states_equal},
                                 {"max_statistics_gap", gap},
                                 {"statistics_equal", gap <= sc.tolerance}});
            }
        report["contextuality"] = {{"probe_region", sc.probe_region->indices}, {"pairs", pairs}};
    }

    const auto stop = std::chrono::steady_clock::now();
    report["stats"] = {
        {"wall_ms",
         std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(stop - start)
             .count()},
        {"max_terms", max_terms}};
    return report;
}

namespace {

void render_checks(std::ostringstream& out, const json& checks, const std::string& indent) {
    for (const auto& [name, r] : checks.items()) {
        if (name == "trace") {
            out << indent << "check trace:\n";
            for (const auto& p : r.at("parameters")) {
                out << indent << "  parameter " << p.at("parameter").get<std::string>()
                    << ": descriptor_elements=" << p.at("descriptor_elements").size()
                    << " local_statistics=" << p.at("local_statistics").size()
                    << " joint_statistics=" << p.at("joint_statistics").size()
                    << " locally_inaccessible="
                    << (p.at("locally_inaccessible").get<bool>() ? "yes" : "no") << "\n";
            }
            continue;
        }
        out << indent << "check " << name << ": "
            << (r.at("holds").get<bool>() ? "holds" : "fails")
            << " (trials " << r.at("trials").get<std::size_t>() << ", max gap "
            << r.at("max_gap").get<double>() << ")";
        if (!r.at("witness").is_null())
            out << " witness: " << r.at("witness").at("description").get<std::string>();
        out << "\n";
    }
}

void render_body(std::ostringstream& out, const json& body, const std::string& indent) {
    if (body.contains("measurements"))
        for (const auto& [name, dist] : body.at("measurements").items()) {
            out << indent << "measurement " << name << ":";
            for (const auto& [label, p] : dist.items()) out << "  " << label << "=" << p.dump();
            out << "\n";
        }
    if (body.contains("checks")) render_checks(out, body.at("checks"), indent);
    if (body.contains("chsh"))
        out << indent << "chsh S = " << body.at("chsh").at("s").get<double>() << "\n";
    if (body.contains("transfer_check")) {
        const json& t = body.at("transfer_check");
        out << indent << "transfer qubit " << t.at("input") << " -> " << t.at("output") << ": "
            << (t.at("holds").get<bool>() ? "holds" : "fails") << " (max gap "
            << t.at("max_gap").get<double>() << ")\n";
    }
    if (body.contains("oracle")) {
        const json& o = body.at("oracle");
        if (o.at("enabled").get<bool>()) {
            out << indent
                << "oracle max probability deviation = "
                << o.at("max_probability_deviation").get<double>();
            if (o.contains("max_descriptor_deviation"))
                out << ", max descriptor deviation = "
                    << o.at("max_descriptor_deviation").get<double>();
            out << "\n";
        } else {
            out << indent << "oracle comparison disabled\n";
        }
    }
}

}  // namespace

std::string render_table(const json& report) {
    std::ostringstream out;
    out.setf(std::ios::fmtflags(0), std::ios::floatfield);
    out << std::setprecision(12);
    out << "scenario " << report.at("scenario").get<std::string>() << " (n_qubits "
        << report.at("n_qubits").get<std::size_t>() << ", seed "
        << report.at("seed").get<std::uint64_t>() << ")\n";
    if (report.contains("variants")) {
        for (const auto& [name, body] : report.at("variants").items()) {
            out << "variant " << name << ":\n";
            render_body(out, body, "  ");
        }
        if (report.contains("contextuality"))
            for (const auto& pair : report.at("contextuality").at("pairs"))
                out << "contextuality " << pair.at("first").get<std::string>() << " vs "
                    << pair.at("second").get<std::string>() << ": states "
                    << (pair.at("states_equal").get<bool>() ? "equal" : "differ")
                    << ", statistics "
                    << (pair.at("statistics_equal").get<bool>() ? "equal" : "differ")
                    << " (max gap " << pair.at("max_statistics_gap").get<double>() << ")\n";
    } else {
        render_body(out, report, "");
    }
    return out.str();
}

// ----- built-in registry -------------------------------------------------------

namespace {

MeasurementDef preset_def(std::string name, std::size_t qubit, Letter basis) {
    MeasurementDef def;
    def.name = std::move(name);
    def.kind = MeasurementDef::Kind::Preset;
    def.preset = basis;
    def.qubits = {qubit};
    return def;
}

MeasurementDef joint_def(std::string name, MeasurementDef a, MeasurementDef b) {
    MeasurementDef def;
    def.name = std::move(name);
    def.kind = MeasurementDef::Kind::Joint;
    def.parts = {std::move(a), std::move(b)};
    return def;
}

MeasurementDef observable_def(std::string name, std::vector<std::size_t> qubits,
                              std::vector<MeasurementDef::Term> terms) {
    MeasurementDef def;
    def.name = std::move(name);
    def.kind = MeasurementDef::Kind::Observable;
    def.qubits = std::move(qubits);
    def.terms = std::move(terms);
    return def;
}

PrepDirective pure_prep(std::size_t qubit, std::string state) {
    PrepDirective d;
    d.qubit = qubit;
    d.state = std::move(state);
    return d;
}

PrepDirective mixture_prep(std::vector<TransformationContext::Alternative> alts) {
    PrepDirective d;
    d.is_mixture = true;
    d.mixture.alternatives = std::move(alts);
    return d;
}

Scenario make_cnot_fig2() {
    Scenario sc;
    sc.name = "cnot-fig2";
    sc.description =
        "CNOT on |x+>|z+>: descriptors entangle while the ontic state stays separable";
    sc.n_qubits = 2;
    sc.seed = 11;
    sc.preparation = {pure_prep(0, "x+"), pure_prep(1, "z+")};
    sc.circuit = {GateOp::cnot(0, 1)};
    sc.measurements = {preset_def("q0 Z", 0, Letter::Z), preset_def("q1 Z", 1, Letter::Z),
                       joint_def("joint ZZ", preset_def("a", 0, Letter::Z),
                                 preset_def("b", 1, Letter::Z))};
    sc.checks = {"S", "DL"};
    sc.region_a = Region::of({0});
    sc.region_b = Region::of({1});
    sc.report_state = true;
    return sc;
}

Scenario make_bell_chsh() {
    Scenario sc;
    sc.name = "bell-chsh";
    sc.description = "Bell pair: CHSH at the Tsirelson bound, factorization fails, no signaling";
    sc.n_qubits = 2;
    sc.seed = 23;
    sc.preparation = {pure_prep(0, "z+"), pure_prep(1, "z+")};
    sc.circuit = {GateOp::h(0), GateOp::cnot(0, 1)};
    sc.measurements = {joint_def("joint ZZ", preset_def("a", 0, Letter::Z),
                                 preset_def("b", 1, Letter::Z)),
                       joint_def("joint XX", preset_def("a", 0, Letter::X),
                                 preset_def("b", 1, Letter::X))};
    sc.checks = {"S", "DL", "SL", "PI", "F", "LC"};
    sc.region_a = Region::of({0});
    sc.region_b = Region::of({1});
    const double c = 1.0 / std::sqrt(2.0);
    sc.settings_a = {preset_def("A0 Z", 0, Letter::Z), preset_def("A1 X", 0, Letter::X)};
    sc.settings_b = {preset_def("B0 Z", 1, Letter::Z),
                     observable_def("B1 (Z+X)/sqrt2", {1}, {{c, "Z"}, {c, "X"}}),
                     observable_def("B2 (Z-X)/sqrt2", {1}, {{c, "Z"}, {-c, "X"}})};
    sc.chsh = ChshSpec{0, 1};
    return sc;
}

Scenario make_teleportation() {
    Scenario sc;
    sc.name = "teleportation";
    sc.description =
        "Deferred-measurement teleportation of a generic qubit; output statistics match the input";
    sc.n_qubits = 3;
    sc.seed = 5;
    sc.preparation = {pure_prep(0, "y+"), pure_prep(1, "z+"), pure_prep(2, "z+")};
    sc.circuit = {GateOp::rx(0, 1.1),    GateOp::rz(0, 0.6), GateOp::h(1),
                  GateOp::cnot(1, 2),    GateOp::cnot(0, 1), GateOp::h(0),
                  GateOp::cnot(1, 2),    GateOp::cz(0, 2)};
    sc.measurements = {preset_def("out X", 2, Letter::X), preset_def("out Y", 2, Letter::Y),
                       preset_def("out Z", 2, Letter::Z)};
    sc.checks = {"S", "DL"};
    sc.region_a = Region::of({0, 1});
    sc.region_b = Region::of({2});
    sc.transfer = TransferSpec{0, 2, 2};
    return sc;
}

Scenario make_entanglement_swap() {
    Scenario sc;
    sc.name = "entanglement-swap";
    sc.description =
        "Two Bell pairs and a deferred Bell measurement leave the end qubits maximally entangled";
    sc.n_qubits = 4;
    sc.seed = 29;
    sc.preparation = {pure_prep(0, "z+"), pure_prep(1, "z+"), pure_prep(2, "z+"),
                      pure_prep(3, "z+")};
    sc.circuit = {GateOp::h(0),       GateOp::cnot(0, 1), GateOp::h(2),       GateOp::cnot(2, 3),
                  GateOp::cnot(1, 2), GateOp::h(1),       GateOp::cnot(2, 3), GateOp::cz(1, 3)};
    sc.measurements = {joint_def("ends ZZ", preset_def("a", 0, Letter::Z),
                                 preset_def("b", 3, Letter::Z)),
                       joint_def("ends XX", preset_def("a", 0, Letter::X),
                                 preset_def("b", 3, Letter::X))};
    sc.checks = {"S", "DL", "SL", "PI", "F", "LC"};
    sc.region_a = Region::of({0});
    sc.region_b = Region::of({3});
    sc.dl_region_a = Region::of({0, 1});
    sc.dl_region_b = Region::of({2, 3});
    const double c = 1.0 / std::sqrt(2.0);
    sc.settings_a = {preset_def("A0 Z", 0, Letter::Z), preset_def("A1 X", 0, Letter::X)};
    sc.settings_b = {preset_def("B0 Z", 3, Letter::Z),
                     observable_def("B1 (Z+X)/sqrt2", {3}, {{c, "Z"}, {c, "X"}}),
                     observable_def("B2 (Z-X)/sqrt2", {3}, {{c, "Z"}, {-c, "X"}})};
    sc.chsh = ChshSpec{0, 3};
    return sc;
}

Scenario make_mixed_prep_contextuality() {
    Scenario sc;
    sc.name = "mixed-prep-contextuality";
    sc.description =
        "The maximally mixed qubit as a stochastic mixture vs an entangled purification: "
        "same statistics, different ontic states";
    sc.n_qubits = 2;
    sc.seed = 37;
    VariantDef mixture;
    mixture.name = "stochastic-mixture";
    mixture.preparation = {pure_prep(0, "z+"), pure_prep(1, "z+"),
                           mixture_prep({{0.5, {GateOp::x(0)}}, {0.5, {}}})};
    VariantDef purified;
    purified.name = "entangled-purification";
    purified.preparation = {pure_prep(0, "z+"), pure_prep(1, "z+")};
    purified.circuit = {GateOp::h(1), GateOp::cnot(1, 0)};
    sc.variants = {std::move(mixture), std::move(purified)};
    sc.probe_region = Region::of({0});
    sc.measurements = {preset_def("q0 X", 0, Letter::X), preset_def("q0 Y", 0, Letter::Y),
                       preset_def("q0 Z", 0, Letter::Z)};
    sc.checks = {"S", "DL"};
    sc.region_a = Region::of({0});
    sc.region_b = Region::of({1});
    return sc;
}

Scenario make_transformation_contextuality() {
    Scenario sc;
    sc.name = "transformation-contextuality";
    sc.description =
        "Complete dephasing as a stochastic Z vs a CNOT purification: identical channel on the "
        "system, different ontic states";
    sc.n_qubits = 2;
    sc.seed = 41;
    VariantDef mixture;
    mixture.name = "stochastic-dephasing";
    mixture.preparation = {pure_prep(0, "x+"), pure_prep(1, "z+"),
                           mixture_prep({{0.5, {GateOp::z(0)}}, {0.5, {}}})};
    VariantDef purified;
    purified.name = "ancilla-purification";
    purified.preparation = {pure_prep(0, "x+"), pure_prep(1, "z+")};
    purified.circuit = {GateOp::cnot(0, 1)};
    sc.variants = {std::move(mixture), std::move(purified)};
    sc.probe_region = Region::of({0});
    sc.measurements = {preset_def("q0 X", 0, Letter::X), preset_def("q0 Y", 0, Letter::Y),
                       preset_def("q0 Z", 0, Letter::Z)};
    sc.checks = {"S", "DL"};
    sc.region_a = Region::of({0});
    sc.region_b = Region::of({1});
    return sc;
}

Scenario make_locally_inaccessible_phase() {
    Scenario sc;
    sc.name = "locally-inaccessible-phase";
    sc.description =
        "A phase written onto half a Bell pair: present in the local descriptors, invisible to "
        "all local measurements, visible jointly";
    sc.n_qubits = 2;
    sc.seed = 53;
    sc.preparation = {pure_prep(0, "z+"), pure_prep(1, "z+")};
    sc.circuit = {GateOp::h(0), GateOp::cnot(0, 1), GateOp::rz(0, 0.9, "theta")};
    sc.measurements = {preset_def("q0 Z", 0, Letter::Z), preset_def("q0 X", 0, Letter::X),
                       joint_def("joint XX", preset_def("a", 0, Letter::X),
                                 preset_def("b", 1, Letter::X))};
    sc.checks = {"S", "DL", "trace"};
    sc.region_a = Region::of({0});
    sc.region_b = Region::of({1});
    sc.trace_probes = {{"theta", {0.0, 0.7, 1.3, 2.1, 2.9, 3.7, 4.4, 5.2}}};
    return sc;
}

}  // namespace

const std::vector<Scenario>& builtin_scenarios() {
    static const std::vector<Scenario> all = {
        make_cnot_fig2(),
        make_bell_chsh(),
        make_teleportation(),
        make_entanglement_swap(),
        make_mixed_prep_contextuality(),
        make_transformation_contextuality(),
        make_locally_inaccessible_phase(),
    };
    return all;
}

const Scenario* find_builtin(const std::string& name) {
    for (const auto& sc : builtin_scenarios())
        if (sc.name == name) return &sc;
    return nullptr;
}

}  // namespace dh
