#include "dh/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <numeric>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

#include "dh/dynamics.hpp"
#include "dh/errors.hpp"
#include "dh/locality.hpp"
#include "dh/measurement.hpp"
#include "dh/oracle.hpp"
#include "dh/pauli.hpp"
#include "dh/rng.hpp"
#include "dh/scenario.hpp"

namespace dh {
namespace {

constexpr std::array<const char*, 6> kNamedStates = {"z+", "z-", "x+", "x-", "y+", "y-"};

// Everything random is drawn up front so re-evaluating a trial (e.g. with a
// shrunk circuit during witness minimization) is deterministic.
struct Trial {
    std::size_t n = 1;
    std::vector<std::string> preps;  // named state per qubit
    std::vector<GateOp> circuit;
    MeasurementSpec spec;           // random POVM to push through the pipeline
    std::vector<Region> partition;  // separability split
    Region dl_a, dl_b;              // dynamical-locality split (n >= 2 only)
    std::uint64_t dl_seed = 0;
    bool corrupt = false;  // negative control: flip a descriptor sign post-evolution
};

struct TrialOutcome {
    double descriptor_dev = 0.0;
    double closure_dev = 0.0;
    double probability_dev = 0.0;
    std::vector<std::string> reasons;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

Eigen::MatrixXcd random_unitary(std::size_t dim, Rng& rng) {
    Eigen::MatrixXcd g(dim, dim);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) g(r, c) = cplx(rng.gaussian(), rng.gaussian());
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    return qr.householderQ() * Eigen::MatrixXcd::Identity(dim, dim);
}

std::vector<std::size_t> shuffled_qubits(std::size_t n, Rng& rng) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    return order;
}

MeasurementSpec random_povm(std::size_t n, Rng& rng) {
    const std::size_t k = (n >= 2 && rng.uniform() < 0.5) ? 2 : 1;
    auto order = shuffled_qubits(n, rng);
    const Region region = Region::of({order.begin(), order.begin() + static_cast<long>(k)});
    const std::size_t dim = std::size_t{1} << k;
    const Eigen::MatrixXcd v = random_unitary(dim, rng);
    Eigen::VectorXcd diag(dim);
    if (rng.uniform() < 0.5) {
        // Projective +/-1 observable.
        for (std::size_t j = 0; j < dim; ++j) diag(j) = rng.uniform() < 0.5 ? 1.0 : -1.0;
        Eigen::MatrixXcd a = v * diag.asDiagonal() * v.adjoint();
        a = ((a + a.adjoint()) / 2.0).eval();
        return MeasurementSpec::from_observable(region, a);
    }
    // Non-projective two-outcome POVM {E, 1 - E} with spectrum in [0, 1].
    for (std::size_t j = 0; j < dim; ++j) diag(j) = rng.uniform();
    Eigen::MatrixXcd e = v * diag.asDiagonal() * v.adjoint();
    e = ((e + e.adjoint()) / 2.0).eval();
    const Eigen::MatrixXcd rest = Eigen::MatrixXcd::Identity(dim, dim) - e;
    return MeasurementSpec::from_matrices(region, {"+", "-"}, {e, rest});
}

Trial make_trial(Rng& rng, const VerifyConfig& cfg) {
    Trial t;
    t.n = 1 + rng.index(cfg.max_qubits);
    for (std::size_t q = 0; q < t.n; ++q) t.preps.emplace_back(kNamedStates[rng.index(6)]);

    std::vector<std::size_t> all(t.n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    t.circuit = random_region_circuit(Region::of(all), 1 + rng.index(cfg.depth), rng);

    t.spec = random_povm(t.n, rng);

    const std::size_t parts = 1 + rng.index(t.n);
    std::vector<std::vector<std::size_t>> buckets(parts);
    for (std::size_t q = 0; q < t.n; ++q) buckets[rng.index(parts)].push_back(q);
    for (auto& b : buckets)
        if (!b.empty()) t.partition.push_back(Region::of(std::move(b)));

    if (t.n >= 2) {
        auto order = shuffled_qubits(t.n, rng);
        const std::size_t ca = 1 + rng.index(t.n - 1);
        t.dl_a = Region::of({order.begin(), order.begin() + static_cast<long>(ca)});
        t.dl_b = Region::of({order.begin() + static_cast<long>(ca), order.end()});
    }
    t.dl_seed = rng.raw();
    return t;
}

struct Evolved {
    OnticState state;
    std::vector<GateOp> history;  // preparations (as 2x2 generals) then circuit
};

Evolved build(const Trial& t) {
    OnticState s = fresh_universe(t.n);
    std::vector<GateOp> history;
    for (std::size_t q = 0; q < t.n; ++q) {
        const Eigen::Matrix2cd u = named_state_unitary(t.preps[q]);
        s = prepare_pure(s, q, u);
        history.push_back(GateOp::general({q}, u));
    }
    s = apply_circuit(s, t.circuit);
    history.insert(history.end(), t.circuit.begin(), t.circuit.end());
    if (t.corrupt) {
        QubitDescriptor d = s.descriptor(0);
        d.x_bar *= cplx(-1.0, 0.0);
        s.set_descriptor(0, d);
    }
    return {std::move(s), std::move(history)};
}

// Max gap across qubits in the algebra relations x*y = i z (cyclically).
double closure_deviation(const OnticState& state) {
    const cplx i(0.0, 1.0);
    double worst = 0.0;
    for (std::size_t q = 0; q < state.n_qubits(); ++q) {
        const QubitDescriptor& d = state.descriptor(q);
        worst = std::max(worst, max_coeff_delta(d.x_bar * d.y_bar, i * d.z_bar));
        worst = std::max(worst, max_coeff_delta(d.y_bar * d.z_bar, i * d.x_bar));
        worst = std::max(worst, max_coeff_delta(d.z_bar * d.x_bar, i * d.y_bar));
    }
    return worst;
}

// probability_pipeline vs dense Born probabilities for the trial's POVM.
double pipeline_deviation(const Trial& t, const Evolved& ev) {
    OnticState prepared = fresh_universe(t.n);
    for (std::size_t q = 0; q < t.n; ++q)
        prepared = prepare_pure(prepared, q, named_state_unitary(t.preps[q]));
    const OutcomeDistribution reported = probability_pipeline(
        EpistemicState::pure(std::move(prepared)),
        TransformationContext::deterministic(t.circuit), t.spec);

    const auto v = oracle::evolve(oracle::reference_state(t.n), ev.history);
    std::vector<std::pair<std::string, oracle::DenseOperator>> povm;
    for (std::size_t m = 0; m < t.spec.outcomes.size(); ++m)
        povm.emplace_back(t.spec.outcomes[m],
                          oracle::DenseOperator{
                              reconstruct_povm(t.spec.alpha[m], t.spec.region.size()),
                              t.spec.region.indices});
    const auto expected = oracle::born_probabilities(v, povm);

    double worst = 0.0;
    for (const auto& [label, p] : expected) {
        const auto it = reported.find(label);
        const double q = it == reported.end() ? 0.0 : it->second;
        worst = std::max(worst, std::abs(p - q));
    }
    return worst;
}

TrialOutcome evaluate(const Trial& t, double tol) {
    TrialOutcome out;
    const Evolved ev = build(t);

    out.descriptor_dev = compare_state_to_oracle(ev.state, ev.history);
    if (out.descriptor_dev > tol)
        out.reasons.push_back("descriptor vs dense conjugation: gap " + fmt(out.descriptor_dev));

    out.closure_dev = closure_deviation(ev.state);
    if (out.closure_dev > tol)
        out.reasons.push_back("algebra closure x*y = i z: gap " + fmt(out.closure_dev));

    out.probability_dev = pipeline_deviation(t, ev);
    if (out.probability_dev > tol)
        out.reasons.push_back("pipeline vs Born probabilities: gap " + fmt(out.probability_dev));

    const LocalityReport sep = check_separability(ev.state, t.partition);
    if (!sep.holds) out.reasons.push_back("separability round-trip failed");

    if (t.n >= 2) {
        const LocalityReport dl = check_dynamical_locality(ev.state, t.dl_a, t.dl_b, 2, t.dl_seed);
        if (!dl.holds) out.reasons.push_back("dynamical locality failed, gap " + fmt(dl.max_gap));
    }
    return out;
}

// Greedy gate removal: keep dropping gates while the trial still fails.
std::vector<GateOp> minimize_circuit(const Trial& t, double tol) {
    auto fails = [&](std::vector<GateOp> circuit) {
        Trial c = t;
        c.circuit = std::move(circuit);
        return !evaluate(c, tol).reasons.empty();
    };
    std::vector<GateOp> gates = t.circuit;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < gates.size();) {
            std::vector<GateOp> candidate = gates;
            candidate.erase(candidate.begin() + static_cast<long>(i));
            if (fails(candidate)) {
                gates = std::move(candidate);
                changed = true;
            } else {
                ++i;
            }
        }
    }
    return gates;
}

Scenario witness_scenario(const Trial& t, std::vector<GateOp> circuit, const VerifyConfig& cfg,
                          const std::vector<std::string>& reasons) {
    Scenario sc;
    sc.name = "verify-witness";
    std::string desc = "minimized failing verify trial:";
    for (const auto& r : reasons) desc += " " + r + ";";
    sc.description = desc;
    sc.n_qubits = t.n;
    sc.seed = cfg.seed;
    sc.tolerance = cfg.tolerance;
    sc.oracle_check = true;
    sc.report_state = true;
    sc.dl_trials = 4;
    for (std::size_t q = 0; q < t.n; ++q) {
        PrepDirective p;
        p.qubit = q;
        p.state = t.preps[q];
        sc.preparation.push_back(std::move(p));
    }
    sc.circuit = std::move(circuit);
    MeasurementDef def;
    def.name = "witness-povm";
    def.kind = MeasurementDef::Kind::Tables;
    def.qubits = t.spec.region.indices;
    def.outcomes = t.spec.outcomes;
    def.alpha = t.spec.alpha;
    sc.measurements.push_back(std::move(def));
    sc.checks = {"S"};
    sc.partition = t.partition;
    if (t.n >= 2) {
        sc.checks.push_back("DL");
        sc.region_a = t.dl_a;
        sc.region_b = t.dl_b;
    }
    return sc;
}

}  // namespace

double compare_state_to_oracle(const OnticState& state, const std::vector<GateOp>& history) {
    const std::size_t n = state.n_qubits();
    double worst = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
        const QubitDescriptor& d = state.descriptor(q);
        for (const Letter l : {Letter::X, Letter::Y, Letter::Z}) {
            const PauliSum expected = oracle::conjugate_dense(PauliSum::single(n, q, l), history);
            worst = std::max(worst, max_coeff_delta(expected, d.element(l)));
        }
    }
    return worst;
}

VerifyResult run_verify_suite(const VerifyConfig& cfg) {
    if (cfg.max_qubits == 0) throw UsageError("verify: max_qubits must be at least 1");
    if (cfg.max_qubits > oracle::dense_limit())
        throw UsageError("verify: max_qubits exceeds the dense limit (" +
                         std::to_string(oracle::dense_limit()) + ")");
    if (cfg.depth == 0) throw UsageError("verify: depth must be at least 1");
    if (!(cfg.tolerance > 0.0)) throw UsageError("verify: tolerance must be positive");

    VerifyResult result;
    if (cfg.trials == 0) {
        result.vacuous = true;  // nothing checked; callers should warn
        return result;
    }

    Rng root(cfg.seed);
    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
        Rng tr = root.child(trial);
        Trial t = make_trial(tr, cfg);
        t.corrupt = cfg.negative_control && trial == 0;

        const TrialOutcome out = evaluate(t, cfg.tolerance);
        ++result.trials_run;
        result.max_descriptor_deviation =
            std::max(result.max_descriptor_deviation, out.descriptor_dev);
        result.max_closure_deviation = std::max(result.max_closure_deviation, out.closure_dev);
        result.max_probability_deviation =
            std::max(result.max_probability_deviation, out.probability_dev);

        if (out.reasons.empty()) continue;
        result.passed = false;
        for (const auto& r : out.reasons)
            result.failures.push_back("trial " + std::to_string(trial) + ": " + r);

        if (result.witness_path.empty()) {
            const Scenario sc = witness_scenario(t, minimize_circuit(t, cfg.tolerance), cfg,
                                                 out.reasons);
            const std::string path = cfg.witness_dir + "/verify-witness.json";
            std::ofstream f(path);
            if (!f) throw UsageError("verify: cannot write witness file: " + path);
            f << scenario_to_json(sc).dump(2) << '\n';
            result.witness_path = path;
        }
    }
    return result;
}

}  // namespace dh
