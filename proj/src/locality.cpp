#include "dh/locality.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "dh/dynamics.hpp"
#include "dh/errors.hpp"

namespace dh {
namespace {

constexpr double kConditionFloor = 1e-12;  // conditionals on rarer outcomes are skipped

LocalityReport passing(LocalityProperty p, std::size_t trials, double tol) {
    LocalityReport r;
    r.property = p;
    r.holds = true;
    r.trials = trials;
    r.tolerance = tol;
    return r;
}

void fail_with(LocalityReport& r, double gap, std::string description, std::uint64_t seed = 0,
               long long trial = -1) {
    // Keep the first failing witness but continue tracking the maximum gap.
    if (!r.witness) {
        r.holds = false;
        r.witness = LocalityWitness{std::move(description), gap, seed, trial};
    }
    r.max_gap = std::max(r.max_gap, gap);
}

void validate_grid(const SettingGrid& grid) {
    if (grid.empty() || grid.front().empty())
        throw UsageError("setting grid must have at least one entry per side");
    const std::size_t nb = grid.front().size();
    for (const auto& row : grid) {
        if (row.size() != nb) throw UsageError("setting grid is ragged");
        for (const auto& table : row) {
            if (table.rows() != grid.front().front().rows() ||
                table.cols() != grid.front().front().cols())
                throw UsageError("setting grid tables must share outcome counts");
        }
    }
}

std::string pair_tag(std::size_t ia, std::size_t ib) {
    std::ostringstream os;
    os << "settings (A" << ia << ", B" << ib << ")";
    return os.str();
}

// p(a_i, b_j) over branches of an epistemic state.
Eigen::MatrixXd joint_table(const MeasurementSpec& a, const MeasurementSpec& b,
                            const EpistemicState& state) {
    Eigen::MatrixXd table = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.outcomes.size()),
                                                  static_cast<Eigen::Index>(b.outcomes.size()));
    for (const auto& branch : state.branches())
        for (std::size_t i = 0; i < a.outcomes.size(); ++i)
            for (std::size_t j = 0; j < b.outcomes.size(); ++j)
                table(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
                    branch.weight * joint_indicator(a, i, b, j, branch.state);
    return table;
}

Eigen::MatrixXd joint_table(const MeasurementSpec& a, const MeasurementSpec& b,
                            const OnticState& state) {
    return joint_table(a, b, EpistemicState::pure(state));
}

void require_cross_disjoint(const std::vector<MeasurementSpec>& settings_a,
                            const std::vector<MeasurementSpec>& settings_b) {
    if (settings_a.empty() || settings_b.empty())
        throw UsageError("each side needs at least one measurement setting");
    for (const auto& sa : settings_a)
        for (const auto& sb : settings_b)
            if (!sa.region.disjoint(sb.region))
                throw UsageError("settings of the two sides must act on disjoint regions");
}

SettingGrid grid_from_indicators(const OnticState& state,
                                 const std::vector<MeasurementSpec>& settings_a,
                                 const std::vector<MeasurementSpec>& settings_b) {
    SettingGrid grid(settings_a.size());
    for (std::size_t ia = 0; ia < settings_a.size(); ++ia)
        for (std::size_t ib = 0; ib < settings_b.size(); ++ib)
            grid[ia].push_back(joint_table(settings_a[ia], settings_b[ib], state));
    return grid;
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

double state_max_delta(const OnticState& a, const OnticState& b) {
    double gap = 0.0;
    for (const auto& [q, d] : a.descriptors()) {
        if (!b.has(q)) return 1.0;
        for (std::size_t e = 0; e < 3; ++e)
            gap = std::max(gap, max_coeff_delta(d.element(e), b.descriptor(q).element(e)));
    }
    return gap;
}

}  // namespace

std::string property_name(LocalityProperty p) {
    switch (p) {
        case LocalityProperty::S: return "S";
        case LocalityProperty::SL: return "SL";
        case LocalityProperty::DL: return "DL";
        case LocalityProperty::PI: return "PI";
        case LocalityProperty::F: return "F";
        case LocalityProperty::LC: return "LC";
    }
    throw InternalError("unknown locality property");
}

LocalityReport marginal_independence_from_tables(LocalityProperty property,
                                                 const SettingGrid& grid, double tol) {
    validate_grid(grid);
    const std::size_t na = grid.size(), nb = grid.front().size();
    LocalityReport r = passing(property, na * nb, tol);

    for (std::size_t ia = 0; ia < na; ++ia) {
        const Eigen::VectorXd reference = grid[ia][0].rowwise().sum();
        for (std::size_t ib = 1; ib < nb; ++ib) {
            const Eigen::VectorXd marginal = grid[ia][ib].rowwise().sum();
            const double gap = (marginal - reference).cwiseAbs().maxCoeff();
            if (gap > tol)
                fail_with(r, gap,
                          "a-marginal under " + pair_tag(ia, ib) + " differs from " +
                              pair_tag(ia, 0));
            r.max_gap = std::max(r.max_gap, gap);
        }
    }
    for (std::size_t ib = 0; ib < nb; ++ib) {
        const Eigen::RowVectorXd reference = grid[0][ib].colwise().sum();
        for (std::size_t ia = 1; ia < na; ++ia) {
            const Eigen::RowVectorXd marginal = grid[ia][ib].colwise().sum();
            const double gap = (marginal - reference).cwiseAbs().maxCoeff();
            if (gap > tol)
                fail_with(r, gap,
                          "b-marginal under " + pair_tag(ia, ib) + " differs from " +
                              pair_tag(0, ib));
            r.max_gap = std::max(r.max_gap, gap);
        }
    }
    return r;
}

LocalityReport local_causality_from_tables(const SettingGrid& grid, double tol) {
    validate_grid(grid);
    const std::size_t na = grid.size(), nb = grid.front().size();
    LocalityReport r = passing(LocalityProperty::LC, na * nb, tol);

    for (std::size_t ia = 0; ia < na; ++ia) {
        // p(a|A), taken at the first far setting; LC demands every
        // outcome-conditioned version agree with it.
        const Eigen::VectorXd ref_a = grid[ia][0].rowwise().sum();
        for (std::size_t ib = 0; ib < nb; ++ib) {
            const Eigen::MatrixXd& t = grid[ia][ib];
            const Eigen::VectorXd marg_a = t.rowwise().sum();
            const double setting_gap = (marg_a - ref_a).cwiseAbs().maxCoeff();
            if (setting_gap > tol)
                fail_with(r, setting_gap,
                          "a-marginal under " + pair_tag(ia, ib) + " already setting-dependent");
            r.max_gap = std::max(r.max_gap, setting_gap);

            const Eigen::RowVectorXd p_b = t.colwise().sum();
            for (Eigen::Index j = 0; j < t.cols(); ++j) {
                if (p_b(j) < kConditionFloor) continue;
                const Eigen::VectorXd conditional = t.col(j) / p_b(j);
                const double gap = (conditional - ref_a).cwiseAbs().maxCoeff();
                if (gap > tol)
                    fail_with(r, gap,
                              "p(a | b_" + std::to_string(j) + ", " + pair_tag(ia, ib) +
                                  ") deviates from p(a | A" + std::to_string(ia) + ")");
                r.max_gap = std::max(r.max_gap, gap);
            }
        }
    }
    for (std::size_t ib = 0; ib < nb; ++ib) {
        const Eigen::RowVectorXd ref_b = grid[0][ib].colwise().sum();
        for (std::size_t ia = 0; ia < na; ++ia) {
            const Eigen::MatrixXd& t = grid[ia][ib];
            const Eigen::VectorXd p_a = t.rowwise().sum();
            for (Eigen::Index i = 0; i < t.rows(); ++i) {
                if (p_a(i) < kConditionFloor) continue;
                const Eigen::RowVectorXd conditional = t.row(i) / p_a(i);
                const double gap = (conditional - ref_b).cwiseAbs().maxCoeff();
                if (gap > tol)
                    fail_with(r, gap,
                              "p(b | a_" + std::to_string(i) + ", " + pair_tag(ia, ib) +
                                  ") deviates from p(b | B" + std::to_string(ib) + ")");
                r.max_gap = std::max(r.max_gap, gap);
            }
        }
    }
    return r;
}

LocalityReport check_separability(const OnticState& state, const std::vector<Region>& partition) {
    if (!state.complete()) throw UsageError("separability check needs a complete state");
    std::vector<bool> seen(state.n_qubits(), false);
    for (const auto& region : partition)
        for (std::size_t q : region.indices) {
            if (q >= state.n_qubits()) throw UsageError("partition index out of range");
            if (seen[q]) throw UsageError("partition parts overlap");
            seen[q] = true;
        }
    if (!std::ranges::all_of(seen, [](bool b) { return b; }))
        throw UsageError("partition does not cover every qubit");

    std::vector<OnticState> parts;
    parts.reserve(partition.size());
    for (const auto& region : partition) parts.push_back(restrict_to(state, region));
    const OnticState rebuilt = compose(parts);

    LocalityReport r = passing(LocalityProperty::S, partition.size(), 0.0);
    if (!(rebuilt == state))
        fail_with(r, state_max_delta(state, rebuilt),
                  "restrict/compose round-trip changed the state");
    return r;
}

std::vector<GateOp> random_region_circuit(const Region& region, std::size_t depth, Rng& rng) {
    if (region.size() == 0) throw UsageError("cannot build a circuit on an empty region");
    std::vector<GateOp> gates;
    gates.reserve(depth);
    for (std::size_t d = 0; d < depth; ++d) {
        const bool two_qubit = region.size() >= 2 && rng.index(5) < 2;
        if (two_qubit) {
            std::size_t i = rng.index(region.size());
            std::size_t j = rng.index(region.size() - 1);
            if (j >= i) ++j;
            const std::size_t a = region.indices[i], b = region.indices[j];
            switch (rng.index(3)) {
                case 0: gates.push_back(GateOp::cnot(a, b)); break;
                case 1: gates.push_back(GateOp::cz(a, b)); break;
                default: gates.push_back(GateOp::swap(a, b)); break;
            }
        } else {
            const std::size_t q = region.indices[rng.index(region.size())];
            switch (rng.index(11)) {
                case 0: gates.push_back(GateOp::x(q)); break;
                case 1: gates.push_back(GateOp::y(q)); break;
                case 2: gates.push_back(GateOp::z(q)); break;
                case 3: gates.push_back(GateOp::h(q)); break;
                case 4: gates.push_back(GateOp::s(q)); break;
                case 5: gates.push_back(GateOp::sdg(q)); break;
                case 6: gates.push_back(GateOp::t(q)); break;
                case 7: gates.push_back(GateOp::tdg(q)); break;
                case 8: gates.push_back(GateOp::rx(q, rng.angle())); break;
                case 9: gates.push_back(GateOp::ry(q, rng.angle())); break;
                default: gates.push_back(GateOp::rz(q, rng.angle())); break;
            }
        }
    }
    return gates;
}

LocalityReport check_dynamical_locality(const OnticState& base, const Region& region_a,
                                        const Region& region_b, std::size_t trials,
                                        std::uint64_t seed) {
    if (!region_a.disjoint(region_b)) throw UsageError("dynamical-locality regions overlap");
    if (region_a.size() == 0 || region_b.size() == 0)
        throw UsageError("dynamical-locality regions must be non-empty");
    for (std::size_t q : region_a.indices)
        if (!base.has(q)) throw UsageError("region A not carried by the state");
    for (std::size_t q : region_b.indices)
        if (!base.has(q)) throw UsageError("region B not carried by the state");

    LocalityReport r = passing(LocalityProperty::DL, trials, 0.0);
    Rng root(seed);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Rng tr = root.child(trial);
        const auto circ_a = random_region_circuit(region_a, 1 + tr.index(6), tr);
        const auto circ_a2 = random_region_circuit(region_a, 1 + tr.index(6), tr);
        const auto circ_b = random_region_circuit(region_b, 1 + tr.index(6), tr);
        const auto circ_b2 = random_region_circuit(region_b, 1 + tr.index(6), tr);

        const OnticState after_ab = apply_circuit(apply_circuit(base, circ_a), circ_b);
        const OnticState after_a2b = apply_circuit(apply_circuit(base, circ_a2), circ_b);
        if (!(restrict_to(after_ab, region_b) == restrict_to(after_a2b, region_b))) {
            fail_with(r,
                      state_max_delta(restrict_to(after_ab, region_b),
                                      restrict_to(after_a2b, region_b)),
                      "B descriptors changed when only the A circuit varied", seed,
                      static_cast<long long>(trial));
            continue;
        }
        const OnticState after_ab2 = apply_circuit(apply_circuit(base, circ_a), circ_b2);
        if (!(restrict_to(after_ab, region_a) == restrict_to(after_ab2, region_a)))
            fail_with(r,
                      state_max_delta(restrict_to(after_ab, region_a),
                                      restrict_to(after_ab2, region_a)),
                      "A descriptors changed when only the B circuit varied", seed,
                      static_cast<long long>(trial));
    }
    return r;
}

LocalityReport check_signal_locality(const EpistemicState& prep,
                                     const std::vector<MeasurementSpec>& settings_a,
                                     const std::vector<MeasurementSpec>& settings_b, double tol) {
    require_cross_disjoint(settings_a, settings_b);
    SettingGrid grid(settings_a.size());
    for (std::size_t ia = 0; ia < settings_a.size(); ++ia)
        for (std::size_t ib = 0; ib < settings_b.size(); ++ib)
            grid[ia].push_back(joint_table(settings_a[ia], settings_b[ib], prep));
    return marginal_independence_from_tables(LocalityProperty::SL, grid, tol);
}

LocalityReport check_parameter_independence(const OnticState& state,
                                            const std::vector<MeasurementSpec>& settings_a,
                                            const std::vector<MeasurementSpec>& settings_b,
                                            double tol) {
    require_cross_disjoint(settings_a, settings_b);
    return marginal_independence_from_tables(
        LocalityProperty::PI, grid_from_indicators(state, settings_a, settings_b), tol);
}

LocalityReport check_factorization(const OnticState& state,
                                   const std::vector<MeasurementSpec>& settings_a,
                                   const std::vector<MeasurementSpec>& settings_b, double tol) {
    require_cross_disjoint(settings_a, settings_b);
    LocalityReport r = passing(LocalityProperty::F, settings_a.size() * settings_b.size(), tol);
    for (std::size_t ia = 0; ia < settings_a.size(); ++ia) {
        const MeasurementSpec& a = settings_a[ia];
        std::vector<double> xi_a(a.outcomes.size());
        for (std::size_t i = 0; i < a.outcomes.size(); ++i) xi_a[i] = indicator(a, i, state);
        for (std::size_t ib = 0; ib < settings_b.size(); ++ib) {
            const MeasurementSpec& b = settings_b[ib];
            std::vector<double> xi_b(b.outcomes.size());
            for (std::size_t j = 0; j < b.outcomes.size(); ++j) xi_b[j] = indicator(b, j, state);
            for (std::size_t i = 0; i < a.outcomes.size(); ++i)
                for (std::size_t j = 0; j < b.outcomes.size(); ++j) {
                    const double joint = joint_indicator(a, i, b, j, state);
                    const double gap = std::abs(joint - xi_a[i] * xi_b[j]);
                    if (gap > tol)
                        fail_with(r, gap,
                                  "joint indicator at outcomes (" + a.outcomes[i] + ", " +
                                      b.outcomes[j] + ") under " + pair_tag(ia, ib) +
                                      " is not the product of the single-region indicators");
                    r.max_gap = std::max(r.max_gap, gap);
                }
        }
    }
    return r;
}

LocalityReport check_factorization(const OnticState& state, const MeasurementSpec& a,
                                   const MeasurementSpec& b, double tol) {
    return check_factorization(state, std::vector<MeasurementSpec>{a},
                               std::vector<MeasurementSpec>{b}, tol);
}

LocalityReport check_local_causality(const OnticState& state,
                                     const std::vector<MeasurementSpec>& settings_a,
                                     const std::vector<MeasurementSpec>& settings_b, double tol) {
    require_cross_disjoint(settings_a, settings_b);
    return local_causality_from_tables(grid_from_indicators(state, settings_a, settings_b), tol);
}

std::array<MeasurementSpec, 2> chsh_first_party_settings(std::size_t qubit) {
    return {MeasurementSpec::preset(qubit, Letter::Z), MeasurementSpec::preset(qubit, Letter::X)};
}

std::array<MeasurementSpec, 2> chsh_second_party_settings(std::size_t qubit) {
    const double inv = 1.0 / std::sqrt(2.0);
    const Eigen::Matrix2cd zx = (pauli_letter_matrix(Letter::Z) + pauli_letter_matrix(Letter::X)) * inv;
    const Eigen::Matrix2cd zmx =
        (pauli_letter_matrix(Letter::Z) - pauli_letter_matrix(Letter::X)) * inv;
    return {MeasurementSpec::from_observable(Region::of({qubit}), zx),
            MeasurementSpec::from_observable(Region::of({qubit}), zmx)};
}

ChshResult chsh_experiment(const EpistemicState& state, const std::array<MeasurementSpec, 2>& a,
                           const std::array<MeasurementSpec, 2>& b) {
    for (const auto& spec : a)
        if (spec.outcomes.size() != 2) throw UsageError("CHSH settings must be two-outcome");
    for (const auto& spec : b)
        if (spec.outcomes.size() != 2) throw UsageError("CHSH settings must be two-outcome");

    ChshResult result;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            const Eigen::MatrixXd t = joint_table(a[i], b[j], state);
            result.correlators[i][j] = t(0, 0) - t(0, 1) - t(1, 0) + t(1, 1);
        }
    result.s = result.correlators[0][0] + result.correlators[0][1] + result.correlators[1][0] -
               result.correlators[1][1];
    return result;
}

DependencyMap trace_information_flow(const EpistemicState& prep, const std::vector<GateOp>& circuit,
                                     const std::vector<TraceProbe>& probes, double tol) {
    const std::size_t n = prep.n_qubits();
    for (const auto& gate : circuit) validate_targets(gate, n);

    DependencyMap out;
    out.tolerance = tol;
    for (const auto& probe : probes) {
        if (probe.parameter.empty()) throw UsageError("trace probe has an empty parameter id");
        if (probe.values.size() < 2)
            throw UsageError("trace probe '" + probe.parameter + "' needs at least two values");
        bool bound = false;
        for (const auto& gate : circuit) {
            if (gate.param != probe.parameter) continue;
            if (gate.kind != GateKind::Rx && gate.kind != GateKind::Ry && gate.kind != GateKind::Rz)
                throw UsageError("parameter '" + probe.parameter +
                                 "' is attached to a non-rotation gate");
            bound = true;
        }
        if (!bound)
            throw UsageError("trace probe '" + probe.parameter + "' matches no gate parameter");

        std::vector<EpistemicState> evolved;
        evolved.reserve(probe.values.size());
        for (double value : probe.values) {
            std::vector<GateOp> bound_circuit = circuit;
            for (auto& gate : bound_circuit)
                if (gate.param == probe.parameter) gate.angle = value;
            evolved.push_back(
                apply_transformation(prep, TransformationContext::deterministic(bound_circuit)));
        }

        ParameterTrace trace;
        trace.parameter = probe.parameter;
        const EpistemicState& base = evolved.front();
        for (std::size_t k = 1; k < evolved.size(); ++k) {
            if (evolved[k].branches().size() != base.branches().size())
                throw InternalError("deterministic circuit changed the branch count");
            // Tolerance-based: dense rewriting leaves ~1e-16 coefficient noise
            // even on elements the gate fixes, which is numerical, not a
            // genuine parameter dependence.
            for (std::size_t br = 0; br < base.branches().size(); ++br)
                for (std::size_t q = 0; q < n; ++q) {
                    const QubitDescriptor& d0 = base.branches()[br].state.descriptor(q);
                    const QubitDescriptor& dk = evolved[k].branches()[br].state.descriptor(q);
                    if (max_coeff_delta(d0.x_bar, dk.x_bar) > tol)
                        trace.descriptor_elements.insert({q, 'x'});
                    if (max_coeff_delta(d0.y_bar, dk.y_bar) > tol)
                        trace.descriptor_elements.insert({q, 'y'});
                    if (max_coeff_delta(d0.z_bar, dk.z_bar) > tol)
                        trace.descriptor_elements.insert({q, 'z'});
                }
        }

        const std::array<Letter, 3> bases{Letter::X, Letter::Y, Letter::Z};
        for (std::size_t q = 0; q < n; ++q) {
            for (Letter basis : bases) {
                const MeasurementSpec spec = MeasurementSpec::preset(q, basis);
                const OutcomeDistribution d0 = measure(spec, base);
                for (std::size_t k = 1; k < evolved.size(); ++k)
                    if (distribution_gap(d0, measure(spec, evolved[k])) > tol) {
                        trace.local_statistics.insert(q);
                        break;
                    }
                if (trace.local_statistics.contains(q)) break;
            }
        }
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                bool found = false;
                for (Letter bp : bases) {
                    for (Letter bq : bases) {
                        const MeasurementSpec sp = MeasurementSpec::preset(p, bp);
                        const MeasurementSpec sq = MeasurementSpec::preset(q, bq);
                        const Eigen::MatrixXd t0 = joint_table(sp, sq, base);
                        for (std::size_t k = 1; k < evolved.size() && !found; ++k) {
                            const Eigen::MatrixXd tk = joint_table(sp, sq, evolved[k]);
                            if ((t0 - tk).cwiseAbs().maxCoeff() > tol) found = true;
                        }
                        if (found) break;
                    }
                    if (found) break;
                }
                if (found) trace.joint_statistics.insert({p, q});
            }

        trace.locally_inaccessible =
            !trace.descriptor_elements.empty() && trace.local_statistics.empty();
        out.parameters.push_back(std::move(trace));
    }
    return out;
}

}  // namespace dh
