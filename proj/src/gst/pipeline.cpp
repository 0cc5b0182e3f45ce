#include "qcvv/gst/pipeline.hpp"

#include <sstream>
#include <stdexcept>

#include "qcvv/io.hpp"
#include "qcvv/parallel.hpp"
#include "qcvv/random.hpp"

namespace qcvv::gst {

std::vector<double> default_detunings_hz() { return {75.0, 500.0, 1000.0, 1400.0}; }

GSTDesign design_for_version(const std::string& version) {
    if (version == kStandardDesignVersion) return standard_design();
    if (version == kExtendedDesignVersion) return extended_design();
    throw std::invalid_argument("unknown design version: " + version);
}

WalkRecord gst_sequence_walk(const GSTDesign& design, std::span<const int> gates, const SignedPauli& error_axis,
                             StepWeighting weighting) {
    std::vector<PhysicalPulse> pulses;
    std::vector<std::size_t> gate_of_pulse;
    for (std::size_t i = 0; i < gates.size(); ++i) {
        pulses.push_back(pulse_for_label(design.labels.at(static_cast<std::size_t>(gates[i]))));
        gate_of_pulse.push_back(i);
    }
    return compute_pulse_walk(pulses, error_axis, weighting, gate_of_pulse);
}

GSTAnalysis analyze_dataset(const GSTDataset& data, const GSTDesign& design, const GaugeOptions& gauge) {
    const GateSet target = ideal_gate_set(design.labels);
    GSTAnalysis out;
    const LGSTResult initial = lgst(data, design, target);
    out.gram_condition = initial.gram_condition;
    MLEResult fit = mle_refine(initial.estimate, data, design);
    out.fit = std::move(fit.log);
    out.gauge = gauge_optimize(fit.estimate, target, gauge);
    out.estimate = out.gauge.gate_set;
    return out;
}

std::vector<GateDistances> calculated_distances(const GateSet& truth, const GaugeOptions& gauge) {
    const GateSet target = ideal_gate_set(truth.labels);
    const GateSet optimised = gauge_optimize(truth, target, gauge).gate_set;
    std::vector<GateDistances> rows;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        GateDistances row;
        row.gate = truth.labels[k];
        const DiamondResult calc = diamond_distance(truth.gates[k], target.gates[k]);
        // Gauge-transformed unitary channels can sit a rounding error outside the CP cone.
        const DiamondResult calc_gauge = diamond_distance(project_to_cptp(optimised.gates[k]).ptm, target.gates[k]);
        row.dd_calc = calc.value;
        row.dd_calc_gauge = calc_gauge.value;
        row.flagged = calc.flagged || calc_gauge.flagged;
        rows.push_back(row);
    }
    return rows;
}

void add_estimated_distances(std::vector<GateDistances>& rows, const GateSet& estimate) {
    const GateSet target = ideal_gate_set(estimate.labels);
    for (auto& row : rows) {
        const int k = estimate.index_of(row.gate);
        const CPTPProjection proj = project_to_cptp(estimate.gates[static_cast<std::size_t>(k)]);
        const DiamondResult est = diamond_distance(proj.ptm, target.gates[static_cast<std::size_t>(k)]);
        row.dd_est = est.value;
        row.cp_clipped = proj.clipped;
        row.flagged = row.flagged || est.flagged;
    }
}

GSTReport run_gst_pipeline(const ErrorModel& model, const GSTDesign& design, std::uint64_t shots,
                           const GaugeOptions& gauge, std::uint64_t seed) {
    GSTReport r;
    r.design_version = design.version;
    r.model = model;
    r.shots = shots;
    r.seed = seed;
    r.gauge = gauge;
    const GateSet truth = apply_error_model(design.labels, model);
    const GSTDataset data = simulate_dataset(truth, design, shots, seed);
    r.analysis = analyze_dataset(data, design, gauge);
    r.gates = calculated_distances(truth, gauge);
    add_estimated_distances(r.gates, r.analysis.estimate);
    return r;
}

std::vector<GSTReport> run_gst_sweep(ErrorKind kind, const std::vector<double>& magnitudes, const GSTDesign& design,
                                     std::uint64_t shots, const GaugeOptions& gauge, std::uint64_t seed) {
    std::vector<GSTReport> out(magnitudes.size());
    parallel_for(magnitudes.size(), [&](std::size_t i) {
        out[i] = run_gst_pipeline({kind, magnitudes[i]}, design, shots, gauge, derive_seed(seed, {i}));
    });
    return out;
}

nlohmann::json to_json(const GSTReport& r) {
    nlohmann::json gates = nlohmann::json::array();
    for (const auto& g : r.gates)
        gates.push_back({{"gate", g.gate},
                         {"dd_calc", g.dd_calc},
                         {"dd_calc_gauge", g.dd_calc_gauge},
                         {"dd_est", g.dd_est},
                         {"cp_clipped", g.cp_clipped},
                         {"flagged", g.flagged}});
    return {{"design_version", r.design_version},
            {"model", {{"kind", error_kind_name(r.model.kind)}, {"magnitude", r.model.magnitude}}},
            {"shots", r.shots == kExactShots ? nlohmann::json("exact") : nlohmann::json(r.shots)},
            {"seed", r.seed},
            {"gauge", {{"mode", gauge_mode_name(r.gauge.mode)}, {"spam_weight", r.gauge.spam_weight}}},
            {"diamond_convention", kDiamondConvention},
            {"gram_condition", r.analysis.gram_condition},
            {"fit", to_json(r.analysis.fit)},
            {"gauge_objective_before", r.analysis.gauge.objective_before},
            {"gauge_objective_after", r.analysis.gauge.objective_after},
            {"gauge_diverged", r.analysis.gauge.diverged},
            {"estimate", to_json(r.analysis.estimate)},
            {"gates", gates}};
}

std::string gst_csv_header() { return "gate,kind,magnitude,dd_calc,dd_calc_gauge,dd_est\n"; }

std::string gst_csv_rows(const GSTReport& r) {
    std::ostringstream ss;
    for (const auto& g : r.gates)
        ss << g.gate << ',' << error_kind_name(r.model.kind) << ',' << format_number(r.model.magnitude) << ','
           << format_number(g.dd_calc) << ',' << format_number(g.dd_calc_gauge) << ',' << format_number(g.dd_est)
           << '\n';
    return ss.str();
}

}  // namespace qcvv::gst
