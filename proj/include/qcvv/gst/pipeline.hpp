#pragma once
// End-to-end GST flow: simulate a dataset from an error model, estimate the
// gate set, gauge-optimize, and compare diamond distances to the ideal gates
// along the calculated and estimated paths.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcvv/gst/design.hpp"
#include "qcvv/gst/diamond.hpp"
#include "qcvv/gst/estimation.hpp"
#include "qcvv/gst/gauge.hpp"
#include "qcvv/walk.hpp"

namespace qcvv::gst {

/// Drive Rabi frequency used to turn detunings in Hz into delta = Delta / Omega.
inline constexpr double kRabiFrequencyHz = 22500.0;

/// Default detuning sweep in Hz.
std::vector<double> default_detunings_hz();

/// Design named by a version string.
GSTDesign design_for_version(const std::string& version);

/// Walk of a gate string through its physical pulses.
WalkRecord gst_sequence_walk(const GSTDesign& design, std::span<const int> gates,
                             const SignedPauli& error_axis = SignedPauli::plus(Axis::Z),
                             StepWeighting weighting = StepWeighting::Concurrent);

struct GateDistances {
    std::string gate;
    double dd_calc = 0.0;        // true gate vs ideal, no gauge optimisation
    double dd_calc_gauge = 0.0;  // gauge-optimised true set vs ideal
    double dd_est = 0.0;         // gauge-optimised estimate vs ideal
    double cp_clipped = 0.0;     // Choi eigenvalue mass clipped before dd_est
    bool flagged = false;        // diamond cross-check disagreement on any path
};

/// Estimate path: lgst, mle_refine, gauge_optimize towards the ideal set.
struct GSTAnalysis {
    double gram_condition = 0.0;
    FitLog fit;
    GaugeResult gauge;
    GateSet estimate;  // gauge-optimised
};

GSTAnalysis analyze_dataset(const GSTDataset& data, const GSTDesign& design, const GaugeOptions& gauge);

/// dd_calc and dd_calc_gauge for every gate of `truth`.
std::vector<GateDistances> calculated_distances(const GateSet& truth, const GaugeOptions& gauge);

/// Fills dd_est from a gauge-optimised estimate (projected onto CPTP first).
void add_estimated_distances(std::vector<GateDistances>& rows, const GateSet& estimate);

struct GSTReport {
    std::string design_version;
    ErrorModel model;
    std::uint64_t shots = kExactShots;
    std::uint64_t seed = 0;
    GaugeOptions gauge;
    GSTAnalysis analysis;
    std::vector<GateDistances> gates;
};

GSTReport run_gst_pipeline(const ErrorModel& model, const GSTDesign& design, std::uint64_t shots,
                           const GaugeOptions& gauge, std::uint64_t seed);

/// Runs one pipeline per magnitude, in parallel across magnitudes.
std::vector<GSTReport> run_gst_sweep(ErrorKind kind, const std::vector<double>& magnitudes, const GSTDesign& design,
                                     std::uint64_t shots, const GaugeOptions& gauge, std::uint64_t seed);

nlohmann::json to_json(const GSTReport& r);

/// Header and rows (gate, magnitude, dd_calc, dd_calc_gauge, dd_est).
std::string gst_csv_header();
std::string gst_csv_rows(const GSTReport& r);

}  // namespace qcvv::gst
