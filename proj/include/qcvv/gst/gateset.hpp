#pragma once

// Gate sets in the normalised Pauli basis {I, X, Y, Z}/sqrt(2): labelled
// 4x4 process matrices plus a preparation vector rho and effect vector E,
// with p = E . G_n ... G_1 . rho for a gate string applied in time order.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcvv/qubit_algebra.hpp"

namespace qcvv::gst {

/// Physical pulse realising a gate label: Gi is an idle of two pi/2-pulse
/// times, Gx/Gy are +pi/2 drives and Gmx/Gmy are -pi/2 drives.
PhysicalPulse pulse_for_label(std::string_view label);

/// Gate string as indices into GateSet::labels, in time order.
using GateString = std::vector<int>;

struct GateSet {
    std::vector<std::string> labels;
    std::vector<PTM> gates;
    Vec4 rho = Vec4::Zero();
    Vec4 E = Vec4::Zero();

    std::size_t size() const { return labels.size(); }
    /// Index of a label; throws std::out_of_range when absent.
    int index_of(std::string_view label) const;
    const PTM& gate(std::string_view label) const { return gates[static_cast<std::size_t>(index_of(label))]; }

    /// E . G_{s_n} ... G_{s_1} . rho.
    double probability(std::span<const int> s) const;
    /// G_{s_n} ... G_{s_1}.
    PTM product(std::span<const int> s) const;
};

/// Ideal gates for the given labels with rho = E = (1, 0, 0, 1)/sqrt(2).
GateSet ideal_gate_set(const std::vector<std::string>& labels);

enum class ErrorKind { None, Overrotation, Detuning };

std::string_view error_kind_name(ErrorKind k);
/// Accepts none, overrot/overrotation, detune/detuning.
ErrorKind parse_error_kind(std::string_view s);

struct ErrorModel {
    ErrorKind kind = ErrorKind::None;
    double magnitude = 0.0;
};

/// Gate set whose gates are rebuilt from their noisy pulses: detuning applies
/// the concurrent sigma_z term to every pulse including idles; overrotation
/// scales driven angles by (1 + magnitude) and leaves Gi ideal. SPAM is ideal.
GateSet apply_error_model(const std::vector<std::string>& labels, const ErrorModel& m);

/// Unitary of one label under the error model.
Unitary2 label_unitary(std::string_view label, const ErrorModel& m);

/// G -> T G T^-1, rho -> T rho, E -> E T^-1.
GateSet apply_gauge(const GateSet& g, const PTM& T);

/// True when every gate's first row is (1, 0, 0, 0) within tol.
bool is_trace_preserving(const GateSet& g, double tol = 1e-9);

nlohmann::json to_json(const GateSet& g);
GateSet gate_set_from_json(const nlohmann::json& j);

}  // namespace qcvv::gst
