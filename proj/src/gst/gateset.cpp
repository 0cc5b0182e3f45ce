#include "qcvv/gst/gateset.hpp"

#include <cmath>
#include <stdexcept>

#include "qcvv/diagnostics.hpp"

namespace qcvv::gst {

PhysicalPulse pulse_for_label(std::string_view label) {
    if (label == "Gi") return PhysicalPulse::idle(2);
    if (label == "Gx") return PhysicalPulse::drive(PulseAxis::X, 1);
    if (label == "Gy") return PhysicalPulse::drive(PulseAxis::Y, 1);
    if (label == "Gmx") return PhysicalPulse::drive(PulseAxis::X, -1);
    if (label == "Gmy") return PhysicalPulse::drive(PulseAxis::Y, -1);
    throw std::invalid_argument("unknown gate label '" + std::string(label) + "'");
}

int GateSet::index_of(std::string_view label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) return static_cast<int>(i);
    }
    throw std::out_of_range("gate set has no gate '" + std::string(label) + "'");
}

double GateSet::probability(std::span<const int> s) const {
    Vec4 v = rho;
    for (int k : s) v = gates[static_cast<std::size_t>(k)] * v;
    return E.dot(v);
}

PTM GateSet::product(std::span<const int> s) const {
    PTM p = PTM::Identity();
    for (int k : s) p = gates[static_cast<std::size_t>(k)] * p;
    return p;
}

GateSet ideal_gate_set(const std::vector<std::string>& labels) {
    return apply_error_model(labels, {});
}

std::string_view error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::None: return "none";
        case ErrorKind::Overrotation: return "overrot";
        case ErrorKind::Detuning: return "detune";
    }
    return "?";
}

ErrorKind parse_error_kind(std::string_view s) {
    if (s == "none") return ErrorKind::None;
    if (s == "overrot" || s == "overrotation") return ErrorKind::Overrotation;
    if (s == "detune" || s == "detuning") return ErrorKind::Detuning;
    throw std::invalid_argument("unknown error model '" + std::string(s) + "' (expected none, overrot or detune)");
}

Unitary2 label_unitary(std::string_view label, const ErrorModel& m) {
    const PhysicalPulse p = pulse_for_label(label);
    switch (m.kind) {
        case ErrorKind::None: return noisy_pulse_unitary(p, 0.0);
        case ErrorKind::Overrotation: return overrotated_pulse_unitary(p, m.magnitude);
        case ErrorKind::Detuning: return noisy_pulse_unitary(p, m.magnitude);
    }
    return Unitary2();
}

GateSet apply_error_model(const std::vector<std::string>& labels, const ErrorModel& m) {
    if (std::abs(m.magnitude) >= 0.5) throw std::invalid_argument("error magnitude must satisfy |x| < 0.5");
    GateSet g;
    g.labels = labels;
    for (const auto& l : labels) g.gates.push_back(unitary_to_ptm(label_unitary(l, m)));
    g.rho = Vec4(1, 0, 0, 1) / std::sqrt(2.0);
    g.E = g.rho;
    return g;
}

GateSet apply_gauge(const GateSet& g, const PTM& T) {
    const PTM Tinv = T.inverse();
    GateSet out = g;
    for (auto& G : out.gates) G = T * G * Tinv;
    out.rho = T * g.rho;
    out.E = (g.E.transpose() * Tinv).transpose();
    return out;
}

bool is_trace_preserving(const GateSet& g, double tol) {
    for (const auto& G : g.gates) {
        if ((G.row(0) - Vec4(1, 0, 0, 0).transpose()).cwiseAbs().maxCoeff() > tol) return false;
    }
    return true;
}

nlohmann::json to_json(const GateSet& g) {
    nlohmann::json gates = nlohmann::json::object();
    for (std::size_t k = 0; k < g.size(); ++k) {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < 4; ++i) rows.push_back({g.gates[k](i, 0), g.gates[k](i, 1), g.gates[k](i, 2), g.gates[k](i, 3)});
        gates[g.labels[k]] = rows;
    }
    return {{"basis", "pauli-normalized"},
            {"labels", g.labels},
            {"gates", gates},
            {"rho", {g.rho[0], g.rho[1], g.rho[2], g.rho[3]}},
            {"E", {g.E[0], g.E[1], g.E[2], g.E[3]}}};
}

GateSet gate_set_from_json(const nlohmann::json& j) {
    GateSet g;
    g.labels = j.at("labels").get<std::vector<std::string>>();
    for (const auto& l : g.labels) {
        const auto& rows = j.at("gates").at(l);
        PTM m;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) m(r, c) = rows.at(r).at(c).get<double>();
        g.gates.push_back(m);
    }
    for (int i = 0; i < 4; ++i) {
        g.rho[i] = j.at("rho").at(i).get<double>();
        g.E[i] = j.at("E").at(i).get<double>();
    }
    return g;
}

}  // namespace qcvv::gst
