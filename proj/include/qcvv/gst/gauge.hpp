#pragma once

#include <string>
#include <string_view>

#include "qcvv/gst/gateset.hpp"

namespace qcvv::gst {

enum class GaugeMode { None, Unitary, TPThenUnitary };

std::string_view gauge_mode_name(GaugeMode m);
GaugeMode parse_gauge_mode(std::string_view s);

struct GaugeOptions {
    GaugeMode mode = GaugeMode::TPThenUnitary;
    double spam_weight = 1.0;
};

struct GaugeResult {
    GateSet gate_set;
    PTM transform = PTM::Identity();  // T with G -> T G T^-1
    double objective_before = 0.0;
    double objective_after = 0.0;
    bool diverged = false;
};

/// sum_gates |T G T^-1 - G_t|_F^2 + w_spam (|T rho - rho_t|^2 + |E T^-1 - E_t|^2).
double gauge_objective(const GateSet& est, const GateSet& target, const PTM& T, double spam_weight);

/// diag(1, R) for the rotation exp(-i |w| (w/|w|).sigma / 2) acting on the Bloch block.
PTM rotation_gauge(const Vec3& w);

/// Minimises gauge_objective over T: first the trace-preserving group
/// [[1, 0], [v, A]], then rotations diag(1, R). A diverged optimisation
/// returns the identity gauge with `diverged` set.
GaugeResult gauge_optimize(const GateSet& est, const GateSet& target, const GaugeOptions& options = {});

}  // namespace qcvv::gst
