#include "qcvv/walk.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qcvv/diagnostics.hpp"

namespace qcvv {

namespace {

using Rot = Eigen::Matrix3i;

// Direction of K^dagger sigma_a K given the rotation R of K: row a of R.
SignedPauli direction_from(const Rot& frame, const SignedPauli& axis) {
    const int a = static_cast<int>(axis.axis);
    for (int j = 0; j < 3; ++j) {
        const int entry = frame(a, j);
        if (entry != 0) return SignedPauli{static_cast<Axis>(j), entry * axis.sign};
    }
    throw std::logic_error("frame is not a signed permutation");
}

Rot pulse_rotation(const PhysicalPulse& p) {
    return clifford_rotation(noisy_pulse_unitary(p, 0.0));
}

// Rotation of a single pi/2 segment of a driven pulse with the given sign.
const Rot& quarter_rotation(PulseAxis axis, int sign) {
    static const Rot xp = pulse_rotation(PhysicalPulse::drive(PulseAxis::X, 1));
    static const Rot xm = pulse_rotation(PhysicalPulse::drive(PulseAxis::X, -1));
    static const Rot yp = pulse_rotation(PhysicalPulse::drive(PulseAxis::Y, 1));
    static const Rot ym = pulse_rotation(PhysicalPulse::drive(PulseAxis::Y, -1));
    if (axis == PulseAxis::X) return sign > 0 ? xp : xm;
    return sign > 0 ? yp : ym;
}

void finalise(WalkRecord& w) {
    w.v.setZero();
    w.total_weight = 0.0;
    for (const auto& s : w.steps) {
        w.v += s.weight * s.direction.vector();
        w.total_weight += std::abs(s.weight);
    }
    w.v2d = w.v.head<2>();
    w.vz = w.v.z();
    w.norm_v2d_sq = w.v2d.squaredNorm();
    w.norm_v_sq = w.v.squaredNorm();
}

}  // namespace

Eigen::Matrix3i clifford_rotation(const Unitary2& u) {
    const PTM r = unitary_to_ptm(u);
    Rot out;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double x = r(i + 1, j + 1);
            const double rounded = std::round(x);
            if (std::abs(x - rounded) > 1e-9) throw NotCliffordError("unitary does not permute the Pauli axes");
            out(i, j) = static_cast<int>(rounded);
        }
    }
    return out;
}

WalkRecord compute_pulse_walk(std::span<const PhysicalPulse> pulses, const SignedPauli& error_axis,
                              StepWeighting weighting, std::span<const std::size_t> gate_of_pulse) {
    if (weighting != StepWeighting::Concurrent) {
        throw std::invalid_argument("pulse-level walks use the Concurrent weighting");
    }
    if (!gate_of_pulse.empty() && gate_of_pulse.size() != pulses.size()) {
        throw std::invalid_argument("gate_of_pulse must label every pulse");
    }
    WalkRecord w;
    w.error_axis = error_axis;
    w.weighting = weighting;
    Rot frame = Rot::Identity();
    std::size_t slot = 0;
    for (std::size_t k = 0; k < pulses.size(); ++k) {
        const PhysicalPulse& p = pulses[k];
        const std::size_t gate = gate_of_pulse.empty() ? k : gate_of_pulse[k];
        switch (p.axis()) {
            case PulseAxis::FrameZ:
                frame = pulse_rotation(p) * frame;
                break;
            case PulseAxis::Idle:
                w.steps.push_back({direction_from(frame, error_axis), p.duration() * kPi / 4.0, gate, slot++});
                break;
            default: {
                const int sign = p.quarter_turns() > 0 ? 1 : -1;
                const Rot& seg = quarter_rotation(p.axis(), sign);
                for (int q = 0; q < std::abs(p.quarter_turns()); ++q) {
                    const SignedPauli before = direction_from(frame, error_axis);
                    frame = seg * frame;
                    const SignedPauli after = direction_from(frame, error_axis);
                    if (before == after) {
                        // error term commutes with the drive
                        w.steps.push_back({before, kPi / 4.0, gate, slot});
                    } else {
                        w.steps.push_back({before, 0.5, gate, slot});
                        w.steps.push_back({after, 0.5, gate, slot});
                    }
                }
                ++slot;
            }
        }
    }
    finalise(w);
    return w;
}

WalkRecord compute_walk(const CliffordGroup& group, std::span<const int> seq, const SignedPauli& error_axis,
                        StepWeighting weighting) {
    if (seq.empty()) throw std::invalid_argument("compute_walk needs a non-empty sequence");
    if (weighting == StepWeighting::Concurrent) {
        std::vector<PhysicalPulse> pulses;
        std::vector<std::size_t> owner;
        for (std::size_t l = 0; l < seq.size(); ++l) {
            for (const auto& p : group[seq[l]].pulses) {
                pulses.push_back(p);
                owner.push_back(l);
            }
        }
        return compute_pulse_walk(pulses, error_axis, weighting, owner);
    }

    std::array<Rot, CliffordGroup::kSize> rotations;
    for (int i = 0; i < CliffordGroup::kSize; ++i) rotations[i] = clifford_rotation(group[i].net);

    WalkRecord w;
    w.error_axis = error_axis;
    w.weighting = weighting;
    w.steps.reserve(seq.size());
    Rot frame = Rot::Identity();
    for (std::size_t l = 0; l < seq.size(); ++l) {
        const int g = seq[l];
        const double weight = weighting == StepWeighting::Unit ? 1.0 : static_cast<double>(group[g].duration());
        w.steps.push_back({direction_from(frame, error_axis), weight, l, WalkStep::kNoSlot});
        frame = rotations[g] * frame;
    }
    finalise(w);
    return w;
}

LongWalkLabel classify_long_walk(const WalkRecord& w, std::size_t J, double multiplier) {
    if (!(multiplier > 0.0)) throw std::invalid_argument("long-walk multiplier must be positive");
    LongWalkLabel label;
    label.threshold_used = multiplier;
    label.threshold_value = multiplier * (2.0 / 3.0) * static_cast<double>(J);
    label.is_long = w.norm_v2d_sq > label.threshold_value;
    return label;
}

std::vector<RBSequence> preselect_long_walk_sequences(const CliffordGroup& group, std::size_t J, std::size_t target,
                                                      double multiplier, Rng& rng, std::size_t max_attempts) {
    if (target < 1) throw std::invalid_argument("preselection target must be at least 1");
    if (multiplier < 0.0) throw std::invalid_argument("long-walk multiplier must be non-negative");
    std::vector<RBSequence> accepted;
    std::size_t attempts = 0;
    while (accepted.size() < target) {
        if (attempts++ >= max_attempts) {
            throw AttemptCapExceeded("found only " + std::to_string(accepted.size()) + " of " +
                                     std::to_string(target) + " long walks in " + std::to_string(max_attempts) +
                                     " attempts (J=" + std::to_string(J) + ", m=" + std::to_string(multiplier) + ")");
        }
        RBSequence s = generate_rb_sequence(group, J, rng);
        if (multiplier == 0.0) {
            accepted.push_back(std::move(s));
            continue;
        }
        const WalkRecord w = compute_walk(group, s.gates, SignedPauli::plus(Axis::Z), StepWeighting::Unit);
        if (classify_long_walk(w, J, multiplier).is_long) accepted.push_back(std::move(s));
    }
    return accepted;
}

double predicted_dc_infidelity(double delta, const WalkRecord& w) {
    const double value = delta * delta * w.norm_v2d_sq;
    if (value > 0.1) {
        warn_once("predicted_dc_infidelity.regime", "predicted infidelity above 0.1; first-order walk estimate is unreliable");
    }
    return value;
}

double predicted_infidelity(const WalkRecord& w, std::span<const double> slot_deltas) {
    Eigen::Vector2d r = Eigen::Vector2d::Zero();
    for (const auto& s : w.steps) {
        if (s.slot == WalkStep::kNoSlot || s.slot >= slot_deltas.size()) {
            throw std::invalid_argument("walk step has no matching noise slot");
        }
        r += slot_deltas[s.slot] * s.weight * s.direction.vector().head<2>();
    }
    return r.squaredNorm();
}

Eigen::Matrix2d white_noise_covariance(const WalkRecord& w) {
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    std::size_t i = 0;
    while (i < w.steps.size()) {
        const std::size_t slot = w.steps[i].slot;
        if (slot == WalkStep::kNoSlot) throw std::invalid_argument("white-noise prediction needs a Concurrent walk");
        Eigen::Vector2d c = Eigen::Vector2d::Zero();
        for (; i < w.steps.size() && w.steps[i].slot == slot; ++i) {
            c += w.steps[i].weight * w.steps[i].direction.vector().head<2>();
        }
        cov += c * c.transpose();
    }
    return cov;
}

double predicted_white_mean_infidelity(double sigma, const WalkRecord& w) {
    return sigma * sigma * white_noise_covariance(w).trace();
}

}  // namespace qcvv
