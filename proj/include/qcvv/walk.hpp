#pragma once

// Sequence-dependent Pauli-space walks. Step l points along
// K_{l-1}^dagger sigma K_{l-1}, with K_{l-1} the ideal product of everything
// applied before it. The 2D projection is the xy-plane seen by a z-basis
// measurement.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qcvv/qubit_algebra.hpp"
#include "qcvv/random.hpp"
#include "qcvv/rb_sequence.hpp"

namespace qcvv {

/// How step lengths are assigned.
///  - Unit: one unit step per Clifford.
///  - Duration: one step per Clifford, weighted by its total pulse duration.
///  - Concurrent: first-order error of the concurrent detuning model, with one
///    half-step before and after every pi/2 segment of a driven pulse and a
///    duration*pi/4 step per idle. delta^2 * |V_2D|^2 then equals the
///    survival infidelity to first order.
enum class StepWeighting : std::uint8_t { Unit, Duration, Concurrent };

struct WalkStep {
    static constexpr std::size_t kNoSlot = std::numeric_limits<std::size_t>::max();

    SignedPauli direction;
    double weight = 1.0;
    std::size_t gate = 0;          // index of the Clifford that produced the step
    std::size_t slot = kNoSlot;    // noise slot (Concurrent weighting only)
};

struct WalkRecord {
    SignedPauli error_axis;
    StepWeighting weighting = StepWeighting::Duration;
    std::vector<WalkStep> steps;
    Vec3 v = Vec3::Zero();
    Eigen::Vector2d v2d = Eigen::Vector2d::Zero();
    double vz = 0.0;
    double norm_v2d_sq = 0.0;
    double norm_v_sq = 0.0;
    double total_weight = 0.0;  // sum of |weights|
};

struct LongWalkLabel {
    bool is_long = false;
    double threshold_used = 2.0;  // multiplier m in m * (2/3) * J
    double threshold_value = 0.0;
};

/// 3x3 signed-permutation rotation of a Clifford unitary (its PTM block).
Eigen::Matrix3i clifford_rotation(const Unitary2& u);

/// Walk of a Clifford sequence. Throws std::invalid_argument for an empty
/// sequence.
WalkRecord compute_walk(const CliffordGroup& group, std::span<const int> seq,
                        const SignedPauli& error_axis = SignedPauli::plus(Axis::Z),
                        StepWeighting weighting = StepWeighting::Duration);

/// Walk of an arbitrary pulse stream (used for GST gate strings).
WalkRecord compute_pulse_walk(std::span<const PhysicalPulse> pulses, const SignedPauli& error_axis,
                              StepWeighting weighting, std::span<const std::size_t> gate_of_pulse = {});

/// is_long iff |V_2D|^2 > m * (2/3) * J. Requires m > 0.
LongWalkLabel classify_long_walk(const WalkRecord& w, std::size_t J, double multiplier = 2.0);

/// Raised when rejection sampling does not find enough long walks.
class AttemptCapExceeded : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Random RB sequences whose unit-weight sigma_z walks are long at multiplier m
/// (m = 0 accepts everything).
std::vector<RBSequence> preselect_long_walk_sequences(const CliffordGroup& group, std::size_t J, std::size_t target,
                                                      double multiplier, Rng& rng,
                                                      std::size_t max_attempts = 1'000'000);

/// delta^2 * |V_2D|^2.
double predicted_dc_infidelity(double delta, const WalkRecord& w);

/// |sum_l delta_{slot(l)} w_l r_l|_2D^2 for per-slot deltas (Concurrent walks).
double predicted_infidelity(const WalkRecord& w, std::span<const double> slot_deltas);

/// Expected infidelity under white noise of standard deviation sigma:
/// sigma^2 * sum over slots of |sum of that slot's steps|_2D^2.
double predicted_white_mean_infidelity(double sigma, const WalkRecord& w);

/// 2x2 covariance (per unit sigma^2) of the 2D error vector under white noise.
Eigen::Matrix2d white_noise_covariance(const WalkRecord& w);

}  // namespace qcvv
