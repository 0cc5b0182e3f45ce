#pragma once

// Exact single-qubit operator algebra: signed Paulis, 2x2 unitaries, timed
// physical pulses with a concurrent detuning term, the 24-element Clifford
// group, and Pauli-transfer-matrix representations.

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qcvv {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec3 = Eigen::Vector3d;
using PTM = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

inline constexpr double kPi = 3.14159265358979323846;

/// Raised when an operator that should be Clifford does not map a Pauli onto
/// a signed Pauli.
class NotCliffordError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Axis : std::uint8_t { X = 0, Y = 1, Z = 2 };

char axis_name(Axis a);
Axis parse_axis(std::string_view s);

/// One of the six operators +-sigma_{x,y,z}.
struct SignedPauli {
    Axis axis = Axis::Z;
    int sign = +1;

    static constexpr SignedPauli plus(Axis a) { return {a, +1}; }
    static constexpr SignedPauli minus(Axis a) { return {a, -1}; }

    /// Cartesian unit vector +-e_axis.
    Vec3 vector() const;
    Mat2 matrix() const;
    std::string str() const;

    friend bool operator==(const SignedPauli&, const SignedPauli&) = default;
};

/// All six signed Paulis in a fixed order (+x, -x, +y, -y, +z, -z).
std::array<SignedPauli, 6> all_signed_paulis();

/// Unsigned Pauli matrix for the given axis.
const Mat2& pauli_matrix(Axis a);

/// A 2x2 unitary. Construction through `checked` enforces unitarity; the
/// explicit constructor trusts the caller (used for products of unitaries).
class Unitary2 {
  public:
    Unitary2() : m_(Mat2::Identity()) {}
    explicit Unitary2(const Mat2& m) : m_(m) {}

    static Unitary2 checked(const Mat2& m, double tol = 1e-12);
    static Unitary2 identity() { return Unitary2(); }
    /// exp(-i (angle/2) n.sigma) for a unit axis n.
    static Unitary2 rotation(const Vec3& axis, double angle);

    const Mat2& matrix() const { return m_; }
    Unitary2 adjoint() const { return Unitary2(m_.adjoint()); }

    /// |Tr(A^dagger B)|/2, equal to 1 iff A and B agree up to global phase.
    double phase_overlap(const Unitary2& other) const;
    bool equal_up_to_phase(const Unitary2& other, double tol = 1e-10) const;

    friend Unitary2 operator*(const Unitary2& a, const Unitary2& b) { return Unitary2(a.m_ * b.m_); }

  private:
    Mat2 m_;
};

enum class PulseAxis : std::uint8_t { X, Y, Idle, FrameZ };

std::string_view pulse_axis_name(PulseAxis a);
PulseAxis parse_pulse_axis(std::string_view s);

/// A timed physical operation. Angles are integer multiples of pi/2 and
/// durations are measured in units of the pi/2 pulse time.
class PhysicalPulse {
  public:
    static PhysicalPulse drive(PulseAxis axis, int quarter_turns);
    static PhysicalPulse idle(int duration);
    static PhysicalPulse frame_z(int quarter_turns);
    /// Validating constructor used by deserialisation.
    static PhysicalPulse make(PulseAxis axis, int quarter_turns, int duration);

    PulseAxis axis() const { return axis_; }
    int quarter_turns() const { return quarter_turns_; }
    int duration() const { return duration_; }
    double angle() const { return quarter_turns_ * kPi / 2.0; }
    /// True for pulses that evolve in time and therefore consume a noise slot.
    bool is_timed() const { return axis_ != PulseAxis::FrameZ; }

    friend bool operator==(const PhysicalPulse&, const PhysicalPulse&) = default;

  private:
    PhysicalPulse(PulseAxis a, int q, int d) : axis_(a), quarter_turns_(q), duration_(d) {}
    PulseAxis axis_;
    int quarter_turns_;
    int duration_;
};

/// exp{-i[(theta/2) sigma_axis + duration*(pi/4)*delta*sigma_z]}. Frame
/// updates are exact; idles carry only the detuning term.
Unitary2 noisy_pulse_unitary(const PhysicalPulse& pulse, double delta);

/// Like noisy_pulse_unitary but with the drive angle scaled by (1 + overrotation).
Unitary2 overrotated_pulse_unitary(const PhysicalPulse& pulse, double overrotation);

/// Returns r with K^dagger P K = r . sigma; throws NotCliffordError otherwise.
SignedPauli conjugate_pauli(const Unitary2& k, const SignedPauli& p);

/// R_ij = (1/2) Tr[sigma_i U sigma_j U^dagger] in the {I, X, Y, Z} basis.
PTM unitary_to_ptm(const Unitary2& u);

struct CliffordElement {
    int index = 0;
    std::vector<PhysicalPulse> pulses;  // time order
    Unitary2 net;

    int duration() const;
    int timed_pulse_count() const;
};

/// Product of the ideal pulses, later pulses multiplying from the left.
Unitary2 ideal_pulse_product(std::span<const PhysicalPulse> pulses);

/// The single-qubit Clifford group with a fixed physical decomposition.
/// Immutable after construction; multiplication and inverse tables are
/// precomputed.
class CliffordGroup {
  public:
    /// Builds the group from 24 decompositions. Throws std::invalid_argument if
    /// they are not 24 distinct Cliffords closed under multiplication.
    explicit CliffordGroup(std::vector<std::vector<PhysicalPulse>> decompositions);

    /// Built-in table with the identity realised as an idle of `identity_idle` units.
    static CliffordGroup standard(int identity_idle = 2);

    static constexpr int kSize = 24;

    const CliffordElement& operator[](int i) const { return elements_.at(static_cast<std::size_t>(i)); }
    const std::vector<CliffordElement>& elements() const { return elements_; }
    std::size_t size() const { return elements_.size(); }
    int identity() const { return identity_; }

    /// Index of the element whose net unitary equals a.net * b.net up to phase.
    int compose(int a, int b) const { return table_[a][b]; }
    int inverse(int a) const { return inverse_[a]; }
    /// Product U_n ... U_1 of a gate list applied in order, as an index.
    int product(std::span<const int> seq) const;
    /// Element G with compose(product(seq), G) == identity.
    int inverse_of_product(std::span<const int> seq) const;
    /// Locates a unitary in the group (up to phase); -1 if absent.
    int find(const Unitary2& u) const;
    /// Looks up an element by its ideal decomposition.
    int find(std::span<const PhysicalPulse> pulses) const;

  private:
    std::vector<CliffordElement> elements_;
    std::array<std::array<int, kSize>, kSize> table_{};
    std::array<int, kSize> inverse_{};
    int identity_ = -1;
};

/// Flattened pulse stream of a Clifford sequence.
std::vector<PhysicalPulse> flatten_pulses(const CliffordGroup& group, std::span<const int> seq);
/// Number of noise slots (timed pulses) consumed by a sequence.
std::size_t timed_pulse_count(const CliffordGroup& group, std::span<const int> seq);

/// Noisy product over the flattened pulse stream; `deltas` supplies one value
/// per timed pulse. Throws std::invalid_argument on a length mismatch.
Unitary2 sequence_unitary(const CliffordGroup& group, std::span<const int> seq, std::span<const double> deltas);

}  // namespace qcvv
