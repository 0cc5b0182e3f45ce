#include "qcvv/qubit_algebra.hpp"

#include <cmath>
#include <sstream>

#include "qcvv/clifford_table.hpp"
#include "qcvv/diagnostics.hpp"

namespace qcvv {

namespace {

const Complex kI(0.0, 1.0);

Mat2 make_pauli(Axis a) {
    Mat2 m;
    switch (a) {
        case Axis::X: m << 0, 1, 1, 0; break;
        case Axis::Y: m << 0, -kI, kI, 0; break;
        case Axis::Z: m << 1, 0, 0, -1; break;
    }
    return m;
}

// exp(-i h.sigma) in closed form.
Mat2 exp_minus_i(const Vec3& h) {
    const double n = h.norm();
    Mat2 out = std::cos(n) * Mat2::Identity();
    if (n > 0) {
        const double s = std::sin(n) / n;
        out -= kI * s * (h.x() * pauli_matrix(Axis::X) + h.y() * pauli_matrix(Axis::Y) + h.z() * pauli_matrix(Axis::Z));
    }
    return out;
}

Vec3 axis_vector(PulseAxis a) {
    switch (a) {
        case PulseAxis::X: return Vec3::UnitX();
        case PulseAxis::Y: return Vec3::UnitY();
        default: return Vec3::UnitZ();
    }
}

}  // namespace

char axis_name(Axis a) {
    return "xyz"[static_cast<int>(a)];
}

Axis parse_axis(std::string_view s) {
    if (s == "x" || s == "X") return Axis::X;
    if (s == "y" || s == "Y") return Axis::Y;
    if (s == "z" || s == "Z") return Axis::Z;
    throw std::invalid_argument("unknown Pauli axis '" + std::string(s) + "'");
}

Vec3 SignedPauli::vector() const {
    Vec3 v = Vec3::Zero();
    v[static_cast<int>(axis)] = sign;
    return v;
}

Mat2 SignedPauli::matrix() const {
    return static_cast<double>(sign) * pauli_matrix(axis);
}

std::string SignedPauli::str() const {
    return std::string(sign > 0 ? "+" : "-") + axis_name(axis);
}

std::array<SignedPauli, 6> all_signed_paulis() {
    return {SignedPauli::plus(Axis::X), SignedPauli::minus(Axis::X), SignedPauli::plus(Axis::Y),
            SignedPauli::minus(Axis::Y), SignedPauli::plus(Axis::Z), SignedPauli::minus(Axis::Z)};
}

const Mat2& pauli_matrix(Axis a) {
    static const std::array<Mat2, 3> paulis = {make_pauli(Axis::X), make_pauli(Axis::Y), make_pauli(Axis::Z)};
    return paulis[static_cast<int>(a)];
}

Unitary2 Unitary2::checked(const Mat2& m, double tol) {
    const double err = (m.adjoint() * m - Mat2::Identity()).cwiseAbs().maxCoeff();
    if (err > tol || std::abs(std::abs(m.determinant()) - 1.0) > tol) {
        std::ostringstream os;
        os << "matrix is not unitary (max |U^dagger U - I| = " << err << ")";
        throw std::invalid_argument(os.str());
    }
    return Unitary2(m);
}

Unitary2 Unitary2::rotation(const Vec3& axis, double angle) {
    return Unitary2(exp_minus_i(axis.normalized() * (angle / 2.0)));
}

double Unitary2::phase_overlap(const Unitary2& other) const {
    return std::abs((m_.adjoint() * other.m_).trace()) / 2.0;
}

bool Unitary2::equal_up_to_phase(const Unitary2& other, double tol) const {
    return std::abs(phase_overlap(other) - 1.0) <= tol;
}

std::string_view pulse_axis_name(PulseAxis a) {
    switch (a) {
        case PulseAxis::X: return "x";
        case PulseAxis::Y: return "y";
        case PulseAxis::Idle: return "idle";
        case PulseAxis::FrameZ: return "frame-z";
    }
    return "?";
}

PulseAxis parse_pulse_axis(std::string_view s) {
    if (s == "x") return PulseAxis::X;
    if (s == "y") return PulseAxis::Y;
    if (s == "idle") return PulseAxis::Idle;
    if (s == "frame-z") return PulseAxis::FrameZ;
    throw std::invalid_argument("unknown pulse axis '" + std::string(s) + "'");
}

PhysicalPulse PhysicalPulse::drive(PulseAxis axis, int quarter_turns) {
    return make(axis, quarter_turns, std::abs(quarter_turns));
}

PhysicalPulse PhysicalPulse::idle(int duration) {
    return make(PulseAxis::Idle, 0, duration);
}

PhysicalPulse PhysicalPulse::frame_z(int quarter_turns) {
    return make(PulseAxis::FrameZ, quarter_turns, 0);
}

PhysicalPulse PhysicalPulse::make(PulseAxis axis, int quarter_turns, int duration) {
    if (quarter_turns < -2 || quarter_turns > 2) {
        throw std::invalid_argument("pulse angle must lie in {0, +-pi/2, +-pi}");
    }
    switch (axis) {
        case PulseAxis::X:
        case PulseAxis::Y:
            if (quarter_turns == 0 || duration != std::abs(quarter_turns)) {
                throw std::invalid_argument("driven pulse needs a nonzero angle and duration |angle|/(pi/2)");
            }
            break;
        case PulseAxis::Idle:
            if (quarter_turns != 0 || duration <= 0) {
                throw std::invalid_argument("idle pulse needs angle 0 and positive duration");
            }
            break;
        case PulseAxis::FrameZ:
            if (duration != 0) throw std::invalid_argument("frame-z update must have duration 0");
            break;
    }
    return PhysicalPulse(axis, quarter_turns, duration);
}

Unitary2 noisy_pulse_unitary(const PhysicalPulse& pulse, double delta) {
    if (std::abs(delta) > 0.5) {
        warn_once("noisy_pulse_unitary.large_delta", "detuning |delta| > 0.5 is outside the perturbative regime");
    }
    const double half_angle = pulse.angle() / 2.0;
    switch (pulse.axis()) {
        case PulseAxis::FrameZ:
            return Unitary2(exp_minus_i(Vec3(0, 0, half_angle)));
        case PulseAxis::Idle:
            return Unitary2(exp_minus_i(Vec3(0, 0, pulse.duration() * (kPi / 4.0) * delta)));
        default: {
            Vec3 h = half_angle * axis_vector(pulse.axis());
            h.z() += pulse.duration() * (kPi / 4.0) * delta;
            return Unitary2(exp_minus_i(h));
        }
    }
}

Unitary2 overrotated_pulse_unitary(const PhysicalPulse& pulse, double overrotation) {
    if (pulse.axis() == PulseAxis::X || pulse.axis() == PulseAxis::Y) {
        return Unitary2(exp_minus_i((1.0 + overrotation) * (pulse.angle() / 2.0) * axis_vector(pulse.axis())));
    }
    return noisy_pulse_unitary(pulse, 0.0);
}

SignedPauli conjugate_pauli(const Unitary2& k, const SignedPauli& p) {
    const Mat2 c = k.matrix().adjoint() * p.matrix() * k.matrix();
    for (const SignedPauli& candidate : all_signed_paulis()) {
        if ((c - candidate.matrix()).cwiseAbs().maxCoeff() <= 1e-10) return candidate;
    }
    throw NotCliffordError("conjugation of " + p.str() + " is not a signed Pauli; operator is not Clifford");
}

PTM unitary_to_ptm(const Unitary2& u) {
    static const std::array<Mat2, 4> basis = {Mat2::Identity(), make_pauli(Axis::X), make_pauli(Axis::Y),
                                              make_pauli(Axis::Z)};
    const Mat2& m = u.matrix();
    const Mat2 md = m.adjoint();
    PTM r;
    for (int j = 0; j < 4; ++j) {
        const Mat2 image = m * basis[j] * md;
        for (int i = 0; i < 4; ++i) r(i, j) = 0.5 * (basis[i] * image).trace().real();
    }
    return r;
}

int CliffordElement::duration() const {
    int d = 0;
    for (const auto& p : pulses) d += p.duration();
    return d;
}

int CliffordElement::timed_pulse_count() const {
    int n = 0;
    for (const auto& p : pulses) n += p.is_timed() ? 1 : 0;
    return n;
}

Unitary2 ideal_pulse_product(std::span<const PhysicalPulse> pulses) {
    Unitary2 u;
    for (const auto& p : pulses) u = noisy_pulse_unitary(p, 0.0) * u;
    return u;
}

CliffordGroup::CliffordGroup(std::vector<std::vector<PhysicalPulse>> decompositions) {
    if (decompositions.size() != kSize) {
        throw std::invalid_argument("Clifford table must have 24 entries, got " + std::to_string(decompositions.size()));
    }
    elements_.reserve(kSize);
    for (int i = 0; i < kSize; ++i) {
        auto& pulses = decompositions[static_cast<std::size_t>(i)];
        if (pulses.empty()) throw std::invalid_argument("Clifford " + std::to_string(i) + " has no pulses");
        Unitary2 net = ideal_pulse_product(pulses);
        for (const auto& e : elements_) {
            if (e.net.equal_up_to_phase(net)) {
                throw std::invalid_argument("Clifford " + std::to_string(i) + " duplicates element " +
                                            std::to_string(e.index));
            }
        }
        for (const SignedPauli& p : all_signed_paulis()) {
            try {
                conjugate_pauli(net, p);
            } catch (const NotCliffordError&) {
                throw std::invalid_argument("entry " + std::to_string(i) + " is not a Clifford");
            }
        }
        if (net.equal_up_to_phase(Unitary2::identity())) identity_ = i;
        elements_.push_back(CliffordElement{i, std::move(pulses), net});
    }
    for (int a = 0; a < kSize; ++a) {
        for (int b = 0; b < kSize; ++b) {
            const int c = find(elements_[a].net * elements_[b].net);
            if (c < 0) throw std::invalid_argument("Clifford table is not closed under multiplication");
            table_[a][b] = c;
            if (c == identity_) inverse_[a] = b;
        }
    }
}

CliffordGroup CliffordGroup::standard(int identity_idle) {
    return CliffordGroup(builtin_clifford_table(identity_idle));
}

int CliffordGroup::product(std::span<const int> seq) const {
    int acc = identity_;
    for (int g : seq) acc = table_[g][acc];
    return acc;
}

int CliffordGroup::inverse_of_product(std::span<const int> seq) const {
    return inverse_[product(seq)];
}

int CliffordGroup::find(const Unitary2& u) const {
    for (const auto& e : elements_) {
        if (e.net.equal_up_to_phase(u)) return e.index;
    }
    return -1;
}

int CliffordGroup::find(std::span<const PhysicalPulse> pulses) const {
    return find(ideal_pulse_product(pulses));
}

std::vector<PhysicalPulse> flatten_pulses(const CliffordGroup& group, std::span<const int> seq) {
    std::vector<PhysicalPulse> out;
    for (int g : seq) {
        const auto& ps = group[g].pulses;
        out.insert(out.end(), ps.begin(), ps.end());
    }
    return out;
}

std::size_t timed_pulse_count(const CliffordGroup& group, std::span<const int> seq) {
    std::size_t n = 0;
    for (int g : seq) n += static_cast<std::size_t>(group[g].timed_pulse_count());
    return n;
}

Unitary2 sequence_unitary(const CliffordGroup& group, std::span<const int> seq, std::span<const double> deltas) {
    const std::size_t needed = timed_pulse_count(group, seq);
    if (deltas.size() != needed) {
        throw std::invalid_argument("noise trajectory has " + std::to_string(deltas.size()) +
                                    " samples but the sequence has " + std::to_string(needed) + " timed pulses");
    }
    Mat2 acc = Mat2::Identity();
    std::size_t slot = 0;
    for (int g : seq) {
        for (const auto& p : group[g].pulses) {
            const double d = p.is_timed() ? deltas[slot++] : 0.0;
            acc = noisy_pulse_unitary(p, d).matrix() * acc;
        }
    }
    return Unitary2(acc);
}

}  // namespace qcvv
