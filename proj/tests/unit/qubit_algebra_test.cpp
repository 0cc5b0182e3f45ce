#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "qcvv/clifford_table.hpp"
#include "qcvv/qubit_algebra.hpp"
#include "qcvv/random.hpp"

using namespace qcvv;

namespace {

Mat2 expm_oracle(const Mat2& generator) {
    return (Complex(0, -1) * generator).exp();
}

}  // namespace

TEST(Unitary2, RotationMatchesMatrixExponential) {
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
        Vec3 n = Vec3::Zero();
        n[static_cast<int>(a)] = 1.0;
        const Mat2 expected = expm_oracle(0.35 * pauli_matrix(a));
        EXPECT_LT((Unitary2::rotation(n, 0.7).matrix() - expected).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(Unitary2, CheckedRejectsNonUnitary) {
    Mat2 m = Mat2::Identity();
    m(0, 0) = 1.1;
    EXPECT_THROW(Unitary2::checked(m), std::invalid_argument);
    EXPECT_NO_THROW(Unitary2::checked(pauli_matrix(Axis::Y)));
}

TEST(Unitary2, PhaseInsensitiveEquality) {
    const Unitary2 u = Unitary2::rotation(Vec3(1, 2, 3), 1.1);
    const Unitary2 v(std::polar(1.0, 0.4) * u.matrix());
    EXPECT_TRUE(u.equal_up_to_phase(v));
    EXPECT_FALSE(u.equal_up_to_phase(Unitary2::identity()));
}

TEST(PhysicalPulse, ValidatesInvariants) {
    EXPECT_THROW(PhysicalPulse::make(PulseAxis::X, 1, 2), std::invalid_argument);
    EXPECT_THROW(PhysicalPulse::make(PulseAxis::Idle, 1, 1), std::invalid_argument);
    EXPECT_THROW(PhysicalPulse::make(PulseAxis::FrameZ, 1, 1), std::invalid_argument);
    EXPECT_THROW(PhysicalPulse::drive(PulseAxis::Y, 3), std::invalid_argument);
    EXPECT_THROW(PhysicalPulse::idle(0), std::invalid_argument);
    EXPECT_EQ(PhysicalPulse::drive(PulseAxis::X, -2).duration(), 2);
    EXPECT_FALSE(PhysicalPulse::frame_z(1).is_timed());
}

TEST(NoisyPulse, MatchesMatrixExponentialOracle) {
    const double delta = 0.013;
    for (auto p : {PhysicalPulse::drive(PulseAxis::X, 1), PhysicalPulse::drive(PulseAxis::Y, -2),
                   PhysicalPulse::idle(2)}) {
        Mat2 h = (p.duration() * kPi / 4.0 * delta) * pauli_matrix(Axis::Z);
        if (p.axis() == PulseAxis::X) h += (p.angle() / 2.0) * pauli_matrix(Axis::X);
        if (p.axis() == PulseAxis::Y) h += (p.angle() / 2.0) * pauli_matrix(Axis::Y);
        EXPECT_LT((noisy_pulse_unitary(p, delta).matrix() - expm_oracle(h)).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(NoisyPulse, FrameUpdateIgnoresDetuning) {
    const auto p = PhysicalPulse::frame_z(1);
    EXPECT_TRUE(noisy_pulse_unitary(p, 0.2).equal_up_to_phase(noisy_pulse_unitary(p, 0.0)));
}

TEST(ConjugatePauli, AgreesWithBruteForce) {
    Rng rng(3);
    const CliffordGroup g = CliffordGroup::standard();
    for (const auto& e : g.elements()) {
        for (const SignedPauli& p : all_signed_paulis()) {
            const SignedPauli r = conjugate_pauli(e.net, p);
            const Mat2 brute = e.net.matrix().adjoint() * p.matrix() * e.net.matrix();
            EXPECT_LT((brute - r.matrix()).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
    EXPECT_THROW(conjugate_pauli(Unitary2::rotation(Vec3::UnitX(), 0.3), SignedPauli::plus(Axis::Z)),
                 NotCliffordError);
}

TEST(PTM, UnitaryRepresentationIsOrthogonalAndMultiplicative) {
    const Unitary2 a = Unitary2::rotation(Vec3(1, 0.2, -0.4), 0.9);
    const Unitary2 b = Unitary2::rotation(Vec3(0, 1, 1), -1.7);
    const PTM ra = unitary_to_ptm(a), rb = unitary_to_ptm(b);
    EXPECT_LT((ra * ra.transpose() - PTM::Identity()).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT((unitary_to_ptm(a * b) - ra * rb).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_NEAR(ra(0, 0), 1.0, 1e-14);
}

TEST(CliffordGroup, StandardTableIsAGroup) {
    const CliffordGroup g = CliffordGroup::standard();
    ASSERT_EQ(g.size(), 24u);
    EXPECT_EQ(g.identity(), 0);
    for (int a = 0; a < 24; ++a) {
        EXPECT_EQ(g.compose(a, g.inverse(a)), g.identity());
        EXPECT_EQ(g.compose(g.inverse(a), a), g.identity());
        for (int b = 0; b < 24; ++b) {
            const Unitary2 expected = g[a].net * g[b].net;
            EXPECT_TRUE(g[g.compose(a, b)].net.equal_up_to_phase(expected));
        }
    }
}

TEST(CliffordGroup, PulseComposition) {
    const CliffordGroup g = CliffordGroup::standard();
    int pi_pulses = 0, half_pulses = 0, frames = 0, idles = 0;
    double mean_sq_duration = 0.0;
    for (const auto& e : g.elements()) {
        const auto& first = e.pulses.front();
        if (first.axis() == PulseAxis::Idle) ++idles;
        else if (first.axis() == PulseAxis::FrameZ) ++frames;
        else if (std::abs(first.quarter_turns()) == 2) ++pi_pulses;
        else ++half_pulses;
        mean_sq_duration += e.duration();
    }
    EXPECT_EQ(pi_pulses, 4);
    EXPECT_EQ(half_pulses, 16);
    EXPECT_EQ(frames, 3);
    EXPECT_EQ(idles, 1);
}

TEST(CliffordGroup, ProductAndInverse) {
    const CliffordGroup g = CliffordGroup::standard();
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<int> seq;
        for (int k = 0; k < 10; ++k) seq.push_back(static_cast<int>(rng.uniform_index(24)));
        Unitary2 u;
        for (int s : seq) u = g[s].net * u;
        EXPECT_TRUE(g[g.product(seq)].net.equal_up_to_phase(u));
        seq.push_back(g.inverse_of_product(seq));
        EXPECT_EQ(g.product(seq), g.identity());
        const std::vector<double> zeros(timed_pulse_count(g, seq), 0.0);
        EXPECT_TRUE(sequence_unitary(g, seq, zeros).equal_up_to_phase(Unitary2::identity()));
    }
}

TEST(CliffordGroup, RejectsBadTables) {
    auto table = builtin_clifford_table();
    table.pop_back();
    EXPECT_THROW(CliffordGroup{table}, std::invalid_argument);
    table = builtin_clifford_table();
    table[5] = table[4];
    EXPECT_THROW(CliffordGroup{table}, std::invalid_argument);
}

TEST(CliffordGroup, FindByPulses) {
    const CliffordGroup g = CliffordGroup::standard();
    for (const auto& e : g.elements()) EXPECT_EQ(g.find(e.pulses), e.index);
}

TEST(CliffordTable, JsonRoundTrip) {
    const CliffordGroup g = CliffordGroup::standard(1);
    const auto j = clifford_table_to_json(g);
    EXPECT_EQ(j.at("version"), kCliffordTableVersion);
    const CliffordGroup h = clifford_group_from_json(j);
    for (int i = 0; i < 24; ++i) EXPECT_EQ(g[i].pulses, h[i].pulses);
    EXPECT_EQ(h[0].duration(), 1);
}

TEST(SequenceUnitary, RejectsLengthMismatch) {
    const CliffordGroup g = CliffordGroup::standard();
    const std::vector<int> seq = {4, 6};
    const std::vector<double> deltas(1, 0.0);
    EXPECT_THROW(sequence_unitary(g, seq, deltas), std::invalid_argument);
}
