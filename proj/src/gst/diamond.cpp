#include "qcvv/gst/diamond.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "qcvv/optimize.hpp"
#include "qcvv/random.hpp"

namespace qcvv::gst {

namespace {

using C4 = Eigen::Matrix4cd;

const std::array<Mat2, 4>& paulis() {
    static const std::array<Mat2, 4> p = {Mat2::Identity(), pauli_matrix(Axis::X), pauli_matrix(Axis::Y),
                                          pauli_matrix(Axis::Z)};
    return p;
}

C4 kron(const Mat2& a, const Mat2& b) {
    C4 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

double trace_norm(const C4& m) {
    const C4 h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<C4> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

Mat2 sqrt_psd(const Mat2& m) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(m);
    const Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

Mat2 bloch_state(const Eigen::VectorXd& x) {
    Vec3 r(x[0], x[1], x[2]);
    if (r.norm() > 1.0) r /= r.norm();
    const auto& p = paulis();
    return 0.5 * (p[0] + r.x() * p[1] + r.y() * p[2] + r.z() * p[3]);
}

// Image of |a><b| under the channel with transfer matrix R.
Mat2 apply_channel(const PTM& R, const Mat2& X) {
    const auto& p = paulis();
    Mat2 out = Mat2::Zero();
    for (int i = 0; i < 4; ++i) {
        Complex c = 0.0;
        for (int j = 0; j < 4; ++j) c += R(i, j) * (p[j] * X).trace();
        out += 0.5 * c * p[i];
    }
    return out;
}

double input_state_maximum(const Choi& J) {
    auto value = [&](const Eigen::VectorXd& x) {
        const C4 s = kron(sqrt_psd(bloch_state(x)), Mat2::Identity());
        return -trace_norm(s * J * s);
    };
    NelderMeadOptions o;
    o.xtol = 1e-9;
    o.ftol = 1e-15;
    double best = 0.0;
    const std::array<Vec3, 7> starts = {Vec3(0, 0, 0),    Vec3(0.5, 0, 0),  Vec3(-0.5, 0, 0), Vec3(0, 0.5, 0),
                                        Vec3(0, -0.5, 0), Vec3(0, 0, 0.5), Vec3(0, 0, -0.5)};
    for (const auto& s : starts) {
        const auto r = nelder_mead(value, Eigen::VectorXd(s), Eigen::VectorXd::Constant(3, 0.3), o);
        best = std::max(best, -r.value);
    }
    return best;
}

double pure_state_maximum(const PTM& D) {
    // Channel images of the matrix units |a><b|.
    std::array<std::array<Mat2, 2>, 2> images;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            Mat2 e = Mat2::Zero();
            e(a, b) = 1.0;
            images[a][b] = apply_channel(D, e);
        }
    auto value = [&](const Eigen::VectorXd& x) {
        Eigen::Vector4cd psi;
        for (int k = 0; k < 4; ++k) psi[k] = Complex(x[2 * k], x[2 * k + 1]);
        const double n = psi.norm();
        if (n < 1e-12) return 0.0;
        psi /= n;
        // psi = sum c_{a,b} |a>_sys |b>_anc, index a*2 + b
        C4 out = C4::Zero();
        for (int a = 0; a < 2; ++a)
            for (int a2 = 0; a2 < 2; ++a2) {
                Mat2 anc;
                for (int b = 0; b < 2; ++b)
                    for (int b2 = 0; b2 < 2; ++b2) anc(b, b2) = psi[a * 2 + b] * std::conj(psi[a2 * 2 + b2]);
                out += kron(images[a][a2], anc);
            }
        return -trace_norm(out);
    };
    Rng rng(0x6469616d);
    NelderMeadOptions o;
    o.xtol = 1e-9;
    o.ftol = 1e-15;
    double best = 0.0;
    for (int start = 0; start < 8; ++start) {
        Eigen::VectorXd x0(8);
        for (int k = 0; k < 8; ++k) x0[k] = rng.normal();
        if (start == 0) x0 << 1, 0, 0, 0, 0, 0, 1, 0;  // maximally entangled
        auto r = nelder_mead(value, x0, Eigen::VectorXd::Constant(8, 0.3), o);
        r = nelder_mead(value, r.x, Eigen::VectorXd::Constant(8, 0.02), o);
        best = std::max(best, -r.value);
    }
    return best;
}

void require_cptp(const PTM& R, const char* which) {
    if ((R.row(0) - Eigen::RowVector4d(1, 0, 0, 0)).cwiseAbs().maxCoeff() > 1e-8) {
        throw std::invalid_argument(std::string(which) + " is not trace preserving");
    }
    if (min_choi_eigenvalue(R) < -1e-8) {
        throw std::invalid_argument(std::string(which) + " is not completely positive (negative Choi eigenvalue)");
    }
}

}  // namespace

Choi choi_from_ptm(const PTM& R) {
    const auto& p = paulis();
    Choi J = Choi::Zero();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (R(i, j) != 0.0) J += 0.5 * R(i, j) * kron(p[j].transpose(), p[i]);
        }
    return J;
}

PTM ptm_from_choi(const Choi& J) {
    const auto& p = paulis();
    PTM R;
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) R(k, l) = 0.5 * (J * kron(p[l].transpose(), p[k])).trace().real();
    return R;
}

double min_choi_eigenvalue(const PTM& R) {
    Eigen::SelfAdjointEigenSolver<Choi> es(choi_from_ptm(R), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

CPTPProjection project_to_cptp(const PTM& R) {
    const Choi J = choi_from_ptm(R);
    Eigen::SelfAdjointEigenSolver<Choi> es(0.5 * (J + J.adjoint()));
    Eigen::Vector4d ev = es.eigenvalues();
    CPTPProjection out;
    for (int i = 0; i < 4; ++i) {
        if (ev[i] < 0) {
            out.clipped += -ev[i];
            ev[i] = 0.0;
        }
    }
    if (out.clipped == 0.0) {
        out.ptm = R;
        return out;
    }
    const Choi Jp = es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    Mat2 X = Mat2::Zero();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int o = 0; o < 2; ++o) X(a, b) += Jp(2 * a + o, 2 * b + o);
    Eigen::SelfAdjointEigenSolver<Mat2> xs(X);
    const Eigen::Vector2d inv_sqrt = xs.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    const Mat2 Xis = xs.eigenvectors() * inv_sqrt.cast<Complex>().asDiagonal() * xs.eigenvectors().adjoint();
    const C4 S = kron(Xis, Mat2::Identity());
    out.ptm = ptm_from_choi(S * Jp * S);
    return out;
}

DiamondResult diamond_distance(const PTM& A, const PTM& B) {
    require_cptp(A, "first channel");
    require_cptp(B, "second channel");
    const PTM D = A - B;
    DiamondResult out;
    if (D.cwiseAbs().maxCoeff() == 0.0) return out;
    out.value = kDiamondConvention * input_state_maximum(choi_from_ptm(D));
    out.cross_check = kDiamondConvention * pure_state_maximum(D);
    out.flagged = std::abs(out.value - out.cross_check) > 1e-4;
    return out;
}

double unitary_diamond_distance(const Unitary2& U, const Unitary2& V) {
    Eigen::ComplexEigenSolver<Mat2> es(U.matrix().adjoint() * V.matrix());
    const auto ev = es.eigenvalues();
    const double arc = std::abs(std::arg(ev[0] / ev[1]));
    if (arc >= kPi) return 1.0;
    return std::sin(arc / 2.0);
}

}  // namespace qcvv::gst
