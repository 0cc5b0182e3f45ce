#include "qcvv/gst/gauge.hpp"

#include <cmath>
#include <stdexcept>

#include "qcvv/optimize.hpp"

namespace qcvv::gst {

namespace {

PTM tp_gauge(const Eigen::VectorXd& x) {
    PTM T = PTM::Identity();
    for (int i = 1; i < 4; ++i) {
        T(i, 0) = x[i - 1];
        for (int j = 1; j < 4; ++j) T(i, j) += x[3 + (i - 1) * 3 + (j - 1)];
    }
    return T;
}

void gauge_residuals(const GateSet& est, const GateSet& target, const PTM& T, double spam_weight, Eigen::VectorXd& r) {
    const PTM Tinv = T.inverse();
    const std::size_t ng = est.size();
    r.resize(static_cast<Eigen::Index>(16 * ng + 8));
    Eigen::Index k = 0;
    for (std::size_t g = 0; g < ng; ++g) {
        const PTM d = T * est.gates[g] * Tinv - target.gates[g];
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) r[k++] = d(i, j);
    }
    const double w = std::sqrt(spam_weight);
    const Vec4 dr = T * est.rho - target.rho;
    const Eigen::RowVector4d de = est.E.transpose() * Tinv - target.E.transpose();
    for (int i = 0; i < 4; ++i) r[k++] = w * dr[i];
    for (int i = 0; i < 4; ++i) r[k++] = w * de[i];
}

PTM optimise_stage(const GateSet& est, const GateSet& target, double spam_weight, int n,
                   const std::function<PTM(const Eigen::VectorXd&)>& make) {
    ResidualFunction f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
        gauge_residuals(est, target, make(x), spam_weight, r);
        if (J) {
            ResidualFunction plain = [&](const Eigen::VectorXd& y, Eigen::VectorXd& ry, Eigen::MatrixXd*) {
                gauge_residuals(est, target, make(y), spam_weight, ry);
            };
            *J = numeric_jacobian(plain, x, 1e-7);
        }
    };
    LevenbergMarquardtOptions o;
    o.max_iterations = 500;
    o.cost_tolerance = 1e-15;
    o.step_tolerance = 1e-14;
    o.gradient_tolerance = 1e-18;
    const auto res = levenberg_marquardt(f, Eigen::VectorXd::Zero(n), o);
    return make(res.x);
}

}  // namespace

std::string_view gauge_mode_name(GaugeMode m) {
    switch (m) {
        case GaugeMode::None: return "none";
        case GaugeMode::Unitary: return "unitary";
        case GaugeMode::TPThenUnitary: return "tp-then-unitary";
    }
    return "?";
}

GaugeMode parse_gauge_mode(std::string_view s) {
    if (s == "none") return GaugeMode::None;
    if (s == "unitary") return GaugeMode::Unitary;
    if (s == "tp-then-unitary") return GaugeMode::TPThenUnitary;
    throw std::invalid_argument("unknown gauge mode '" + std::string(s) + "' (expected none, unitary or tp-then-unitary)");
}

double gauge_objective(const GateSet& est, const GateSet& target, const PTM& T, double spam_weight) {
    Eigen::VectorXd r;
    gauge_residuals(est, target, T, spam_weight, r);
    return r.squaredNorm();
}

PTM rotation_gauge(const Vec3& w) {
    const double angle = w.norm();
    if (angle == 0.0) return PTM::Identity();
    return unitary_to_ptm(Unitary2::rotation(w / angle, angle));
}

GaugeResult gauge_optimize(const GateSet& est, const GateSet& target, const GaugeOptions& options) {
    if (est.labels != target.labels) throw std::invalid_argument("estimate and target must share gate labels");
    GaugeResult out;
    out.gate_set = est;
    out.objective_before = gauge_objective(est, target, PTM::Identity(), options.spam_weight);
    out.objective_after = out.objective_before;
    if (options.mode == GaugeMode::None) return out;

    PTM T = PTM::Identity();
    if (options.mode == GaugeMode::TPThenUnitary) {
        T = optimise_stage(est, target, options.spam_weight, 12, tp_gauge);
    }
    const GateSet stage1 = apply_gauge(est, T);
    const PTM R = optimise_stage(stage1, target, options.spam_weight, 3,
                                 [](const Eigen::VectorXd& x) { return rotation_gauge(Vec3(x[0], x[1], x[2])); });
    T = R * T;

    const double after = gauge_objective(est, target, T, options.spam_weight);
    if (!T.allFinite() || !std::isfinite(after) || after > out.objective_before * (1 + 1e-12) + 1e-15) {
        out.diverged = true;
        return out;
    }
    out.transform = T;
    out.gate_set = apply_gauge(est, T);
    out.objective_after = after;
    return out;
}

}  // namespace qcvv::gst
