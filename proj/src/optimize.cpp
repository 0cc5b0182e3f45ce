#include "qcvv/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace qcvv {

namespace {

Eigen::VectorXd clamp_to(const Eigen::VectorXd& x, const NelderMeadOptions& o) {
    Eigen::VectorXd y = x;
    if (o.lower) y = y.cwiseMax(*o.lower);
    if (o.upper) y = y.cwiseMin(*o.upper);
    return y;
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& step, const NelderMeadOptions& options) {
    const auto n = x0.size();
    std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(n + 1), clamp_to(x0, options));
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd v = x0;
        v[i] += step[i];
        v = clamp_to(v, options);
        if (v[i] == x0[i]) v[i] = x0[i] - step[i];  // stepped into a bound
        simplex[static_cast<std::size_t>(i + 1)] = clamp_to(v, options);
    }
    std::vector<double> values(simplex.size());
    int evals = 0;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++evals;
        const double v = f(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };
    for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = eval(simplex[i]);

    std::vector<std::size_t> order(simplex.size());
    NelderMeadResult result;
    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];

        double diameter = 0.0;
        for (const auto& v : simplex) diameter = std::max(diameter, (v - simplex[best]).cwiseAbs().maxCoeff());
        const double spread = values[worst] - values[best];
        if ((diameter <= options.xtol && spread <= options.ftol) || diameter == 0.0) {
            result.converged = true;
            break;
        }
        if (evals >= options.max_evaluations) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t i : order) {
            if (i != worst) centroid += simplex[i];
        }
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd reflected = clamp_to(centroid + (centroid - simplex[worst]), options);
        const double fr = eval(reflected);
        if (fr < values[best]) {
            const Eigen::VectorXd expanded = clamp_to(centroid + 2.0 * (centroid - simplex[worst]), options);
            const double fe = eval(expanded);
            if (fe < fr) {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
            continue;
        }
        if (fr < values[second]) {
            simplex[worst] = reflected;
            values[worst] = fr;
            continue;
        }
        const bool outside = fr < values[worst];
        const Eigen::VectorXd contracted =
            outside ? clamp_to(centroid + 0.5 * (reflected - centroid), options)
                    : clamp_to(centroid + 0.5 * (simplex[worst] - centroid), options);
        const double fc = eval(contracted);
        if (fc < (outside ? fr : values[worst])) {
            simplex[worst] = contracted;
            values[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (i == best) continue;
            simplex[i] = clamp_to(simplex[best] + 0.5 * (simplex[i] - simplex[best]), options);
            values[i] = eval(simplex[i]);
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    result.x = simplex[best];
    result.value = values[best];
    result.evaluations = evals;
    return result;
}

Eigen::MatrixXd numeric_jacobian(const ResidualFunction& f, const Eigen::VectorXd& x, double h) {
    Eigen::VectorXd r0;
    f(x, r0, nullptr);
    Eigen::MatrixXd J(r0.size(), x.size());
    Eigen::VectorXd xp = x, rp, rm;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double step = h * std::max(1.0, std::abs(x[j]));
        xp[j] = x[j] + step;
        f(xp, rp, nullptr);
        xp[j] = x[j] - step;
        f(xp, rm, nullptr);
        xp[j] = x[j];
        J.col(j) = (rp - rm) / (2.0 * step);
    }
    return J;
}

LevenbergMarquardtResult levenberg_marquardt(const ResidualFunction& f, const Eigen::VectorXd& x0,
                                             const LevenbergMarquardtOptions& options) {
    LevenbergMarquardtResult out;
    Eigen::VectorXd x = x0, r, r_trial;
    Eigen::MatrixXd J;
    f(x, r, &J);
    double cost = r.squaredNorm();
    double lambda = options.initial_lambda;

    for (int it = 0; it < options.max_iterations; ++it) {
        out.iterations = it + 1;
        const Eigen::VectorXd g = J.transpose() * r;
        if (g.cwiseAbs().maxCoeff() <= options.gradient_tolerance) {
            out.converged = true;
            out.stop_reason = "gradient";
            break;
        }
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd diag = JtJ.diagonal().cwiseMax(1e-12 * std::max(1.0, JtJ.diagonal().maxCoeff()));

        bool accepted = false;
        for (int attempt = 0; attempt < 30; ++attempt) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal() += lambda * diag;
            const Eigen::VectorXd dx = A.ldlt().solve(-g);
            if (!dx.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            const Eigen::VectorXd x_trial = x + dx;
            f(x_trial, r_trial, nullptr);
            const double trial_cost = r_trial.squaredNorm();
            if (std::isfinite(trial_cost) && trial_cost <= cost) {
                const double decrease = cost - trial_cost;
                const double step = dx.norm() / std::max(1e-300, x.norm() + options.step_tolerance);
                x = x_trial;
                f(x, r, &J);
                const double old_cost = cost;
                cost = r.squaredNorm();
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                if (decrease <= options.cost_tolerance * std::max(old_cost, 1e-300) || cost == 0.0) {
                    out.converged = true;
                    out.stop_reason = "cost";
                } else if (step <= options.step_tolerance) {
                    out.converged = true;
                    out.stop_reason = "step";
                }
                break;
            }
            lambda *= 4.0;
        }
        if (!accepted) {
            out.converged = true;
            out.stop_reason = "no-descent";
            break;
        }
        if (out.converged) break;
    }
    if (!out.converged) out.stop_reason = "iteration-cap";
    out.x = x;
    out.cost = cost;
    return out;
}

}  // namespace qcvv
