#pragma once

// Small dense optimisers shared by the decay fit, the diamond-norm
// maximisations, gauge optimisation and GST refinement.

#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace qcvv {

struct NelderMeadOptions {
    double xtol = 1e-10;      // simplex diameter (absolute, per coordinate)
    double ftol = 1e-14;      // spread of objective values over the simplex
    int max_evaluations = 20000;
    std::optional<Eigen::VectorXd> lower;  // optional box bounds (vertices are clamped)
    std::optional<Eigen::VectorXd> upper;
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Minimises f starting from x0 with an axis-aligned initial simplex of the
/// given step sizes.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& step, const NelderMeadOptions& options = {});

/// Residual callback: fills r and, when J is non-null, the Jacobian dr/dx.
using ResidualFunction = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* J)>;

struct LevenbergMarquardtOptions {
    int max_iterations = 200;
    double cost_tolerance = 1e-14;      // relative cost decrease
    double step_tolerance = 1e-12;      // relative step size
    double gradient_tolerance = 1e-14;  // max |J^T r|
    double initial_lambda = 1e-3;
};

struct LevenbergMarquardtResult {
    Eigen::VectorXd x;
    double cost = 0.0;  // sum of squared residuals
    int iterations = 0;
    bool converged = false;
    std::string stop_reason;
};

LevenbergMarquardtResult levenberg_marquardt(const ResidualFunction& f, const Eigen::VectorXd& x0,
                                             const LevenbergMarquardtOptions& options = {});

/// Central-difference Jacobian of a residual function that does not supply one.
Eigen::MatrixXd numeric_jacobian(const ResidualFunction& f, const Eigen::VectorXd& x, double h = 1e-7);

}  // namespace qcvv
