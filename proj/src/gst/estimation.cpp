#include "qcvv/gst/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qcvv/optimize.hpp"
#include "qcvv/parallel.hpp"

namespace qcvv::gst {

namespace {

constexpr int kGateParams = 12;

double clip01(double p) { return std::clamp(p, 0.0, 1.0); }

std::size_t param_count(const GateSet& g) { return g.size() * kGateParams + 3 + 4; }

Eigen::VectorXd pack(const GateSet& g) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(param_count(g)));
    Eigen::Index k = 0;
    for (const auto& G : g.gates)
        for (int i = 1; i < 4; ++i)
            for (int j = 0; j < 4; ++j) x[k++] = G(i, j);
    for (int i = 1; i < 4; ++i) x[k++] = g.rho[i];
    for (int i = 0; i < 4; ++i) x[k++] = g.E[i];
    return x;
}

GateSet unpack(const GateSet& proto, const Eigen::VectorXd& x) {
    GateSet g = proto;
    Eigen::Index k = 0;
    for (auto& G : g.gates) {
        G.row(0) << 1, 0, 0, 0;
        for (int i = 1; i < 4; ++i)
            for (int j = 0; j < 4; ++j) G(i, j) = x[k++];
    }
    g.rho[0] = 1.0 / std::sqrt(2.0);
    for (int i = 1; i < 4; ++i) g.rho[i] = x[k++];
    for (int i = 0; i < 4; ++i) g.E[i] = x[k++];
    return g;
}

// Probability of one sequence and, optionally, its gradient with respect to
// the packed parameters.
double probability_and_gradient(const GateSet& g, const GateString& s, Eigen::Ref<Eigen::RowVectorXd> grad,
                                bool want_grad, std::vector<Vec4>& forward) {
    const std::size_t n = s.size();
    forward.resize(n + 1);
    forward[0] = g.rho;
    for (std::size_t t = 0; t < n; ++t) forward[t + 1] = g.gates[static_cast<std::size_t>(s[t])] * forward[t];
    const double p = g.E.dot(forward[n]);
    if (!want_grad) return p;

    grad.setZero();
    const Eigen::Index spam = static_cast<Eigen::Index>(g.size() * kGateParams);
    // backward row vector l = E G_n ... G_{t+1}
    Eigen::RowVector4d l = g.E.transpose();
    for (std::size_t t = n; t-- > 0;) {
        const Vec4& r = forward[t];
        const Eigen::Index base = static_cast<Eigen::Index>(s[t]) * kGateParams;
        for (int i = 1; i < 4; ++i)
            for (int j = 0; j < 4; ++j) grad[base + (i - 1) * 4 + j] += l[i] * r[j];
        l = l * g.gates[static_cast<std::size_t>(s[t])];
    }
    for (int i = 1; i < 4; ++i) grad[spam + i - 1] = l[i];
    for (int i = 0; i < 4; ++i) grad[spam + 3 + i] = forward[n][i];
    return p;
}

std::vector<std::size_t> stage_indices(const GSTDesign& d, int max_length) {
    std::vector<std::size_t> idx;
    for (std::size_t s = 0; s < d.sequences.size(); ++s) {
        if (d.sequences[s].max_length <= max_length) idx.push_back(s);
    }
    return idx;
}

Eigen::MatrixXd frequency_block(const GSTDataset& data, const GSTDesign& d, const GateString& middle) {
    const int nf = static_cast<int>(d.fiducials.size());
    Eigen::MatrixXd P(nf, nf);
    for (int j = 0; j < nf; ++j) {
        for (int i = 0; i < nf; ++i) {
            GateString s = d.fiducials[static_cast<std::size_t>(i)];
            s.insert(s.end(), middle.begin(), middle.end());
            const auto& m = d.fiducials[static_cast<std::size_t>(j)];
            s.insert(s.end(), m.begin(), m.end());
            const auto pos = d.find(s);
            if (!pos) throw std::invalid_argument("dataset lacks linear-inversion sequence " + d.format(s));
            P(j, i) = data.frequencies[*pos];
        }
    }
    return P;
}

}  // namespace

GSTDataset simulate_dataset(const GateSet& g, const GSTDesign& d, std::uint64_t shots, std::uint64_t seed) {
    return simulate_drift_dataset(g, g, d, shots, seed);
}

GSTDataset simulate_drift_dataset(const GateSet& first, const GateSet& second, const GSTDesign& d, std::uint64_t shots,
                                  std::uint64_t seed) {
    GSTDataset out;
    out.design_version = d.version;
    out.shots = shots;
    const std::size_t n = d.sequences.size();
    out.frequencies.resize(n);
    if (shots != kExactShots) out.counts.resize(n);
    parallel_for(n, [&](std::size_t s) {
        const GateString& gs = d.sequences[s].gates;
        const double p1 = clip01(first.probability(gs));
        const double p2 = clip01(second.probability(gs));
        if (shots == kExactShots) {
            out.frequencies[s] = 0.5 * (p1 + p2);
            return;
        }
        Rng rng(derive_seed(seed, {s}));
        const std::uint64_t half = shots / 2;
        const std::uint64_t k = rng.binomial(half, p1) + rng.binomial(shots - half, p2);
        out.counts[s] = k;
        out.frequencies[s] = static_cast<double>(k) / static_cast<double>(shots);
    });
    return out;
}

nlohmann::json to_json(const GSTDataset& data, const GSTDesign& design) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t s = 0; s < design.sequences.size(); ++s) {
        nlohmann::json r = {{"sequence", design.format(design.sequences[s].gates)}, {"frequency", data.frequencies[s]}};
        if (!data.counts.empty()) {
            r["counts"] = {{"0", data.counts[s]}, {"1", data.shots - data.counts[s]}};
        }
        rows.push_back(std::move(r));
    }
    return {{"design_version", data.design_version}, {"shots", data.shots}, {"data", rows}};
}

GSTDataset dataset_from_json(const nlohmann::json& j, const GSTDesign& design) {
    GSTDataset d;
    d.design_version = j.at("design_version").get<std::string>();
    if (d.design_version != design.version) {
        throw std::invalid_argument("dataset was taken with design " + d.design_version + ", not " + design.version);
    }
    d.shots = j.at("shots").get<std::uint64_t>();
    const auto& rows = j.at("data");
    if (rows.size() != design.sequences.size()) throw std::invalid_argument("dataset and design sizes differ");
    for (std::size_t s = 0; s < rows.size(); ++s) {
        if (rows[s].at("sequence").get<std::string>() != design.format(design.sequences[s].gates)) {
            throw std::invalid_argument("dataset row " + std::to_string(s) + " does not match the design order");
        }
        d.frequencies.push_back(rows[s].at("frequency").get<double>());
        if (rows[s].contains("counts")) d.counts.push_back(rows[s].at("counts").at("0").get<std::uint64_t>());
    }
    return d;
}

LGSTResult lgst(const GSTDataset& data, const GSTDesign& design, const GateSet& target) {
    const Eigen::MatrixXd gram = frequency_block(data, design, {});
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();
    LGSTResult result;
    result.gram_condition = sv[3] > 0 ? sv[0] / sv[3] : std::numeric_limits<double>::infinity();
    if (!(result.gram_condition <= 1e8)) {
        std::ostringstream os;
        os << "fiducial Gram matrix is ill-conditioned (s1/s4 = " << result.gram_condition << ")";
        throw IllConditionedGram(os.str());
    }
    const Eigen::MatrixXd A = svd.matrixU().leftCols(4) * sv.head(4).asDiagonal();  // nf x 4
    const Eigen::MatrixXd B = svd.matrixV().leftCols(4).transpose();                // 4 x nf
    const Eigen::MatrixXd Ap = A.completeOrthogonalDecomposition().pseudoInverse();
    const Eigen::MatrixXd Bp = B.completeOrthogonalDecomposition().pseudoInverse();

    const std::size_t empty_fid = [&] {
        for (std::size_t f = 0; f < design.fiducials.size(); ++f)
            if (design.fiducials[f].empty()) return f;
        throw std::invalid_argument("linear inversion needs the empty fiducial");
    }();

    // Gauge: bring the measurement frame onto the target's.
    const int nf = static_cast<int>(design.fiducials.size());
    Eigen::MatrixXd At(nf, 4);
    for (int j = 0; j < nf; ++j) At.row(j) = target.E.transpose() * target.product(design.fiducials[static_cast<std::size_t>(j)]);
    const Eigen::Matrix4d M = Ap * At;
    const Eigen::Matrix4d Minv = M.inverse();

    GateSet est = target;
    for (std::size_t k = 0; k < target.size(); ++k) {
        const Eigen::MatrixXd Pk = frequency_block(data, design, {static_cast<int>(k)});
        est.gates[k] = Minv * (Ap * Pk * Bp) * M;
    }
    est.rho = Minv * (Ap * gram.col(static_cast<Eigen::Index>(empty_fid)));
    est.E = ((gram.row(static_cast<Eigen::Index>(empty_fid)) * Bp) * M).transpose();

    // Trace-preserving frame: find u with u G = u for all gates and u rho = 1.
    const int ng = static_cast<int>(est.size());
    Eigen::MatrixXd C(4 * ng + 1, 4);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(4 * ng + 1);
    for (int k = 0; k < ng; ++k) C.middleRows(4 * k, 4) = (est.gates[static_cast<std::size_t>(k)] - PTM::Identity()).transpose();
    C.row(4 * ng) = est.rho.transpose();
    rhs[4 * ng] = 1.0;
    const Eigen::Vector4d u = C.colPivHouseholderQr().solve(rhs);
    PTM Sinv = PTM::Identity();
    Sinv.row(0) = u.transpose() / std::sqrt(2.0);
    est = apply_gauge(est, Sinv);
    for (auto& G : est.gates) G.row(0) << 1, 0, 0, 0;
    est.rho[0] = 1.0 / std::sqrt(2.0);
    result.estimate = est;
    return result;
}

double chi2_objective(const GateSet& g, const GSTDataset& data, const GSTDesign& design, int max_length, double xi) {
    double total = 0.0;
    const double N = data.weight();
    for (std::size_t s : stage_indices(design, max_length)) {
        const double p = g.probability(design.sequences[s].gates);
        const double pc = clip01(p);
        const double r = data.frequencies[s] - p;
        total += N * r * r / (pc * (1 - pc) + xi);
    }
    return total;
}

MLEResult mle_refine(const GateSet& initial, const GSTDataset& data, const GSTDesign& design, double xi,
                     int max_iterations_per_stage) {
    MLEResult result;
    result.log.regularizer = xi;
    Eigen::VectorXd x = pack(initial);
    const double sqrtN = std::sqrt(data.weight());

    for (int L : design.max_lengths) {
        const std::vector<std::size_t> idx = stage_indices(design, L);
        const Eigen::Index m = static_cast<Eigen::Index>(idx.size());
        const Eigen::Index np = x.size();
        ResidualFunction f = [&](const Eigen::VectorXd& params, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
            const GateSet g = unpack(initial, params);
            r.resize(m);
            if (J) J->resize(m, np);
            parallel_for(idx.size(), [&](std::size_t row) {
                thread_local std::vector<Vec4> forward;
                thread_local Eigen::RowVectorXd grad;
                grad.resize(np);
                const std::size_t s = idx[row];
                const double p = probability_and_gradient(g, design.sequences[s].gates, grad, J != nullptr, forward);
                const double pc = clip01(p);
                const double w = pc * (1 - pc) + xi;
                const double diff = data.frequencies[s] - p;
                const Eigen::Index i = static_cast<Eigen::Index>(row);
                r[i] = sqrtN * diff / std::sqrt(w);
                if (J) {
                    const double dw = (p > 0.0 && p < 1.0) ? 1.0 - 2.0 * p : 0.0;
                    const double dr = -sqrtN * (1.0 / std::sqrt(w) + 0.5 * diff * dw / (w * std::sqrt(w)));
                    J->row(i) = dr * grad;
                }
            });
        };
        LevenbergMarquardtOptions options;
        options.max_iterations = max_iterations_per_stage;
        options.cost_tolerance = 1e-12;
        const LevenbergMarquardtResult lm = levenberg_marquardt(f, x, options);
        x = lm.x;
        StageLog stage;
        stage.max_length = L;
        stage.sequences = idx.size();
        stage.objective = lm.cost;
        stage.iterations = lm.iterations;
        stage.converged = lm.converged;
        result.log.stages.push_back(stage);
        result.log.converged = result.log.converged && lm.converged;
    }
    result.estimate = unpack(initial, x);
    result.log.objective = chi2_objective(result.estimate, data, design, 1 << 30, xi);
    const std::size_t np = param_count(initial);
    // gauge directions of the TP gate set are not constrained by data
    const std::size_t gauge = 12;
    const std::size_t free_params = np > gauge ? np - gauge : 0;
    result.log.dof = design.sequences.size() > free_params ? design.sequences.size() - free_params : 1;
    const double dof = static_cast<double>(result.log.dof);
    result.log.model_violation = (result.log.objective - dof) / std::sqrt(2.0 * dof);
    return result;
}

nlohmann::json to_json(const FitLog& log) {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : log.stages) {
        stages.push_back({{"max_length", s.max_length},
                          {"sequences", s.sequences},
                          {"objective", s.objective},
                          {"iterations", s.iterations},
                          {"converged", s.converged}});
    }
    return {{"objective_type", log.objective_type}, {"regularizer", log.regularizer},
            {"objective", log.objective},           {"dof", log.dof},
            {"model_violation", log.model_violation}, {"converged", log.converged},
            {"stages", stages}};
}

}  // namespace qcvv::gst
