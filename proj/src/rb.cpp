#include "qcvv/rb.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qcvv/diagnostics.hpp"
#include "qcvv/optimize.hpp"
#include "qcvv/parallel.hpp"
#include "qcvv/walk.hpp"

namespace qcvv {

namespace {

constexpr std::uint64_t kSequenceStream = 1;
constexpr std::uint64_t kShotStream = 2;
constexpr std::uint64_t kLongWalkStream = 3;

const std::vector<std::string> kConfigKeys = {"lengths",  "sequences_per_length", "noise",
                                              "realizations", "shots",  "seed",
                                              "identity_idle", "resample_noise_per_sequence", "long_walk_multiplier"};

}  // namespace

double simulate_survival(const CliffordGroup& group, const RBSequence& seq, std::span<const double> deltas,
                         std::uint64_t shots, Rng& rng) {
    const Unitary2 u = sequence_unitary(group, seq.gates, deltas);
    const double p = std::clamp(std::norm(u.matrix()(0, 0)), 0.0, 1.0);
    if (shots == kInfiniteShots) return p;
    return static_cast<double>(rng.binomial(shots, p)) / static_cast<double>(shots);
}

nlohmann::json to_json(const RBConfig& c) {
    nlohmann::json j = {{"lengths", c.lengths},
                        {"sequences_per_length", c.sequences_per_length},
                        {"noise", to_json(c.noise)},
                        {"realizations", c.realizations},
                        {"shots", c.shots},
                        {"seed", c.seed},
                        {"identity_idle", c.identity_idle},
                        {"resample_noise_per_sequence", c.resample_noise_per_sequence}};
    j["long_walk_multiplier"] = c.long_walk_multiplier ? nlohmann::json(*c.long_walk_multiplier) : nlohmann::json();
    j["noise"].erase("prng");
    return j;
}

RBConfig rb_config_from_json(const nlohmann::json& j) {
    std::vector<std::string> problems;
    for (const auto& [key, value] : j.items()) {
        if (std::find(kConfigKeys.begin(), kConfigKeys.end(), key) == kConfigKeys.end()) {
            problems.push_back("unknown field '" + key + "'");
        }
    }
    RBConfig c;
    auto read = [&](const char* key, auto& target) {
        if (!j.contains(key)) return;
        try {
            j.at(key).get_to(target);
        } catch (const std::exception& e) {
            problems.push_back(std::string("field '") + key + "': " + e.what());
        }
    };
    read("lengths", c.lengths);
    read("sequences_per_length", c.sequences_per_length);
    read("realizations", c.realizations);
    read("shots", c.shots);
    read("seed", c.seed);
    read("identity_idle", c.identity_idle);
    read("resample_noise_per_sequence", c.resample_noise_per_sequence);
    if (j.contains("long_walk_multiplier") && !j.at("long_walk_multiplier").is_null()) {
        double m = 0.0;
        read("long_walk_multiplier", m);
        c.long_walk_multiplier = m;
    }
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        for (const auto& [key, value] : n.items()) {
            if (key != "kind" && key != "sigma" && key != "seed" && key != "prng") {
                problems.push_back("unknown field 'noise." + key + "'");
            }
        }
        try {
            c.noise = noise_spec_from_json(n);
        } catch (const std::exception& e) {
            problems.push_back(std::string("field 'noise': ") + e.what());
        }
    } else {
        problems.push_back("missing field 'noise'");
    }
    if (c.lengths.empty()) problems.push_back("field 'lengths' must list at least one J");
    for (std::size_t J : c.lengths) {
        if (J < 2) problems.push_back("field 'lengths': J must be >= 2");
    }
    if (c.sequences_per_length == 0) problems.push_back("field 'sequences_per_length' must be positive");
    if (c.realizations == 0) problems.push_back("field 'realizations' must be positive");
    if (c.noise.sigma < 0) problems.push_back("field 'noise.sigma' must be non-negative");
    if (c.identity_idle != 1 && c.identity_idle != 2) problems.push_back("field 'identity_idle' must be 1 or 2");
    if (c.long_walk_multiplier && *c.long_walk_multiplier < 0) {
        problems.push_back("field 'long_walk_multiplier' must be non-negative");
    }
    if (!problems.empty()) {
        std::ostringstream os;
        os << "invalid RB config:";
        for (const auto& p : problems) os << "\n  - " << p;
        throw std::invalid_argument(os.str());
    }
    return c;
}

std::vector<double> RBLengthResult::infidelities() const {
    std::vector<double> out;
    out.reserve(sequences.size());
    for (const auto& s : sequences) out.push_back(s.infidelity());
    return out;
}

nlohmann::json to_json(const RBDataset& d) {
    nlohmann::json lengths = nlohmann::json::array();
    for (const auto& L : d.lengths) {
        nlohmann::json seqs = nlohmann::json::array();
        for (const auto& s : L.sequences) {
            nlohmann::json js = {{"gates", s.sequence.gates},
                                 {"seed", s.sequence.seed},
                                 {"survival", s.survival},
                                 {"mean_survival", s.mean_survival},
                                 {"unit_walk_v2d_sq", s.unit_walk_v2d_sq},
                                 {"concurrent_walk_v2d_sq", s.concurrent_walk_v2d_sq}};
            if (!s.successes.empty()) js["successes"] = s.successes;
            seqs.push_back(std::move(js));
        }
        lengths.push_back({{"J", L.J},
                           {"mean_survival", L.mean_survival},
                           {"variance_over_sequences", L.variance_over_sequences},
                           {"pooled_variance", L.pooled_variance},
                           {"sequences", seqs}});
    }
    return {{"config", to_json(d.config)},
            {"estimator", d.estimator},
            {"prng", d.prng},
            {"clifford_table", "clifford-table-v1"},
            {"lengths", lengths}};
}

RBDataset rb_dataset_from_json(const nlohmann::json& j) {
    RBDataset d;
    d.config = rb_config_from_json(j.at("config"));
    d.estimator = j.at("estimator").get<std::string>();
    d.prng = j.at("prng").get<std::string>();
    for (const auto& jl : j.at("lengths")) {
        RBLengthResult L;
        L.J = jl.at("J").get<std::size_t>();
        L.mean_survival = jl.at("mean_survival").get<double>();
        L.variance_over_sequences = jl.at("variance_over_sequences").get<double>();
        L.pooled_variance = jl.at("pooled_variance").get<double>();
        for (const auto& js : jl.at("sequences")) {
            RBSequenceResult s;
            s.sequence.gates = js.at("gates").get<std::vector<int>>();
            s.sequence.seed = js.at("seed").get<std::uint64_t>();
            s.survival = js.at("survival").get<std::vector<double>>();
            if (js.contains("successes")) s.successes = js.at("successes").get<std::vector<std::uint64_t>>();
            s.mean_survival = js.at("mean_survival").get<double>();
            s.unit_walk_v2d_sq = js.at("unit_walk_v2d_sq").get<double>();
            s.concurrent_walk_v2d_sq = js.at("concurrent_walk_v2d_sq").get<double>();
            L.sequences.push_back(std::move(s));
        }
        d.lengths.push_back(std::move(L));
    }
    return d;
}

std::vector<std::vector<RBSequence>> generate_rb_sequences(const CliffordGroup& group, const RBConfig& config) {
    std::vector<std::vector<RBSequence>> out;
    for (std::size_t J : config.lengths) {
        std::vector<RBSequence> set;
        if (config.long_walk_multiplier) {
            const std::uint64_t seed = derive_seed(config.seed, {kLongWalkStream, J});
            Rng rng(seed);
            set = preselect_long_walk_sequences(group, J, config.sequences_per_length, *config.long_walk_multiplier, rng);
            for (auto& s : set) s.seed = seed;
        } else {
            for (std::size_t i = 0; i < config.sequences_per_length; ++i) {
                const std::uint64_t seed = derive_seed(config.seed, {kSequenceStream, J, i});
                Rng rng(seed);
                RBSequence s = generate_rb_sequence(group, J, rng);
                s.seed = seed;
                set.push_back(std::move(s));
            }
        }
        out.push_back(std::move(set));
    }
    return out;
}

RBDataset run_rb(const CliffordGroup& group, const RBConfig& config) {
    return run_rb_on_sequences(group, config, generate_rb_sequences(group, config));
}

RBDataset run_rb_on_sequences(const CliffordGroup& group, const RBConfig& config,
                              const std::vector<std::vector<RBSequence>>& sequences) {
    if (sequences.size() != config.lengths.size()) {
        throw std::invalid_argument("one sequence list per configured length is required");
    }
    RBDataset data;
    data.config = config;
    for (std::size_t li = 0; li < config.lengths.size(); ++li) {
        const std::size_t J = config.lengths[li];
        const auto& set = sequences[li];
        std::size_t max_slots = 1;
        for (const auto& s : set) max_slots = std::max(max_slots, timed_pulse_count(group, s.gates));

        NoiseSpec shared_spec = config.noise;
        shared_spec.seed = derive_seed(config.noise.seed, {J});
        NoiseEnsemble shared;
        if (!config.resample_noise_per_sequence) shared = sample_ensemble(shared_spec, config.realizations, max_slots);

        RBLengthResult result;
        result.J = J;
        result.sequences.resize(set.size());
        parallel_for(set.size(), [&](std::size_t i) {
            const RBSequence& seq = set[i];
            NoiseEnsemble own;
            if (config.resample_noise_per_sequence) {
                NoiseSpec spec = config.noise;
                spec.seed = derive_seed(config.noise.seed, {J, i});
                own = sample_ensemble(spec, config.realizations, max_slots);
            }
            const NoiseEnsemble& ensemble = config.resample_noise_per_sequence ? own : shared;
            const std::size_t slots = timed_pulse_count(group, seq.gates);

            RBSequenceResult& out = result.sequences[i];
            out.sequence = seq;
            out.survival.resize(config.realizations);
            for (std::size_t n = 0; n < config.realizations; ++n) {
                Rng rng(derive_seed(config.seed, {kShotStream, J, i, n}));
                const std::span<const double> deltas = ensemble.realizations[n].first(slots);
                out.survival[n] = simulate_survival(group, seq, deltas, config.shots, rng);
                if (config.shots != kInfiniteShots) {
                    out.successes.push_back(
                        static_cast<std::uint64_t>(std::llround(out.survival[n] * static_cast<double>(config.shots))));
                }
            }
            out.mean_survival = mean(out.survival);
            out.unit_walk_v2d_sq =
                compute_walk(group, seq.gates, SignedPauli::plus(Axis::Z), StepWeighting::Unit).norm_v2d_sq;
            out.concurrent_walk_v2d_sq =
                compute_walk(group, seq.gates, SignedPauli::plus(Axis::Z), StepWeighting::Concurrent).norm_v2d_sq;
        });

        std::vector<double> means, pooled;
        for (const auto& s : result.sequences) {
            means.push_back(s.mean_survival);
            pooled.insert(pooled.end(), s.survival.begin(), s.survival.end());
        }
        result.mean_survival = mean(means);
        result.variance_over_sequences = sample_variance(means);
        result.pooled_variance = sample_variance(pooled);
        data.lengths.push_back(std::move(result));
    }
    return data;
}

std::vector<DecayPoint> decay_points(const RBDataset& d) {
    std::vector<DecayPoint> points;
    for (const auto& L : d.lengths) {
        points.push_back({static_cast<double>(L.J), 1.0 - L.mean_survival,
                          1.0 / std::max(L.variance_over_sequences, 1e-12)});
    }
    return points;
}

double DecayFit::model(double J) const {
    return 0.5 - (0.5 - kappa) * std::exp(-p_rb * J);
}

DecayFit fit_decay(std::span<const DecayPoint> points, std::optional<double> fixed_kappa) {
    std::vector<double> distinct;
    for (const auto& p : points) {
        if (std::find(distinct.begin(), distinct.end(), p.J) == distinct.end()) distinct.push_back(p.J);
    }
    if (distinct.size() < 3) throw std::invalid_argument("fit_decay needs at least 3 distinct sequence lengths");
    for (const auto& p : points) {
        if (!(p.weight >= 0.0) || !std::isfinite(p.weight)) throw std::invalid_argument("decay weights must be finite and >= 0");
    }

    const bool free_kappa = !fixed_kappa.has_value();
    auto unpack = [&](const Eigen::VectorXd& x, double& p, double& k) {
        p = x[0];
        k = free_kappa ? x[1] : *fixed_kappa;
    };
    auto objective = [&](const Eigen::VectorXd& x) {
        double p, k;
        unpack(x, p, k);
        double s = 0.0;
        for (const auto& pt : points) {
            const double r = pt.infidelity - (0.5 - (0.5 - k) * std::exp(-p * pt.J));
            s += pt.weight * r * r;
        }
        return s;
    };

    // Starting rates from the log-linear form of the model at each point.
    double p_guess = 0.0;
    int used = 0;
    const double k0 = fixed_kappa.value_or(0.0);
    for (const auto& pt : points) {
        const double ratio = (0.5 - pt.infidelity) / (0.5 - k0);
        if (ratio > 0.0 && ratio < 1.0) {
            p_guess += -std::log(ratio) / pt.J;
            ++used;
        }
    }
    p_guess = used ? p_guess / used : 1e-4;
    p_guess = std::max(p_guess, 1e-8);

    const int dims = free_kappa ? 2 : 1;
    NelderMeadOptions options;
    options.xtol = 1e-10 * std::max(1.0, p_guess);
    options.ftol = 0.0;
    options.max_evaluations = 20000;
    options.lower = Eigen::VectorXd::Zero(dims);
    Eigen::VectorXd upper(dims);
    upper[0] = 10.0;
    if (free_kappa) upper[1] = 0.5;
    options.upper = upper;

    DecayFit best;
    double best_value = std::numeric_limits<double>::infinity();
    for (double scale : {1.0, 0.5, 2.0}) {
        Eigen::VectorXd x0(dims), step(dims);
        x0[0] = p_guess * scale;
        step[0] = 0.25 * p_guess * scale;
        if (free_kappa) {
            x0[1] = 0.01;
            step[1] = 0.005;
        }
        NelderMeadResult r = nelder_mead(objective, x0, step, options);
        // polish from the best vertex
        r = nelder_mead(objective, r.x, step * 1e-3, options);
        if (r.value < best_value) {
            best_value = r.value;
            unpack(r.x, best.p_rb, best.kappa);
            best.converged = r.converged;
            best.evaluations = r.evaluations;
        }
    }
    best.kappa_fixed = !free_kappa;
    best.objective = best_value;
    for (const auto& pt : points) best.residuals.push_back(pt.infidelity - best.model(pt.J));
    if (!best.converged) best.diagnostics = "Nelder-Mead reached its evaluation cap before the tolerance";
    return best;
}

GammaParams analytic_gamma_params(std::size_t J, double sigma) {
    GammaParams g;
    g.small_parameter = static_cast<double>(J) * sigma * sigma;
    g.beta = (2.0 * g.small_parameter / 3.0) * (0.5 + kPi * kPi / 96.0);
    g.regime_ok = g.small_parameter <= 0.1;
    if (!g.regime_ok) {
        warn_once("analytic_gamma_params.regime", "J*sigma^2 > 0.1: first-order gamma parameters lose accuracy");
    }
    return g;
}

GammaParams correlated_gamma_params(const CliffordGroup& group, std::size_t J, double sigma) {
    double d = 0.0, c = 0.0;
    for (int g = 0; g < CliffordGroup::kSize; ++g) {
        const std::vector<int> one = {g};
        const Vec3 s = compute_walk(group, one, SignedPauli::plus(Axis::Z), StepWeighting::Concurrent).v;
        d += s.squaredNorm();
        for (int h = 0; h < CliffordGroup::kSize; ++h) {
            const std::vector<int> two = {g, h};
            const Vec3 v = compute_walk(group, two, SignedPauli::plus(Axis::Z), StepWeighting::Concurrent).v;
            c += s.dot(v - s);
        }
    }
    d /= CliffordGroup::kSize;
    c /= CliffordGroup::kSize * CliffordGroup::kSize;
    GammaParams p = analytic_gamma_params(J, sigma);
    const double n = static_cast<double>(J);
    p.beta = (2.0 * sigma * sigma / 3.0) * (n * d + 2.0 * (n - 1.0) * c);
    return p;
}

GoodnessOfFit gamma_test(std::span<const double> infidelities, double alpha, double beta) {
    return gamma_goodness_of_fit(default_histogram(infidelities), alpha, beta, 0);
}

GammaFit fit_gamma(std::span<const double> infidelities, double alpha) {
    if (infidelities.size() < 2) throw std::invalid_argument("fit_gamma needs at least two samples");
    const auto [lo, hi] = std::minmax_element(infidelities.begin(), infidelities.end());
    if (*lo < 0.0 || *hi > 1.0) throw std::invalid_argument("infidelities must lie in [0, 1]");
    if (*lo == *hi) throw std::invalid_argument("degenerate sample: all infidelities are equal");
    if (infidelities.size() < 30) warn_once("fit_gamma.small", "fit_gamma with fewer than 30 samples");
    GammaFit fit;
    fit.alpha = alpha;
    fit.beta = mean(infidelities) / alpha;
    fit.histogram = default_histogram(infidelities);
    fit.fit_quality = gamma_goodness_of_fit(fit.histogram, alpha, fit.beta, 1);
    return fit;
}

MomentsPrediction moments_prediction(const CliffordGroup& group, std::size_t J, double sigma, NoiseKind kind,
                                     std::size_t samples, std::uint64_t seed) {
    MomentsPrediction out;
    if (sigma == 0.0) {
        out.method = kind == NoiseKind::QuasiDc ? "analytic-gamma" : "monte-carlo";
        return out;
    }
    if (kind == NoiseKind::QuasiDc) {
        const GammaParams g = analytic_gamma_params(J, sigma);
        out.mean = g.beta;
        out.variance = g.beta * g.beta;
        // delta^2 |V|^2 with delta ~ N(0, sigma^2) and |V|^2 exponential.
        out.pooled_variance = 5.0 * g.beta * g.beta;
        out.method = "analytic-gamma";
        return out;
    }
    if (samples < 2) throw std::invalid_argument("moments_prediction needs at least two Monte Carlo samples");
    Rng rng(seed);
    std::vector<double> means(samples), variances(samples);
    const double s2 = sigma * sigma;
    for (std::size_t k = 0; k < samples; ++k) {
        const RBSequence seq = generate_rb_sequence(group, J, rng);
        const WalkRecord w = compute_walk(group, seq.gates, SignedPauli::plus(Axis::Z), StepWeighting::Concurrent);
        const Eigen::Matrix2d cov = s2 * white_noise_covariance(w);
        means[k] = cov.trace();
        variances[k] = 2.0 * (cov * cov).trace();  // Var |R|^2 for Gaussian R
    }
    out.mean = mean(means);
    out.variance = sample_variance(means);
    out.pooled_variance = mean(variances) + out.variance;
    out.mean_stderr = std::sqrt(out.variance / static_cast<double>(samples));
    out.method = "monte-carlo";
    out.samples = samples;
    return out;
}

}  // namespace qcvv
