#pragma once

// Randomized benchmarking under engineered detuning noise: survival
// simulation, noise-averaged datasets, decay fits and gamma-distribution
// statistics of the sequence-to-sequence spread.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcvv/noise.hpp"
#include "qcvv/qubit_algebra.hpp"
#include "qcvv/random.hpp"
#include "qcvv/rb_sequence.hpp"
#include "qcvv/stats.hpp"

namespace qcvv {

/// Shot count meaning "exact probabilities".
inline constexpr std::uint64_t kInfiniteShots = 0;

/// Survival probability |<0|U|0>|^2 of one sequence under one noise
/// trajectory. Finite shots return the binomial MLE successes/shots.
double simulate_survival(const CliffordGroup& group, const RBSequence& seq, std::span<const double> deltas,
                         std::uint64_t shots, Rng& rng);

struct RBConfig {
    std::vector<std::size_t> lengths;
    std::size_t sequences_per_length = 50;
    NoiseSpec noise;
    std::size_t realizations = 200;
    std::uint64_t shots = kInfiniteShots;
    std::uint64_t seed = 1;
    int identity_idle = 2;
    /// Draw a fresh noise list per sequence instead of one list per length.
    bool resample_noise_per_sequence = false;
    /// When set, sequences are preselected long walks at this multiplier.
    std::optional<double> long_walk_multiplier;
};

nlohmann::json to_json(const RBConfig& c);
RBConfig rb_config_from_json(const nlohmann::json& j);

struct RBSequenceResult {
    RBSequence sequence;
    std::vector<double> survival;          // F_{i,n}, one per realisation
    std::vector<std::uint64_t> successes;  // empty for infinite shots
    double mean_survival = 0.0;            // noise-averaged F_i
    double unit_walk_v2d_sq = 0.0;         // |V_2D|^2 of the unit-step sigma_z walk
    double concurrent_walk_v2d_sq = 0.0;   // |V_2D|^2 of the first-order concurrent walk

    double infidelity() const { return 1.0 - mean_survival; }
};

struct RBLengthResult {
    std::size_t J = 0;
    std::vector<RBSequenceResult> sequences;
    double mean_survival = 0.0;
    double variance_over_sequences = 0.0;  // of the noise-averaged values
    double pooled_variance = 0.0;          // over every (sequence, realisation)

    std::vector<double> infidelities() const;
};

struct RBDataset {
    RBConfig config;
    std::string estimator = "binomial-mle";
    std::string prng = kPrngAlgorithm;
    std::vector<RBLengthResult> lengths;
};

nlohmann::json to_json(const RBDataset& d);
RBDataset rb_dataset_from_json(const nlohmann::json& j);

/// Sequences of a run: deterministic in (config.seed, J, i), independent of
/// the noise settings, so dc and white runs sharing a seed see the same set.
std::vector<std::vector<RBSequence>> generate_rb_sequences(const CliffordGroup& group, const RBConfig& config);

RBDataset run_rb(const CliffordGroup& group, const RBConfig& config);
/// Runs the protocol on caller-supplied sequences (one list per config length).
RBDataset run_rb_on_sequences(const CliffordGroup& group, const RBConfig& config,
                              const std::vector<std::vector<RBSequence>>& sequences);

struct DecayPoint {
    double J = 0.0;
    double infidelity = 0.0;  // sequence-averaged
    double weight = 1.0;      // 1 / variance over sequences
};

/// Sequence-averaged infidelity per length with inverse-variance weights.
std::vector<DecayPoint> decay_points(const RBDataset& d);

struct DecayFit {
    double p_rb = 0.0;
    double kappa = 0.0;
    bool kappa_fixed = true;
    std::vector<double> residuals;  // data - model, per point
    double objective = 0.0;         // weighted sum of squared residuals
    bool converged = false;
    int evaluations = 0;
    std::string diagnostics;

    double model(double J) const;
};

/// Fits I(J) = 0.5 - (0.5 - kappa) exp(-p J) by bounded multi-start
/// Nelder-Mead on the weighted squared residuals. kappa is held at
/// `fixed_kappa` when given, otherwise fitted in [0, 0.5].
DecayFit fit_decay(std::span<const DecayPoint> points, std::optional<double> fixed_kappa = 0.0);

struct GammaParams {
    double alpha = 1.0;
    double beta = 0.0;
    double small_parameter = 0.0;  // J sigma^2
    bool regime_ok = true;         // J sigma^2 <= 0.1
};

/// Gamma(1, (2 J sigma^2 / 3)(1/2 + pi^2/96)).
GammaParams analytic_gamma_params(std::size_t J, double sigma);

/// Scale including the correlation between consecutive gates' first-order
/// error vectors under constant detuning, enumerated exactly over the group:
/// beta = (2 sigma^2 / 3) [J d + 2 (J - 1) c] with d the mean squared
/// per-gate error vector and c the mean overlap of adjacent ones.
GammaParams correlated_gamma_params(const CliffordGroup& group, std::size_t J, double sigma);

struct GammaFit {
    double alpha = 1.0;
    double beta = 0.0;
    Histogram histogram;
    GoodnessOfFit fit_quality;
};

/// Maximum-likelihood scale for fixed shape alpha (the sample mean over
/// alpha), with a chi-square test on the default histogram. Throws for
/// degenerate samples or values outside [0, 1].
GammaFit fit_gamma(std::span<const double> infidelities, double alpha = 1.0);

/// Chi-square test of samples against a fully specified gamma law on the
/// default histogram.
GoodnessOfFit gamma_test(std::span<const double> infidelities, double alpha, double beta);

struct MomentsPrediction {
    double mean = 0.0;
    double variance = 0.0;         // over sequences of noise-averaged infidelity
    double pooled_variance = 0.0;  // over (sequence, noise realisation) pairs
    double mean_stderr = 0.0;
    std::string method;            // "analytic-gamma" or "monte-carlo"
    std::size_t samples = 0;
};

/// First-principles E(I) and V(I). Quasi-DC uses the gamma moments; white
/// noise averages the exact Gaussian expectation over `samples` random
/// sequences of first-order concurrent walks.
MomentsPrediction moments_prediction(const CliffordGroup& group, std::size_t J, double sigma, NoiseKind kind,
                                     std::size_t samples = 10000, std::uint64_t seed = 7);

}  // namespace qcvv
