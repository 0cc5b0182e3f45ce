#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcvv/gst/design.hpp"
#include "qcvv/gst/gateset.hpp"
#include "qcvv/random.hpp"

namespace qcvv::gst {

/// Shot count meaning "exact probabilities".
inline constexpr std::uint64_t kExactShots = 0;

struct GSTDataset {
    std::string design_version;
    std::uint64_t shots = kExactShots;
    std::vector<double> frequencies;          // estimate of p per sequence
    std::vector<std::uint64_t> counts;        // successes per sequence; empty for exact data

    /// Weight N used by the chi-squared objective (1 for exact data).
    double weight() const { return shots == kExactShots ? 1.0 : static_cast<double>(shots); }
};

/// Probabilities of every design sequence, clipped to [0, 1]; finite shots
/// draw binomial counts with a per-sequence stream derived from `seed`.
GSTDataset simulate_dataset(const GateSet& g, const GSTDesign& d, std::uint64_t shots, std::uint64_t seed);

/// Drift injection: the first half of each sequence's shots is taken with
/// gate set `first` and the second half with `second`.
GSTDataset simulate_drift_dataset(const GateSet& first, const GateSet& second, const GSTDesign& d, std::uint64_t shots,
                                  std::uint64_t seed);

nlohmann::json to_json(const GSTDataset& d, const GSTDesign& design);
GSTDataset dataset_from_json(const nlohmann::json& j, const GSTDesign& design);

/// Raised when the fiducial Gram matrix is too ill-conditioned to invert.
class IllConditionedGram : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct LGSTResult {
    GateSet estimate;
    double gram_condition = 0.0;  // s1 / s4 of the fiducial Gram matrix
};

/// Linear-inversion estimate, gauge-fixed towards `target` and brought to a
/// trace-preserving frame. Throws IllConditionedGram above 1e8.
LGSTResult lgst(const GSTDataset& data, const GSTDesign& design, const GateSet& target);

struct StageLog {
    int max_length = 0;
    std::size_t sequences = 0;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct FitLog {
    std::string objective_type = "chi2";
    double regularizer = 1e-4;
    std::vector<StageLog> stages;
    double objective = 0.0;
    std::size_t dof = 0;
    double model_violation = 0.0;  // (objective - dof) / sqrt(2 dof)
    bool converged = true;
};

struct MLEResult {
    GateSet estimate;
    FitLog log;
};

/// Minimises sum_s N (f_s - p_s)^2 / (p_s (1 - p_s) + xi) over TP gates and
/// SPAM, over sequence subsets of increasing max length.
MLEResult mle_refine(const GateSet& initial, const GSTDataset& data, const GSTDesign& design, double xi = 1e-4,
                     int max_iterations_per_stage = 100);

/// The chi-squared objective of a gate set on (a subset of) the dataset.
double chi2_objective(const GateSet& g, const GSTDataset& data, const GSTDesign& design, int max_length = 1 << 30,
                      double xi = 1e-4);

nlohmann::json to_json(const FitLog& log);

}  // namespace qcvv::gst
