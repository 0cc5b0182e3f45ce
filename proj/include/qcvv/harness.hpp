#pragma once
// Experiment configuration, run orchestration, manifests and reports. Every
// run writes a manifest before starting and finalises it afterwards; tasks
// already recorded as complete are skipped when a run is resumed.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcvv/gst/estimation.hpp"
#include "qcvv/gst/gateset.hpp"
#include "qcvv/gst/gauge.hpp"
#include "qcvv/qubit_algebra.hpp"
#include "qcvv/rb.hpp"
#include "qcvv/walk.hpp"

namespace qcvv {

/// Config validation failure; what() lists every offending field.
class ConfigError : public std::invalid_argument {
  public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

  private:
    std::vector<std::string> problems_;
};

enum class Protocol { RB, RBLongWalk, WalkScan, GST };
std::string_view protocol_name(Protocol p);
Protocol parse_protocol(std::string_view s);

struct WalkScanConfig {
    std::size_t J = 100;
    std::size_t count = 1000;
    Axis axis = Axis::Z;
    double multiplier = 2.0;
    StepWeighting weighting = StepWeighting::Unit;
};

struct GSTConfig {
    std::string design = "standard";  // standard | extended
    gst::ErrorKind model = gst::ErrorKind::Detuning;
    std::vector<double> magnitudes;
    std::uint64_t shots = gst::kExactShots;
    gst::GaugeOptions gauge;
};

/// Thresholds evaluated by report().
struct AcceptanceThresholds {
    std::optional<double> gamma_p_min;            // gamma GOF p-value per J (rb)
    std::optional<double> long_walk_ratio_min;    // p_LW / p_rb (rb-longwalk)
    std::optional<double> long_walk_ratio_max;
    std::optional<double> gauge_suppression_min;  // dd_calc / dd_est for Gx, Gy (gst)
};

struct ExperimentConfig {
    Protocol protocol = Protocol::RB;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    RBConfig rb;  // rb and rb-longwalk
    std::optional<double> fit_kappa = 0.0;  // decay-fit SPAM parameter; empty = fitted
    WalkScanConfig walk_scan;
    GSTConfig gst;
    AcceptanceThresholds acceptance;
};

/// Missing rb seeds are filled from the master seed: rb.seed = seed and
/// rb.noise.seed = derive_seed(seed, {1}). Throws ConfigError.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// FNV-1a 64 of the canonical JSON of every semantic field (output_dir excluded).
std::string config_hash(const ExperimentConfig& c);

/// Version string of this build.
std::string code_version();

struct ManifestOutput {
    std::string path;  // relative to the output directory
    std::string kind;  // dataset | summary | plot-data | report
    std::string task;
};

struct RunManifest {
    std::string config_hash;
    std::string code_version;
    std::string prng;
    std::string protocol;
    std::string status = "running";  // running | complete | failed
    std::string started_at;
    std::string finished_at;
    std::string error;
    nlohmann::json config;
    std::vector<std::string> completed_tasks;
    std::vector<ManifestOutput> outputs;

    bool task_done(const std::string& task) const;
};

inline constexpr const char* kManifestFile = "manifest.json";

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);
RunManifest load_manifest(const std::filesystem::path& dir);

/// Executes the configured pipeline into c.output_dir. A manifest whose
/// config hash matches is resumed; a mismatching one is replaced.
RunManifest run(const ExperimentConfig& c);

/// Markdown summary of a completed run in `dir`. Throws std::runtime_error
/// for an empty or incomplete manifest and lists any missing artifacts.
std::string report(const std::filesystem::path& dir);

/// GST dataset file: the dataset together with the model that produced it.
nlohmann::json gst_dataset_file(const gst::GSTDataset& d, const gst::GSTDesign& design, const gst::ErrorModel& model,
                                std::uint64_t seed);

/// Walk-scan CSV rows (sequence, normV2Dsq, normVsq, is_long).
std::string walk_scan_csv(const CliffordGroup& group, const WalkScanConfig& c, std::uint64_t seed);

}  // namespace qcvv
