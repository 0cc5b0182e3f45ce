#include <filesystem>

#include "criteria.hpp"
#include "qcvv/gst/estimation.hpp"
#include "qcvv/gst/gauge.hpp"
#include "qcvv/gst/pipeline.hpp"
#include "qcvv/harness.hpp"
#include "qcvv/io.hpp"
#include "qcvv/rb.hpp"

namespace acceptance {

using namespace qcvv;
namespace fs = std::filesystem;

namespace {

/// Runs `config` into two fresh directories and compares every output file.
std::pair<std::size_t, std::size_t> rerun_identical(nlohmann::json config, const std::string& tag) {
    std::vector<fs::path> dirs;
    std::vector<RunManifest> manifests;
    for (int k = 0; k < 2; ++k) {
        const fs::path dir = fs::temp_directory_path() / ("qcvv_acceptance_" + tag + std::to_string(k));
        fs::remove_all(dir);
        config["output_dir"] = dir.string();
        manifests.push_back(run(experiment_config_from_json(config)));
        dirs.push_back(dir);
    }
    std::size_t same = 0;
    for (const auto& o : manifests[0].outputs)
        if (read_text_file(dirs[0] / o.path) == read_text_file(dirs[1] / o.path)) ++same;
    return {same, manifests[0].outputs.size()};
}

Outcome determinism_and_gauge_invariance() {
    std::string detail;
    bool pass = true;

    const auto [rb_same, rb_total] = rerun_identical(
        {{"protocol", "rb-longwalk"},
         {"seed", 31},
         {"rb",
          {{"lengths", {25, 50, 100}},
           {"sequences_per_length", 20},
           {"realizations", 50},
           {"shots", 100},
           {"noise", {{"kind", "white"}, {"sigma", 0.02}}}}}},
        "rb");
    const auto [gst_same, gst_total] = rerun_identical(
        {{"protocol", "gst"}, {"seed", 32}, {"gst", {{"model", "detune"}, {"magnitudes", {0.02, 0.04}}, {"shots", 220}}}},
        "gst");
    pass = pass && rb_same == rb_total && gst_same == gst_total;
    detail += "byte-identical reruns: rb " + std::to_string(rb_same) + "/" + std::to_string(rb_total) + " files, gst " +
              std::to_string(gst_same) + "/" + std::to_string(gst_total) + " files";

    // Gauge invariance of every sequence probability.
    const gst::GSTDesign design = gst::standard_design();
    Rng rng(33);
    double worst = 0;
    for (const gst::ErrorModel& m :
         {gst::ErrorModel{gst::ErrorKind::Detuning, 0.0444}, gst::ErrorModel{gst::ErrorKind::Overrotation, 0.02}}) {
        const gst::GateSet g = gst::apply_error_model(design.labels, m);
        const gst::GSTDataset data = gst::simulate_dataset(g, design, gst::kExactShots, 1);
        const gst::GSTAnalysis a = gst::analyze_dataset(data, design, {});
        for (int trial = 0; trial < 3; ++trial) {
            PTM T = PTM::Identity();
            for (int i = 1; i < 4; ++i)
                for (int j = 0; j < 4; ++j) T(i, j) += 0.2 * rng.normal();
            const gst::GateSet h = gst::apply_gauge(g, T);
            const gst::GateSet e = gst::apply_gauge(a.estimate, T);
            for (const auto& s : design.sequences) {
                worst = std::max(worst, std::abs(g.probability(s.gates) - h.probability(s.gates)));
                worst = std::max(worst, std::abs(a.estimate.probability(s.gates) - e.probability(s.gates)));
            }
        }
    }
    pass = pass && worst < 1e-9;
    detail += "; max gauge change in sequence probabilities " + fmt(worst);
    return {pass, detail};
}

}  // namespace

std::vector<Criterion> determinism_criteria() {
    return {{10, "determinism and gauge invariance", 600, determinism_and_gauge_invariance}};
}

}  // namespace acceptance
