#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qcvv/gst/pipeline.hpp"
#include "qcvv/harness.hpp"
#include "qcvv/io.hpp"

using nlohmann::json;
using namespace qcvv;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void add_common(CLI::App* app, Common& c, const char* out_help) {
    app->add_option("--config", c.config, "experiment config JSON")->check(CLI::ExistingFile);
    app->add_option("--seed", c.seed, "master seed");
    app->add_option("--out", c.out, out_help);
}

/// Loads --config (checking its protocol) or builds one from flags, then
/// applies --seed and --out.
ExperimentConfig resolve(const Common& common, Protocol protocol, const json& from_flags) {
    json j;
    if (!common.config.empty()) {
        j = read_json_file(common.config);
        if (!j.contains("protocol") || j["protocol"] != protocol_name(protocol))
            throw ConfigError({"config protocol must be '" + std::string(protocol_name(protocol)) + "' for this command"});
    } else {
        j = from_flags;
        j["protocol"] = protocol_name(protocol);
    }
    if (common.seed) {
        j["seed"] = *common.seed;
        if (j.contains("rb")) {
            j["rb"].erase("seed");
            if (j["rb"].contains("noise")) j["rb"]["noise"].erase("seed");
        }
    }
    if (!common.out.empty()) j["output_dir"] = common.out;
    return experiment_config_from_json(j);
}

int execute(const ExperimentConfig& c) {
    const RunManifest m = run(c);
    std::cout << "run complete: " << c.output_dir << " (" << m.outputs.size() << " outputs, config " << m.config_hash
              << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Correlated-noise RB and GST simulator"};
    app.require_subcommand(1);

    // rb-run / rb-longwalk
    Common rb_common;
    std::vector<std::size_t> rb_lengths = {25, 50, 100, 200};
    std::size_t rb_count = 50, rb_realizations = 200;
    std::string rb_noise = "dc";
    double rb_sigma = 0.02, rb_multiplier = 2.0;
    std::uint64_t rb_shots = 0;
    std::string rb_kappa = "0";
    auto add_rb_flags = [&](CLI::App* sub) {
        add_common(sub, rb_common, "output directory");
        sub->add_option("--J", rb_lengths, "sequence lengths")->delimiter(',');
        sub->add_option("--count", rb_count, "sequences per length");
        sub->add_option("--noise", rb_noise, "noise kind")->check(CLI::IsMember({"dc", "quasi-dc", "white"}));
        sub->add_option("--sigma", rb_sigma, "noise standard deviation (delta units)");
        sub->add_option("--realizations", rb_realizations, "noise realizations per sequence");
        sub->add_option("--shots", rb_shots, "shots per (sequence, realization); 0 = exact");
        sub->add_option("--kappa", rb_kappa, "decay-fit SPAM parameter, or 'free'");
    };
    auto rb_flags_json = [&](bool long_walk) {
        json rb = {{"lengths", rb_lengths},
                   {"sequences_per_length", rb_count},
                   {"noise", {{"kind", rb_noise}, {"sigma", rb_sigma}}},
                   {"realizations", rb_realizations},
                   {"shots", rb_shots}};
        if (long_walk) rb["long_walk_multiplier"] = rb_multiplier;
        json kappa = rb_kappa == "free" ? json("free") : json(std::stod(rb_kappa));
        return json{{"rb", rb}, {"fit", {{"kappa", kappa}}}};
    };
    auto* rb_run = app.add_subcommand("rb-run", "randomized benchmarking run");
    add_rb_flags(rb_run);
    auto* rb_lw = app.add_subcommand("rb-longwalk", "unbiased vs preselected long-walk RB");
    add_rb_flags(rb_lw);
    rb_lw->add_option("--multiplier", rb_multiplier, "long-walk multiplier m");

    // walk-scan
    Common ws_common;
    std::size_t ws_J = 100, ws_count = 1000;
    std::string ws_axis = "z", ws_weighting = "unit";
    double ws_multiplier = 2.0;
    auto* ws = app.add_subcommand("walk-scan", "walk statistics of random RB sequences (CSV)");
    add_common(ws, ws_common, "output directory (CSV to stdout when absent)");
    ws->add_option("--J", ws_J, "sequence length");
    ws->add_option("--count", ws_count, "number of sequences");
    ws->add_option("--axis", ws_axis, "error axis")->check(CLI::IsMember({"x", "y", "z"}));
    ws->add_option("--multiplier", ws_multiplier, "long-walk multiplier m");
    ws->add_option("--weighting", ws_weighting, "step weighting")->check(CLI::IsMember({"unit", "duration", "concurrent"}));

    // gst-build
    std::string gb_design = "standard", gb_out;
    auto* gb = app.add_subcommand("gst-build", "write a GST experiment design");
    gb->add_option("--design", gb_design, "design")->check(CLI::IsMember({"standard", "extended"}));
    gb->add_option("--out", gb_out, "output JSON file (stdout when absent)");

    // gst-run
    Common gr_common;
    std::string gr_model = "detune", gr_design = "standard", gr_gauge = "tp-then-unitary";
    std::vector<double> gr_magnitudes;
    std::vector<double> gr_detunings;
    std::uint64_t gr_shots = 0;
    double gr_spam_weight = 1.0;
    auto* gr = app.add_subcommand("gst-run", "simulate and analyse GST datasets");
    add_common(gr, gr_common, "output directory");
    gr->add_option("--model", gr_model, "error model")->check(CLI::IsMember({"none", "overrot", "detune"}));
    auto* mag_opt = gr->add_option("--magnitude", gr_magnitudes, "error magnitude(s)")->delimiter(',');
    gr->add_option("--detuning-hz", gr_detunings, "detuning(s) in Hz")->delimiter(',')->excludes(mag_opt);
    gr->add_option("--shots", gr_shots, "shots per sequence; 0 = exact");
    gr->add_option("--design", gr_design, "design")->check(CLI::IsMember({"standard", "extended"}));
    gr->add_option("--gauge", gr_gauge, "gauge mode")->check(CLI::IsMember({"none", "unitary", "tp-then-unitary"}));
    gr->add_option("--spam-weight", gr_spam_weight, "SPAM weight in the gauge objective");

    // gst-analyze
    std::string ga_dataset, ga_gauge = "tp-then-unitary", ga_out;
    double ga_spam_weight = 1.0;
    auto* ga = app.add_subcommand("gst-analyze", "re-analyse a GST dataset file");
    ga->add_option("--dataset", ga_dataset, "dataset file written by gst-run")->required()->check(CLI::ExistingFile);
    ga->add_option("--gauge", ga_gauge, "gauge mode")->check(CLI::IsMember({"none", "unitary", "tp-then-unitary"}));
    ga->add_option("--spam-weight", ga_spam_weight, "SPAM weight in the gauge objective");
    ga->add_option("--out", ga_out, "report JSON file");

    // report
    std::string rp_dir;
    auto* rp = app.add_subcommand("report", "summarise a completed run");
    rp->add_option("--out,dir", rp_dir, "run output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (rb_run->parsed()) return execute(resolve(rb_common, Protocol::RB, rb_flags_json(false)));
        if (rb_lw->parsed()) return execute(resolve(rb_common, Protocol::RBLongWalk, rb_flags_json(true)));
        if (ws->parsed()) {
            const json flags = {{"walk_scan",
                                 {{"J", ws_J},
                                  {"count", ws_count},
                                  {"axis", ws_axis},
                                  {"multiplier", ws_multiplier},
                                  {"weighting", ws_weighting}}}};
            const ExperimentConfig c = resolve(ws_common, Protocol::WalkScan, flags);
            if (ws_common.out.empty() && ws_common.config.empty()) {
                std::cout << walk_scan_csv(CliffordGroup::standard(), c.walk_scan, c.seed);
                return 0;
            }
            return execute(c);
        }
        if (gb->parsed()) {
            const gst::GSTDesign d = gb_design == "standard" ? gst::standard_design() : gst::extended_design();
            if (gb_out.empty()) {
                std::cout << dump_json(gst::to_json(d));
            } else {
                write_json_file(gb_out, gst::to_json(d));
                std::cerr << d.version << ": " << d.sequences.size() << " sequences -> " << gb_out << "\n";
            }
            return 0;
        }
        if (gr->parsed()) {
            json g = {{"design", gr_design},
                      {"model", gr_model},
                      {"shots", gr_shots},
                      {"gauge", gr_gauge},
                      {"spam_weight", gr_spam_weight}};
            if (!gr_detunings.empty())
                g["detunings_hz"] = gr_detunings;
            else
                g["magnitudes"] = gr_magnitudes;
            return execute(resolve(gr_common, Protocol::GST, {{"gst", g}}));
        }
        if (ga->parsed()) {
            const json file = read_json_file(ga_dataset);
            const json& jd = file.at("dataset");
            const gst::GSTDesign design = gst::design_for_version(jd.at("design_version").get<std::string>());
            const gst::GSTDataset data = gst::dataset_from_json(jd, design);
            const gst::ErrorModel model{gst::parse_error_kind(file.at("model").at("kind").get<std::string>()),
                                        file.at("model").at("magnitude").get<double>()};
            const gst::GaugeOptions gauge{gst::parse_gauge_mode(ga_gauge), ga_spam_weight};
            gst::GSTReport r;
            r.design_version = design.version;
            r.model = model;
            r.shots = data.shots;
            r.seed = file.value("seed", std::uint64_t{0});
            r.gauge = gauge;
            r.analysis = gst::analyze_dataset(data, design, gauge);
            r.gates = gst::calculated_distances(gst::apply_error_model(design.labels, model), gauge);
            gst::add_estimated_distances(r.gates, r.analysis.estimate);
            if (!ga_out.empty()) write_json_file(ga_out, gst::to_json(r));
            std::cout << gst::gst_csv_header() << gst::gst_csv_rows(r);
            return 0;
        }
        if (rp->parsed()) {
            std::cout << report(rp_dir);
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitRuntime;
}
