#include "qcvv/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <mutex>
#include <sstream>

#include "qcvv/gst/pipeline.hpp"
#include "qcvv/io.hpp"
#include "qcvv/parallel.hpp"
#include "qcvv/random.hpp"

#ifndef QCVV_VERSION
#define QCVV_VERSION "0.0.0"
#endif

namespace qcvv {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
    std::ostringstream os;
    os << "invalid experiment config:";
    for (const auto& p : problems) os << "\n  - " << p;
    return os.str();
}

std::string_view weighting_name(StepWeighting w) {
    switch (w) {
        case StepWeighting::Unit: return "unit";
        case StepWeighting::Duration: return "duration";
        case StepWeighting::Concurrent: return "concurrent";
    }
    return "unit";
}

StepWeighting parse_weighting(std::string_view s) {
    if (s == "unit") return StepWeighting::Unit;
    if (s == "duration") return StepWeighting::Duration;
    if (s == "concurrent") return StepWeighting::Concurrent;
    throw std::invalid_argument("unknown step weighting '" + std::string(s) + "'");
}

std::string design_version_for(const std::string& name) {
    if (name == "standard") return gst::kStandardDesignVersion;
    if (name == "extended") return gst::kExtendedDesignVersion;
    throw std::invalid_argument("unknown design '" + name + "'");
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(); }

// Each block reader appends to `problems` instead of throwing so that every
// offending field is reported at once.
class BlockReader {
  public:
    BlockReader(const json& j, std::string prefix, std::vector<std::string>& problems)
        : j_(j), prefix_(std::move(prefix)), problems_(problems) {
        if (!j_.is_object()) problems_.push_back("field '" + prefix_ + "' must be an object");
    }

    template <typename T>
    void read(const char* key, T& target) {
        seen_.push_back(key);
        if (!j_.is_object() || !j_.contains(key)) return;
        try {
            j_.at(key).get_to(target);
        } catch (const std::exception& e) {
            problems_.push_back("field '" + name(key) + "': " + e.what());
        }
    }

    template <typename F>
    void read_with(const char* key, F&& parse) {
        seen_.push_back(key);
        if (!j_.is_object() || !j_.contains(key)) return;
        try {
            parse(j_.at(key));
        } catch (const std::exception& e) {
            problems_.push_back("field '" + name(key) + "': " + e.what());
        }
    }

    void reject_unknown() {
        if (!j_.is_object()) return;
        for (const auto& [key, value] : j_.items())
            if (std::find(seen_.begin(), seen_.end(), key) == seen_.end())
                problems_.push_back("unknown field '" + name(key.c_str()) + "'");
    }

    std::string name(const char* key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

  private:
    const json& j_;
    std::string prefix_;
    std::vector<std::string>& problems_;
    std::vector<std::string> seen_;
};

json optional_json(const std::optional<double>& x) { return x ? json(*x) : json(); }

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::invalid_argument(join_problems(problems)), problems_(std::move(problems)) {}

std::string_view protocol_name(Protocol p) {
    switch (p) {
        case Protocol::RB: return "rb";
        case Protocol::RBLongWalk: return "rb-longwalk";
        case Protocol::WalkScan: return "walk-scan";
        case Protocol::GST: return "gst";
    }
    return "rb";
}

Protocol parse_protocol(std::string_view s) {
    for (Protocol p : {Protocol::RB, Protocol::RBLongWalk, Protocol::WalkScan, Protocol::GST})
        if (protocol_name(p) == s) return p;
    throw std::invalid_argument("unknown protocol '" + std::string(s) + "'");
}

// ---------------------------------------------------------------- config

ExperimentConfig experiment_config_from_json(const json& j) {
    std::vector<std::string> problems;
    ExperimentConfig c;
    if (!j.is_object()) throw ConfigError({"config must be a JSON object"});

    BlockReader top(j, "", problems);
    bool have_protocol = false;
    top.read_with("protocol", [&](const json& v) {
        c.protocol = parse_protocol(v.get<std::string>());
        have_protocol = true;
    });
    if (!j.contains("protocol")) problems.push_back("missing field 'protocol'");
    top.read("seed", c.seed);
    top.read("output_dir", c.output_dir);
    if (c.output_dir.empty()) problems.push_back("field 'output_dir' must not be empty");

    const bool rb_like = c.protocol == Protocol::RB || c.protocol == Protocol::RBLongWalk;
    const char* block = rb_like ? "rb" : c.protocol == Protocol::WalkScan ? "walk_scan" : "gst";
    std::vector<std::string> allowed = {"protocol", "seed", "output_dir", "acceptance", block};
    if (rb_like) allowed.push_back("fit");
    if (have_protocol) {
        for (const auto& [key, value] : j.items())
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
                problems.push_back("unknown field '" + key + "' for protocol " + std::string(protocol_name(c.protocol)));
        if (!j.contains(block)) problems.push_back("missing field '" + std::string(block) + "'");
    }

    if (rb_like && j.contains("rb")) {
        json rb = j.at("rb");
        if (rb.is_object()) {
            if (!rb.contains("seed")) rb["seed"] = c.seed;
            if (rb.contains("noise") && rb["noise"].is_object() && !rb["noise"].contains("seed"))
                rb["noise"]["seed"] = derive_seed(c.seed, {1});
        }
        try {
            c.rb = rb_config_from_json(rb);
        } catch (const std::exception& e) {
            std::istringstream lines(e.what());
            std::string line;
            std::getline(lines, line);
            while (std::getline(lines, line)) {
                const auto start = line.find("- ");
                problems.push_back("rb: " + (start == std::string::npos ? line : line.substr(start + 2)));
            }
        }
        if (c.protocol == Protocol::RBLongWalk && !c.rb.long_walk_multiplier) c.rb.long_walk_multiplier = 2.0;
    }
    if (rb_like && j.contains("fit")) {
        BlockReader fit(j.at("fit"), "fit", problems);
        fit.read_with("kappa", [&](const json& v) {
            if (v.is_null() || v == "free") {
                c.fit_kappa.reset();
            } else {
                c.fit_kappa = v.get<double>();
                if (*c.fit_kappa < 0 || *c.fit_kappa >= 0.5) throw std::invalid_argument("kappa must lie in [0, 0.5)");
            }
        });
        fit.reject_unknown();
    }

    if (c.protocol == Protocol::WalkScan && j.contains("walk_scan")) {
        BlockReader w(j.at("walk_scan"), "walk_scan", problems);
        w.read("J", c.walk_scan.J);
        w.read("count", c.walk_scan.count);
        w.read_with("axis", [&](const json& v) { c.walk_scan.axis = parse_axis(v.get<std::string>()); });
        w.read("multiplier", c.walk_scan.multiplier);
        w.read_with("weighting", [&](const json& v) { c.walk_scan.weighting = parse_weighting(v.get<std::string>()); });
        w.reject_unknown();
        if (c.walk_scan.J < 2) problems.push_back("field 'walk_scan.J' must be >= 2");
        if (c.walk_scan.count == 0) problems.push_back("field 'walk_scan.count' must be positive");
        if (c.walk_scan.multiplier <= 0) problems.push_back("field 'walk_scan.multiplier' must be positive");
    }

    if (c.protocol == Protocol::GST && j.contains("gst")) {
        BlockReader g(j.at("gst"), "gst", problems);
        g.read_with("design", [&](const json& v) {
            c.gst.design = v.get<std::string>();
            design_version_for(c.gst.design);
        });
        g.read_with("model", [&](const json& v) { c.gst.model = gst::parse_error_kind(v.get<std::string>()); });
        g.read("magnitudes", c.gst.magnitudes);
        g.read_with("detunings_hz", [&](const json& v) {
            if (j.at("gst").contains("magnitudes")) throw std::invalid_argument("give either magnitudes or detunings_hz");
            for (double hz : v.get<std::vector<double>>()) c.gst.magnitudes.push_back(hz / gst::kRabiFrequencyHz);
        });
        g.read_with("shots", [&](const json& v) {
            c.gst.shots = v.is_string() && v == "exact" ? gst::kExactShots : v.get<std::uint64_t>();
        });
        g.read_with("gauge", [&](const json& v) { c.gst.gauge.mode = gst::parse_gauge_mode(v.get<std::string>()); });
        g.read("spam_weight", c.gst.gauge.spam_weight);
        g.reject_unknown();
        if (c.gst.magnitudes.empty()) problems.push_back("field 'gst.magnitudes' must list at least one value");
        for (double m : c.gst.magnitudes)
            if (!(std::abs(m) < 0.5)) problems.push_back("field 'gst.magnitudes': |magnitude| must be < 0.5");
        if (!(c.gst.gauge.spam_weight >= 0)) problems.push_back("field 'gst.spam_weight' must be non-negative");
    }

    if (j.contains("acceptance")) {
        BlockReader a(j.at("acceptance"), "acceptance", problems);
        auto opt = [&](const char* key, std::optional<double>& target) {
            a.read_with(key, [&](const json& v) {
                if (!v.is_null()) target = v.get<double>();
            });
        };
        opt("gamma_p_min", c.acceptance.gamma_p_min);
        opt("long_walk_ratio_min", c.acceptance.long_walk_ratio_min);
        opt("long_walk_ratio_max", c.acceptance.long_walk_ratio_max);
        opt("gauge_suppression_min", c.acceptance.gauge_suppression_min);
        a.reject_unknown();
    }

    if (!problems.empty()) throw ConfigError(std::move(problems));
    return c;
}

json to_json(const ExperimentConfig& c) {
    json j = {{"protocol", protocol_name(c.protocol)}, {"seed", c.seed}, {"output_dir", c.output_dir}};
    switch (c.protocol) {
        case Protocol::RB:
        case Protocol::RBLongWalk:
            j["rb"] = to_json(c.rb);
            j["fit"] = {{"kappa", c.fit_kappa ? json(*c.fit_kappa) : json("free")}};
            break;
        case Protocol::WalkScan:
            j["walk_scan"] = {{"J", c.walk_scan.J},
                              {"count", c.walk_scan.count},
                              {"axis", std::string(1, axis_name(c.walk_scan.axis))},
                              {"multiplier", c.walk_scan.multiplier},
                              {"weighting", weighting_name(c.walk_scan.weighting)}};
            break;
        case Protocol::GST:
            j["gst"] = {{"design", c.gst.design},
                        {"model", gst::error_kind_name(c.gst.model)},
                        {"magnitudes", c.gst.magnitudes},
                        {"shots", c.gst.shots == gst::kExactShots ? json("exact") : json(c.gst.shots)},
                        {"gauge", gst::gauge_mode_name(c.gst.gauge.mode)},
                        {"spam_weight", c.gst.gauge.spam_weight}};
            break;
    }
    j["acceptance"] = {{"gamma_p_min", optional_json(c.acceptance.gamma_p_min)},
                       {"long_walk_ratio_min", optional_json(c.acceptance.long_walk_ratio_min)},
                       {"long_walk_ratio_max", optional_json(c.acceptance.long_walk_ratio_max)},
                       {"gauge_suppression_min", optional_json(c.acceptance.gauge_suppression_min)}};
    return j;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
    json j;
    try {
        j = read_json_file(path);
    } catch (const std::exception& e) {
        throw ConfigError({e.what()});
    }
    return experiment_config_from_json(j);
}

std::string config_hash(const ExperimentConfig& c) {
    json j = to_json(c);
    j.erase("output_dir");
    const std::string text = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string code_version() { return QCVV_VERSION; }

// ---------------------------------------------------------------- manifest

bool RunManifest::task_done(const std::string& task) const {
    return std::find(completed_tasks.begin(), completed_tasks.end(), task) != completed_tasks.end();
}

json to_json(const RunManifest& m) {
    json outputs = json::array();
    for (const auto& o : m.outputs) outputs.push_back({{"path", o.path}, {"kind", o.kind}, {"task", o.task}});
    return {{"config_hash", m.config_hash},
            {"code_version", m.code_version},
            {"prng", m.prng},
            {"protocol", m.protocol},
            {"status", m.status},
            {"started_at", m.started_at},
            {"finished_at", m.finished_at},
            {"error", m.error},
            {"config", m.config},
            {"completed_tasks", m.completed_tasks},
            {"outputs", outputs}};
}

RunManifest manifest_from_json(const json& j) {
    RunManifest m;
    m.config_hash = j.at("config_hash").get<std::string>();
    m.code_version = j.at("code_version").get<std::string>();
    m.prng = j.at("prng").get<std::string>();
    m.protocol = j.at("protocol").get<std::string>();
    m.status = j.at("status").get<std::string>();
    m.started_at = j.at("started_at").get<std::string>();
    m.finished_at = j.at("finished_at").get<std::string>();
    m.error = j.value("error", "");
    m.config = j.at("config");
    m.completed_tasks = j.at("completed_tasks").get<std::vector<std::string>>();
    for (const auto& o : j.at("outputs"))
        m.outputs.push_back({o.at("path").get<std::string>(), o.at("kind").get<std::string>(), o.at("task").get<std::string>()});
    return m;
}

RunManifest load_manifest(const fs::path& dir) {
    const fs::path p = dir / kManifestFile;
    if (!fs::exists(p)) throw std::runtime_error("no manifest in " + dir.string());
    return manifest_from_json(read_json_file(p));
}

// ---------------------------------------------------------------- run

namespace {

class RunContext {
  public:
    RunContext(const ExperimentConfig& c, RunManifest m) : dir_(c.output_dir), manifest_(std::move(m)) {}

    const fs::path& dir() const { return dir_; }
    RunManifest& manifest() { return manifest_; }

    void save() {
        std::lock_guard lock(mutex_);
        write_json_file(dir_ / kManifestFile, to_json(manifest_));
    }

    bool done(const std::string& task) {
        std::lock_guard lock(mutex_);
        return manifest_.task_done(task);
    }

    /// Runs fn unless `task` is complete; fn returns the files it wrote.
    template <typename F>
    void task(const std::string& name, F&& fn) {
        if (done(name)) return;
        std::vector<ManifestOutput> written = fn();
        {
            std::lock_guard lock(mutex_);
            for (auto& o : written) {
                o.task = name;
                auto it = std::find_if(manifest_.outputs.begin(), manifest_.outputs.end(),
                                       [&](const ManifestOutput& x) { return x.path == o.path; });
                if (it == manifest_.outputs.end()) manifest_.outputs.push_back(o);
            }
            manifest_.completed_tasks.push_back(name);
        }
        save();
    }

    ManifestOutput write_json(const std::string& rel, const json& j, const char* kind) {
        write_json_file(dir_ / rel, j);
        return {rel, kind, ""};
    }

    ManifestOutput write_text(const std::string& rel, const std::string& text, const char* kind) {
        write_text_file(dir_ / rel, text);
        return {rel, kind, ""};
    }

  private:
    fs::path dir_;
    RunManifest manifest_;
    std::mutex mutex_;
};

struct LengthSummary {
    std::size_t J = 0;
    double mean_F = 0, variance = 0, pooled_variance = 0;
    double beta_fit = kNaN, beta_calc = kNaN, beta_calc_correlated = kNaN, chi2 = kNaN, gamma_p = kNaN;
    double mean_unit_v2d_sq = 0;
    GammaFit fit;
    GoodnessOfFit calc_test;
    bool has_fit = false;
};

std::vector<LengthSummary> summarise_lengths(const CliffordGroup& group, const RBDataset& d) {
    std::vector<LengthSummary> out;
    for (const auto& L : d.lengths) {
        LengthSummary s;
        s.J = L.J;
        s.mean_F = L.mean_survival;
        s.variance = L.variance_over_sequences;
        s.pooled_variance = L.pooled_variance;
        for (const auto& q : L.sequences) s.mean_unit_v2d_sq += q.unit_walk_v2d_sq / static_cast<double>(L.sequences.size());
        const double sigma = d.config.noise.sigma;
        if (d.config.noise.kind == NoiseKind::QuasiDc) {
            s.beta_calc = analytic_gamma_params(L.J, sigma).beta;
            s.beta_calc_correlated = correlated_gamma_params(group, L.J, sigma).beta;
        } else {
            s.beta_calc = moments_prediction(group, L.J, sigma, NoiseKind::White).mean;
        }
        const auto infid = L.infidelities();
        try {
            s.fit = fit_gamma(infid);
            s.beta_fit = s.fit.beta;
            s.chi2 = s.fit.fit_quality.chi2_normalized;
            if (s.beta_calc > 0) {
                s.calc_test = gamma_test(infid, 1.0, s.beta_calc);
                s.gamma_p = s.calc_test.p_value;
            }
            s.has_fit = true;
        } catch (const std::exception&) {
            // degenerate spread (for instance sigma = 0): no gamma statistics
        }
        out.push_back(std::move(s));
    }
    return out;
}

// Runs with fewer than three lengths carry no decay fit.
std::optional<DecayFit> decay_fit(const RBDataset& d, const std::optional<double>& kappa) {
    if (d.lengths.size() < 3) return std::nullopt;
    const auto points = decay_points(d);
    return fit_decay(points, kappa);
}

json decay_json(const std::optional<DecayFit>& opt) {
    if (!opt) return nullptr;
    const DecayFit& f = *opt;
    return {{"p_rb", f.p_rb}, {"kappa", f.kappa}, {"kappa_fixed", f.kappa_fixed}, {"objective", f.objective},
            {"converged", f.converged}, {"residuals", f.residuals}};
}

std::vector<ManifestOutput> write_rb_summary(RunContext& ctx, const CliffordGroup& group, const ExperimentConfig& c) {
    std::vector<ManifestOutput> out;
    const RBDataset d = rb_dataset_from_json(read_json_file(ctx.dir() / "dataset.json"));
    const auto lengths = summarise_lengths(group, d);
    const std::optional<DecayFit> fit = decay_fit(d, c.fit_kappa);
    const double p_rb = fit ? fit->p_rb : kNaN;

    std::optional<RBDataset> lw;
    std::optional<DecayFit> lw_fit;
    std::vector<LengthSummary> lw_lengths;
    if (c.protocol == Protocol::RBLongWalk) {
        lw = rb_dataset_from_json(read_json_file(ctx.dir() / "longwalk_dataset.json"));
        lw_fit = decay_fit(*lw, c.fit_kappa);
        for (const auto& L : lw->lengths) {
            LengthSummary s;
            s.J = L.J;
            s.mean_F = L.mean_survival;
            s.variance = L.variance_over_sequences;
            for (const auto& q : L.sequences)
                s.mean_unit_v2d_sq += q.unit_walk_v2d_sq / static_cast<double>(L.sequences.size());
            lw_lengths.push_back(s);
        }
    }

    std::ostringstream csv;
    csv << "J,mean_F,variance,pooled_variance,p_rb,beta_fit,beta_calc,beta_calc_correlated,chi2,gamma_p";
    if (lw) csv << ",mean_F_lw,p_lw,p_lw_over_p_rb,mean_unit_v2d_sq,mean_unit_v2d_sq_lw";
    csv << '\n';
    json rows = json::array();
    for (std::size_t k = 0; k < lengths.size(); ++k) {
        const auto& s = lengths[k];
        csv << s.J << ',' << format_number(s.mean_F) << ',' << format_number(s.variance) << ','
            << format_number(s.pooled_variance) << ',' << format_number(p_rb) << ',' << format_number(s.beta_fit)
            << ',' << format_number(s.beta_calc) << ',' << format_number(s.beta_calc_correlated) << ','
            << format_number(s.chi2) << ',' << format_number(s.gamma_p);
        json row = {{"J", s.J},
                    {"mean_F", s.mean_F},
                    {"variance", s.variance},
                    {"pooled_variance", s.pooled_variance},
                    {"beta_fit", number_or_null(s.beta_fit)},
                    {"beta_calc", number_or_null(s.beta_calc)},
                    {"beta_calc_correlated", number_or_null(s.beta_calc_correlated)},
                    {"chi2", number_or_null(s.chi2)},
                    {"gamma_p", number_or_null(s.gamma_p)},
                    {"mean_unit_v2d_sq", s.mean_unit_v2d_sq}};
        if (lw) {
            const auto& t = lw_lengths[k];
            const double p_lw = lw_fit ? lw_fit->p_rb : kNaN;
            csv << ',' << format_number(t.mean_F) << ',' << format_number(p_lw) << ',' << format_number(p_lw / p_rb) << ',' << format_number(s.mean_unit_v2d_sq) << ','
                << format_number(t.mean_unit_v2d_sq);
            row["mean_F_lw"] = t.mean_F;
            row["mean_unit_v2d_sq_lw"] = t.mean_unit_v2d_sq;
        }
        csv << '\n';
        rows.push_back(std::move(row));
    }
    out.push_back(ctx.write_text("summary.csv", csv.str(), "summary"));

    json summary = {{"protocol", protocol_name(c.protocol)},
                    {"noise", to_json(d.config.noise)},
                    {"decay_fit", decay_json(fit)},
                    {"lengths", rows}};
    if (lw) {
        summary["long_walk_fit"] = decay_json(*lw_fit);
        summary["long_walk_ratio"] = number_or_null(lw_fit ? lw_fit->p_rb / p_rb : kNaN);
    }
    out.push_back(ctx.write_json("summary.json", summary, "summary"));

    std::ostringstream hist;
    hist << "J,bin_lo,bin_hi,count,expected_calc,expected_fit\n";
    for (const auto& s : lengths) {
        if (!s.has_fit) continue;
        const auto& h = s.fit.histogram;
        for (std::size_t b = 0; b < h.bins(); ++b) {
            const double calc = b < s.calc_test.expected.size() ? s.calc_test.expected[b] : kNaN;
            const double fitted = b < s.fit.fit_quality.expected.size() ? s.fit.fit_quality.expected[b] : kNaN;
            hist << s.J << ',' << format_number(h.edges[b]) << ',' << format_number(h.edges[b + 1]) << ','
                 << format_number(h.counts[b]) << ',' << format_number(calc) << ',' << format_number(fitted) << '\n';
        }
    }
    out.push_back(ctx.write_text("histograms.csv", hist.str(), "plot-data"));

    std::ostringstream scatter;
    scatter << "set,J,sequence,infidelity,unit_v2d_sq,concurrent_v2d_sq\n";
    auto scatter_rows = [&](const RBDataset& ds, const char* name) {
        for (const auto& L : ds.lengths)
            for (std::size_t i = 0; i < L.sequences.size(); ++i) {
                const auto& q = L.sequences[i];
                scatter << name << ',' << L.J << ',' << i << ',' << format_number(q.infidelity()) << ','
                        << format_number(q.unit_walk_v2d_sq) << ',' << format_number(q.concurrent_walk_v2d_sq) << '\n';
            }
    };
    scatter_rows(d, "unbiased");
    if (lw) scatter_rows(*lw, "long-walk");
    out.push_back(ctx.write_text("walk_scatter.csv", scatter.str(), "plot-data"));
    return out;
}

void run_rb_protocol(RunContext& ctx, const ExperimentConfig& c) {
    const CliffordGroup group = CliffordGroup::standard(c.rb.identity_idle);
    RBConfig unbiased = c.rb;
    if (c.protocol == Protocol::RBLongWalk) unbiased.long_walk_multiplier.reset();
    ctx.task("rb-dataset", [&] {
        return std::vector{ctx.write_json("dataset.json", to_json(run_rb(group, unbiased)), "dataset")};
    });
    if (c.protocol == Protocol::RBLongWalk) {
        ctx.task("rb-longwalk-dataset", [&] {
            return std::vector{ctx.write_json("longwalk_dataset.json", to_json(run_rb(group, c.rb)), "dataset")};
        });
    }
    ctx.task("rb-summary", [&] { return write_rb_summary(ctx, group, c); });
}

void run_walk_scan_protocol(RunContext& ctx, const ExperimentConfig& c) {
    const CliffordGroup group = CliffordGroup::standard();
    ctx.task("walk-scan", [&] {
        return std::vector{ctx.write_text("walk_scan.csv", walk_scan_csv(group, c.walk_scan, c.seed), "summary")};
    });
}

std::string gst_csv_from_reports(const std::vector<json>& reports) {
    std::ostringstream ss;
    ss << "gate,kind,magnitude,gauge,dd_calc,dd_calc_gauge,dd_est\n";
    for (const auto& r : reports)
        for (const auto& g : r.at("gates"))
            ss << g.at("gate").get<std::string>() << ',' << r.at("model").at("kind").get<std::string>() << ','
               << format_number(r.at("model").at("magnitude").get<double>()) << ','
               << r.at("gauge").at("mode").get<std::string>() << ',' << format_number(g.at("dd_calc").get<double>())
               << ',' << format_number(g.at("dd_calc_gauge").get<double>()) << ','
               << format_number(g.at("dd_est").get<double>()) << '\n';
    return ss.str();
}

void run_gst_protocol(RunContext& ctx, const ExperimentConfig& c) {
    const gst::GSTDesign design = gst::design_for_version(design_version_for(c.gst.design));
    ctx.task("gst-design", [&] { return std::vector{ctx.write_json("gst/design.json", gst::to_json(design), "dataset")}; });
    const std::size_t n = c.gst.magnitudes.size();
    parallel_for(n, [&](std::size_t k) {
        const std::string idx = std::to_string(k);
        ctx.task("gst-" + idx, [&] {
            const gst::ErrorModel model{c.gst.model, c.gst.magnitudes[k]};
            const std::uint64_t seed = derive_seed(c.seed, {k});
            const gst::GateSet truth = gst::apply_error_model(design.labels, model);
            const gst::GSTDataset data = gst::simulate_dataset(truth, design, c.gst.shots, seed);
            gst::GSTReport r;
            r.design_version = design.version;
            r.model = model;
            r.shots = c.gst.shots;
            r.seed = seed;
            r.gauge = c.gst.gauge;
            r.analysis = gst::analyze_dataset(data, design, c.gst.gauge);
            r.gates = gst::calculated_distances(truth, c.gst.gauge);
            gst::add_estimated_distances(r.gates, r.analysis.estimate);
            return std::vector{
                ctx.write_json("gst/dataset_" + idx + ".json", gst_dataset_file(data, design, model, seed), "dataset"),
                ctx.write_json("gst/report_" + idx + ".json", gst::to_json(r), "report")};
        });
    });
    ctx.task("gst-summary", [&] {
        std::vector<json> reports;
        for (std::size_t k = 0; k < n; ++k)
            reports.push_back(read_json_file(ctx.dir() / ("gst/report_" + std::to_string(k) + ".json")));
        return std::vector{ctx.write_text("gst_report.csv", gst_csv_from_reports(reports), "summary"),
                           ctx.write_json("gst_report.json", json(reports), "summary")};
    });
}

}  // namespace

RunManifest run(const ExperimentConfig& c) {
    const fs::path dir = c.output_dir;
    fs::create_directories(dir);
    const std::string hash = config_hash(c);
    RunManifest m;
    if (fs::exists(dir / kManifestFile)) {
        try {
            RunManifest previous = load_manifest(dir);
            if (previous.config_hash == hash && previous.code_version == code_version()) m = std::move(previous);
        } catch (const std::exception&) {
            // unreadable manifest: start afresh
        }
    }
    if (m.config_hash.empty()) {
        m.config_hash = hash;
        m.code_version = code_version();
        m.prng = kPrngAlgorithm;
        m.protocol = std::string(protocol_name(c.protocol));
        m.config = to_json(c);
    }
    m.status = "running";
    m.error.clear();
    m.started_at = utc_now();
    m.finished_at.clear();

    RunContext ctx(c, std::move(m));
    ctx.save();
    try {
        switch (c.protocol) {
            case Protocol::RB:
            case Protocol::RBLongWalk: run_rb_protocol(ctx, c); break;
            case Protocol::WalkScan: run_walk_scan_protocol(ctx, c); break;
            case Protocol::GST: run_gst_protocol(ctx, c); break;
        }
    } catch (const std::exception& e) {
        ctx.manifest().status = "failed";
        ctx.manifest().error = e.what();
        ctx.manifest().finished_at = utc_now();
        ctx.save();
        throw;
    }
    ctx.manifest().status = "complete";
    ctx.manifest().finished_at = utc_now();
    ctx.save();
    return ctx.manifest();
}

// ---------------------------------------------------------------- helpers

json gst_dataset_file(const gst::GSTDataset& d, const gst::GSTDesign& design, const gst::ErrorModel& model,
                      std::uint64_t seed) {
    return {{"model", {{"kind", gst::error_kind_name(model.kind)}, {"magnitude", model.magnitude}}},
            {"seed", seed},
            {"dataset", gst::to_json(d, design)}};
}

std::string walk_scan_csv(const CliffordGroup& group, const WalkScanConfig& c, std::uint64_t seed) {
    std::ostringstream ss;
    ss << "sequence,normV2Dsq,normVsq,is_long\n";
    for (std::size_t i = 0; i < c.count; ++i) {
        Rng rng(derive_seed(seed, {1, c.J, i}));
        const RBSequence s = generate_rb_sequence(group, c.J, rng);
        const WalkRecord w = compute_walk(group, s.gates, SignedPauli::plus(c.axis), c.weighting);
        const bool is_long = classify_long_walk(w, c.J, c.multiplier).is_long;
        ss << i << ',' << format_number(w.norm_v2d_sq) << ',' << format_number(w.norm_v_sq) << ','
           << (is_long ? "true" : "false") << '\n';
    }
    return ss.str();
}

// ---------------------------------------------------------------- report

namespace {

std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

std::string cell(const json& v) { return v.is_null() ? "n/a" : format_number(v.get<double>()); }

void report_rb(std::ostringstream& md, const fs::path& dir, const ExperimentConfig& c) {
    const json s = read_json_file(dir / "summary.json");
    md << "Noise: " << s.at("noise").at("kind").get<std::string>() << ", sigma "
       << format_number(s.at("noise").at("sigma").get<double>()) << "\n\n";
    md << "| J | mean F | variance | beta_fit | beta_calc | chi2 | gamma p |\n";
    md << "|---|---|---|---|---|---|---|\n";
    bool gamma_ok = true;
    for (const auto& r : s.at("lengths")) {
        md << "| " << r.at("J").get<std::size_t>() << " | " << cell(r.at("mean_F")) << " | " << cell(r.at("variance"))
           << " | " << cell(r.at("beta_fit")) << " | " << cell(r.at("beta_calc")) << " | " << cell(r.at("chi2")) << " | "
           << cell(r.at("gamma_p")) << " |\n";
        if (c.acceptance.gamma_p_min)
            gamma_ok = gamma_ok && !r.at("gamma_p").is_null() && r.at("gamma_p").get<double>() >= *c.acceptance.gamma_p_min;
    }
    const auto& fit = s.at("decay_fit");
    if (fit.is_null()) {
        md << "\nDecay fit: n/a (fewer than three lengths)\n";
    } else {
        md << "\nDecay fit: p_rb = " << cell(fit.at("p_rb")) << ", kappa = " << cell(fit.at("kappa"))
           << (fit.at("kappa_fixed").get<bool>() ? " (fixed)" : " (fitted)") << "\n";
    }
    std::vector<std::pair<std::string, bool>> checks;
    if (c.acceptance.gamma_p_min)
        checks.emplace_back("gamma GOF p >= " + format_number(*c.acceptance.gamma_p_min) + " at every J", gamma_ok);
    if (s.contains("long_walk_fit")) {
        const json ratio = s.at("long_walk_ratio");
        const json& lwf = s.at("long_walk_fit");
        md << "Long-walk fit: p_lw = " << (lwf.is_null() ? "n/a" : cell(lwf.at("p_rb"))) << ", p_lw / p_rb = " << cell(ratio)
           << "\n";
        const double r = ratio.is_null() ? kNaN : ratio.get<double>();
        if (c.acceptance.long_walk_ratio_min)
            checks.emplace_back("p_lw / p_rb >= " + format_number(*c.acceptance.long_walk_ratio_min),
                                r >= *c.acceptance.long_walk_ratio_min);
        if (c.acceptance.long_walk_ratio_max)
            checks.emplace_back("p_lw / p_rb <= " + format_number(*c.acceptance.long_walk_ratio_max),
                                r <= *c.acceptance.long_walk_ratio_max);
    }
    if (!checks.empty()) {
        md << "\n## Acceptance\n\n";
        for (const auto& [name, ok] : checks) md << "- " << pass_fail(ok) << ": " << name << "\n";
    }
}

void report_walk_scan(std::ostringstream& md, const fs::path& dir, const ExperimentConfig& c) {
    std::istringstream in(read_text_file(dir / "walk_scan.csv"));
    std::string line;
    std::getline(in, line);
    std::size_t n = 0, n_long = 0;
    double sum = 0;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string id, v2d, v, is_long;
        std::getline(row, id, ',');
        std::getline(row, v2d, ',');
        std::getline(row, v, ',');
        std::getline(row, is_long, ',');
        ++n;
        sum += std::stod(v2d);
        n_long += is_long == "true" ? 1 : 0;
    }
    md << "| J | sequences | mean normV2Dsq | (2/3) J | long fraction (m = " << format_number(c.walk_scan.multiplier)
       << ") |\n|---|---|---|---|---|\n";
    md << "| " << c.walk_scan.J << " | " << n << " | " << format_number(n ? sum / static_cast<double>(n) : 0.0) << " | "
       << format_number(2.0 * static_cast<double>(c.walk_scan.J) / 3.0) << " | "
       << format_number(n ? static_cast<double>(n_long) / static_cast<double>(n) : 0.0) << " |\n";
}

void report_gst(std::ostringstream& md, const fs::path& dir, const ExperimentConfig& c) {
    const json reports = read_json_file(dir / "gst_report.json");
    md << "Design: " << c.gst.design << ", model: " << gst::error_kind_name(c.gst.model) << ", gauge: "
       << gst::gauge_mode_name(c.gst.gauge.mode) << " (spam weight " << format_number(c.gst.gauge.spam_weight)
       << "), diamond convention factor " << format_number(gst::kDiamondConvention) << "\n\n";
    md << "| gate | magnitude | dd_calc | dd_calc_gauge | dd_est | dd_calc / dd_est | model violation |\n";
    md << "|---|---|---|---|---|---|---|\n";
    bool suppression_ok = true;
    for (const auto& r : reports) {
        const double mag = r.at("model").at("magnitude").get<double>();
        for (const auto& g : r.at("gates")) {
            const std::string gate = g.at("gate").get<std::string>();
            const double calc = g.at("dd_calc").get<double>();
            const double est = g.at("dd_est").get<double>();
            const double ratio = est > 0 ? calc / est : kNaN;
            md << "| " << gate << " | " << format_number(mag) << " | " << format_number(calc) << " | "
               << format_number(g.at("dd_calc_gauge").get<double>()) << " | " << format_number(est) << " | "
               << format_number(ratio) << " | " << cell(r.at("fit").at("model_violation")) << " |\n";
            if (c.acceptance.gauge_suppression_min && (gate == "Gx" || gate == "Gy"))
                suppression_ok = suppression_ok && ratio >= *c.acceptance.gauge_suppression_min;
        }
    }
    if (c.acceptance.gauge_suppression_min) {
        md << "\n## Acceptance\n\n- " << pass_fail(suppression_ok) << ": Gx, Gy dd_calc / dd_est >= "
           << format_number(*c.acceptance.gauge_suppression_min) << " at every magnitude\n";
    }
}

}  // namespace

std::string report(const fs::path& dir) {
    const RunManifest m = load_manifest(dir);
    if (m.outputs.empty()) throw std::runtime_error("manifest in " + dir.string() + " lists no outputs");
    if (m.status != "complete") throw std::runtime_error("run in " + dir.string() + " is " + m.status);
    std::vector<std::string> missing;
    for (const auto& o : m.outputs)
        if (!fs::exists(dir / o.path)) missing.push_back(o.path);
    if (!missing.empty()) {
        std::string msg = "missing artifacts:";
        for (const auto& p : missing) msg += "\n  - " + p;
        throw std::runtime_error(msg);
    }
    const ExperimentConfig c = experiment_config_from_json(m.config);
    std::ostringstream md;
    md << "# Run report: " << m.protocol << "\n\n";
    md << "Config hash " << m.config_hash << ", code version " << m.code_version << ", PRNG " << m.prng << ", seed "
       << c.seed << "\n\n";
    switch (c.protocol) {
        case Protocol::RB:
        case Protocol::RBLongWalk: report_rb(md, dir, c); break;
        case Protocol::WalkScan: report_walk_scan(md, dir, c); break;
        case Protocol::GST: report_gst(md, dir, c); break;
    }
    md << "\n## Outputs\n\n";
    for (const auto& o : m.outputs) md << "- " << o.path << " (" << o.kind << ")\n";
    return md.str();
}

}  // namespace qcvv
