#include "qcvv/noise.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qcvv/random.hpp"

namespace qcvv {

namespace {
constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;  // "noise"
}

std::string_view noise_kind_name(NoiseKind k) {
    return k == NoiseKind::QuasiDc ? "quasi-dc" : "white";
}

NoiseKind parse_noise_kind(std::string_view s) {
    if (s == "dc" || s == "quasi-dc") return NoiseKind::QuasiDc;
    if (s == "white") return NoiseKind::White;
    throw std::invalid_argument("unknown noise kind '" + std::string(s) + "' (expected dc or white)");
}

std::span<const double> NoiseRealization::first(std::size_t n) const {
    if (n > values.size()) {
        throw std::invalid_argument("noise realisation has " + std::to_string(values.size()) + " slots, " +
                                    std::to_string(n) + " requested");
    }
    return std::span<const double>(values).first(n);
}

NoiseEnsemble sample_ensemble(const NoiseSpec& spec, std::size_t n_realizations, std::size_t pulse_count) {
    if (pulse_count == 0) throw std::invalid_argument("pulse_count must be at least 1");
    if (n_realizations == 0) throw std::invalid_argument("an ensemble needs at least one realisation");
    if (!(spec.sigma >= 0.0)) throw std::invalid_argument("noise sigma must be non-negative");

    Rng rng(derive_seed(spec.seed, {kNoiseStream}));
    NoiseEnsemble e{spec, {}};
    e.realizations.reserve(n_realizations);
    for (std::size_t n = 0; n < n_realizations; ++n) {
        NoiseRealization r{spec.kind, std::vector<double>(pulse_count)};
        if (spec.kind == NoiseKind::QuasiDc) {
            const double d = spec.sigma * rng.normal();
            std::fill(r.values.begin(), r.values.end(), d);
        } else {
            for (double& v : r.values) v = spec.sigma * rng.normal();
        }
        e.realizations.push_back(std::move(r));
    }
    return e;
}

double ensemble_rms(const NoiseEnsemble& e) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : e.realizations) {
        for (double v : r.values) sum += v * v;
        count += r.values.size();
    }
    if (count == 0) throw std::invalid_argument("ensemble_rms of an empty ensemble");
    return std::sqrt(sum / static_cast<double>(count));
}

nlohmann::json to_json(const NoiseSpec& s) {
    return {{"kind", std::string(noise_kind_name(s.kind))},
            {"sigma", s.sigma},
            {"seed", s.seed},
            {"prng", kPrngAlgorithm}};
}

NoiseSpec noise_spec_from_json(const nlohmann::json& j) {
    NoiseSpec s;
    s.kind = parse_noise_kind(j.at("kind").get<std::string>());
    s.sigma = j.at("sigma").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
}

nlohmann::json to_json(const NoiseEnsemble& e) {
    nlohmann::json values = nlohmann::json::array();
    for (const auto& r : e.realizations) values.push_back(r.values);
    return {{"spec", to_json(e.spec)}, {"values", values}};
}

NoiseEnsemble noise_ensemble_from_json(const nlohmann::json& j) {
    NoiseEnsemble e;
    e.spec = noise_spec_from_json(j.at("spec"));
    for (const auto& v : j.at("values")) e.realizations.push_back({e.spec.kind, v.get<std::vector<double>>()});
    return e;
}

}  // namespace qcvv
