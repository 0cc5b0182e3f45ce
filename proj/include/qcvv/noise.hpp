#pragma once

// Engineered detuning noise delta = Delta/Omega in the two limiting
// correlation regimes: quasi-DC (one draw per realisation, constant over the
// sequence) and white (an independent draw per pulse slot).

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace qcvv {

enum class NoiseKind : std::uint8_t { QuasiDc, White };

std::string_view noise_kind_name(NoiseKind k);
/// Accepts "dc", "quasi-dc", "white".
NoiseKind parse_noise_kind(std::string_view s);

struct NoiseSpec {
    NoiseKind kind = NoiseKind::QuasiDc;
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

struct NoiseRealization {
    NoiseKind kind = NoiseKind::QuasiDc;
    std::vector<double> values;  // one per timed pulse slot

    /// The first `n` slots (throws if the realisation is shorter).
    std::span<const double> first(std::size_t n) const;
};

struct NoiseEnsemble {
    NoiseSpec spec;
    std::vector<NoiseRealization> realizations;

    std::size_t size() const { return realizations.size(); }
    std::size_t pulse_count() const { return realizations.empty() ? 0 : realizations.front().values.size(); }
};

/// Draws `n_realizations` trajectories of `pulse_count` slots. Deterministic in
/// (spec, n_realizations, pulse_count).
NoiseEnsemble sample_ensemble(const NoiseSpec& spec, std::size_t n_realizations, std::size_t pulse_count);

/// Root-mean-square of every value in every realisation.
double ensemble_rms(const NoiseEnsemble& e);

nlohmann::json to_json(const NoiseSpec& s);
NoiseSpec noise_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const NoiseEnsemble& e);
NoiseEnsemble noise_ensemble_from_json(const nlohmann::json& j);

}  // namespace qcvv
