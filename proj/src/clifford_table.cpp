#include "qcvv/clifford_table.hpp"

#include <stdexcept>

namespace qcvv {

namespace {

struct Step {
    PulseAxis axis;
    int quarter_turns;
};

// (drive, frame) pairs; a zero quarter-turn count means "absent".
constexpr std::array<std::array<Step, 2>, 23> kNonIdentity = {{
    {{{PulseAxis::FrameZ, 1}, {PulseAxis::FrameZ, 0}}},
    {{{PulseAxis::FrameZ, -1}, {PulseAxis::FrameZ, 0}}},
    {{{PulseAxis::FrameZ, 2}, {PulseAxis::FrameZ, 0}}},
    {{{PulseAxis::X, 1}, {PulseAxis::FrameZ, 0}}},
    {{{PulseAxis::X, -1}, {PulseAxis::FrameZ, 0}}},
    {{{PulseAxis::Y, 1}, {PulseAxis::FrameZ, 0}}},
    {{{PulseAxis::Y, -1}, {PulseAxis::FrameZ, 0}}},
    {{{PulseAxis::X, 2}, {PulseAxis::FrameZ, 0}}},
    {{{PulseAxis::Y, 2}, {PulseAxis::FrameZ, 0}}},
    {{{PulseAxis::X, 1}, {PulseAxis::FrameZ, 1}}},
    {{{PulseAxis::X, 1}, {PulseAxis::FrameZ, -1}}},
    {{{PulseAxis::X, 1}, {PulseAxis::FrameZ, 2}}},
    {{{PulseAxis::X, -1}, {PulseAxis::FrameZ, 1}}},
    {{{PulseAxis::X, -1}, {PulseAxis::FrameZ, -1}}},
    {{{PulseAxis::X, -1}, {PulseAxis::FrameZ, 2}}},
    {{{PulseAxis::Y, 1}, {PulseAxis::FrameZ, 1}}},
    {{{PulseAxis::Y, 1}, {PulseAxis::FrameZ, -1}}},
    {{{PulseAxis::Y, 1}, {PulseAxis::FrameZ, 2}}},
    {{{PulseAxis::Y, -1}, {PulseAxis::FrameZ, 1}}},
    {{{PulseAxis::Y, -1}, {PulseAxis::FrameZ, -1}}},
    {{{PulseAxis::Y, -1}, {PulseAxis::FrameZ, 2}}},
    {{{PulseAxis::X, 2}, {PulseAxis::FrameZ, 1}}},
    {{{PulseAxis::X, 2}, {PulseAxis::FrameZ, -1}}},
}};

PhysicalPulse to_pulse(const Step& s) {
    if (s.axis == PulseAxis::FrameZ) return PhysicalPulse::frame_z(s.quarter_turns);
    return PhysicalPulse::drive(s.axis, s.quarter_turns);
}

}  // namespace

std::vector<std::vector<PhysicalPulse>> builtin_clifford_table(int identity_idle) {
    std::vector<std::vector<PhysicalPulse>> table;
    table.push_back({PhysicalPulse::idle(identity_idle)});
    for (const auto& entry : kNonIdentity) {
        std::vector<PhysicalPulse> pulses;
        for (const Step& s : entry) {
            if (s.quarter_turns != 0) pulses.push_back(to_pulse(s));
        }
        table.push_back(std::move(pulses));
    }
    return table;
}

nlohmann::json clifford_table_to_json(const CliffordGroup& group) {
    nlohmann::json elements = nlohmann::json::array();
    for (const auto& e : group.elements()) {
        nlohmann::json pulses = nlohmann::json::array();
        for (const auto& p : e.pulses) {
            pulses.push_back({{"axis", std::string(pulse_axis_name(p.axis()))},
                              {"angle_units_of_pi_over_2", p.quarter_turns()},
                              {"duration", p.duration()}});
        }
        elements.push_back({{"index", e.index}, {"pulses", pulses}});
    }
    return {{"version", kCliffordTableVersion}, {"elements", elements}};
}

CliffordGroup clifford_group_from_json(const nlohmann::json& j) {
    const nlohmann::json& elements = j.is_array() ? j : j.at("elements");
    std::vector<std::vector<PhysicalPulse>> table(elements.size());
    for (const auto& e : elements) {
        const auto index = e.at("index").get<std::size_t>();
        if (index >= table.size() || !table[index].empty()) {
            throw std::invalid_argument("Clifford table has a missing or repeated index " + std::to_string(index));
        }
        for (const auto& p : e.at("pulses")) {
            table[index].push_back(PhysicalPulse::make(parse_pulse_axis(p.at("axis").get<std::string>()),
                                                       p.at("angle_units_of_pi_over_2").get<int>(),
                                                       p.at("duration").get<int>()));
        }
    }
    return CliffordGroup(std::move(table));
}

}  // namespace qcvv
