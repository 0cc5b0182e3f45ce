#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcvv/gst/gateset.hpp"

namespace qcvv::gst {

inline constexpr const char* kStandardDesignVersion = "gst-standard-v1";
inline constexpr const char* kExtendedDesignVersion = "gst-extended-v1";

struct GSTSequence {
    GateString gates;
    int prep = 0;       // fiducial index
    int germ = -1;      // germ index, -1 for linear-inversion strings
    int power = 0;
    int meas = 0;       // fiducial index
    int max_length = 1; // smallest L at which the sequence first appears
};

struct GSTDesign {
    std::string version;
    std::vector<std::string> labels;
    std::vector<GateString> fiducials;
    std::vector<GateString> germs;
    std::vector<int> max_lengths;
    std::vector<GSTSequence> sequences;

    /// Position of a gate string in `sequences`, if present.
    std::optional<std::size_t> find(const GateString& s) const;
    std::string format(const GateString& s) const;
    GateString parse(const std::string& s) const;

  private:
    friend GSTDesign build_design(std::string, std::vector<std::string>, std::vector<GateString>,
                                  std::vector<GateString>, std::vector<int>);
    std::map<GateString, std::size_t> index_;
};

/// Sequences: fiducial pairs F_i F_j, then F_i G F_j for each gate, then
/// F_i germ^p F_j with p = floor(L / |germ|) for each L, deduplicated in
/// order of first appearance.
GSTDesign build_design(std::string version, std::vector<std::string> labels, std::vector<GateString> fiducials,
                       std::vector<GateString> germs, std::vector<int> max_lengths);

/// {Gi, Gx, Gy}, 6 fiducials, 11 germs, L = 1, 2, ..., 256: 2737 sequences.
GSTDesign standard_design();

/// Germs of the extended set {Gi, Gx, Gy, Gmx, Gmy}: the 11 standard germs,
/// their sign-inverted images (10, Gi being its own image) and the first 18
/// compound germs in length-then-lexicographic order over
/// (Gx, Gmx, Gy, Gmy, Gi) that mix positive and negative rotations, are
/// primitive, and are the least rotation of their conjugacy class.
std::vector<std::vector<std::string>> extended_germ_words();

GSTDesign extended_design();

/// {version, rule, germs} with germs written as dotted label strings.
nlohmann::json germ_catalog_json(const GSTDesign& d);

nlohmann::json to_json(const GSTDesign& d);
GSTDesign design_from_json(const nlohmann::json& j);

}  // namespace qcvv::gst
