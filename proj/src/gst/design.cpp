#include "qcvv/gst/design.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace qcvv::gst {

namespace {

const std::vector<std::vector<std::string>> kStandardFiducials = {
    {}, {"Gx"}, {"Gy"}, {"Gx", "Gx"}, {"Gx", "Gx", "Gx"}, {"Gy", "Gy", "Gy"}};

const std::vector<std::vector<std::string>> kStandardGerms = {
    {"Gx"},
    {"Gy"},
    {"Gi"},
    {"Gx", "Gy"},
    {"Gx", "Gy", "Gi"},
    {"Gx", "Gi", "Gy"},
    {"Gx", "Gi", "Gi"},
    {"Gy", "Gi", "Gi"},
    {"Gx", "Gx", "Gi", "Gy"},
    {"Gx", "Gy", "Gy", "Gi"},
    {"Gx", "Gx", "Gy", "Gx", "Gy", "Gy"}};

const std::vector<int> kMaxLengths = {1, 2, 4, 8, 16, 32, 64, 128, 256};

GateString encode(const std::vector<std::string>& labels, const std::vector<std::string>& word) {
    GateString s;
    for (const auto& w : word) {
        const auto it = std::find(labels.begin(), labels.end(), w);
        if (it == labels.end()) throw std::invalid_argument("gate '" + w + "' is not in the design's gate set");
        s.push_back(static_cast<int>(it - labels.begin()));
    }
    return s;
}

std::vector<GateString> encode_all(const std::vector<std::string>& labels,
                                   const std::vector<std::vector<std::string>>& words) {
    std::vector<GateString> out;
    for (const auto& w : words) out.push_back(encode(labels, w));
    return out;
}

std::string negate(const std::string& l) {
    if (l == "Gx") return "Gmx";
    if (l == "Gy") return "Gmy";
    return l;
}

bool is_primitive(const std::vector<int>& w) {
    const std::size_t n = w.size();
    for (std::size_t d = 1; d < n; ++d) {
        if (n % d) continue;
        bool periodic = true;
        for (std::size_t i = d; i < n && periodic; ++i) periodic = w[i] == w[i - d];
        if (periodic) return false;
    }
    return true;
}

std::vector<int> least_rotation(const std::vector<int>& w) {
    std::vector<int> best = w;
    std::vector<int> r = w;
    for (std::size_t k = 1; k < w.size(); ++k) {
        std::rotate(r.begin(), r.begin() + 1, r.end());
        best = std::min(best, r);
    }
    return best;
}

}  // namespace

std::optional<std::size_t> GSTDesign::find(const GateString& s) const {
    const auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::string GSTDesign::format(const GateString& s) const {
    if (s.empty()) return "{}";
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += '.';
        out += labels.at(static_cast<std::size_t>(s[i]));
    }
    return out;
}

GateString GSTDesign::parse(const std::string& s) const {
    std::vector<std::string> words;
    if (s != "{}" && !s.empty()) {
        std::size_t start = 0;
        while (true) {
            const std::size_t dot = s.find('.', start);
            words.push_back(s.substr(start, dot - start));
            if (dot == std::string::npos) break;
            start = dot + 1;
        }
    }
    return encode(labels, words);
}

GSTDesign build_design(std::string version, std::vector<std::string> labels, std::vector<GateString> fiducials,
                       std::vector<GateString> germs, std::vector<int> max_lengths) {
    GSTDesign d;
    d.version = std::move(version);
    d.labels = std::move(labels);
    d.fiducials = std::move(fiducials);
    d.germs = std::move(germs);
    d.max_lengths = std::move(max_lengths);
    const int nf = static_cast<int>(d.fiducials.size());

    auto add = [&](const GSTSequence& s) {
        if (d.index_.emplace(s.gates, d.sequences.size()).second) d.sequences.push_back(s);
    };
    auto sandwich = [&](int i, const GateString& middle, int j) {
        GateString s = d.fiducials[static_cast<std::size_t>(i)];
        s.insert(s.end(), middle.begin(), middle.end());
        const auto& m = d.fiducials[static_cast<std::size_t>(j)];
        s.insert(s.end(), m.begin(), m.end());
        return s;
    };

    for (int i = 0; i < nf; ++i)
        for (int j = 0; j < nf; ++j) add({sandwich(i, {}, j), i, -1, 0, j, 1});
    for (int g = 0; g < static_cast<int>(d.labels.size()); ++g)
        for (int i = 0; i < nf; ++i)
            for (int j = 0; j < nf; ++j) add({sandwich(i, {g}, j), i, -1, 1, j, 1});
    for (int L : d.max_lengths) {
        for (int k = 0; k < static_cast<int>(d.germs.size()); ++k) {
            const GateString& germ = d.germs[static_cast<std::size_t>(k)];
            const int p = L / static_cast<int>(germ.size());
            if (p == 0) continue;
            GateString body;
            for (int r = 0; r < p; ++r) body.insert(body.end(), germ.begin(), germ.end());
            for (int i = 0; i < nf; ++i)
                for (int j = 0; j < nf; ++j) add({sandwich(i, body, j), i, k, p, j, L});
        }
    }
    return d;
}

GSTDesign standard_design() {
    const std::vector<std::string> labels = {"Gi", "Gx", "Gy"};
    return build_design(kStandardDesignVersion, labels, encode_all(labels, kStandardFiducials),
                        encode_all(labels, kStandardGerms), kMaxLengths);
}

std::vector<std::vector<std::string>> extended_germ_words() {
    std::vector<std::vector<std::string>> germs = kStandardGerms;
    for (const auto& g : kStandardGerms) {
        std::vector<std::string> image;
        for (const auto& l : g) image.push_back(negate(l));
        if (image != g) germs.push_back(image);
    }

    const std::vector<std::string> alphabet = {"Gx", "Gmx", "Gy", "Gmy", "Gi"};
    std::set<std::vector<int>> seen;
    for (const auto& g : germs) seen.insert(least_rotation(encode(alphabet, g)));

    const std::size_t compound_target = 39 - germs.size();
    std::size_t added = 0;
    for (std::size_t len = 2; len <= 6 && added < compound_target; ++len) {
        std::vector<int> w(len, 0);
        while (added < compound_target) {
            bool positive = false, negative = false;
            for (int c : w) {
                positive = positive || c == 0 || c == 2;
                negative = negative || c == 1 || c == 3;
            }
            if (positive && negative && is_primitive(w) && least_rotation(w) == w && !seen.count(w)) {
                seen.insert(w);
                std::vector<std::string> word;
                for (int c : w) word.push_back(alphabet[static_cast<std::size_t>(c)]);
                germs.push_back(word);
                ++added;
            }
            // next word in lexicographic order
            std::size_t pos = len;
            while (pos > 0 && w[pos - 1] == static_cast<int>(alphabet.size()) - 1) w[--pos] = 0;
            if (pos == 0) break;
            ++w[pos - 1];
        }
    }
    return germs;
}

GSTDesign extended_design() {
    const std::vector<std::string> labels = {"Gi", "Gx", "Gy", "Gmx", "Gmy"};
    return build_design(kExtendedDesignVersion, labels, encode_all(labels, kStandardFiducials),
                        encode_all(labels, extended_germ_words()), kMaxLengths);
}

nlohmann::json germ_catalog_json(const GSTDesign& d) {
    std::vector<std::string> germs;
    for (const auto& g : d.germs) germs.push_back(d.format(g));
    return {{"version", d.version},
            {"labels", d.labels},
            {"rule",
             "standard germs; their sign-inverted images; compound germs over (Gx, Gmx, Gy, Gmy, Gi) in "
             "length-then-lexicographic order that mix signs, are primitive and are least rotations"},
            {"germs", germs}};
}

nlohmann::json to_json(const GSTDesign& d) {
    auto strings = [&](const std::vector<GateString>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& s : v) a.push_back(d.format(s));
        return a;
    };
    nlohmann::json seqs = nlohmann::json::array();
    for (const auto& s : d.sequences) seqs.push_back(d.format(s.gates));
    return {{"version", d.version},     {"labels", d.labels},
            {"fiducials", strings(d.fiducials)}, {"germs", strings(d.germs)},
            {"max_lengths", d.max_lengths}, {"sequences", seqs}};
}

GSTDesign design_from_json(const nlohmann::json& j) {
    GSTDesign proto;
    proto.labels = j.at("labels").get<std::vector<std::string>>();
    std::vector<GateString> fids, germs;
    for (const auto& s : j.at("fiducials")) fids.push_back(proto.parse(s.get<std::string>()));
    for (const auto& s : j.at("germs")) germs.push_back(proto.parse(s.get<std::string>()));
    GSTDesign d = build_design(j.at("version").get<std::string>(), proto.labels, fids, germs,
                               j.at("max_lengths").get<std::vector<int>>());
    if (j.contains("sequences") && j.at("sequences").size() != d.sequences.size()) {
        throw std::invalid_argument("design file lists " + std::to_string(j.at("sequences").size()) +
                                    " sequences but its rule generates " + std::to_string(d.sequences.size()));
    }
    return d;
}

}  // namespace qcvv::gst
