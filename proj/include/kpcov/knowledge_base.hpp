#pragma once

// Detector taxonomy and complementarity preferences.
//
// File schema (JSON):
//
//   {
//     "version": 1,
//     "categories": ["laplacian-based", "hessian-matrix-based", ...],
//     "detectors": [ {"name": "SIFT", "category": "laplacian-based"}, ... ],
//     "preferences": { "laplacian-based": ["corner", "segmentation-based", ...], ... },
//     "triplets": [ {"group": "all", "rank": 1, "categories": ["entropy-based", "spiral", "segmentation-based"]} ]
//   }
//
// "categories" may list any subset of the seven known categories. A category's
// preference list orders the other categories from most to least complementary;
// it never names the category itself and never repeats an entry. "triplets" is
// optional reference data and does not drive any decision.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "kpcov/errors.hpp"

namespace kpcov {

enum class DetectorCategory {
    laplacian_based,
    hessian_matrix_based,
    hybrid,
    corner,
    spiral,
    entropy_based,
    segmentation_based,
};

inline constexpr std::array<std::pair<DetectorCategory, std::string_view>, 7> kCategoryNames{{
    {DetectorCategory::laplacian_based, "laplacian-based"},
    {DetectorCategory::hessian_matrix_based, "hessian-matrix-based"},
    {DetectorCategory::hybrid, "hybrid"},
    {DetectorCategory::corner, "corner"},
    {DetectorCategory::spiral, "spiral"},
    {DetectorCategory::entropy_based, "entropy-based"},
    {DetectorCategory::segmentation_based, "segmentation-based"},
}};

inline std::string_view to_string(DetectorCategory c) {
    for (const auto& [cat, name] : kCategoryNames)
        if (cat == c) return name;
    return "?";
}

inline std::optional<DetectorCategory> category_from_string(std::string_view s) {
    for (const auto& [cat, name] : kCategoryNames)
        if (name == s) return cat;
    return std::nullopt;
}

struct TripletPattern {
    std::string group;
    int rank = 0;
    std::array<DetectorCategory, 3> categories{};
};

class KnowledgeBase {
public:
    const std::vector<DetectorCategory>& categories() const noexcept { return categories_; }

    /// Detector names in file order.
    const std::vector<std::string>& detectors() const noexcept { return detector_order_; }

    std::optional<DetectorCategory> category_of(const std::string& detector) const {
        auto it = detector_category_.find(detector);
        if (it == detector_category_.end()) return std::nullopt;
        return it->second;
    }

    /// Complementary categories for `c`, best first. Empty when none are configured.
    const std::vector<DetectorCategory>& preferences(DetectorCategory c) const {
        static const std::vector<DetectorCategory> none;
        auto it = preferences_.find(c);
        return it == preferences_.end() ? none : it->second;
    }

    const std::vector<TripletPattern>& triplets() const noexcept { return triplets_; }

    std::vector<std::string> detectors_in(DetectorCategory c) const {
        std::vector<std::string> out;
        for (const auto& d : detector_order_)
            if (detector_category_.at(d) == c) out.push_back(d);
        return out;
    }

    friend KnowledgeBase load_knowledge_base(std::string_view text);

private:
    std::vector<DetectorCategory> categories_;
    std::vector<std::string> detector_order_;
    std::map<std::string, DetectorCategory> detector_category_;
    std::map<DetectorCategory, std::vector<DetectorCategory>> preferences_;
    std::vector<TripletPattern> triplets_;
};

inline constexpr int kKnowledgeBaseVersion = 1;

/// Parses and validates a knowledge base file. Throws KbError on any violation.
inline KnowledgeBase load_knowledge_base(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw KbError(std::string("knowledge base is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw KbError("knowledge base must be a JSON object");
    if (j.contains("version") && j.at("version") != kKnowledgeBaseVersion) {
        throw KbError("unsupported knowledge base version " + j.at("version").dump());
    }
    for (const char* key : {"categories", "detectors", "preferences"}) {
        if (!j.contains(key)) throw KbError(std::string("knowledge base is missing '") + key + "'");
    }

    KnowledgeBase kb;
    std::set<DetectorCategory> declared;

    auto category = [&](const nlohmann::json& v, const std::string& where) {
        if (!v.is_string()) throw KbError(where + ": category must be a string");
        auto c = category_from_string(v.get<std::string>());
        if (!c) throw KbError(where + ": unknown category '" + v.get<std::string>() + "'");
        if (!declared.empty() && !declared.contains(*c)) {
            throw KbError(where + ": category '" + v.get<std::string>() + "' is not declared in 'categories'");
        }
        return *c;
    };

    if (!j.at("categories").is_array()) throw KbError("'categories' must be an array");
    for (const auto& v : j.at("categories")) {
        auto c = v.is_string() ? category_from_string(v.get<std::string>()) : std::nullopt;
        if (!c) throw KbError("categories: unknown category " + v.dump());
        if (std::find(kb.categories_.begin(), kb.categories_.end(), *c) != kb.categories_.end()) {
            throw KbError("categories: " + v.dump() + " listed twice");
        }
        kb.categories_.push_back(*c);
    }
    if (kb.categories_.empty()) throw KbError("'categories' is empty");
    declared.insert(kb.categories_.begin(), kb.categories_.end());

    if (!j.at("detectors").is_array()) throw KbError("'detectors' must be an array");
    for (const auto& d : j.at("detectors")) {
        if (!d.is_object() || !d.contains("name") || !d.at("name").is_string() || !d.contains("category")) {
            throw KbError("detectors: each entry needs 'name' and 'category'");
        }
        const auto name = d.at("name").get<std::string>();
        const auto c = category(d.at("category"), "detector '" + name + "'");
        if (!kb.detector_category_.emplace(name, c).second) {
            throw KbError("detector '" + name + "' is assigned more than once");
        }
        kb.detector_order_.push_back(name);
    }

    if (!j.at("preferences").is_object()) throw KbError("'preferences' must be an object");
    for (const auto& [key, list] : j.at("preferences").items()) {
        const auto owner = category(nlohmann::json(key), "preferences");
        if (!list.is_array()) throw KbError("preferences['" + key + "'] must be an array");
        std::vector<DetectorCategory> prefs;
        for (const auto& v : list) {
            const auto c = category(v, "preferences['" + key + "']");
            if (c == owner) throw KbError("preferences['" + key + "'] lists the category itself");
            if (std::find(prefs.begin(), prefs.end(), c) != prefs.end()) {
                throw KbError("preferences['" + key + "'] lists '" + v.get<std::string>() + "' twice");
            }
            prefs.push_back(c);
        }
        kb.preferences_[owner] = std::move(prefs);
    }

    if (j.contains("triplets")) {
        if (!j.at("triplets").is_array()) throw KbError("'triplets' must be an array");
        for (const auto& t : j.at("triplets")) {
            if (!t.is_object() || !t.contains("categories") || !t.at("categories").is_array() ||
                t.at("categories").size() != 3) {
                throw KbError("triplets: each entry needs exactly 3 categories");
            }
            TripletPattern p;
            p.group = t.value("group", std::string{});
            p.rank = t.value("rank", 0);
            for (std::size_t i = 0; i < 3; ++i) p.categories[i] = category(t.at("categories")[i], "triplets");
            std::set<DetectorCategory> distinct(p.categories.begin(), p.categories.end());
            if (distinct.size() != 3) throw KbError("triplets: categories must be distinct");
            kb.triplets_.push_back(p);
        }
    }
    return kb;
}

/// Default knowledge base: the seven-category taxonomy of eleven detectors, pair
/// preferences read from mutual-coverage rankings, and the ranked category triplets.
/// Same content as data/kb-default.json.
inline constexpr std::string_view kDefaultKnowledgeBase = R"json({
  "version": 1,
  "categories": [
    "laplacian-based", "hessian-matrix-based", "hybrid", "corner",
    "spiral", "entropy-based", "segmentation-based"
  ],
  "detectors": [
    {"name": "SIFT", "category": "laplacian-based"},
    {"name": "SURF", "category": "hessian-matrix-based"},
    {"name": "Har-Lap", "category": "hybrid"},
    {"name": "Hes-Lap", "category": "hybrid"},
    {"name": "Har-Aff", "category": "hybrid"},
    {"name": "Hes-Aff", "category": "hybrid"},
    {"name": "EBR", "category": "corner"},
    {"name": "SFOP", "category": "spiral"},
    {"name": "Salient", "category": "entropy-based"},
    {"name": "MSER", "category": "segmentation-based"},
    {"name": "IBR", "category": "segmentation-based"}
  ],
  "preferences": {
    "laplacian-based":      ["corner", "segmentation-based", "spiral", "entropy-based", "hybrid", "hessian-matrix-based"],
    "hessian-matrix-based": ["spiral", "entropy-based", "corner", "segmentation-based", "hybrid", "laplacian-based"],
    "hybrid":               ["entropy-based", "spiral", "segmentation-based", "corner", "hessian-matrix-based", "laplacian-based"],
    "corner":               ["entropy-based", "spiral", "hessian-matrix-based", "laplacian-based", "segmentation-based", "hybrid"],
    "spiral":               ["entropy-based", "segmentation-based", "hessian-matrix-based", "corner", "hybrid", "laplacian-based"],
    "entropy-based":        ["spiral", "segmentation-based", "corner", "hybrid", "hessian-matrix-based", "laplacian-based"],
    "segmentation-based":   ["entropy-based", "spiral", "hessian-matrix-based", "laplacian-based", "corner", "hybrid"]
  },
  "triplets": [
    {"group": "all", "rank": 1, "categories": ["entropy-based", "spiral", "segmentation-based"]},
    {"group": "all", "rank": 2, "categories": ["entropy-based", "spiral", "corner"]},
    {"group": "all", "rank": 3, "categories": ["entropy-based", "spiral", "hybrid"]},
    {"group": "all", "rank": 4, "categories": ["entropy-based", "corner", "segmentation-based"]},
    {"group": "excluding-entropy", "rank": 1, "categories": ["spiral", "hessian-matrix-based", "segmentation-based"]},
    {"group": "excluding-entropy", "rank": 2, "categories": ["spiral", "corner", "segmentation-based"]},
    {"group": "excluding-entropy", "rank": 3, "categories": ["spiral", "hessian-matrix-based", "corner"]},
    {"group": "excluding-entropy", "rank": 4, "categories": ["spiral", "hessian-matrix-based", "hybrid"]}
  ]
}
)json";

inline KnowledgeBase default_knowledge_base() { return load_knowledge_base(kDefaultKnowledgeBase); }

}  // namespace kpcov
