#pragma once

// Prediction-based detector combination.
//
// For a group of images (typically a stereo or registration pair) the start
// detector runs first. If its coverage reaches the area/perimeter threshold on
// every image, it is used alone. Otherwise complementary categories are tried in
// knowledge-base preference order: one detector per category is combined with the
// start detector and the mutual coverage is checked on every image. The first
// combination that passes everywhere is accepted. When none does, the tried
// combination with the largest minimum per-image mutual coverage is used.

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kpcov/dataset.hpp"
#include "kpcov/errors.hpp"
#include "kpcov/format.hpp"
#include "kpcov/knowledge_base.hpp"
#include "kpcov/metrics.hpp"
#include "kpcov/parallel.hpp"
#include "kpcov/stats.hpp"
#include "kpcov/types.hpp"

namespace kpcov {

/// Returns the detector's keypoints for an image, or nullopt when it has none.
/// Must return the same set for repeated calls with the same image.
using KeyPointProvider = std::function<std::optional<KeyPointSet>(const std::string& image_id)>;

/// Named providers in registration order. The order decides which detector
/// represents a category when several are available.
class DetectorRegistry {
public:
    void add(std::string name, KeyPointProvider provider) {
        for (const auto& [n, p] : entries_)
            if (n == name) throw std::invalid_argument("detector '" + name + "' registered twice");
        entries_.emplace_back(std::move(name), std::move(provider));
    }

    bool contains(const std::string& name) const { return find(name) != nullptr; }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& [n, p] : entries_) out.push_back(n);
        return out;
    }

    std::optional<KeyPointSet> get(const std::string& name, const std::string& image_id) const {
        const auto* p = find(name);
        if (!p) return std::nullopt;
        return (*p)(image_id);
    }

    /// Each detector reads its files through the dataset index; absent files are unavailable.
    static DetectorRegistry from_index(const DatasetIndex& index, const std::vector<std::string>& order) {
        DetectorRegistry reg;
        for (const auto& name : order) {
            reg.add(name, [&index, name](const std::string& image) -> std::optional<KeyPointSet> {
                const auto* e = index.find(image, name);
                if (!e) return std::nullopt;
                return e->load();
            });
        }
        return reg;
    }

private:
    const KeyPointProvider* find(const std::string& name) const {
        for (const auto& [n, p] : entries_)
            if (n == name) return &p;
        return nullptr;
    }

    std::vector<std::pair<std::string, KeyPointProvider>> entries_;
};

enum class Mode { single = 0, multi = 1 };

struct TraceStep {
    std::size_t step = 0;
    std::vector<std::string> detectors;
    /// Coverage (step 0) or mutual coverage, one value per image.
    std::vector<double> values;
};

struct FrameworkDecision {
    std::string pair_id;
    std::vector<std::string> image_ids;
    std::vector<double> thresholds;
    Mode mode = Mode::single;
    bool fallback = false;
    /// Detectors finally used, start detector first.
    std::vector<std::string> detectors;
    std::vector<TraceStep> trace;
    /// Index into `trace` of the accepted combination.
    std::size_t chosen_step = 0;

    const std::vector<double>& final_values() const { return trace.at(chosen_step).values; }
};

struct FrameworkOptions {
    /// Duplicate-merge radius passed to the coverage computation.
    double epsilon = 0.0;
    /// Detector to use for a category instead of the first available one in registry order.
    std::map<DetectorCategory, std::string> category_choice;
};

namespace detail {

/// Undefined coverage (fewer than two distinct points) counts as 0 so the image fails.
inline double coverage_or_zero(std::span<const KeyPointSet> sets, double epsilon) {
    try {
        return mutual_coverage(sets, epsilon);
    } catch (const InsufficientPoints&) {
        return 0.0;
    }
}

inline bool all_pass(const std::vector<double>& values, const std::vector<double>& thresholds) {
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!evaluate_criterion(values[i], thresholds[i])) return false;
    return true;
}

class SetCache {
public:
    explicit SetCache(const DetectorRegistry& reg) : reg_(reg) {}

    const std::optional<KeyPointSet>& get(const std::string& detector, const std::string& image) {
        auto key = std::make_pair(detector, image);
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            auto set = reg_.get(detector, image);
            if (set) set->image_id = image;
            it = cache_.emplace(std::move(key), std::move(set)).first;
        }
        return it->second;
    }

    bool available(const std::string& detector, const std::vector<std::string>& images) {
        for (const auto& im : images)
            if (!get(detector, im)) return false;
        return true;
    }

private:
    const DetectorRegistry& reg_;
    std::map<std::pair<std::string, std::string>, std::optional<KeyPointSet>> cache_;
};

}  // namespace detail

inline FrameworkDecision decide(const std::string& pair_id, const std::vector<std::string>& images,
                                const std::string& start_detector, const DetectorRegistry& registry,
                                const KnowledgeBase& kb, const std::map<std::string, ImageDims>& dims,
                                const FrameworkOptions& options = {}) {
    if (images.empty()) throw std::invalid_argument("decide needs at least one image");
    if (!registry.contains(start_detector)) throw Error("start detector '" + start_detector + "' is not registered");

    FrameworkDecision d;
    d.pair_id = pair_id;
    d.image_ids = images;
    for (const auto& im : images) {
        auto it = dims.find(im);
        if (it == dims.end()) throw Error("no dimensions for image '" + im + "'");
        d.thresholds.push_back(area_perimeter_threshold(it->second));
    }

    detail::SetCache cache(registry);
    auto evaluate = [&](const std::vector<std::string>& detectors) {
        TraceStep step{d.trace.size(), detectors, {}};
        for (const auto& im : images) {
            std::vector<KeyPointSet> sets;
            for (const auto& det : detectors) sets.push_back(*cache.get(det, im));
            step.values.push_back(detail::coverage_or_zero(sets, options.epsilon));
        }
        d.trace.push_back(std::move(step));
        return detail::all_pass(d.trace.back().values, d.thresholds);
    };

    if (!cache.available(start_detector, images)) {
        throw Error("start detector '" + start_detector + "' has no keypoints for every image of '" + pair_id + "'");
    }
    if (evaluate({start_detector})) {
        d.mode = Mode::single;
        d.detectors = {start_detector};
        return d;
    }

    const auto start_category = kb.category_of(start_detector);
    if (!start_category) throw KbError("start detector '" + start_detector + "' has no category in the knowledge base");

    d.mode = Mode::multi;
    const auto registered = registry.names();
    for (DetectorCategory c : kb.preferences(*start_category)) {
        std::optional<std::string> pick;
        if (auto o = options.category_choice.find(c); o != options.category_choice.end()) {
            if (o->second != start_detector && kb.category_of(o->second) == c && registry.contains(o->second) &&
                cache.available(o->second, images)) {
                pick = o->second;
            }
        }
        for (std::size_t i = 0; !pick && i < registered.size(); ++i) {
            const auto& name = registered[i];
            if (name != start_detector && kb.category_of(name) == c && cache.available(name, images)) pick = name;
        }
        if (!pick) continue;
        if (evaluate({start_detector, *pick})) {
            d.chosen_step = d.trace.size() - 1;
            d.detectors = d.trace.back().detectors;
            return d;
        }
    }

    if (d.trace.size() == 1) {
        throw NoCandidates("no complementary detector available for '" + start_detector + "' on '" + pair_id + "'");
    }

    // Nothing passed: keep the tried pair whose worst image is best; earlier trials win ties.
    auto worst = [](const TraceStep& s) { return *std::min_element(s.values.begin(), s.values.end()); };
    std::size_t best = 1;
    for (std::size_t s = 2; s < d.trace.size(); ++s)
        if (worst(d.trace[s]) > worst(d.trace[best])) best = s;
    d.fallback = true;
    d.chosen_step = best;
    d.detectors = d.trace[best].detectors;
    return d;
}

struct BatchOutcome {
    std::string pair_id;
    std::optional<FrameworkDecision> decision;
    std::string error;
};

/// One decision per pair, in input order. A failing pair records its error and the batch continues.
inline std::vector<BatchOutcome> run_batch(const std::vector<ImagePair>& pairs, const std::string& start_detector,
                                           const DetectorRegistry& registry, const KnowledgeBase& kb,
                                           const std::map<std::string, ImageDims>& dims,
                                           const FrameworkOptions& options = {}, unsigned workers = 1) {
    std::vector<BatchOutcome> out(pairs.size());
    parallel_for(pairs.size(), workers, [&](std::size_t i) {
        out[i].pair_id = pairs[i].id;
        try {
            out[i].decision = decide(pairs[i].id, pairs[i].images, start_detector, registry, kb, dims, options);
        } catch (const std::exception& e) {
            out[i].error = e.what();
        }
    });
    return out;
}

inline constexpr std::string_view kTraceHeader = "pair_id,image_id,step,detectors,value,threshold,mode,fallback";

/// Plot-ready trace. Every tried step gives one row per image; the accepted
/// combination is repeated with step `final`. Failed pairs are omitted.
inline std::string trace_csv(std::span<const BatchOutcome> outcomes, bool full_precision = false) {
    std::string out(kTraceHeader);
    out += '\n';
    for (const auto& o : outcomes) {
        if (!o.decision) continue;
        const auto& d = *o.decision;
        auto emit = [&](const TraceStep& s, const std::string& step) {
            for (std::size_t i = 0; i < d.image_ids.size(); ++i) {
                out += csv_field(d.pair_id) + ',' + csv_field(d.image_ids[i]) + ',' + step + ',' +
                       csv_field(join(s.detectors, "+")) + ',' + format_number(s.values[i], full_precision) + ',' +
                       format_number(d.thresholds[i], full_precision) + ',' +
                       std::to_string(static_cast<int>(d.mode)) + ',' + (d.fallback ? "1" : "0") + '\n';
            }
        };
        for (const auto& s : d.trace) emit(s, std::to_string(s.step));
        emit(d.trace[d.chosen_step], "final");
    }
    return out;
}

}  // namespace kpcov
