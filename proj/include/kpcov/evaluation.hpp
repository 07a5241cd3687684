#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kpcov/dataset.hpp"
#include "kpcov/format.hpp"
#include "kpcov/metrics.hpp"
#include "kpcov/parallel.hpp"
#include "kpcov/stats.hpp"

namespace kpcov {

struct EntryFailure {
    std::string image_id;
    std::string detector;
    std::string message;
};

struct DetectorSummary {
    std::string detector;
    std::size_t images = 0;
    std::size_t passed = 0;
    /// Present with two or more records.
    std::optional<MeanCI> coverage;
};

struct PairComparison {
    std::string left;
    std::string right;
    McNemarCounts counts;
    /// Absent when the two detectors never disagree.
    std::optional<McNemarResult> result;
};

struct EvaluationReport {
    std::vector<std::string> detectors;
    /// Image-major, manifest order.
    std::vector<EvaluationRecord> records;
    std::vector<double> timings_ms;
    std::vector<EntryFailure> failures;
    std::vector<Absence> absences;
    std::vector<DetectorSummary> summaries;
    /// Every unordered detector pair, upper triangle in detector order.
    std::vector<PairComparison> comparisons;
};

/// Compares two detectors over the images both were evaluated on.
inline PairComparison compare_detectors(const std::vector<EvaluationRecord>& records, const std::string& left,
                                        const std::string& right) {
    std::set<std::string> l_images, r_images;
    for (const auto& r : records) {
        if (r.detector == left) l_images.insert(r.image_id);
        if (r.detector == right) r_images.insert(r.image_id);
    }
    std::vector<EvaluationRecord> l, r;
    for (const auto& rec : records) {
        const bool common = l_images.contains(rec.image_id) && r_images.contains(rec.image_id);
        if (!common) continue;
        if (rec.detector == left) l.push_back(rec);
        if (rec.detector == right) r.push_back(rec);
    }
    PairComparison pc{left, right, build_mcnemar_counts(l, r), std::nullopt};
    if (pc.counts.discordant() > 0) pc.result = mcnemar(pc.counts);
    return pc;
}

/// Coverage and pass/fail for every (image, detector) file in the index. Entries
/// that fail to load or have fewer than two distinct points are reported as failures.
/// `detectors` restricts and orders the detectors; empty means all, in index order.
inline EvaluationReport evaluate_dataset(const DatasetIndex& index, std::vector<std::string> detectors = {},
                                         double epsilon = 0.0, unsigned workers = 1) {
    if (detectors.empty()) {
        for (const auto& e : index.entries)
            if (std::find(detectors.begin(), detectors.end(), e.detector) == detectors.end())
                detectors.push_back(e.detector);
        for (const auto& a : index.absences)
            if (std::find(detectors.begin(), detectors.end(), a.detector) == detectors.end())
                detectors.push_back(a.detector);
    }
    const std::set<std::string> wanted(detectors.begin(), detectors.end());

    std::vector<const DatasetEntry*> todo;
    for (const auto& e : index.entries)
        if (wanted.contains(e.detector)) todo.push_back(&e);

    struct Slot {
        std::optional<EvaluationRecord> record;
        double ms = 0.0;
        std::string error;
    };
    std::vector<Slot> slots(todo.size());
    parallel_for(todo.size(), workers, [&](std::size_t i) {
        const auto& e = *todo[i];
        try {
            const auto set = e.load();
            const auto t0 = std::chrono::steady_clock::now();
            const double c = coverage(set, epsilon);
            slots[i].ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            slots[i].record = EvaluationRecord::make(e.image_id, e.detector, c, e.dims);
        } catch (const std::exception& ex) {
            slots[i].error = ex.what();
        }
    });

    EvaluationReport rep;
    rep.detectors = detectors;
    for (std::size_t i = 0; i < todo.size(); ++i) {
        if (slots[i].record) {
            rep.records.push_back(*slots[i].record);
            rep.timings_ms.push_back(slots[i].ms);
        } else {
            rep.failures.push_back({todo[i]->image_id, todo[i]->detector, slots[i].error});
        }
    }
    for (const auto& a : index.absences)
        if (wanted.contains(a.detector)) rep.absences.push_back(a);

    for (const auto& det : detectors) {
        DetectorSummary s{det, 0, 0, std::nullopt};
        std::vector<double> values;
        for (const auto& r : rep.records) {
            if (r.detector != det) continue;
            ++s.images;
            if (r.passed) ++s.passed;
            values.push_back(r.coverage);
        }
        if (values.size() >= 2) s.coverage = mean_ci(values);
        rep.summaries.push_back(std::move(s));
    }

    for (std::size_t i = 0; i < detectors.size(); ++i)
        for (std::size_t j = i + 1; j < detectors.size(); ++j)
            rep.comparisons.push_back(compare_detectors(rep.records, detectors[i], detectors[j]));
    return rep;
}

/// Signed Z matrix: row detector vs column detector, positive when the row detector
/// passes more often. Upper triangle only; other cells are "-", undefined cells "n/a".
/// Unreliable statistics (fewer than 30 discordant images) carry a trailing '*'.
inline std::string mcnemar_matrix_csv(const EvaluationReport& rep, bool full_precision = false) {
    std::string out = "detector";
    for (const auto& d : rep.detectors) out += ',' + csv_field(d);
    out += '\n';
    for (std::size_t i = 0; i < rep.detectors.size(); ++i) {
        out += csv_field(rep.detectors[i]);
        for (std::size_t j = 0; j < rep.detectors.size(); ++j) {
            out += ',';
            if (j <= i) {
                out += '-';
                continue;
            }
            for (const auto& pc : rep.comparisons) {
                if (pc.left != rep.detectors[i] || pc.right != rep.detectors[j]) continue;
                if (!pc.result) out += "n/a";
                else out += format_number(pc.result->signed_z, full_precision) + (pc.result->reliable ? "" : "*");
            }
        }
        out += '\n';
    }
    return out;
}

inline std::string records_csv(const EvaluationReport& rep, bool full_precision = false) {
    std::string out = "image_id,detector,coverage,threshold,passed\n";
    for (const auto& r : rep.records) {
        out += csv_field(r.image_id) + ',' + csv_field(r.detector) + ',' + format_number(r.coverage, full_precision) +
               ',' + format_number(r.threshold, full_precision) + ',' + (r.passed ? "1" : "0") + '\n';
    }
    return out;
}

inline std::string summary_csv(const EvaluationReport& rep, bool full_precision = false) {
    std::string out = "detector,images,passed,mean,ci_low,ci_high\n";
    for (const auto& s : rep.summaries) {
        out += csv_field(s.detector) + ',' + std::to_string(s.images) + ',' + std::to_string(s.passed);
        if (s.coverage) {
            out += ',' + format_number(s.coverage->mean, full_precision) + ',' +
                   format_number(s.coverage->low, full_precision) + ',' +
                   format_number(s.coverage->high, full_precision);
        } else {
            out += ",,,";
        }
        out += '\n';
    }
    return out;
}

inline std::string comparisons_csv(const EvaluationReport& rep, bool full_precision = false) {
    std::string out = "left,right,n_ss,n_sf,n_fs,n_ff,z,signed_z,reliable\n";
    for (const auto& pc : rep.comparisons) {
        out += csv_field(pc.left) + ',' + csv_field(pc.right) + ',' + std::to_string(pc.counts.n_ss) + ',' +
               std::to_string(pc.counts.n_sf) + ',' + std::to_string(pc.counts.n_fs) + ',' +
               std::to_string(pc.counts.n_ff) + ',';
        if (pc.result) {
            out += format_number(pc.result->z, full_precision) + ',' +
                   format_number(pc.result->signed_z, full_precision) + ',' + (pc.result->reliable ? "1" : "0");
        } else {
            out += ",,0";
        }
        out += '\n';
    }
    return out;
}

}  // namespace kpcov
