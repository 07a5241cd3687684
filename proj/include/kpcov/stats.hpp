#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "kpcov/errors.hpp"
#include "kpcov/types.hpp"

namespace kpcov {

/// Success threshold for an image: area over perimeter, W*H / (2(W+H)), in pixels.
inline double area_perimeter_threshold(const ImageDims& dims) noexcept {
    return dims.area() / dims.perimeter();
}

/// A detector succeeds on an image when its coverage reaches the threshold (equality passes).
inline bool evaluate_criterion(double coverage, double threshold) noexcept { return coverage >= threshold; }

inline bool evaluate_criterion(double coverage, const ImageDims& dims) noexcept {
    return evaluate_criterion(coverage, area_perimeter_threshold(dims));
}

struct EvaluationRecord {
    std::string image_id;
    std::string detector;
    double coverage = 0.0;
    double threshold = 0.0;
    bool passed = false;

    static EvaluationRecord make(std::string image_id, std::string detector, double coverage,
                                 const ImageDims& dims) {
        const double t = area_perimeter_threshold(dims);
        return {std::move(image_id), std::move(detector), coverage, t, evaluate_criterion(coverage, t)};
    }
};

/// Paired outcome counts; the first letter is the left detector (s = success, f = failure).
struct McNemarCounts {
    std::uint64_t n_ss = 0;
    std::uint64_t n_sf = 0;
    std::uint64_t n_fs = 0;
    std::uint64_t n_ff = 0;

    std::uint64_t total() const noexcept { return n_ss + n_sf + n_fs + n_ff; }
    std::uint64_t discordant() const noexcept { return n_sf + n_fs; }

    friend bool operator==(const McNemarCounts&, const McNemarCounts&) = default;
};

struct McNemarResult {
    /// Continuity-corrected statistic, clamped at zero.
    double z = 0.0;
    /// `z` carrying the sign of n_sf - n_fs: positive means the left detector did better.
    double signed_z = 0.0;
    /// At least 30 discordant cases.
    bool reliable = false;
};

inline constexpr std::uint64_t kMcNemarReliableDiscordant = 30;

/// Pairs two detectors' records image by image. Both lists must cover the same images, once each.
inline McNemarCounts build_mcnemar_counts(std::span<const EvaluationRecord> left,
                                          std::span<const EvaluationRecord> right) {
    auto index = [](std::span<const EvaluationRecord> recs, const char* side) {
        std::map<std::string, bool> out;
        for (const auto& r : recs) {
            if (!out.emplace(r.image_id, r.passed).second) {
                throw DatasetMismatch(std::string(side) + " records list image '" + r.image_id + "' twice");
            }
        }
        return out;
    };
    const auto l = index(left, "left");
    const auto r = index(right, "right");
    if (l.size() != r.size()) {
        throw DatasetMismatch("left covers " + std::to_string(l.size()) + " images, right covers " +
                              std::to_string(r.size()));
    }
    McNemarCounts c;
    for (const auto& [image, lpass] : l) {
        auto it = r.find(image);
        if (it == r.end()) throw DatasetMismatch("image '" + image + "' missing from right records");
        const bool rpass = it->second;
        if (lpass && rpass) ++c.n_ss;
        else if (lpass) ++c.n_sf;
        else if (rpass) ++c.n_fs;
        else ++c.n_ff;
    }
    return c;
}

/// McNemar's test with continuity correction: (|n_sf - n_fs| - 1) / sqrt(n_sf + n_fs).
inline McNemarResult mcnemar(const McNemarCounts& c) {
    const std::uint64_t disc = c.discordant();
    if (disc == 0) throw DegenerateCounts("McNemar statistic undefined: no discordant pairs");
    const double sf = static_cast<double>(c.n_sf);
    const double fs = static_cast<double>(c.n_fs);
    const double z = std::max(0.0, (std::abs(sf - fs) - 1.0) / std::sqrt(sf + fs));
    McNemarResult res;
    res.z = z;
    res.signed_z = c.n_sf < c.n_fs ? -z : z;
    res.reliable = disc >= kMcNemarReliableDiscordant;
    return res;
}

/// Two-sided standard normal critical value for a confidence level in (0, 1).
inline double normal_critical_value(double level) {
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must lie in (0, 1)");
    // Solve erfc(z / sqrt2) = 1 - level by bisection; erfc is decreasing.
    const double target = 1.0 - level;
    double lo = 0.0, hi = 40.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (std::erfc(mid / std::sqrt(2.0)) > target) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct MeanCI {
    double mean = 0.0;
    double low = 0.0;
    double high = 0.0;
};

/// Normal-approximation interval: mean +/- z * s / sqrt(n), s the sample standard deviation.
inline MeanCI mean_ci(std::span<const double> values, double level = 0.95) {
    const std::size_t n = values.size();
    if (n < 2) throw InsufficientData("confidence interval needs at least 2 values, got " + std::to_string(n));
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double s = std::sqrt(ss / static_cast<double>(n - 1));
    const double half = normal_critical_value(level) * s / std::sqrt(static_cast<double>(n));
    return {mean, mean - half, mean + half};
}

/// Sample Pearson correlation coefficient.
inline double pearson_r(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw DegenerateInput("series lengths differ: " + std::to_string(xs.size()) + " vs " +
                              std::to_string(ys.size()));
    }
    const std::size_t n = xs.size();
    if (n < 2) throw DegenerateInput("correlation needs at least 2 pairs");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw DegenerateInput("correlation undefined for a constant series");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace kpcov
