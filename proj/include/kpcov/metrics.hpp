#pragma once

// Coverage metrics over keypoint sets.
//
// Coverage is the harmonic mean over reference points of the harmonic mean of
// distances from that reference to every other point. It is a length in
// pixels; clustered sets score low, well spread sets score high.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <ranges>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kpcov/errors.hpp"
#include "kpcov/types.hpp"

namespace kpcov {

namespace detail {

inline std::uint64_t bits_of(double v) noexcept {
    if (v == 0.0) v = 0.0;  // fold -0.0 onto +0.0
    std::uint64_t b;
    std::memcpy(&b, &v, sizeof b);
    return b;
}

struct LocationKey {
    std::uint64_t x, y;
    friend bool operator==(const LocationKey&, const LocationKey&) = default;
};

struct LocationKeyHash {
    std::size_t operator()(const LocationKey& k) const noexcept {
        std::uint64_t h = k.x * 0x9E3779B97F4A7C15ull;
        h ^= k.y + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

struct CellKey {
    std::int64_t cx, cy;
    friend bool operator==(const CellKey&, const CellKey&) = default;
};

struct CellKeyHash {
    std::size_t operator()(const CellKey& k) const noexcept {
        return LocationKeyHash{}(LocationKey{static_cast<std::uint64_t>(k.cx), static_cast<std::uint64_t>(k.cy)});
    }
};

/// Indices of the points that survive deduplication, in input order.
/// Two points merge when their distance is <= epsilon; epsilon 0 means exact equality.
template <std::ranges::random_access_range R>
std::vector<std::size_t> surviving_indices(const R& pts, double epsilon) {
    const std::size_t n = std::ranges::size(pts);
    std::vector<std::size_t> keep;
    keep.reserve(n);
    if (epsilon <= 0.0) {
        std::unordered_set<LocationKey, LocationKeyHash> seen;
        seen.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Point2D& p = pts[i];
            if (seen.insert(LocationKey{bits_of(p.x), bits_of(p.y)}).second) keep.push_back(i);
        }
        return keep;
    }
    // Grid with cell side epsilon: any point within epsilon lies in the 3x3 neighbourhood.
    std::unordered_map<CellKey, std::vector<std::size_t>, CellKeyHash> grid;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2D& p = pts[i];
        const auto cx = static_cast<std::int64_t>(std::floor(p.x / epsilon));
        const auto cy = static_cast<std::int64_t>(std::floor(p.y / epsilon));
        bool merged = false;
        for (std::int64_t dx = -1; dx <= 1 && !merged; ++dx) {
            for (std::int64_t dy = -1; dy <= 1 && !merged; ++dy) {
                auto it = grid.find(CellKey{cx + dx, cy + dy});
                if (it == grid.end()) continue;
                for (std::size_t j : it->second) {
                    if (distance(p, pts[j]) <= epsilon) {
                        merged = true;
                        break;
                    }
                }
            }
        }
        if (!merged) {
            grid[CellKey{cx, cy}].push_back(i);
            keep.push_back(i);
        }
    }
    return keep;
}

}  // namespace detail

/// Keeps the first keypoint at each distinct location, preserving order.
inline KeyPointSet canonicalize(const KeyPointSet& set, double epsilon = 0.0) {
    const auto pts = locations(set);
    KeyPointSet out{set.detector, set.image_id, {}};
    const auto keep = detail::surviving_indices(pts, epsilon);
    out.points.reserve(keep.size());
    for (std::size_t i : keep) out.points.push_back(set.points[i]);
    return out;
}

/// Coverage of points that are already pairwise distinct.
///
/// Accumulates, for every reference point, the sum of reciprocal distances to all
/// other points (each pair visited once and credited to both ends). Memory is O(N),
/// time O(N^2).
template <std::ranges::random_access_range R>
    requires std::same_as<std::ranges::range_value_t<R>, Point2D>
double coverage_of_distinct(const R& pts) {
    const std::size_t n = std::ranges::size(pts);
    if (n < 2) throw InsufficientPoints(n, 2);

    std::vector<double> inv_sum(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double xi = pts[i].x;
        const double yi = pts[i].y;
        double acc = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = xi - pts[j].x;
            const double dy = yi - pts[j].y;
            const double inv = 1.0 / std::sqrt(dx * dx + dy * dy);
            acc += inv;
            inv_sum[j] += inv;
        }
        inv_sum[i] += acc;
    }

    // D_i = (N-1) / inv_sum[i]; coverage = N / sum_i (1 / D_i).
    const double nm1 = static_cast<double>(n - 1);
    double sum_inv_d = 0.0;
    for (double s : inv_sum) sum_inv_d += s / nm1;
    return static_cast<double>(n) / sum_inv_d;
}

/// Coverage in pixels. Duplicate locations are removed first.
/// Throws InsufficientPoints when fewer than two distinct locations remain.
/// Locations are summed in sorted order, so the result does not depend on input order.
inline double coverage(const KeyPointSet& set, double epsilon = 0.0) {
    const auto pts = locations(set);
    const auto keep = detail::surviving_indices(pts, epsilon);
    std::vector<Point2D> distinct;
    distinct.reserve(keep.size());
    for (std::size_t i : keep) distinct.push_back(pts[i]);
    std::sort(distinct.begin(), distinct.end(),
              [](const Point2D& a, const Point2D& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    return coverage_of_distinct(distinct);
}

/// Coverage of the union of several detectors' keypoints on one image.
inline double mutual_coverage(std::span<const KeyPointSet> sets, double epsilon = 0.0) {
    if (sets.empty()) throw InsufficientPoints(0, 2);
    KeyPointSet merged{{}, sets.front().image_id, {}};
    for (const auto& s : sets) {
        if (s.image_id != merged.image_id) {
            throw ImageMismatch("mutual coverage needs one image, got '" + merged.image_id + "' and '" +
                                s.image_id + "'");
        }
        if (!merged.detector.empty()) merged.detector += '+';
        merged.detector += s.detector;
        merged.points.insert(merged.points.end(), s.points.begin(), s.points.end());
    }
    return coverage(merged, epsilon);
}

inline double mutual_coverage(std::initializer_list<KeyPointSet> sets, double epsilon = 0.0) {
    return mutual_coverage(std::span<const KeyPointSet>(sets.begin(), sets.size()), epsilon);
}

/// Convex hull by monotone chain, counter-clockwise, without collinear boundary points.
inline std::vector<Point2D> convex_hull(std::vector<Point2D> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point2D& a, const Point2D& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;

    auto cross = [](const Point2D& o, const Point2D& a, const Point2D& b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    std::vector<Point2D> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

inline double polygon_area(std::span<const Point2D> poly) {
    if (poly.size() < 3) return 0.0;
    double twice = 0.0;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        twice += poly[j].x * poly[i].y - poly[i].x * poly[j].y;
    }
    return std::abs(twice) / 2.0;
}

/// Fraction of the image covered by the convex hull of the points, in [0, 1].
/// Kept as a baseline: it ignores point density, so interior points never change it.
inline double convex_hull_ratio(const KeyPointSet& set, const ImageDims& dims) {
    if (set.empty()) throw InsufficientPoints(0, 1);
    const auto hull = convex_hull(locations(set));
    return std::min(1.0, polygon_area(hull) / dims.area());
}

}  // namespace kpcov
