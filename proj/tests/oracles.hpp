#pragma once

// Reference computations used only by tests. Each works from the raw pairwise
// distances with no shared code path with the library.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "kpcov/types.hpp"

namespace oracle {

inline double dist(const kpcov::Point2D& a, const kpcov::Point2D& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

inline std::vector<double> pair_distances(const std::vector<kpcov::Point2D>& p) {
    std::vector<double> d;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j) d.push_back(dist(p[i], p[j]));
    return d;
}

/// Harmonic mean of all unordered pairwise distances: N(N-1) / (2 * sum 1/d).
inline double pair_harmonic(const std::vector<kpcov::Point2D>& p) {
    long double inv = 0.0L;
    for (double d : pair_distances(p)) inv += 1.0L / d;
    const long double n = static_cast<long double>(p.size());
    return static_cast<double>(n * (n - 1) / (2 * inv));
}

/// Per-reference harmonic means, then their harmonic mean, written out naively.
inline double per_reference(const std::vector<kpcov::Point2D>& p) {
    const std::size_t n = p.size();
    double outer = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double inner = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) inner += 1.0 / dist(p[i], p[j]);
        const double d_i = static_cast<double>(n - 1) / inner;
        outer += 1.0 / d_i;
    }
    return static_cast<double>(n) / outer;
}

inline double geometric_mean(const std::vector<double>& v) {
    long double s = 0.0L;
    for (double x : v) s += std::log(static_cast<long double>(x));
    return static_cast<double>(std::exp(s / static_cast<long double>(v.size())));
}

inline double arithmetic_mean(const std::vector<double>& v) {
    long double s = 0.0L;
    for (double x : v) s += x;
    return static_cast<double>(s / static_cast<long double>(v.size()));
}

/// Shoelace area of a polygon given in order.
inline double shoelace(const std::vector<kpcov::Point2D>& poly) {
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % poly.size()];
        s += a.x * b.y - b.x * a.y;
    }
    return std::abs(s) / 2.0;
}

/// Distinct random points in a box (test-only generator; not the library's).
inline std::vector<kpcov::Point2D> random_points(std::uint64_t seed, std::size_t n, double w = 1000.0,
                                                 double h = 800.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(0.0, w), uy(0.0, h);
    std::vector<kpcov::Point2D> p(n);
    for (auto& q : p) q = {ux(rng), uy(rng)};
    return p;
}

}  // namespace oracle
