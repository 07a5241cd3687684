#pragma once

// Deterministic synthetic keypoint sets.
//
// Random bits come from std::mt19937_64, whose output sequence is fixed by the
// C++ standard. The standard library distributions are not portable, so the
// conversions below are spelled out:
//   uniform [0,1): top 53 bits of a draw, times 2^-53
//   normal:        Box-Muller on two uniforms, both outputs used

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "kpcov/types.hpp"

namespace kpcov::synth {

class PortableRng {
public:
    explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// A pair of independent standard normal deviates.
    std::pair<double, double> normal_pair() {
        double u1 = uniform01();
        while (u1 == 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(theta), r * std::sin(theta)};
    }

private:
    std::mt19937_64 engine_;
};

namespace detail {

inline double clip_below(double v, double extent) {
    return std::clamp(v, 0.0, std::nextafter(extent, 0.0));
}

}  // namespace detail

/// n independent points, uniform over [0, width) x [0, height).
inline KeyPointSet gen_uniform(std::size_t n, const ImageDims& dims, std::uint64_t seed) {
    PortableRng rng(seed);
    const auto w = static_cast<double>(dims.width());
    const auto h = static_cast<double>(dims.height());
    KeyPointSet s{"uniform", "synthetic", {}};
    s.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = detail::clip_below(rng.uniform01() * w, w);
        const double y = detail::clip_below(rng.uniform01() * h, h);
        s.points.push_back(KeyPoint{{x, y}, std::nullopt, {}});
    }
    return s;
}

/// k uniform centres; point i goes to centre i mod k with a Gaussian offset of std sigma,
/// clipped to the image.
inline KeyPointSet gen_clustered(std::size_t n, const ImageDims& dims, std::size_t k, double sigma,
                                 std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("clustered generator needs k >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("clustered generator needs sigma > 0");
    PortableRng rng(seed);
    const auto w = static_cast<double>(dims.width());
    const auto h = static_cast<double>(dims.height());
    std::vector<Point2D> centres(k);
    for (auto& c : centres) {
        c.x = detail::clip_below(rng.uniform01() * w, w);
        c.y = detail::clip_below(rng.uniform01() * h, h);
    }
    KeyPointSet s{"clustered", "synthetic", {}};
    s.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = centres[i % k];
        const auto [gx, gy] = rng.normal_pair();
        const double x = detail::clip_below(c.x + sigma * gx, w);
        const double y = detail::clip_below(c.y + sigma * gy, h);
        s.points.push_back(KeyPoint{{x, y}, std::nullopt, {}});
    }
    return s;
}

/// Cell centres of a rows x cols grid, row-major.
inline KeyPointSet gen_grid(std::size_t rows, std::size_t cols, const ImageDims& dims) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("grid generator needs rows, cols >= 1");
    const auto w = static_cast<double>(dims.width());
    const auto h = static_cast<double>(dims.height());
    KeyPointSet s{"grid", "synthetic", {}};
    s.points.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double x = (static_cast<double>(c) + 0.5) * w / static_cast<double>(cols);
            const double y = (static_cast<double>(r) + 0.5) * h / static_cast<double>(rows);
            s.points.push_back(KeyPoint{{x, y}, std::nullopt, {}});
        }
    }
    return s;
}

}  // namespace kpcov::synth
