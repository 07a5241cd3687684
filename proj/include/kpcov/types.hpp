#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kpcov {

struct Point2D {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2D&, const Point2D&) = default;
};

inline double distance(const Point2D& a, const Point2D& b) noexcept {
    return std::hypot(a.x - b.x, a.y - b.y);
}

struct KeyPoint {
    Point2D location;
    /// Characteristic scale in pixels, when the detector reports one.
    std::optional<double> scale;
    /// Raw trailing fields from the source file (e.g. ellipse parameters). Never interpreted.
    std::vector<std::string> attributes;

    friend bool operator==(const KeyPoint&, const KeyPoint&) = default;
};

struct KeyPointSet {
    std::string detector;
    std::string image_id;
    std::vector<KeyPoint> points;

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }

    friend bool operator==(const KeyPointSet&, const KeyPointSet&) = default;
};

/// Pixel extent of an image. Both sides are at least one pixel.
class ImageDims {
public:
    ImageDims(long width, long height) : width_(width), height_(height) {
        if (width < 1 || height < 1) {
            throw std::invalid_argument("image dimensions must be positive, got " + std::to_string(width) + "x" +
                                        std::to_string(height));
        }
    }

    long width() const noexcept { return width_; }
    long height() const noexcept { return height_; }
    double area() const noexcept { return static_cast<double>(width_) * static_cast<double>(height_); }
    double perimeter() const noexcept { return 2.0 * (static_cast<double>(width_) + static_cast<double>(height_)); }

    friend bool operator==(const ImageDims&, const ImageDims&) = default;

private:
    long width_;
    long height_;
};

inline std::vector<Point2D> locations(const KeyPointSet& set) {
    std::vector<Point2D> out;
    out.reserve(set.points.size());
    for (const auto& kp : set.points) out.push_back(kp.location);
    return out;
}

inline KeyPointSet make_set(std::string detector, std::string image_id, const std::vector<Point2D>& pts) {
    KeyPointSet s{std::move(detector), std::move(image_id), {}};
    s.points.reserve(pts.size());
    for (const auto& p : pts) s.points.push_back(KeyPoint{p, std::nullopt, {}});
    return s;
}

}  // namespace kpcov
