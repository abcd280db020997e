#pragma once

#include <cstddef>
#include <vector>

namespace psa {

/// Dense row-major 2D array of 32-bit floats on a unit-spaced pixel lattice.
/// Holds images, soft probability maps and distance maps; segmentation masks
/// wrap a Grid via BinaryMask. Values must stay finite.
class Grid {
public:
    Grid() = default;
    Grid(int height, int width, float fill = 0.0f);
    Grid(int height, int width, std::vector<float> values);

    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    float& at(int r, int c) { return values_[static_cast<std::size_t>(r) * width_ + c]; }
    float at(int r, int c) const { return values_[static_cast<std::size_t>(r) * width_ + c]; }
    bool in_bounds(int r, int c) const { return r >= 0 && r < height_ && c >= 0 && c < width_; }

    const std::vector<float>& values() const { return values_; }
    std::vector<float>& values() { return values_; }
    float* data() { return values_.data(); }
    const float* data() const { return values_.data(); }

    bool same_shape(const Grid& o) const { return height_ == o.height_ && width_ == o.width_; }

    /// Throws std::invalid_argument on non-finite values or empty extent.
    void validate() const;

    bool operator==(const Grid&) const = default;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<float> values_;
};

/// A Grid restricted to values {0, 1}. Stored as 0.0f / 1.0f.
class BinaryMask {
public:
    BinaryMask() = default;
    /// Validates that every value is exactly 0 or 1.
    explicit BinaryMask(Grid g);

    static BinaryMask zeros(int height, int width);
    static BinaryMask ones(int height, int width);

    int height() const { return grid_.height(); }
    int width() const { return grid_.width(); }
    bool empty() const { return grid_.empty(); }

    bool at(int r, int c) const { return grid_.at(r, c) != 0.0f; }
    void set(int r, int c, bool v) { grid_.at(r, c) = v ? 1.0f : 0.0f; }
    bool in_bounds(int r, int c) const { return grid_.in_bounds(r, c); }

    const Grid& grid() const { return grid_; }
    bool same_shape(const BinaryMask& o) const { return grid_.same_shape(o.grid_); }

    /// Number of foreground pixels.
    std::size_t count() const;
    BinaryMask complement() const;

    bool operator==(const BinaryMask&) const = default;

private:
    Grid grid_;
};

/// Threshold a grid into a mask: output is 1 where g(p) >= threshold.
/// Ties go to foreground. threshold must lie in (0, 1).
BinaryMask binarize(const Grid& g, double threshold);

}  // namespace psa
