#include "psa/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace psa {

namespace {

std::size_t checked_extent(int height, int width) {
    if (height < 1 || width < 1) {
        throw std::invalid_argument("Grid: extent must be at least 1x1");
    }
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
}

}  // namespace

Grid::Grid(int height, int width, float fill)
    : height_(height), width_(width), values_(checked_extent(height, width), fill) {
    if (!std::isfinite(fill)) {
        throw std::invalid_argument("Grid: fill value must be finite");
    }
}

Grid::Grid(int height, int width, std::vector<float> values)
    : height_(height), width_(width), values_(std::move(values)) {
    if (values_.size() != checked_extent(height, width)) {
        throw std::invalid_argument("Grid: values length does not match extent");
    }
    validate();
}

void Grid::validate() const {
    if (height_ < 1 || width_ < 1) {
        throw std::invalid_argument("Grid: extent must be at least 1x1");
    }
    for (float v : values_) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("Grid: non-finite value");
        }
    }
}

BinaryMask::BinaryMask(Grid g) : grid_(std::move(g)) {
    for (float v : grid_.values()) {
        if (v != 0.0f && v != 1.0f) {
            throw std::invalid_argument("BinaryMask: value not in {0,1}: " + std::to_string(v));
        }
    }
}

BinaryMask BinaryMask::zeros(int height, int width) {
    BinaryMask m;
    m.grid_ = Grid(height, width, 0.0f);
    return m;
}

BinaryMask BinaryMask::ones(int height, int width) {
    BinaryMask m;
    m.grid_ = Grid(height, width, 1.0f);
    return m;
}

std::size_t BinaryMask::count() const {
    std::size_t n = 0;
    for (float v : grid_.values()) n += (v != 0.0f);
    return n;
}

BinaryMask BinaryMask::complement() const {
    BinaryMask out = *this;
    for (float& v : out.grid_.values()) v = (v == 0.0f) ? 1.0f : 0.0f;
    return out;
}

BinaryMask binarize(const Grid& g, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw std::invalid_argument("binarize: threshold must lie in (0,1)");
    }
    BinaryMask out = BinaryMask::zeros(g.height(), g.width());
    for (int r = 0; r < g.height(); ++r) {
        for (int c = 0; c < g.width(); ++c) {
            out.set(r, c, static_cast<double>(g.at(r, c)) >= threshold);
        }
    }
    return out;
}

}  // namespace psa
