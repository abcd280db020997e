#pragma once

#include <vector>

#include "psa/grid.hpp"

namespace psa::nets {

/// Dense channel-major (c, h, w) array of doubles. Vectors use shape
/// (n, 1, 1); scalars (1, 1, 1).
struct Tensor {
    int ch = 0;
    int h = 0;
    int w = 0;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int ch_, int h_, int w_);

    std::size_t size() const { return v.size(); }
    int plane() const { return h * w; }

    double& at(int c, int r, int col) { return v[(std::size_t(c) * h + r) * w + col]; }
    double at(int c, int r, int col) const { return v[(std::size_t(c) * h + r) * w + col]; }

    static Tensor scalar(double x);
    static Tensor from_grid(const Grid& g);
    static Tensor from_mask(const BinaryMask& m);
    /// Stacks single-channel tensors of equal extent.
    static Tensor stack(const std::vector<const Grid*>& grids);

    /// One channel down-converted to the float grid type.
    Grid to_grid(int channel = 0) const;
};

}  // namespace psa::nets
