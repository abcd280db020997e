#include "psa/tensor.hpp"

#include <stdexcept>

namespace psa::nets {

Tensor::Tensor(int ch_, int h_, int w_) : ch(ch_), h(h_), w(w_) {
    if (ch_ < 1 || h_ < 1 || w_ < 1) throw std::invalid_argument("Tensor: bad shape");
    v.assign(std::size_t(ch_) * h_ * w_, 0.0);
}

Tensor Tensor::scalar(double x) {
    Tensor t(1, 1, 1);
    t.v[0] = x;
    return t;
}

Tensor Tensor::from_grid(const Grid& g) {
    Tensor t(1, g.height(), g.width());
    for (int r = 0; r < g.height(); ++r)
        for (int c = 0; c < g.width(); ++c) t.at(0, r, c) = g.at(r, c);
    return t;
}

Tensor Tensor::from_mask(const BinaryMask& m) { return from_grid(m.grid()); }

Tensor Tensor::stack(const std::vector<const Grid*>& grids) {
    if (grids.empty()) throw std::invalid_argument("Tensor::stack: no inputs");
    const int h = grids[0]->height();
    const int w = grids[0]->width();
    Tensor t(int(grids.size()), h, w);
    for (std::size_t i = 0; i < grids.size(); ++i) {
        if (grids[i]->height() != h || grids[i]->width() != w)
            throw std::invalid_argument("Tensor::stack: extent mismatch");
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) t.at(int(i), r, c) = grids[i]->at(r, c);
    }
    return t;
}

Grid Tensor::to_grid(int channel) const {
    if (channel < 0 || channel >= ch) throw std::invalid_argument("Tensor::to_grid: bad channel");
    Grid g(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) g.at(r, c) = float(at(channel, r, c));
    return g;
}

}  // namespace psa::nets
