#include "psa/tape.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include <Eigen/Dense>

namespace psa::nets {
namespace {

using MatRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<MatRM>;
using CMapRM = Eigen::Map<const MatRM>;

// Unrolls same-padded kxk patches into a (in_ch*k*k) x (h*w) matrix.
void im2col(const Tensor& x, int k, std::vector<double>& cols) {
    const int pad = k / 2;
    const int h = x.h, w = x.w;
    const std::size_t hw = std::size_t(h) * w;
    cols.assign(std::size_t(x.ch) * k * k * hw, 0.0);
    for (int ic = 0; ic < x.ch; ++ic) {
        for (int kr = 0; kr < k; ++kr) {
            for (int kc = 0; kc < k; ++kc) {
                const std::size_t row = (std::size_t(ic) * k + kr) * k + kc;
                double* dst_row = cols.data() + row * hw;
                const int c_lo = std::max(0, pad - kc);
                const int c_hi = std::min(w, w + pad - kc);
                if (c_lo >= c_hi) continue;
                for (int r = 0; r < h; ++r) {
                    const int rr = r + kr - pad;
                    if (rr < 0 || rr >= h) continue;
                    const double* src = &x.v[(std::size_t(ic) * h + rr) * w + (c_lo + kc - pad)];
                    std::memcpy(dst_row + std::size_t(r) * w + c_lo, src,
                                std::size_t(c_hi - c_lo) * sizeof(double));
                }
            }
        }
    }
}

// Transpose of im2col: scatter-adds column gradients back onto the image.
void col2im_add(const std::vector<double>& cols, int ch, int h, int w, int k,
                std::vector<double>& dx) {
    const int pad = k / 2;
    const std::size_t hw = std::size_t(h) * w;
    for (int ic = 0; ic < ch; ++ic) {
        for (int kr = 0; kr < k; ++kr) {
            for (int kc = 0; kc < k; ++kc) {
                const std::size_t row = (std::size_t(ic) * k + kr) * k + kc;
                const double* src_row = cols.data() + row * hw;
                const int c_lo = std::max(0, pad - kc);
                const int c_hi = std::min(w, w + pad - kc);
                if (c_lo >= c_hi) continue;
                for (int r = 0; r < h; ++r) {
                    const int rr = r + kr - pad;
                    if (rr < 0 || rr >= h) continue;
                    double* dst = &dx[(std::size_t(ic) * h + rr) * w + (c_lo + kc - pad)];
                    const double* src = src_row + std::size_t(r) * w + c_lo;
                    for (int c = 0; c < c_hi - c_lo; ++c) dst[c] += src[c];
                }
            }
        }
    }
}

}  // namespace

int Tape::push(Node n) {
    nodes_.push_back(std::move(n));
    return int(nodes_.size()) - 1;
}

std::vector<double>& Tape::grad_buf(int id) {
    Node& n = node(id);
    if (n.grad.empty()) n.grad.assign(n.value.size(), 0.0);
    return n.grad;
}

const std::vector<double>& Tape::grad(int id) const {
    // empty result = node unreached by backward = exactly zero gradient
    return cnode(id).grad;
}

double Tape::scalar(int id) const {
    const Tensor& t = cnode(id).value;
    if (t.size() != 1) throw std::logic_error("tape: node is not a scalar");
    return t.v[0];
}

int Tape::leaf(Tensor value, bool requires_grad) {
    Node n;
    n.op = Op::Leaf;
    n.value = std::move(value);
    n.requires_grad = requires_grad;
    return push(std::move(n));
}

int Tape::conv2d(int x, int w, int b, int kernel) {
    const Tensor& xv = cnode(x).value;
    const Tensor& wv = cnode(w).value;
    const Tensor& bv = cnode(b).value;
    if (kernel < 1 || kernel % 2 == 0) throw std::invalid_argument("conv2d: kernel must be odd");
    const int out_ch = wv.ch;
    const int ick2 = wv.h * wv.w;
    if (wv.h != xv.ch || wv.w != kernel * kernel)
        throw std::invalid_argument("conv2d: weight shape mismatch");
    if (bv.size() != std::size_t(out_ch)) throw std::invalid_argument("conv2d: bias shape mismatch");

    Node n;
    n.op = Op::Conv2d;
    n.in0 = x;
    n.in1 = w;
    n.in2 = b;
    n.iarg = kernel;
    n.value = Tensor(out_ch, xv.h, xv.w);
    n.requires_grad = cnode(x).requires_grad || cnode(w).requires_grad || cnode(b).requires_grad;

    std::vector<double> cols;
    im2col(xv, kernel, cols);
    const std::size_t hw = std::size_t(xv.h) * xv.w;
    CMapRM W(wv.v.data(), out_ch, ick2);
    CMapRM C(cols.data(), ick2, Eigen::Index(hw));
    MapRM Y(n.value.v.data(), out_ch, Eigen::Index(hw));
    Y.noalias() = W * C;
    for (int oc = 0; oc < out_ch; ++oc) Y.row(oc).array() += bv.v[std::size_t(oc)];
    return push(std::move(n));
}

int Tape::dense(int x, int w, int b) {
    const Tensor& xv = cnode(x).value;
    const Tensor& wv = cnode(w).value;
    const Tensor& bv = cnode(b).value;
    const int out = wv.ch, in = wv.h;
    if (wv.w != 1 || xv.size() != std::size_t(in) || bv.size() != std::size_t(out))
        throw std::invalid_argument("dense: shape mismatch");

    Node n;
    n.op = Op::Dense;
    n.in0 = x;
    n.in1 = w;
    n.in2 = b;
    n.value = Tensor(out, 1, 1);
    n.requires_grad = cnode(x).requires_grad || cnode(w).requires_grad || cnode(b).requires_grad;
    // Plain loops: Eigen's vectorized dot products round differently
    // depending on heap alignment, which would break bitwise determinism.
    for (int o = 0; o < out; ++o) {
        const double* wrow = wv.v.data() + std::size_t(o) * in;
        double acc = bv.v[std::size_t(o)];
        for (int i = 0; i < in; ++i) acc += wrow[i] * xv.v[std::size_t(i)];
        n.value.v[std::size_t(o)] = acc;
    }
    return push(std::move(n));
}

int Tape::relu(int x) {
    Node n;
    n.op = Op::Relu;
    n.in0 = x;
    n.value = cnode(x).value;
    n.requires_grad = cnode(x).requires_grad;
    for (double& v : n.value.v) v = std::max(0.0, v);
    return push(std::move(n));
}

int Tape::sigmoid(int x) {
    Node n;
    n.op = Op::Sigmoid;
    n.in0 = x;
    n.value = cnode(x).value;
    n.requires_grad = cnode(x).requires_grad;
    for (double& v : n.value.v) v = 1.0 / (1.0 + std::exp(-v));
    return push(std::move(n));
}

int Tape::avgpool2(int x) {
    const Tensor& xv = cnode(x).value;
    if (xv.h % 2 || xv.w % 2) throw std::invalid_argument("avgpool2: odd spatial dims");
    Node n;
    n.op = Op::AvgPool2;
    n.in0 = x;
    n.value = Tensor(xv.ch, xv.h / 2, xv.w / 2);
    n.requires_grad = cnode(x).requires_grad;
    for (int c = 0; c < xv.ch; ++c)
        for (int r = 0; r < n.value.h; ++r)
            for (int cc = 0; cc < n.value.w; ++cc)
                n.value.at(c, r, cc) =
                    0.25 * (xv.at(c, 2 * r, 2 * cc) + xv.at(c, 2 * r, 2 * cc + 1) +
                            xv.at(c, 2 * r + 1, 2 * cc) + xv.at(c, 2 * r + 1, 2 * cc + 1));
    return push(std::move(n));
}

int Tape::upsample2(int x) {
    const Tensor& xv = cnode(x).value;
    Node n;
    n.op = Op::Upsample2;
    n.in0 = x;
    n.value = Tensor(xv.ch, xv.h * 2, xv.w * 2);
    n.requires_grad = cnode(x).requires_grad;
    for (int c = 0; c < xv.ch; ++c)
        for (int r = 0; r < xv.h; ++r)
            for (int cc = 0; cc < xv.w; ++cc) {
                const double v = xv.at(c, r, cc);
                n.value.at(c, 2 * r, 2 * cc) = v;
                n.value.at(c, 2 * r, 2 * cc + 1) = v;
                n.value.at(c, 2 * r + 1, 2 * cc) = v;
                n.value.at(c, 2 * r + 1, 2 * cc + 1) = v;
            }
    return push(std::move(n));
}

int Tape::concat(int a, int b) {
    const Tensor& av = cnode(a).value;
    const Tensor& bv = cnode(b).value;
    if (av.h != bv.h || av.w != bv.w) throw std::invalid_argument("concat: extent mismatch");
    Node n;
    n.op = Op::Concat;
    n.in0 = a;
    n.in1 = b;
    n.value = Tensor(av.ch + bv.ch, av.h, av.w);
    n.requires_grad = cnode(a).requires_grad || cnode(b).requires_grad;
    std::copy(av.v.begin(), av.v.end(), n.value.v.begin());
    std::copy(bv.v.begin(), bv.v.end(), n.value.v.begin() + std::ptrdiff_t(av.v.size()));
    return push(std::move(n));
}

int Tape::slice_channel(int x, int channel) {
    const Tensor& xv = cnode(x).value;
    if (channel < 0 || channel >= xv.ch)
        throw std::invalid_argument("slice_channel: channel out of range");
    Node n;
    n.op = Op::SliceChannel;
    n.in0 = x;
    n.iarg = channel;
    n.value = Tensor(1, xv.h, xv.w);
    n.requires_grad = cnode(x).requires_grad;
    const std::size_t plane = std::size_t(xv.h) * xv.w;
    std::copy_n(xv.v.begin() + std::ptrdiff_t(std::size_t(channel) * plane), plane,
                n.value.v.begin());
    return push(std::move(n));
}

int Tape::scale_channels(int x, int gates) {
    const Tensor& xv = cnode(x).value;
    const Tensor& gv = cnode(gates).value;
    if (gv.size() != std::size_t(xv.ch)) throw std::invalid_argument("scale_channels: gate size");
    Node n;
    n.op = Op::ScaleChannels;
    n.in0 = x;
    n.in1 = gates;
    n.value = xv;
    n.requires_grad = cnode(x).requires_grad || cnode(gates).requires_grad;
    const std::size_t plane = std::size_t(xv.h) * xv.w;
    for (int c = 0; c < xv.ch; ++c)
        for (std::size_t i = 0; i < plane; ++i) n.value.v[std::size_t(c) * plane + i] *= gv.v[std::size_t(c)];
    return push(std::move(n));
}

int Tape::global_avg_pool(int x) {
    const Tensor& xv = cnode(x).value;
    Node n;
    n.op = Op::GlobalAvgPool;
    n.in0 = x;
    n.value = Tensor(xv.ch, 1, 1);
    n.requires_grad = cnode(x).requires_grad;
    const std::size_t plane = std::size_t(xv.h) * xv.w;
    for (int c = 0; c < xv.ch; ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < plane; ++i) s += xv.v[std::size_t(c) * plane + i];
        n.value.v[std::size_t(c)] = s / double(plane);
    }
    return push(std::move(n));
}

int Tape::softmax_cross_entropy(int logits, int label) {
    const Tensor& zv = cnode(logits).value;
    if (label < 0 || label >= int(zv.size()))
        throw std::invalid_argument("softmax_cross_entropy: label out of range");
    Node n;
    n.op = Op::SoftmaxXent;
    n.in0 = logits;
    n.iarg = label;
    n.requires_grad = cnode(logits).requires_grad;
    const double m = *std::max_element(zv.v.begin(), zv.v.end());
    double lse = 0.0;
    for (double z : zv.v) lse += std::exp(z - m);
    n.value = Tensor::scalar(m + std::log(lse) - zv.v[std::size_t(label)]);
    return push(std::move(n));
}

int Tape::soft_dice_loss(int p, int g, double eps) {
    const Tensor& pv = cnode(p).value;
    const Tensor& gv = cnode(g).value;
    if (pv.size() != gv.size()) throw std::invalid_argument("soft_dice_loss: size mismatch");
    if (!(eps > 0.0)) throw std::invalid_argument("soft_dice_loss: eps must be positive");
    Node n;
    n.op = Op::SoftDice;
    n.in0 = p;
    n.in1 = g;
    n.darg = eps;
    n.requires_grad = cnode(p).requires_grad || cnode(g).requires_grad;
    double sp = 0.0, sg = 0.0, inter = 0.0;
    for (std::size_t i = 0; i < pv.size(); ++i) {
        sp += pv.v[i];
        sg += gv.v[i];
        inter += pv.v[i] * gv.v[i];
    }
    n.value = Tensor::scalar(1.0 - (2.0 * inter + eps) / (sp + sg + eps));
    return push(std::move(n));
}

int Tape::l2_diff_norm(int a, int b) {
    const Tensor& av = cnode(a).value;
    const Tensor& bv = cnode(b).value;
    if (av.size() != bv.size()) throw std::invalid_argument("l2_diff_norm: size mismatch");
    Node n;
    n.op = Op::L2Diff;
    n.in0 = a;
    n.in1 = b;
    n.requires_grad = cnode(a).requires_grad || cnode(b).requires_grad;
    double q = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) {
        const double d = av.v[i] - bv.v[i];
        q += d * d;
    }
    n.value = Tensor::scalar(std::sqrt(q) / double(av.size()));
    return push(std::move(n));
}

int Tape::weighted_sum(const std::vector<int>& xs, const std::vector<double>& ws) {
    if (xs.empty() || xs.size() != ws.size())
        throw std::invalid_argument("weighted_sum: inputs and weights must match and be nonempty");
    Node n;
    n.op = Op::WeightedSum;
    n.extra_in = xs;
    n.weights = ws;
    double total = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const Tensor& t = cnode(xs[i]).value;
        if (t.size() != 1) throw std::invalid_argument("weighted_sum: inputs must be scalars");
        total += ws[i] * t.v[0];
        n.requires_grad = n.requires_grad || cnode(xs[i]).requires_grad;
    }
    n.value = Tensor::scalar(total);
    return push(std::move(n));
}

void Tape::backward(int id) {
    if (backward_done_) throw std::logic_error("tape: backward may run only once");
    backward_done_ = true;
    if (cnode(id).value.size() != 1) throw std::logic_error("tape: backward seed must be scalar");
    grad_buf(id)[0] = 1.0;
    for (int i = id; i >= 0; --i) {
        const Node& n = cnode(i);
        if (!n.requires_grad || n.grad.empty()) continue;
        backstep(i);
    }
}

void Tape::backstep(int id) {
    Node& n = node(id);
    const std::vector<double>& gy = n.grad;
    auto wants = [&](int in) { return in >= 0 && cnode(in).requires_grad; };

    switch (n.op) {
        case Op::Leaf:
            break;
        case Op::Conv2d: {
            const Tensor& xv = cnode(n.in0).value;
            const Tensor& wv = cnode(n.in1).value;
            const int k = n.iarg;
            const int out_ch = wv.ch;
            const int ick2 = wv.h * wv.w;
            const std::size_t hw = std::size_t(xv.h) * xv.w;
            CMapRM GY(gy.data(), out_ch, Eigen::Index(hw));
            if (wants(n.in1)) {
                std::vector<double> cols;
                im2col(xv, k, cols);
                CMapRM C(cols.data(), ick2, Eigen::Index(hw));
                MapRM GW(grad_buf(n.in1).data(), out_ch, ick2);
                GW.noalias() += GY * C.transpose();
            }
            if (wants(n.in2)) {
                // fixed-order sum; Eigen's redux is alignment-dependent
                auto& gb = grad_buf(n.in2);
                for (int oc = 0; oc < out_ch; ++oc) {
                    const double* row = gy.data() + std::size_t(oc) * hw;
                    double acc = 0.0;
                    for (std::size_t i = 0; i < hw; ++i) acc += row[i];
                    gb[std::size_t(oc)] += acc;
                }
            }
            if (wants(n.in0)) {
                CMapRM W(wv.v.data(), out_ch, ick2);
                std::vector<double> gcols(std::size_t(ick2) * hw);
                MapRM GC(gcols.data(), ick2, Eigen::Index(hw));
                GC.noalias() = W.transpose() * GY;
                col2im_add(gcols, xv.ch, xv.h, xv.w, k, grad_buf(n.in0));
            }
            break;
        }
        case Op::Dense: {
            const Tensor& xv = cnode(n.in0).value;
            const Tensor& wv = cnode(n.in1).value;
            const int out = wv.ch, in = wv.h;
            if (wants(n.in1)) {
                auto& gw = grad_buf(n.in1);
                for (int o = 0; o < out; ++o)
                    for (int i = 0; i < in; ++i)
                        gw[std::size_t(o) * in + i] += gy[std::size_t(o)] * xv.v[std::size_t(i)];
            }
            if (wants(n.in2)) {
                auto& gb = grad_buf(n.in2);
                for (int i = 0; i < out; ++i) gb[std::size_t(i)] += gy[std::size_t(i)];
            }
            if (wants(n.in0)) {
                auto& gx = grad_buf(n.in0);
                for (int o = 0; o < out; ++o) {
                    const double* wrow = wv.v.data() + std::size_t(o) * in;
                    for (int i = 0; i < in; ++i) gx[std::size_t(i)] += wrow[i] * gy[std::size_t(o)];
                }
            }
            break;
        }
        case Op::Relu: {
            if (!wants(n.in0)) break;
            const Tensor& xv = cnode(n.in0).value;
            auto& gx = grad_buf(n.in0);
            for (std::size_t i = 0; i < gy.size(); ++i)
                if (xv.v[i] > 0.0) gx[i] += gy[i];
            break;
        }
        case Op::Sigmoid: {
            if (!wants(n.in0)) break;
            auto& gx = grad_buf(n.in0);
            for (std::size_t i = 0; i < gy.size(); ++i) {
                const double y = n.value.v[i];
                gx[i] += gy[i] * y * (1.0 - y);
            }
            break;
        }
        case Op::AvgPool2: {
            if (!wants(n.in0)) break;
            const Tensor& xv = cnode(n.in0).value;
            auto& gx = grad_buf(n.in0);
            for (int c = 0; c < n.value.ch; ++c)
                for (int r = 0; r < n.value.h; ++r)
                    for (int cc = 0; cc < n.value.w; ++cc) {
                        const double g =
                            0.25 * gy[(std::size_t(c) * n.value.h + r) * n.value.w + cc];
                        gx[(std::size_t(c) * xv.h + 2 * r) * xv.w + 2 * cc] += g;
                        gx[(std::size_t(c) * xv.h + 2 * r) * xv.w + 2 * cc + 1] += g;
                        gx[(std::size_t(c) * xv.h + 2 * r + 1) * xv.w + 2 * cc] += g;
                        gx[(std::size_t(c) * xv.h + 2 * r + 1) * xv.w + 2 * cc + 1] += g;
                    }
            break;
        }
        case Op::Upsample2: {
            if (!wants(n.in0)) break;
            const Tensor& xv = cnode(n.in0).value;
            auto& gx = grad_buf(n.in0);
            for (int c = 0; c < xv.ch; ++c)
                for (int r = 0; r < xv.h; ++r)
                    for (int cc = 0; cc < xv.w; ++cc) {
                        const std::size_t base = (std::size_t(c) * n.value.h + 2 * r) * n.value.w;
                        gx[(std::size_t(c) * xv.h + r) * xv.w + cc] +=
                            gy[base + 2 * cc] + gy[base + 2 * cc + 1] +
                            gy[base + n.value.w + 2 * cc] + gy[base + n.value.w + 2 * cc + 1];
                    }
            break;
        }
        case Op::Concat: {
            const std::size_t na = cnode(n.in0).value.size();
            if (wants(n.in0)) {
                auto& ga = grad_buf(n.in0);
                for (std::size_t i = 0; i < na; ++i) ga[i] += gy[i];
            }
            if (wants(n.in1)) {
                auto& gb = grad_buf(n.in1);
                for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += gy[na + i];
            }
            break;
        }
        case Op::SliceChannel: {
            if (!wants(n.in0)) break;
            const Tensor& xv = cnode(n.in0).value;
            auto& gx = grad_buf(n.in0);
            const std::size_t plane = std::size_t(xv.h) * xv.w;
            const std::size_t base = std::size_t(n.iarg) * plane;
            for (std::size_t i = 0; i < plane; ++i) gx[base + i] += gy[i];
            break;
        }
        case Op::ScaleChannels: {
            const Tensor& xv = cnode(n.in0).value;
            const Tensor& gv = cnode(n.in1).value;
            const std::size_t plane = std::size_t(xv.h) * xv.w;
            if (wants(n.in0)) {
                auto& gx = grad_buf(n.in0);
                for (int c = 0; c < xv.ch; ++c)
                    for (std::size_t i = 0; i < plane; ++i)
                        gx[std::size_t(c) * plane + i] +=
                            gy[std::size_t(c) * plane + i] * gv.v[std::size_t(c)];
            }
            if (wants(n.in1)) {
                auto& gg = grad_buf(n.in1);
                for (int c = 0; c < xv.ch; ++c) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < plane; ++i)
                        s += gy[std::size_t(c) * plane + i] * xv.v[std::size_t(c) * plane + i];
                    gg[std::size_t(c)] += s;
                }
            }
            break;
        }
        case Op::GlobalAvgPool: {
            if (!wants(n.in0)) break;
            const Tensor& xv = cnode(n.in0).value;
            auto& gx = grad_buf(n.in0);
            const std::size_t plane = std::size_t(xv.h) * xv.w;
            for (int c = 0; c < xv.ch; ++c) {
                const double g = gy[std::size_t(c)] / double(plane);
                for (std::size_t i = 0; i < plane; ++i) gx[std::size_t(c) * plane + i] += g;
            }
            break;
        }
        case Op::SoftmaxXent: {
            if (!wants(n.in0)) break;
            const Tensor& zv = cnode(n.in0).value;
            auto& gz = grad_buf(n.in0);
            const double m = *std::max_element(zv.v.begin(), zv.v.end());
            double lse = 0.0;
            for (double z : zv.v) lse += std::exp(z - m);
            for (std::size_t i = 0; i < zv.size(); ++i) {
                const double soft = std::exp(zv.v[i] - m) / lse;
                gz[i] += gy[0] * (soft - (int(i) == n.iarg ? 1.0 : 0.0));
            }
            break;
        }
        case Op::SoftDice: {
            const Tensor& pv = cnode(n.in0).value;
            const Tensor& gv = cnode(n.in1).value;
            double sp = 0.0, sg = 0.0, inter = 0.0;
            for (std::size_t i = 0; i < pv.size(); ++i) {
                sp += pv.v[i];
                sg += gv.v[i];
                inter += pv.v[i] * gv.v[i];
            }
            const double T = 2.0 * inter + n.darg;
            const double S = sp + sg + n.darg;
            if (wants(n.in0)) {
                auto& gp = grad_buf(n.in0);
                for (std::size_t i = 0; i < pv.size(); ++i)
                    gp[i] += gy[0] * (T - 2.0 * gv.v[i] * S) / (S * S);
            }
            if (wants(n.in1)) {
                auto& gg = grad_buf(n.in1);
                for (std::size_t i = 0; i < gv.size(); ++i)
                    gg[i] += gy[0] * (T - 2.0 * pv.v[i] * S) / (S * S);
            }
            break;
        }
        case Op::L2Diff: {
            const Tensor& av = cnode(n.in0).value;
            const Tensor& bv = cnode(n.in1).value;
            const double norm = n.value.v[0] * double(av.size());  // ||a-b||
            if (norm == 0.0) break;                                 // flat point: zero subgradient
            const double scale = gy[0] / (norm * double(av.size()));
            if (wants(n.in0)) {
                auto& ga = grad_buf(n.in0);
                for (std::size_t i = 0; i < av.size(); ++i)
                    ga[i] += scale * (av.v[i] - bv.v[i]);
            }
            if (wants(n.in1)) {
                auto& gb = grad_buf(n.in1);
                for (std::size_t i = 0; i < av.size(); ++i)
                    gb[i] -= scale * (av.v[i] - bv.v[i]);
            }
            break;
        }
        case Op::WeightedSum: {
            for (std::size_t i = 0; i < n.extra_in.size(); ++i) {
                if (!cnode(n.extra_in[i]).requires_grad) continue;
                grad_buf(n.extra_in[i])[0] += gy[0] * n.weights[i];
            }
            break;
        }
    }
}

}  // namespace psa::nets
