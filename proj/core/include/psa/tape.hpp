#pragma once

#include <vector>

#include "psa/grid.hpp"
#include "psa/tensor.hpp"

namespace psa::nets {

/// Reverse-mode autodiff over an append-only graph of tensor ops. Values are
/// computed eagerly when a node is recorded; backward() then fills gradient
/// buffers for every node on a path from the seed to a grad-requiring leaf.
///
/// Convolutions use same-padding with odd kernels. Pooling and upsampling
/// change spatial dims by exactly 2x.
class Tape {
  public:
    /// Records an input node. Only leaves with requires_grad participate in
    /// backward propagation.
    int leaf(Tensor value, bool requires_grad);

    /// 2D convolution, same padding. w: (out_ch, in_ch * k * k) row-major
    /// with shape carried as (out_ch, in_ch, k*k) semantics; b: (out_ch).
    int conv2d(int x, int w, int b, int kernel);
    int dense(int x, int w, int b);  // w: (out, in), x: vector
    int relu(int x);
    int sigmoid(int x);
    int avgpool2(int x);
    int upsample2(int x);
    int concat(int a, int b);               // along channels
    int slice_channel(int x, int channel);  // one channel -> (1,h,w)
    int scale_channels(int x, int gates);   // gates: (ch,1,1)
    int global_avg_pool(int x);             // -> (ch,1,1)

    /// -log softmax(logits)[label]; logits: vector.
    int softmax_cross_entropy(int logits, int label);
    /// 1 - (2*sum(p*g) + eps) / (sum(p) + sum(g) + eps)
    int soft_dice_loss(int p, int g, double eps);
    /// ||a - b||_2 / element_count
    int l2_diff_norm(int a, int b);
    /// sum_i weights[i] * values[i]  (scalar inputs)
    int weighted_sum(const std::vector<int>& xs, const std::vector<double>& ws);

    const Tensor& value(int id) const { return nodes_[std::size_t(id)].value; }
    bool requires_grad(int id) const { return nodes_[std::size_t(id)].requires_grad; }
    double scalar(int id) const;

    /// Seeds d(node)/d(node) = 1 and propagates to all leaves. May be called
    /// once per tape.
    void backward(int id);
    /// Empty if the node was never reached by backward (an exact zero
    /// gradient); otherwise one entry per tensor element.
    const std::vector<double>& grad(int id) const;

    std::size_t node_count() const { return nodes_.size(); }

  private:
    enum class Op {
        Leaf,
        Conv2d,
        Dense,
        Relu,
        Sigmoid,
        AvgPool2,
        Upsample2,
        Concat,
        SliceChannel,
        ScaleChannels,
        GlobalAvgPool,
        SoftmaxXent,
        SoftDice,
        L2Diff,
        WeightedSum,
    };

    struct Node {
        Op op;
        int in0 = -1, in1 = -1, in2 = -1;
        int iarg = 0;       // kernel size / class label
        double darg = 0.0;  // eps
        std::vector<int> extra_in;
        std::vector<double> weights;
        Tensor value;
        std::vector<double> grad;
        bool requires_grad = false;
    };

    int push(Node n);
    Node& node(int id) { return nodes_[std::size_t(id)]; }
    const Node& cnode(int id) const { return nodes_[std::size_t(id)]; }
    std::vector<double>& grad_buf(int id);
    void backstep(int id);

    std::vector<Node> nodes_;
    bool backward_done_ = false;
};

}  // namespace psa::nets
