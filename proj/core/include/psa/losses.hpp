#pragma once

#include <vector>

#include "psa/grid.hpp"
#include "psa/nets.hpp"
#include "psa/params.hpp"
#include "psa/tape.hpp"

namespace psa::nets {

struct LossWeights {
    double lambda_shape = 1.0;    // weight of the shape net's prediction-map dice term
    double lambda_overlap = 1.0;  // weight of the overlap net's prediction-map dice terms
    double epsilon = 1.0;         // soft-dice smoothing

    void validate() const;  // throws std::invalid_argument
};

/// Plain-number soft Dice loss: 1 - (2*sum(p*g)+eps) / (sum(p)+sum(g)+eps).
double soft_dsc_loss(const Grid& p, const BinaryMask& g, double eps);

/// Graph of lambda * dice(net_L(gt), net_L(pred)) plus one normalized L2
/// feature distance per hidden stage. gt_input/pred_input are node ids with
/// the net's input channel count.
int perceptual_loss_graph(Tape& tape, const ParamLeaves& leaves, PerceptualKind kind,
                          int gt_input, int pred_input, const NetConfig& cfg, double lambda,
                          double eps);

/// Scalar values of one routed total-loss evaluation. Vectors are indexed by
/// decoder; entries for decoders outside the loss are exactly zero.
struct LossBreakdown {
    double total = 0.0;
    int active_style = 0;
    std::vector<double> dsc;
    std::vector<double> shape;
    std::vector<double> overlap;

    double sum_of_parts() const;
};

struct TotalLoss {
    int node = -1;
    LossBreakdown breakdown;
};

/// Routed training loss: dice(mixed, gt) always, plus for the assigned style
/// only: dice + shape-net + overlap-net perceptual terms. `predictions` holds
/// node ids for decoders 0..N. The overlap net sees predictions alongside the
/// ground-truth organ masks.
TotalLoss total_loss_graph(Tape& tape, const ParamLeaves& leaves, const NetConfig& cfg,
                           const LossWeights& w, const std::vector<int>& predictions,
                           int assigned_style, const BinaryMask& gt, const BinaryMask& bladder,
                           const BinaryMask& rectum);

}  // namespace psa::nets
