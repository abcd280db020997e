#include "psa/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace psa::nets {

void LossWeights::validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("loss weights: epsilon must be positive");
    if (lambda_shape < 0.0 || lambda_overlap < 0.0)
        throw std::invalid_argument("loss weights: lambdas must be nonnegative");
}

double soft_dsc_loss(const Grid& p, const BinaryMask& g, double eps) {
    if (!p.same_shape(g.grid())) throw std::invalid_argument("soft dice: dimension mismatch");
    if (!(eps > 0.0)) throw std::invalid_argument("soft dice: eps must be positive");
    double sp = 0.0, sg = 0.0, inter = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        sp += double(p.values()[i]);
        if (g.grid().values()[i] != 0.0f) {
            sg += 1.0;
            inter += double(p.values()[i]);
        }
    }
    return 1.0 - (2.0 * inter + eps) / (sp + sg + eps);
}

int perceptual_loss_graph(Tape& tape, const ParamLeaves& leaves, PerceptualKind kind,
                          int gt_input, int pred_input, const NetConfig& cfg, double lambda,
                          double eps) {
    const std::vector<int> gt_acts = perceptual_graph(tape, leaves, kind, gt_input, cfg);
    const std::vector<int> pred_acts = perceptual_graph(tape, leaves, kind, pred_input, cfg);
    std::vector<int> terms;
    std::vector<double> weights;
    terms.push_back(tape.soft_dice_loss(gt_acts.back(), pred_acts.back(), eps));
    weights.push_back(lambda);
    for (std::size_t l = 0; l + 1 < gt_acts.size(); ++l) {
        terms.push_back(tape.l2_diff_norm(gt_acts[l], pred_acts[l]));
        weights.push_back(1.0);
    }
    return tape.weighted_sum(terms, weights);
}

double LossBreakdown::sum_of_parts() const {
    double s = 0.0;
    for (double v : dsc) s += v;
    for (double v : shape) s += v;
    for (double v : overlap) s += v;
    return s;
}

TotalLoss total_loss_graph(Tape& tape, const ParamLeaves& leaves, const NetConfig& cfg,
                           const LossWeights& w, const std::vector<int>& predictions,
                           int assigned_style, const BinaryMask& gt, const BinaryMask& bladder,
                           const BinaryMask& rectum) {
    w.validate();
    if (int(predictions.size()) != cfg.num_styles + 1)
        throw std::invalid_argument("total loss: need one prediction per decoder");
    if (assigned_style < 1 || assigned_style > cfg.num_styles)
        throw std::invalid_argument("total loss: assigned style out of range");

    const int n = assigned_style;
    const int gt_id = tape.leaf(Tensor::from_mask(gt), false);

    std::vector<int> terms;
    terms.push_back(tape.soft_dice_loss(predictions[0], gt_id, w.epsilon));
    terms.push_back(tape.soft_dice_loss(predictions[std::size_t(n)], gt_id, w.epsilon));

    const int shape_term = perceptual_loss_graph(tape, leaves, PerceptualKind::shape, gt_id,
                                                 predictions[std::size_t(n)], cfg,
                                                 w.lambda_shape, w.epsilon);
    // The overlap net sees (ctv, bladder, rectum); organs are fixed inputs.
    Tensor organs(2, gt.height(), gt.width());
    for (int r = 0; r < gt.height(); ++r)
        for (int c = 0; c < gt.width(); ++c) {
            organs.at(0, r, c) = bladder.at(r, c) ? 1.0 : 0.0;
            organs.at(1, r, c) = rectum.at(r, c) ? 1.0 : 0.0;
        }
    const int organs_id = tape.leaf(std::move(organs), false);
    const int overlap_term = perceptual_loss_graph(
        tape, leaves, PerceptualKind::overlap, tape.concat(gt_id, organs_id),
        tape.concat(predictions[std::size_t(n)], organs_id), cfg, w.lambda_overlap, w.epsilon);

    terms.push_back(shape_term);
    terms.push_back(overlap_term);

    TotalLoss out;
    out.node = tape.weighted_sum(terms, std::vector<double>(terms.size(), 1.0));
    out.breakdown.total = tape.scalar(out.node);
    out.breakdown.active_style = n;
    out.breakdown.dsc.assign(std::size_t(cfg.num_styles) + 1, 0.0);
    out.breakdown.shape.assign(std::size_t(cfg.num_styles) + 1, 0.0);
    out.breakdown.overlap.assign(std::size_t(cfg.num_styles) + 1, 0.0);
    out.breakdown.dsc[0] = tape.scalar(terms[0]);
    out.breakdown.dsc[std::size_t(n)] = tape.scalar(terms[1]);
    out.breakdown.shape[std::size_t(n)] = tape.scalar(shape_term);
    out.breakdown.overlap[std::size_t(n)] = tape.scalar(overlap_term);
    return out;
}

}  // namespace psa::nets
