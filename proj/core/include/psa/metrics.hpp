#pragma once

#include <utility>
#include <vector>

#include "psa/grid.hpp"

namespace psa::metrics {

/// Dice similarity coefficient. Two empty masks score 1, one empty scores 0.
double dsc(const BinaryMask& a, const BinaryMask& b);

/// Surface pixels: foreground pixels with at least one background 4-neighbor,
/// where out-of-bounds counts as background.
BinaryMask surface(const BinaryMask& m);

/// Directed average surface distance from `a` surfaces to `b` surfaces.
/// Throws std::invalid_argument if either mask is empty.
double asd(const BinaryMask& a, const BinaryMask& b);

/// Average symmetric surface distance: summed directed distances both ways
/// divided by the total surface pixel count.
double assd(const BinaryMask& a, const BinaryMask& b);

/// 95th-percentile Hausdorff distance: the larger of the two directed
/// nearest-rank 95th percentiles (rank ceil(0.95 * k), 1-based, over each
/// sorted directed distance list).
double hd95(const BinaryMask& a, const BinaryMask& b);

/// Sensitivity TP / (TP + FN). Throws if the reference mask is empty.
double tpr(const BinaryMask& pred, const BinaryMask& ref);

/// Specificity TN / (TN + FP). Throws if the reference mask is full.
double tnr(const BinaryMask& pred, const BinaryMask& ref);

/// Both rates at once; the reference must contain both labels.
std::pair<double, double> tpr_tnr(const BinaryMask& pred, const BinaryMask& ref);

struct SegScores {
    double dsc = 0.0;
    double hd95 = 0.0;
    double asd = 0.0;   // directed prediction -> reference
    double assd = 0.0;
    double tpr = 0.0;
    double tnr = 0.0;
};

/// All segmentation scores for one prediction/reference pair.
SegScores evaluate_pair(const BinaryMask& pred, const BinaryMask& ref);

double mean(const std::vector<double>& xs);
double sample_stddev(const std::vector<double>& xs);

}  // namespace psa::metrics
