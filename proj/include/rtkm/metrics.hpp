#ifndef RTKM_METRICS_HPP
#define RTKM_METRICS_HPP

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace rtkm {

/// Point-index sets over {0, ..., size - 1}. Clusters may overlap.
struct Clustering {
    std::size_t size = 0;
    std::vector<std::vector<int>> clusters;
    std::vector<int> outliers;

    /// Builds cluster sets from per-point assignments (empty set = no cluster).
    static Clustering from_assignments(const std::vector<std::vector<int>>& assignments,
                                       const std::vector<bool>& outlier_flags = {});
};

/// TP / (TP + (FP + FN) / 2); the vacuous case 0/0/0 scores 1.
double f1_single(std::size_t tp, std::size_t fp, std::size_t fn);

/// F1 of one predicted set against one truth set (both sorted or not).
double f1_sets(const std::vector<int>& predicted, const std::vector<int>& truth,
               std::size_t universe);

/// Mean F1 over truth clusters under the best one-to-one matching with the
/// predicted clusters. When truth has outliers, each side's outlier set joins
/// the matching as one extra cluster. Unmatched truth clusters score 0.
double average_f1(const Clustering& predicted, const Clustering& truth);

/// Distance of the (FP rate, TP rate) point from (0, 1) on the ROC plane.
double me_score(const std::vector<bool>& predicted, const std::vector<bool>& truth);

/// Maximum-weight perfect matching on a square matrix (Kuhn-Munkres).
/// Returns col[row]. Rectangular inputs are padded with zeros internally and
/// entries >= the original column count mean "unmatched".
std::vector<Eigen::Index> max_weight_assignment(const Eigen::MatrixXd& weights);

}  // namespace rtkm

#endif  // RTKM_METRICS_HPP
