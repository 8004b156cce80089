#ifndef RTKM_GEOMETRY_HPP
#define RTKM_GEOMETRY_HPP

#include <Eigen/Core>

namespace rtkm {

/// The capped simplex {w in [0,1]^n : sum(w) = mass}.
struct CappedSimplex {
    Eigen::Index dimension = 1;
    double mass = 1.0;

    /// Throws InvalidArgument unless 0 <= mass <= dimension and dimension >= 1.
    void validate() const;
};

/// Euclidean projection of y onto the capped simplex.
///
/// The result is clip(y - tau, 0, 1) where tau solves sum(clip(y - tau, 0, 1)) = mass.
/// tau is located exactly by scanning the sorted breakpoints {y_j, y_j - 1} of that
/// piecewise-linear, nonincreasing function, so no tolerance is involved.
///
/// Throws InvalidArgument on an infeasible simplex or size mismatch and
/// NumericError when y has non-finite entries.
Eigen::VectorXd project_capped_simplex(const Eigen::Ref<const Eigen::VectorXd>& y,
                                       const CappedSimplex& simplex);

}  // namespace rtkm

#endif  // RTKM_GEOMETRY_HPP
