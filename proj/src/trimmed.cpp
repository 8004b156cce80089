#include <algorithm>
#include <numeric>
#include <string>

#include "rtkm/error.hpp"
#include "rtkm/solver.hpp"

namespace rtkm {

// Staged baseline: converge plain k-means first, then alternate
// {assign to nearest, drop the [alpha N] farthest, recompute means of the rest}
// until neither the assignment nor the trimmed set changes.
FitResult fit_trimmed_kmeans(const Dataset& data, const SolverConfig& config) {
    data.validate();
    config.validate(data);
    const Eigen::Index n = data.size();
    const Eigen::Index k = config.k;
    const Eigen::Index trimmed = trimmed_count(config.alpha, n);
    if (k > n - trimmed) {
        throw InvalidArgument("k = " + std::to_string(k) + " exceeds the " +
                              std::to_string(n - trimmed) + " points left after trimming");
    }

    FitResult result = fit_kmeans(data, config);
    if (trimmed == 0) return result;
    result.converged = false;

    std::vector<Eigen::Index> labels(static_cast<std::size_t>(n));
    std::vector<Eigen::Index> prev_labels;
    std::vector<bool> dropped(static_cast<std::size_t>(n));
    std::vector<bool> prev_dropped;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    Eigen::VectorXd nearest(n);

    const int budget = config.max_iters - result.iterations;
    for (int step = 0; step < std::max(budget, 1); ++step) {
        const Eigen::MatrixXd dist = detail::squared_distances(data.points, result.centers);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::Index j = detail::argmin(dist.col(i));
            labels[static_cast<std::size_t>(i)] = j;
            nearest[i] = dist(j, i);
        }
        // Farthest first; equal distances trim the lower index first.
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](Eigen::Index a, Eigen::Index b) { return nearest[a] > nearest[b]; });
        std::fill(dropped.begin(), dropped.end(), false);
        for (Eigen::Index r = 0; r < trimmed; ++r) {
            dropped[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = true;
        }

        if (labels == prev_labels && dropped == prev_dropped) {
            result.converged = true;
            break;
        }
        prev_labels = labels;
        prev_dropped = dropped;

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(data.dims(), k);
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (dropped[static_cast<std::size_t>(i)]) continue;
            const auto j = labels[static_cast<std::size_t>(i)];
            sums.col(j) += data.points.col(i);
            counts[j] += 1.0;
        }
        for (Eigen::Index j = 0; j < k; ++j) {
            if (counts[j] > 0.0) result.centers.col(j) = sums.col(j) / counts[j];
        }

        double objective = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (dropped[static_cast<std::size_t>(i)]) continue;
            objective += (data.points.col(i) - result.centers.col(labels[static_cast<std::size_t>(i)]))
                             .squaredNorm();
        }
        result.objective_trace.push_back(objective);
        ++result.iterations;
    }

    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(k, n);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    result.assignments.assign(static_cast<std::size_t>(n), {});
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        w(prev_labels[idx], i) = 1.0;
        if (prev_dropped[idx]) {
            v[i] = 0.0;
        } else {
            result.assignments[idx] = {static_cast<int>(prev_labels[idx])};
        }
    }
    result.memberships = MembershipMatrix{std::move(w), 1};
    result.inliers = InlierVector{std::move(v), config.alpha};
    result.outlier_flags = prev_dropped;
    return result;
}

}  // namespace rtkm
