#ifndef RTKM_SOLVER_HPP
#define RTKM_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace rtkm {

/// Cluster index sets, one per point. An empty set marks an outlier.
using Assignments = std::vector<std::vector<int>>;

/// Column-major point cloud: points(:, i) is point i, one row per feature.
struct Dataset {
    Eigen::MatrixXd points;
    std::optional<Assignments> truth_memberships;
    std::optional<std::vector<bool>> truth_outliers;

    Eigen::Index dims() const { return points.rows(); }
    Eigen::Index size() const { return points.cols(); }

    /// Throws InvalidArgument / DataError when the invariants do not hold.
    void validate() const;
};

/// m x k matrix, column j is the centroid of cluster j.
using Centers = Eigen::MatrixXd;

/// k x N weights; every column lies in the s-capped simplex.
struct MembershipMatrix {
    Eigen::MatrixXd weights;
    int s = 1;
};

/// Per-point inlier weights in the (N - [alpha N])-capped simplex.
struct InlierVector {
    Eigen::VectorXd weights;
    double alpha = 0.0;
};

enum class Algorithm { kmeans, relaxed, rtkm, trimmed };
enum class InitScheme { random_points, kmeans_plus_plus };

/// Starting point for the membership matrix of the relaxed solvers.
enum class WeightInit {
    uniform,  // every entry s/k
    random,   // uniform draw per column projected onto the s-capped simplex
    nearest,  // ones on the s nearest initial centers
};

std::string_view to_string(Algorithm a);
std::string_view to_string(InitScheme s);
std::string_view to_string(WeightInit w);
Algorithm parse_algorithm(std::string_view name);
InitScheme parse_init_scheme(std::string_view name);
WeightInit parse_weight_init(std::string_view name);

struct SolverConfig {
    int k = 2;
    int s = 1;
    double alpha = 0.0;
    double step_d = 1.1;
    double step_e = 1.1;
    int max_iters = 500;
    double tol = 1e-8;
    std::uint64_t seed = 0;
    InitScheme init = InitScheme::random_points;
    WeightInit weight_init = WeightInit::uniform;
    double support_threshold = 1e-6;
    /// Overrides `init` when set; must be dims x k.
    std::optional<Centers> initial_centers;

    void validate(const Dataset& data) const;
};

struct FitResult {
    Centers centers;
    MembershipMatrix memberships;
    InlierVector inliers;
    Assignments assignments;
    std::vector<bool> outlier_flags;
    std::vector<double> objective_trace;
    int iterations = 0;
    bool converged = false;

    double objective() const { return objective_trace.empty() ? 0.0 : objective_trace.back(); }
};

/// [alpha N]: nearest integer, halves rounded up.
Eigen::Index trimmed_count(double alpha, Eigen::Index n);

/// sum_j sum_i w_ji ||x_i - c_j||^2
double objective_kmeans(const Dataset& data, const Centers& centers,
                        const MembershipMatrix& memberships);

/// sum_i v_i sum_j w_ji ||x_i - c_j||^2
double objective_rtkm(const Dataset& data, const Centers& centers,
                      const MembershipMatrix& memberships, const InlierVector& inliers);

/// k distinct data columns chosen uniformly (random_points) or by D^2 sampling.
Centers init_centers(const Dataset& data, const SolverConfig& config);

struct HardAssignment {
    Assignments assignments;
    std::vector<bool> outlier_flags;
};

/// Flags the [alpha N] smallest inlier weights (ties to the lowest index) as outliers.
/// Inliers get argmax (s = 1) or {j : w_ji > threshold} (s > 1); outliers get {}.
HardAssignment hard_assign(const MembershipMatrix& memberships, const InlierVector& inliers,
                           double threshold = 1e-6);

FitResult fit_kmeans(const Dataset& data, const SolverConfig& config);
FitResult fit_relaxed_kmeans(const Dataset& data, const SolverConfig& config);
FitResult fit_rtkm(const Dataset& data, const SolverConfig& config);
FitResult fit_trimmed_kmeans(const Dataset& data, const SolverConfig& config);

FitResult fit(const Dataset& data, Algorithm algorithm, const SolverConfig& config);

namespace detail {

/// k x N matrix of ||x_i - c_j||^2.
Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& points, const Centers& centers);

/// Index of the smallest entry, lowest index on ties.
Eigen::Index argmin(const Eigen::Ref<const Eigen::VectorXd>& values);

}  // namespace detail

}  // namespace rtkm

#endif  // RTKM_SOLVER_HPP
