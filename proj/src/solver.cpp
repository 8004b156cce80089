#include "rtkm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "rtkm/error.hpp"
#include "rtkm/geometry.hpp"

namespace rtkm {

namespace {

std::string dims_string(Eigen::Index r, Eigen::Index c) {
    return std::to_string(r) + "x" + std::to_string(c);
}

void check_shapes(const Dataset& data, const Centers& centers, const MembershipMatrix& w) {
    if (centers.rows() != data.dims()) {
        throw InvalidArgument("centers are " + dims_string(centers.rows(), centers.cols()) +
                              " but data has " + std::to_string(data.dims()) + " features");
    }
    if (w.weights.rows() != centers.cols() || w.weights.cols() != data.size()) {
        throw InvalidArgument("membership matrix is " +
                              dims_string(w.weights.rows(), w.weights.cols()) + ", expected " +
                              dims_string(centers.cols(), data.size()));
    }
}

// Weighted-mean center update; a cluster with zero total weight keeps its center.
void update_centers(const Eigen::MatrixXd& points, const Eigen::MatrixXd& weights,
                    Centers& centers) {
    const Eigen::VectorXd mass = weights.rowwise().sum();
    const Eigen::MatrixXd sums = points * weights.transpose();
    for (Eigen::Index j = 0; j < centers.cols(); ++j) {
        if (mass[j] > 0.0) {
            centers.col(j) = sums.col(j) / mass[j];
        }
    }
}

Eigen::MatrixXd initial_weights(const Dataset& data, const SolverConfig& config,
                                const Centers& centers) {
    const Eigen::Index k = config.k;
    const Eigen::Index n = data.size();
    switch (config.weight_init) {
        case WeightInit::uniform:
            return Eigen::MatrixXd::Constant(k, n, static_cast<double>(config.s) / k);
        case WeightInit::random: {
            // Separate stream from center initialization.
            std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            const CappedSimplex simplex{k, static_cast<double>(config.s)};
            Eigen::MatrixXd w(k, n);
            Eigen::VectorXd draw(k);
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index j = 0; j < k; ++j) draw[j] = unit(rng);
                w.col(i) = project_capped_simplex(draw, simplex);
            }
            return w;
        }
        case WeightInit::nearest: {
            const Eigen::MatrixXd dist = detail::squared_distances(data.points, centers);
            Eigen::MatrixXd w = Eigen::MatrixXd::Zero(k, n);
            std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
            for (Eigen::Index i = 0; i < n; ++i) {
                std::iota(order.begin(), order.end(), 0);
                std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
                    return dist(a, i) < dist(b, i);
                });
                for (int r = 0; r < config.s; ++r) w(order[static_cast<std::size_t>(r)], i) = 1.0;
            }
            return w;
        }
    }
    throw InvalidArgument("unknown weight initialization");
}

bool objective_converged(double previous, double current, double tol) {
    return std::abs(current - previous) <= tol * std::max(1.0, std::abs(previous));
}

// Relaxed k-means and RTKM share one proximal alternating loop; the relaxed
// variant simply never touches v, which then stays identically one.
FitResult fit_proximal(const Dataset& data, const SolverConfig& config, bool robust) {
    const Eigen::Index n = data.size();
    const Eigen::Index k = config.k;
    const double alpha = robust ? config.alpha : 0.0;
    const Eigen::Index trimmed = trimmed_count(alpha, n);
    const double inlier_mass = static_cast<double>(n - trimmed);

    FitResult result;
    result.centers = init_centers(data, config);
    Eigen::MatrixXd w = initial_weights(data, config, result.centers);
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, inlier_mass / static_cast<double>(n));

    const CappedSimplex column_simplex{k, static_cast<double>(config.s)};
    const CappedSimplex inlier_simplex{n, inlier_mass};
    const double inv_d = 1.0 / config.step_d;
    const double inv_e = 1.0 / config.step_e;

    Eigen::VectorXd per_point(n);
    for (int iter = 0; iter < config.max_iters; ++iter) {
        // The first pass uses the initial centers directly; recomputing them from
        // an uninformed W would discard the initialization.
        if (iter > 0) {
            update_centers(data.points, w * v.asDiagonal(), result.centers);
        }
        const Eigen::MatrixXd dist = detail::squared_distances(data.points, result.centers);

        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::VectorXd step = w.col(i) - (inv_d * v[i]) * dist.col(i);
            w.col(i) = project_capped_simplex(step, column_simplex);
        }
        for (Eigen::Index i = 0; i < n; ++i) per_point[i] = w.col(i).dot(dist.col(i));
        if (robust && trimmed > 0) {
            v = project_capped_simplex(v - inv_e * per_point, inlier_simplex);
        }

        const double objective = v.dot(per_point);
        if (!std::isfinite(objective)) {
            throw NumericError("objective became non-finite at iteration " + std::to_string(iter));
        }
        result.objective_trace.push_back(objective);
        result.iterations = iter + 1;
        const auto t = result.objective_trace.size();
        if (t >= 2 && objective_converged(result.objective_trace[t - 2], objective, config.tol)) {
            result.converged = true;
            break;
        }
    }

    result.memberships = MembershipMatrix{std::move(w), config.s};
    result.inliers = InlierVector{std::move(v), alpha};
    HardAssignment hard = hard_assign(result.memberships, result.inliers, config.support_threshold);
    result.assignments = std::move(hard.assignments);
    result.outlier_flags = std::move(hard.outlier_flags);
    return result;
}

}  // namespace

namespace detail {

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& points, const Centers& centers) {
    Eigen::MatrixXd dist(centers.cols(), points.cols());
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
        for (Eigen::Index j = 0; j < centers.cols(); ++j) {
            dist(j, i) = (points.col(i) - centers.col(j)).squaredNorm();
        }
    }
    return dist;
}

Eigen::Index argmin(const Eigen::Ref<const Eigen::VectorXd>& values) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < values.size(); ++j) {
        if (values[j] < values[best]) best = j;
    }
    return best;
}

}  // namespace detail

std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::kmeans: return "kmeans";
        case Algorithm::relaxed: return "relaxed";
        case Algorithm::rtkm: return "rtkm";
        case Algorithm::trimmed: return "trimmed";
    }
    return "?";
}

std::string_view to_string(InitScheme s) {
    return s == InitScheme::random_points ? "random-points" : "kmeans++";
}

std::string_view to_string(WeightInit w) {
    switch (w) {
        case WeightInit::uniform: return "uniform";
        case WeightInit::random: return "random";
        case WeightInit::nearest: return "nearest";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name) {
    for (auto a : {Algorithm::kmeans, Algorithm::relaxed, Algorithm::rtkm, Algorithm::trimmed}) {
        if (to_string(a) == name) return a;
    }
    throw InvalidArgument("unknown algorithm '" + std::string(name) + "'");
}

InitScheme parse_init_scheme(std::string_view name) {
    for (auto s : {InitScheme::random_points, InitScheme::kmeans_plus_plus}) {
        if (to_string(s) == name) return s;
    }
    throw InvalidArgument("unknown init scheme '" + std::string(name) + "'");
}

WeightInit parse_weight_init(std::string_view name) {
    for (auto w : {WeightInit::uniform, WeightInit::random, WeightInit::nearest}) {
        if (to_string(w) == name) return w;
    }
    throw InvalidArgument("unknown weight init '" + std::string(name) + "'");
}

void Dataset::validate() const {
    if (points.rows() < 1 || points.cols() < 1) {
        throw DataError("dataset must have at least one point and one feature");
    }
    if (!points.allFinite()) {
        throw DataError("dataset contains non-finite entries");
    }
    const auto n = static_cast<std::size_t>(points.cols());
    if (truth_memberships && truth_memberships->size() != n) {
        throw DataError("truth memberships cover " + std::to_string(truth_memberships->size()) +
                        " points, dataset has " + std::to_string(n));
    }
    if (truth_outliers) {
        if (truth_outliers->size() != n) {
            throw DataError("truth outlier flags cover " + std::to_string(truth_outliers->size()) +
                            " points, dataset has " + std::to_string(n));
        }
        if (truth_memberships) {
            for (std::size_t i = 0; i < n; ++i) {
                if ((*truth_outliers)[i] && !(*truth_memberships)[i].empty()) {
                    throw DataError("point " + std::to_string(i) +
                                    " is a truth outlier but has cluster memberships");
                }
            }
        }
    }
    if (truth_memberships) {
        for (const auto& set : *truth_memberships) {
            for (int c : set) {
                if (c < 0) throw DataError("negative truth cluster index");
            }
        }
    }
}

void SolverConfig::validate(const Dataset& data) const {
    const Eigen::Index n = data.size();
    if (k < 1) throw InvalidArgument("k must be at least 1");
    if (k > n) {
        throw InvalidArgument("k = " + std::to_string(k) + " exceeds the number of points " +
                              std::to_string(n));
    }
    if (s < 1 || s > k) throw InvalidArgument("s must satisfy 1 <= s <= k");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in [0, 1)");
    if (!(step_d > 1.0) || !(step_e > 1.0)) {
        throw InvalidArgument("proximal steps step_d and step_e must exceed 1");
    }
    if (max_iters < 1) throw InvalidArgument("max_iters must be positive");
    if (!(tol >= 0.0)) throw InvalidArgument("tol must be non-negative");
    if (!(support_threshold >= 0.0 && support_threshold < 1.0)) {
        throw InvalidArgument("support threshold must lie in [0, 1)");
    }
    if (trimmed_count(alpha, n) >= n) {
        throw InvalidArgument("alpha trims every point");
    }
    if (initial_centers &&
        (initial_centers->rows() != data.dims() || initial_centers->cols() != k)) {
        throw InvalidArgument("initial centers must be " + dims_string(data.dims(), k));
    }
    if (initial_centers && !initial_centers->allFinite()) {
        throw InvalidArgument("initial centers contain non-finite entries");
    }
}

Eigen::Index trimmed_count(double alpha, Eigen::Index n) {
    // The 1e-9 guard keeps products such as 0.05 * 10 from rounding below one half.
    return static_cast<Eigen::Index>(std::floor(alpha * static_cast<double>(n) + 0.5 + 1e-9));
}

double objective_kmeans(const Dataset& data, const Centers& centers,
                        const MembershipMatrix& memberships) {
    check_shapes(data, centers, memberships);
    const Eigen::MatrixXd dist = detail::squared_distances(data.points, centers);
    return memberships.weights.cwiseProduct(dist).sum();
}

double objective_rtkm(const Dataset& data, const Centers& centers,
                      const MembershipMatrix& memberships, const InlierVector& inliers) {
    check_shapes(data, centers, memberships);
    if (inliers.weights.size() != data.size()) {
        throw InvalidArgument("inlier vector has length " + std::to_string(inliers.weights.size()) +
                              ", expected " + std::to_string(data.size()));
    }
    const Eigen::MatrixXd dist = detail::squared_distances(data.points, centers);
    const Eigen::VectorXd per_point = memberships.weights.cwiseProduct(dist).colwise().sum();
    return inliers.weights.dot(per_point);
}

Centers init_centers(const Dataset& data, const SolverConfig& config) {
    const Eigen::Index n = data.size();
    if (config.k < 1) throw InvalidArgument("k must be at least 1");
    if (config.k > n) {
        throw InvalidArgument("cannot choose " + std::to_string(config.k) + " centers from " +
                              std::to_string(n) + " points");
    }
    if (config.initial_centers) return *config.initial_centers;

    std::mt19937_64 rng(config.seed);
    std::vector<Eigen::Index> chosen;
    chosen.reserve(static_cast<std::size_t>(config.k));

    if (config.init == InitScheme::random_points) {
        // Partial Fisher-Yates over the column indices.
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        for (int j = 0; j < config.k; ++j) {
            std::uniform_int_distribution<Eigen::Index> pick(j, n - 1);
            std::swap(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(pick(rng))]);
            chosen.push_back(idx[static_cast<std::size_t>(j)]);
        }
    } else {
        std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
        chosen.push_back(first(rng));
        std::vector<bool> taken(static_cast<std::size_t>(n), false);
        taken[static_cast<std::size_t>(chosen.back())] = true;
        Eigen::VectorXd nearest = (data.points.colwise() - data.points.col(chosen.back()))
                                      .colwise()
                                      .squaredNorm()
                                      .transpose();
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        while (static_cast<int>(chosen.size()) < config.k) {
            double total = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (!taken[static_cast<std::size_t>(i)]) total += nearest[i];
            }
            Eigen::Index next = -1;
            if (total > 0.0) {
                double target = unit(rng) * total;
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (taken[static_cast<std::size_t>(i)]) continue;
                    next = i;
                    target -= nearest[i];
                    if (target < 0.0 && nearest[i] > 0.0) break;
                }
            } else {
                // Every remaining point duplicates a chosen one.
                std::vector<Eigen::Index> free;
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (!taken[static_cast<std::size_t>(i)]) free.push_back(i);
                }
                std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
                next = free[pick(rng)];
            }
            chosen.push_back(next);
            taken[static_cast<std::size_t>(next)] = true;
            const Eigen::VectorXd d =
                (data.points.colwise() - data.points.col(next)).colwise().squaredNorm().transpose();
            nearest = nearest.cwiseMin(d);
        }
    }

    Centers centers(data.dims(), config.k);
    for (int j = 0; j < config.k; ++j) {
        centers.col(j) = data.points.col(chosen[static_cast<std::size_t>(j)]);
    }
    return centers;
}

HardAssignment hard_assign(const MembershipMatrix& memberships, const InlierVector& inliers,
                           double threshold) {
    const Eigen::MatrixXd& w = memberships.weights;
    const Eigen::Index n = w.cols();
    if (inliers.weights.size() != n) {
        throw InvalidArgument("inlier vector length does not match membership columns");
    }

    HardAssignment out;
    out.outlier_flags.assign(static_cast<std::size_t>(n), false);
    const Eigen::Index trimmed = trimmed_count(inliers.alpha, n);
    if (trimmed > 0) {
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            return inliers.weights[a] < inliers.weights[b];
        });
        for (Eigen::Index r = 0; r < trimmed && r < n; ++r) {
            out.outlier_flags[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = true;
        }
    }

    out.assignments.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        if (out.outlier_flags[static_cast<std::size_t>(i)]) continue;
        auto& set = out.assignments[static_cast<std::size_t>(i)];
        if (memberships.s > 1) {
            for (Eigen::Index j = 0; j < w.rows(); ++j) {
                if (w(j, i) > threshold) set.push_back(static_cast<int>(j));
            }
        }
        if (set.empty()) {
            Eigen::Index best = 0;
            for (Eigen::Index j = 1; j < w.rows(); ++j) {
                if (w(j, i) > w(best, i)) best = j;
            }
            set.push_back(static_cast<int>(best));
        }
    }
    return out;
}

FitResult fit_kmeans(const Dataset& data, const SolverConfig& config) {
    data.validate();
    config.validate(data);
    if (config.s != 1) throw InvalidArgument("k-means requires s = 1");

    const Eigen::Index n = data.size();
    const Eigen::Index k = config.k;
    FitResult result;
    result.centers = init_centers(data, config);

    std::vector<Eigen::Index> labels(static_cast<std::size_t>(n), -1);
    std::vector<Eigen::Index> next(static_cast<std::size_t>(n));
    for (int iter = 0; iter < config.max_iters; ++iter) {
        const Eigen::MatrixXd dist = detail::squared_distances(data.points, result.centers);
        for (Eigen::Index i = 0; i < n; ++i) {
            next[static_cast<std::size_t>(i)] = detail::argmin(dist.col(i));
        }
        if (next == labels) {
            result.converged = true;
            break;
        }
        labels = next;

        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(k, n);
        for (Eigen::Index i = 0; i < n; ++i) w(labels[static_cast<std::size_t>(i)], i) = 1.0;
        update_centers(data.points, w, result.centers);

        double objective = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            objective +=
                (data.points.col(i) - result.centers.col(labels[static_cast<std::size_t>(i)]))
                    .squaredNorm();
        }
        result.objective_trace.push_back(objective);
        result.iterations = iter + 1;
    }

    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(k, n);
    result.assignments.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto label = labels[static_cast<std::size_t>(i)];
        w(label, i) = 1.0;
        result.assignments[static_cast<std::size_t>(i)] = {static_cast<int>(label)};
    }
    result.memberships = MembershipMatrix{std::move(w), 1};
    result.inliers = InlierVector{Eigen::VectorXd::Ones(n), 0.0};
    result.outlier_flags.assign(static_cast<std::size_t>(n), false);
    return result;
}

FitResult fit_relaxed_kmeans(const Dataset& data, const SolverConfig& config) {
    data.validate();
    config.validate(data);
    return fit_proximal(data, config, /*robust=*/false);
}

FitResult fit_rtkm(const Dataset& data, const SolverConfig& config) {
    data.validate();
    config.validate(data);
    return fit_proximal(data, config, /*robust=*/true);
}

FitResult fit(const Dataset& data, Algorithm algorithm, const SolverConfig& config) {
    switch (algorithm) {
        case Algorithm::kmeans: return fit_kmeans(data, config);
        case Algorithm::relaxed: return fit_relaxed_kmeans(data, config);
        case Algorithm::rtkm: return fit_rtkm(data, config);
        case Algorithm::trimmed: return fit_trimmed_kmeans(data, config);
    }
    throw InvalidArgument("unknown algorithm");
}

}  // namespace rtkm
