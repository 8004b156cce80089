#include "rtkm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rtkm/error.hpp"

namespace rtkm {

namespace {

std::vector<int> sorted_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

void check_indices(const std::vector<int>& set, std::size_t universe) {
    for (int i : set) {
        if (i < 0 || static_cast<std::size_t>(i) >= universe) {
            throw InvalidArgument("point index " + std::to_string(i) + " outside [0, " +
                                  std::to_string(universe) + ")");
        }
    }
}

}  // namespace

Clustering Clustering::from_assignments(const std::vector<std::vector<int>>& assignments,
                                        const std::vector<bool>& outlier_flags) {
    Clustering out;
    out.size = assignments.size();
    if (!outlier_flags.empty() && outlier_flags.size() != assignments.size()) {
        throw InvalidArgument("outlier flags and assignments differ in length");
    }
    int max_label = -1;
    for (const auto& set : assignments) {
        for (int c : set) {
            if (c < 0) throw InvalidArgument("negative cluster label");
            max_label = std::max(max_label, c);
        }
    }
    out.clusters.resize(static_cast<std::size_t>(max_label + 1));
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        for (int c : sorted_unique(assignments[i])) {
            out.clusters[static_cast<std::size_t>(c)].push_back(static_cast<int>(i));
        }
        if (!outlier_flags.empty() && outlier_flags[i]) out.outliers.push_back(static_cast<int>(i));
    }
    return out;
}

double f1_single(std::size_t tp, std::size_t fp, std::size_t fn) {
    if (tp == 0 && fp == 0 && fn == 0) return 1.0;
    return static_cast<double>(tp) /
           (static_cast<double>(tp) + 0.5 * static_cast<double>(fp + fn));
}

double f1_sets(const std::vector<int>& predicted, const std::vector<int>& truth,
               std::size_t universe) {
    check_indices(predicted, universe);
    check_indices(truth, universe);
    const auto p = sorted_unique(predicted);
    const auto t = sorted_unique(truth);
    std::vector<int> common;
    std::set_intersection(p.begin(), p.end(), t.begin(), t.end(), std::back_inserter(common));
    const std::size_t tp = common.size();
    return f1_single(tp, p.size() - tp, t.size() - tp);
}

std::vector<Eigen::Index> max_weight_assignment(const Eigen::MatrixXd& weights) {
    const Eigen::Index rows = weights.rows();
    const Eigen::Index cols = weights.cols();
    const Eigen::Index n = std::max(rows, cols);
    if (n == 0) return {};

    // Minimize (max - w) on the zero-padded square matrix.
    Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(n, n);
    cost.topLeftCorner(rows, cols) = weights;
    const double top = cost.maxCoeff();
    cost = (top - cost.array()).matrix();

    // Potentials-based Hungarian method, 1-based with a sentinel column 0.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0);
    std::vector<double> v(static_cast<std::size_t>(n + 1), 0.0);
    std::vector<Eigen::Index> match(static_cast<std::size_t>(n + 1), 0);  // column -> row
    std::vector<Eigen::Index> way(static_cast<std::size_t>(n + 1), 0);
    for (Eigen::Index row = 1; row <= n; ++row) {
        match[0] = row;
        Eigen::Index col0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
        std::vector<bool> used(static_cast<std::size_t>(n + 1), false);
        do {
            used[static_cast<std::size_t>(col0)] = true;
            const Eigen::Index row0 = match[static_cast<std::size_t>(col0)];
            double delta = inf;
            Eigen::Index col1 = 0;
            for (Eigen::Index c = 1; c <= n; ++c) {
                const auto ci = static_cast<std::size_t>(c);
                if (used[ci]) continue;
                const double reduced = cost(row0 - 1, c - 1) - u[static_cast<std::size_t>(row0)] - v[ci];
                if (reduced < minv[ci]) {
                    minv[ci] = reduced;
                    way[ci] = col0;
                }
                if (minv[ci] < delta) {
                    delta = minv[ci];
                    col1 = c;
                }
            }
            for (Eigen::Index c = 0; c <= n; ++c) {
                const auto ci = static_cast<std::size_t>(c);
                if (used[ci]) {
                    u[static_cast<std::size_t>(match[ci])] += delta;
                    v[ci] -= delta;
                } else {
                    minv[ci] -= delta;
                }
            }
            col0 = col1;
        } while (match[static_cast<std::size_t>(col0)] != 0);
        do {
            const Eigen::Index col1 = way[static_cast<std::size_t>(col0)];
            match[static_cast<std::size_t>(col0)] = match[static_cast<std::size_t>(col1)];
            col0 = col1;
        } while (col0 != 0);
    }

    std::vector<Eigen::Index> assignment(static_cast<std::size_t>(rows), cols);
    for (Eigen::Index c = 1; c <= n; ++c) {
        const Eigen::Index r = match[static_cast<std::size_t>(c)] - 1;
        if (r < rows) assignment[static_cast<std::size_t>(r)] = c - 1;
    }
    return assignment;
}

double average_f1(const Clustering& predicted, const Clustering& truth) {
    if (predicted.size != truth.size) {
        throw InvalidArgument("predicted clustering covers " + std::to_string(predicted.size) +
                              " points, truth covers " + std::to_string(truth.size));
    }
    std::vector<std::vector<int>> truth_sets = truth.clusters;
    std::vector<std::vector<int>> predicted_sets = predicted.clusters;
    if (!truth.outliers.empty()) {
        truth_sets.push_back(truth.outliers);
        predicted_sets.push_back(predicted.outliers);
    }
    if (truth_sets.empty()) throw InvalidArgument("truth clustering has no clusters");

    const auto t = static_cast<Eigen::Index>(truth_sets.size());
    const auto p = static_cast<Eigen::Index>(predicted_sets.size());
    Eigen::MatrixXd scores(t, p);
    for (Eigen::Index a = 0; a < t; ++a) {
        for (Eigen::Index b = 0; b < p; ++b) {
            scores(a, b) = f1_sets(predicted_sets[static_cast<std::size_t>(b)],
                                   truth_sets[static_cast<std::size_t>(a)], truth.size);
        }
    }
    const auto match = max_weight_assignment(scores);
    double total = 0.0;
    for (Eigen::Index a = 0; a < t; ++a) {
        const Eigen::Index b = match[static_cast<std::size_t>(a)];
        if (b < p) total += scores(a, b);
    }
    return total / static_cast<double>(t);
}

double me_score(const std::vector<bool>& predicted, const std::vector<bool>& truth) {
    if (predicted.size() != truth.size()) {
        throw InvalidArgument("predicted and truth outlier flags differ in length");
    }
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i]) {
            predicted[i] ? ++tp : ++fn;
        } else {
            predicted[i] ? ++fp : ++tn;
        }
    }
    if (tp + fn == 0) throw InvalidArgument("truth has no outliers; M_e is undefined");
    if (fp + tn == 0) throw InvalidArgument("truth has no inliers; M_e is undefined");
    const double tp_rate = static_cast<double>(tp) / static_cast<double>(tp + fn);
    const double fp_rate = static_cast<double>(fp) / static_cast<double>(fp + tn);
    return std::sqrt(fp_rate * fp_rate + (1.0 - tp_rate) * (1.0 - tp_rate));
}

}  // namespace rtkm
