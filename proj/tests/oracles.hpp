// Test-only reference implementations. None of these share code with the
// library paths they check.
#ifndef RTKM_TESTS_ORACLES_HPP
#define RTKM_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace oracle {

// Minimizes ||w - y||^2 over {w in [0,1]^n : sum w = mass} by grid refinement
// over the first n - 1 coordinates (the last one is fixed by the sum).
inline Eigen::VectorXd grid_projection(const Eigen::VectorXd& y, double mass) {
    const int n = static_cast<int>(y.size());
    if (n == 1) return Eigen::VectorXd::Constant(1, mass);
    const int free = n - 1;
    constexpr int half = 5;  // 11 grid points per axis and level

    Eigen::VectorXd center = Eigen::VectorXd::Constant(free, 0.5);
    double radius = 0.5;
    Eigen::VectorXd best_w(n);
    double best = std::numeric_limits<double>::infinity();
    bool found = false;

    std::vector<int> counter(static_cast<std::size_t>(free));
    while (radius > 1e-10) {
        const double h = radius / half;
        Eigen::VectorXd level_best_center = center;
        std::fill(counter.begin(), counter.end(), -half);
        while (true) {
            Eigen::VectorXd w(n);
            double sum = 0.0;
            for (int d = 0; d < free; ++d) {
                w[d] = std::clamp(center[d] + counter[static_cast<std::size_t>(d)] * h, 0.0, 1.0);
                sum += w[d];
            }
            w[free] = mass - sum;
            if (w[free] >= 0.0 && w[free] <= 1.0) {
                const double obj = (w - y).squaredNorm();
                if (obj < best) {
                    best = obj;
                    best_w = w;
                    level_best_center = w.head(free);
                    found = true;
                }
            }
            int d = 0;
            while (d < free && ++counter[static_cast<std::size_t>(d)] > half) {
                counter[static_cast<std::size_t>(d)] = -half;
                ++d;
            }
            if (d == free) break;
        }
        center = level_best_center;
        if (found) radius /= 2.0;
    }
    return best_w;
}

// Best total score over one-to-one matchings of rows to columns (rows may stay
// unmatched when there are fewer columns), by enumerating permutations.
inline double best_matching_score(const Eigen::MatrixXd& scores) {
    const int rows = static_cast<int>(scores.rows());
    const int cols = static_cast<int>(scores.cols());
    const int n = std::max(rows, cols);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double best = -std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (int r = 0; r < rows; ++r) {
            const int c = perm[static_cast<std::size_t>(r)];
            if (c < cols) total += scores(r, c);
        }
        best = std::max(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Random Gaussian blobs: k centers uniform in [-spread_centers, spread_centers]^m.
inline Eigen::MatrixXd random_blobs(std::mt19937_64& rng, int m, int n, int k,
                                    double center_range, double spread) {
    std::uniform_real_distribution<double> box(-center_range, center_range);
    std::normal_distribution<double> gauss(0.0, spread);
    Eigen::MatrixXd centers(m, k);
    for (int j = 0; j < k; ++j)
        for (int f = 0; f < m; ++f) centers(f, j) = box(rng);
    Eigen::MatrixXd points(m, n);
    for (int i = 0; i < n; ++i)
        for (int f = 0; f < m; ++f) points(f, i) = centers(f, i % k) + gauss(rng);
    return points;
}

}  // namespace oracle

#endif  // RTKM_TESTS_ORACLES_HPP
