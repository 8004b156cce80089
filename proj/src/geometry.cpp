#include "rtkm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "rtkm/error.hpp"

namespace rtkm {

void CappedSimplex::validate() const {
    if (dimension < 1) {
        throw InvalidArgument("capped simplex dimension must be positive");
    }
    if (!(mass >= 0.0) || mass > static_cast<double>(dimension)) {
        throw InvalidArgument("capped simplex mass " + std::to_string(mass) +
                              " outside [0, " + std::to_string(dimension) + "]");
    }
}

Eigen::VectorXd project_capped_simplex(const Eigen::Ref<const Eigen::VectorXd>& y,
                                       const CappedSimplex& simplex) {
    simplex.validate();
    const Eigen::Index n = y.size();
    if (n != simplex.dimension) {
        throw InvalidArgument("projection input has length " + std::to_string(n) +
                              ", simplex dimension is " + std::to_string(simplex.dimension));
    }
    if (!y.allFinite()) {
        throw NumericError("projection input contains non-finite entries");
    }
    if (simplex.mass == 0.0) {
        return Eigen::VectorXd::Zero(n);
    }
    if (simplex.mass == static_cast<double>(n)) {
        return Eigen::VectorXd::Ones(n);
    }

    // Scanning tau downward: coordinate j starts growing at tau = y_j (slope +1)
    // and saturates at tau = y_j - 1 (slope -1).
    std::vector<std::pair<double, int>> events;
    events.reserve(static_cast<std::size_t>(2 * n));
    for (Eigen::Index j = 0; j < n; ++j) {
        events.emplace_back(y[j], +1);
        events.emplace_back(y[j] - 1.0, -1);
    }
    std::sort(events.begin(), events.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    double tau = events.front().first;
    double total = 0.0;
    int slope = 0;
    for (const auto& [breakpoint, delta] : events) {
        const double next_total = total + slope * (tau - breakpoint);
        if (next_total >= simplex.mass) {
            tau -= (simplex.mass - total) / slope;
            total = simplex.mass;
            break;
        }
        total = next_total;
        tau = breakpoint;
        slope += delta;
    }
    // Falling off the end would mean mass >= n, excluded above.

    return (y.array() - tau).min(1.0).max(0.0).matrix();
}

}  // namespace rtkm
