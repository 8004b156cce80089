#include <random>
#include <string>

#include "rtkm/data.hpp"
#include "rtkm/error.hpp"

namespace rtkm {

void SynthSpec::validate() const {
    if (means.empty()) throw InvalidArgument("synthetic spec needs at least one cluster");
    if (spreads.size() != means.size() || counts.size() != means.size()) {
        throw InvalidArgument("synthetic spec: means, spreads and counts differ in length");
    }
    const Eigen::Index m = means.front().size();
    if (m < 1) throw InvalidArgument("synthetic spec: zero-dimensional means");
    for (std::size_t c = 0; c < means.size(); ++c) {
        if (means[c].size() != m) throw InvalidArgument("synthetic spec: ragged means");
        if (!(spreads[c] >= 0.0)) throw InvalidArgument("synthetic spec: negative spread");
        if (counts[c] < 1) throw InvalidArgument("synthetic spec: cluster counts must be positive");
    }
    if (outlier_count < 0) throw InvalidArgument("synthetic spec: negative outlier count");
    if (outlier_count > 0) {
        if (box_lo.size() != m || box_hi.size() != m) {
            throw InvalidArgument("synthetic spec: outlier box has the wrong dimension");
        }
        for (const auto& mean : means) {
            if (!((mean.array() > box_lo.array()).all() && (mean.array() < box_hi.array()).all())) {
                throw InvalidArgument("synthetic spec: outlier box must strictly contain every mean");
            }
        }
    }
}

SynthSpec SynthSpec::three_blobs_two_outliers(std::uint64_t seed) {
    SynthSpec spec;
    spec.means = {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.5, 0.85)};
    spec.spreads = {0.1, 0.1, 0.1};
    spec.counts = {50, 50, 50};
    spec.outlier_count = 2;
    spec.box_lo = Eigen::Vector2d(-4.0, -4.0);
    spec.box_hi = Eigen::Vector2d(5.0, 5.0);
    spec.outlier_min_distance = 3.0;
    spec.seed = seed;
    return spec;
}

Dataset generate_synthetic(const SynthSpec& spec) {
    spec.validate();
    const Eigen::Index m = spec.means.front().size();
    Eigen::Index n = spec.outlier_count;
    for (int c : spec.counts) n += c;

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Dataset data;
    data.points.resize(m, n);
    Assignments memberships;
    std::vector<bool> outliers;
    memberships.reserve(static_cast<std::size_t>(n));
    outliers.reserve(static_cast<std::size_t>(n));

    Eigen::Index col = 0;
    for (std::size_t c = 0; c < spec.means.size(); ++c) {
        for (int p = 0; p < spec.counts[c]; ++p, ++col) {
            for (Eigen::Index f = 0; f < m; ++f) {
                data.points(f, col) = spec.means[c][f] + spec.spreads[c] * gauss(rng);
            }
            memberships.push_back({static_cast<int>(c)});
            outliers.push_back(false);
        }
    }

    const Eigen::VectorXd width = spec.box_hi - spec.box_lo;
    constexpr int max_attempts = 100000;
    for (int o = 0; o < spec.outlier_count; ++o, ++col) {
        Eigen::VectorXd point(m);
        bool accepted = false;
        for (int attempt = 0; attempt < max_attempts && !accepted; ++attempt) {
            for (Eigen::Index f = 0; f < m; ++f) point[f] = spec.box_lo[f] + width[f] * unit(rng);
            accepted = true;
            for (const auto& mean : spec.means) {
                if ((point - mean).norm() < spec.outlier_min_distance) {
                    accepted = false;
                    break;
                }
            }
        }
        if (!accepted) {
            throw InvalidArgument("synthetic spec: no outlier position satisfies the minimum distance");
        }
        data.points.col(col) = point;
        memberships.emplace_back();
        outliers.push_back(true);
    }

    data.truth_memberships = std::move(memberships);
    data.truth_outliers = std::move(outliers);
    return data;
}

Dataset inject_noise(const Dataset& data, int count, std::uint64_t seed) {
    if (count < 0) throw InvalidArgument("noise count must be non-negative");
    if (count == 0) return data;
    data.validate();

    const Eigen::Index n = data.size();
    const Eigen::Index m = data.dims();
    const Eigen::VectorXd lo = data.points.rowwise().minCoeff();
    const Eigen::VectorXd hi = data.points.rowwise().maxCoeff();

    Dataset out;
    out.points.resize(m, n + count);
    out.points.leftCols(n) = data.points;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (Eigen::Index i = n; i < n + count; ++i) {
        for (Eigen::Index f = 0; f < m; ++f) out.points(f, i) = lo[f] + (hi[f] - lo[f]) * unit(rng);
    }

    if (data.truth_memberships) {
        out.truth_memberships = data.truth_memberships;
        out.truth_memberships->resize(static_cast<std::size_t>(n + count));
    }
    out.truth_outliers = data.truth_outliers.value_or(std::vector<bool>(static_cast<std::size_t>(n), false));
    out.truth_outliers->resize(static_cast<std::size_t>(n + count), true);
    return out;
}

}  // namespace rtkm
