#ifndef RTKM_DATA_HPP
#define RTKM_DATA_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "rtkm/solver.hpp"

namespace rtkm {

/// Which CSV columns carry ground-truth labels.
struct LabelSpec {
    enum class Kind { none, class_column, indicator_block };
    Kind kind = Kind::none;
    int column = -1;  // class_column: zero-based column index
    int width = 0;    // indicator_block: number of trailing 0/1 columns

    static LabelSpec none() { return {}; }
    static LabelSpec class_column(int column) { return {Kind::class_column, column, 0}; }
    static LabelSpec indicators(int width) { return {Kind::indicator_block, -1, width}; }

    /// "none", "col:<index>" or "last:<width>".
    static LabelSpec parse(std::string_view text);
    std::string to_string() const;
};

struct CsvOptions {
    char delimiter = ',';
    /// Unset: the first row is a header iff one of its feature fields is not numeric.
    std::optional<bool> header;
    /// Zero-based feature columns; empty selects every non-label column.
    std::vector<int> feature_columns;
};

/// N records of m features plus per-record class sets.
struct LabeledTable {
    Eigen::MatrixXd rows;  // N x m
    std::vector<std::vector<int>> labels;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;

    Eigen::Index record_count() const { return rows.rows(); }
    Eigen::Index feature_count() const { return rows.cols(); }
    int class_count() const { return static_cast<int>(class_names.size()); }
    /// Mean number of labels per record.
    double cardinality() const;

    bool operator==(const LabeledTable& other) const;
};

LabeledTable parse_csv(std::istream& in, const LabelSpec& labels, const CsvOptions& options = {});
LabeledTable load_csv(const std::filesystem::path& path, const LabelSpec& labels,
                      const CsvOptions& options = {});

/// Writes a header row, the features, and one 0/1 indicator column per class;
/// reload with LabelSpec::indicators(class_count()).
void write_csv(const LabeledTable& table, std::ostream& out);
void write_csv(const LabeledTable& table, const std::filesystem::path& path);

/// How to treat a record whose labels mix inlier and outlier classes.
enum class MixedLabelPolicy { inlier, outlier, reject };

/// Transposes the table into a Dataset. Inlier classes are renumbered densely in
/// ascending order; records whose labels all fall in `outlier_classes` become
/// truth outliers with empty memberships.
Dataset to_dataset(const LabeledTable& table, const std::set<int>& outlier_classes,
                   MixedLabelPolicy policy = MixedLabelPolicy::inlier);

/// In-place z-score per feature; zero-variance features are only centered.
void standardize(Dataset& data);

/// Gaussian blobs plus uniform outliers in a box.
struct SynthSpec {
    std::vector<Eigen::VectorXd> means;
    std::vector<double> spreads;  // isotropic standard deviation per cluster
    std::vector<int> counts;      // points per cluster
    int outlier_count = 0;
    Eigen::VectorXd box_lo;
    Eigen::VectorXd box_hi;
    /// Outliers closer than this to any cluster mean are redrawn.
    double outlier_min_distance = 0.0;
    std::uint64_t seed = 0;

    void validate() const;

    /// Three separated 2-D blobs of 50 points and two far outliers.
    static SynthSpec three_blobs_two_outliers(std::uint64_t seed);
};

Dataset generate_synthetic(const SynthSpec& spec);

/// Appends `count` points uniform in the per-feature [min, max] box of `data`,
/// flagged as truth outliers with empty memberships.
Dataset inject_noise(const Dataset& data, int count, std::uint64_t seed);

}  // namespace rtkm

#endif  // RTKM_DATA_HPP
