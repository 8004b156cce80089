#include "rtkm/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "rtkm/error.hpp"

namespace rtkm {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_number(std::string_view field) {
    field = trim(field);
    if (field.empty()) return std::nullopt;
    if (field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || end != field.data() + field.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::vector<std::string> split(const std::string& line, char delimiter) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, delimiter)) out.emplace_back(trim(field));
    if (!line.empty() && line.back() == delimiter) out.emplace_back();
    return out;
}

std::string row_error(std::size_t line, const std::string& what) {
    return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

LabelSpec LabelSpec::parse(std::string_view text) {
    auto number = [&](std::string_view rest) {
        int value = -1;
        const auto [end, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), value);
        if (ec != std::errc() || end != rest.data() + rest.size() || value < 0) {
            throw InvalidArgument("bad label spec '" + std::string(text) + "'");
        }
        return value;
    };
    if (text == "none") return none();
    if (text.starts_with("col:")) return class_column(number(text.substr(4)));
    if (text.starts_with("last:")) {
        const int width = number(text.substr(5));
        if (width < 1) throw InvalidArgument("indicator block needs at least one column");
        return indicators(width);
    }
    throw InvalidArgument("bad label spec '" + std::string(text) +
                          "' (expected none, col:<index> or last:<width>)");
}

std::string LabelSpec::to_string() const {
    switch (kind) {
        case Kind::none: return "none";
        case Kind::class_column: return "col:" + std::to_string(column);
        case Kind::indicator_block: return "last:" + std::to_string(width);
    }
    return "none";
}

double LabeledTable::cardinality() const {
    if (labels.empty()) return 0.0;
    std::size_t total = 0;
    for (const auto& set : labels) total += set.size();
    return static_cast<double>(total) / static_cast<double>(labels.size());
}

bool LabeledTable::operator==(const LabeledTable& other) const {
    return rows.rows() == other.rows.rows() && rows.cols() == other.rows.cols() &&
           rows == other.rows && labels == other.labels && feature_names == other.feature_names &&
           class_names == other.class_names;
}

LabeledTable parse_csv(std::istream& in, const LabelSpec& spec, const CsvOptions& options) {
    std::vector<std::pair<std::size_t, std::vector<std::string>>> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        records.emplace_back(line_no, split(line, options.delimiter));
    }
    if (records.empty()) throw DataError("CSV input is empty");

    const std::size_t width = records.front().second.size();
    for (const auto& [no, fields] : records) {
        if (fields.size() != width) {
            throw DataError(row_error(no, "expected " + std::to_string(width) + " fields, found " +
                                              std::to_string(fields.size())));
        }
    }

    std::vector<bool> is_label(width, false);
    if (spec.kind == LabelSpec::Kind::class_column) {
        if (spec.column < 0 || static_cast<std::size_t>(spec.column) >= width) {
            throw DataError("class column " + std::to_string(spec.column) + " out of range for " +
                            std::to_string(width) + " columns");
        }
        is_label[static_cast<std::size_t>(spec.column)] = true;
    } else if (spec.kind == LabelSpec::Kind::indicator_block) {
        if (spec.width < 1 || static_cast<std::size_t>(spec.width) >= width) {
            throw DataError("indicator block of " + std::to_string(spec.width) +
                            " columns leaves no features in " + std::to_string(width) + " columns");
        }
        for (std::size_t c = width - static_cast<std::size_t>(spec.width); c < width; ++c) {
            is_label[c] = true;
        }
    }

    std::vector<std::size_t> features;
    if (options.feature_columns.empty()) {
        for (std::size_t c = 0; c < width; ++c) {
            if (!is_label[c]) features.push_back(c);
        }
    } else {
        for (int c : options.feature_columns) {
            if (c < 0 || static_cast<std::size_t>(c) >= width || is_label[static_cast<std::size_t>(c)]) {
                throw DataError("feature column " + std::to_string(c) + " is invalid");
            }
            features.push_back(static_cast<std::size_t>(c));
        }
    }
    if (features.empty()) throw DataError("no feature columns selected");

    bool header = false;
    if (options.header) {
        header = *options.header;
    } else {
        const auto& first = records.front().second;
        header = std::any_of(features.begin(), features.end(),
                             [&](std::size_t c) { return !parse_number(first[c]); });
    }

    LabeledTable table;
    std::vector<std::string> header_fields;
    if (header) {
        header_fields = records.front().second;
        records.erase(records.begin());
        if (records.empty()) throw DataError("CSV has a header but no records");
    }
    for (std::size_t f = 0; f < features.size(); ++f) {
        table.feature_names.push_back(header ? header_fields[features[f]] : "f" + std::to_string(f));
    }

    const auto n = static_cast<Eigen::Index>(records.size());
    table.rows.resize(n, static_cast<Eigen::Index>(features.size()));
    table.labels.resize(records.size());
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& [no, fields] = records[static_cast<std::size_t>(r)];
        for (std::size_t f = 0; f < features.size(); ++f) {
            const auto value = parse_number(fields[features[f]]);
            if (!value) {
                throw DataError(row_error(no, "non-numeric feature '" + fields[features[f]] +
                                                  "' in column " + std::to_string(features[f])));
            }
            table.rows(r, static_cast<Eigen::Index>(f)) = *value;
        }
    }

    if (spec.kind == LabelSpec::Kind::indicator_block) {
        const std::size_t first = width - static_cast<std::size_t>(spec.width);
        for (std::size_t c = first; c < width; ++c) {
            table.class_names.push_back(header ? header_fields[c] : std::to_string(c - first));
        }
        for (std::size_t r = 0; r < records.size(); ++r) {
            const auto& [no, fields] = records[r];
            for (std::size_t c = first; c < width; ++c) {
                const auto value = parse_number(fields[c]);
                if (!value || (*value != 0.0 && *value != 1.0)) {
                    throw DataError(row_error(no, "label indicator '" + fields[c] + "' in column " +
                                                      std::to_string(c) + " is not 0 or 1"));
                }
                if (*value == 1.0) table.labels[r].push_back(static_cast<int>(c - first));
            }
        }
    } else if (spec.kind == LabelSpec::Kind::class_column) {
        const auto col = static_cast<std::size_t>(spec.column);
        std::vector<std::string> values;
        for (const auto& rec : records) {
            if (!rec.second[col].empty()) values.push_back(rec.second[col]);
        }
        // Numeric class values sort numerically, anything else lexicographically.
        const bool numeric = std::all_of(values.begin(), values.end(),
                                         [](const std::string& v) { return parse_number(v).has_value(); });
        std::sort(values.begin(), values.end(), [&](const std::string& a, const std::string& b) {
            if (numeric) return *parse_number(a) < *parse_number(b);
            return a < b;
        });
        values.erase(std::unique(values.begin(), values.end()), values.end());
        std::map<std::string, int> index;
        for (const auto& v : values) {
            index.emplace(v, static_cast<int>(table.class_names.size()));
            table.class_names.push_back(v);
        }
        for (std::size_t r = 0; r < records.size(); ++r) {
            const auto& field = records[r].second[col];
            if (!field.empty()) table.labels[r].push_back(index.at(field));
        }
    }
    return table;
}

LabeledTable load_csv(const std::filesystem::path& path, const LabelSpec& labels,
                      const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    try {
        return parse_csv(in, labels, options);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_csv(const LabeledTable& table, std::ostream& out) {
    const Eigen::Index m = table.feature_count();
    const int classes = table.class_count();
    for (Eigen::Index f = 0; f < m; ++f) {
        out << (f ? "," : "")
            << (static_cast<std::size_t>(f) < table.feature_names.size()
                    ? table.feature_names[static_cast<std::size_t>(f)]
                    : "f" + std::to_string(f));
    }
    for (int c = 0; c < classes; ++c) out << ',' << table.class_names[static_cast<std::size_t>(c)];
    out << '\n';

    std::vector<char> row_labels(static_cast<std::size_t>(classes));
    char buffer[32];
    for (Eigen::Index r = 0; r < table.record_count(); ++r) {
        for (Eigen::Index f = 0; f < m; ++f) {
            const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, table.rows(r, f));
            (void)ec;
            out << (f ? "," : "") << std::string_view(buffer, static_cast<std::size_t>(end - buffer));
        }
        std::fill(row_labels.begin(), row_labels.end(), '0');
        if (static_cast<std::size_t>(r) < table.labels.size()) {
            for (int c : table.labels[static_cast<std::size_t>(r)]) {
                row_labels.at(static_cast<std::size_t>(c)) = '1';
            }
        }
        for (char c : row_labels) out << ',' << c;
        out << '\n';
    }
}

void write_csv(const LabeledTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    write_csv(table, out);
}

Dataset to_dataset(const LabeledTable& table, const std::set<int>& outlier_classes,
                   MixedLabelPolicy policy) {
    const int classes = table.class_count();
    for (int c : outlier_classes) {
        if (c < 0 || c >= classes) {
            throw DataError("outlier class " + std::to_string(c) + " does not exist (" +
                            std::to_string(classes) + " classes)");
        }
    }
    if (classes > 0 && static_cast<int>(outlier_classes.size()) == classes) {
        throw DataError("every class is marked as outlier; no inlier clusters remain");
    }

    std::vector<int> remap(static_cast<std::size_t>(classes), -1);
    int next = 0;
    for (int c = 0; c < classes; ++c) {
        if (!outlier_classes.contains(c)) remap[static_cast<std::size_t>(c)] = next++;
    }

    Dataset data;
    data.points = table.rows.transpose();
    if (classes == 0) return data;

    const auto n = static_cast<std::size_t>(table.record_count());
    Assignments memberships(n);
    std::vector<bool> outliers(n, false);
    std::size_t mixed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<int> inlier_labels;
        bool any_outlier_label = false;
        for (int c : table.labels[i]) {
            if (c < 0 || c >= classes) {
                throw DataError("record " + std::to_string(i) + " has label " + std::to_string(c) +
                                " outside the class range");
            }
            const int mapped = remap[static_cast<std::size_t>(c)];
            if (mapped < 0) {
                any_outlier_label = true;
            } else {
                inlier_labels.push_back(mapped);
            }
        }
        std::sort(inlier_labels.begin(), inlier_labels.end());
        inlier_labels.erase(std::unique(inlier_labels.begin(), inlier_labels.end()),
                            inlier_labels.end());
        if (any_outlier_label && inlier_labels.empty()) {
            outliers[i] = true;
        } else if (any_outlier_label) {
            ++mixed;
            if (policy == MixedLabelPolicy::reject) {
                throw DataError("record " + std::to_string(i) +
                                " mixes inlier and outlier class labels");
            }
            if (policy == MixedLabelPolicy::outlier) {
                outliers[i] = true;
                inlier_labels.clear();
            }
        }
        memberships[i] = std::move(inlier_labels);
    }
    if (mixed > 0) {
        std::clog << "warning: " << mixed << " record(s) mix inlier and outlier labels; treated as "
                  << (policy == MixedLabelPolicy::outlier ? "outliers" : "inliers") << '\n';
    }
    data.truth_memberships = std::move(memberships);
    data.truth_outliers = std::move(outliers);
    return data;
}

void standardize(Dataset& data) {
    const Eigen::Index n = data.size();
    if (n == 0) return;
    const Eigen::VectorXd mean = data.points.rowwise().mean();
    data.points.colwise() -= mean;
    const Eigen::VectorXd sd =
        (data.points.array().square().rowwise().sum() / static_cast<double>(n)).sqrt().matrix();
    for (Eigen::Index f = 0; f < data.dims(); ++f) {
        if (sd[f] > 0.0) data.points.row(f) /= sd[f];
    }
}

}  // namespace rtkm
