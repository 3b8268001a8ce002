#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mixmml/dataset.hpp"
#include "mixmml/errors.hpp"

namespace mixmml {

enum class WeightsMode { Fractional, Replicate };

inline WeightsMode weights_mode_from_string(const std::string& s) {
    if (s == "fractional") return WeightsMode::Fractional;
    if (s == "replicate") return WeightsMode::Replicate;
    throw Error("unknown weights mode: " + s + " (expected fractional or replicate)");
}

struct LoadOptions {
    std::string label_column = "_planted_label";
    std::string weight_column = "_weight";
    WeightsMode weights_mode = WeightsMode::Fractional;
    // Fixed per-variable dictionaries; variables not listed fall back to
    // first-appearance order.
    std::map<std::string, std::vector<std::string>> dictionaries;
};

struct LoadedDataset {
    CategoricalDataset data;
    std::vector<std::string> var_names;
    std::vector<std::vector<std::string>> categories;
    std::vector<int> labels;  // planted labels when present, 0-based
    bool has_labels = false;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(trim(cur));
    return out;
}

}  // namespace detail

// Comma-separated dataset with a header row. `#` lines are comments.
// A cell lists the outcomes of one observation for one variable,
// `|`-separated when the variable has several trials. Columns named by
// `label_column` / `weight_column` are pulled out as metadata.
inline LoadedDataset load_dataset_csv(std::istream& in, const LoadOptions& options = {}) {
    std::string line;
    long line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        header = detail::split(t, ',');
        break;
    }
    if (header.empty()) throw ParseError("missing header row", line_no);

    int label_col = -1, weight_col = -1;
    std::vector<int> var_cols;
    LoadedDataset out;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == options.label_column) {
            label_col = static_cast<int>(j);
        } else if (header[j] == options.weight_column) {
            weight_col = static_cast<int>(j);
        } else {
            var_cols.push_back(static_cast<int>(j));
            out.var_names.push_back(header[j]);
        }
    }
    if (var_cols.empty()) throw ParseError("no clustering variables in header", line_no);

    const std::size_t L = var_cols.size();
    out.categories.assign(L, {});
    std::vector<std::map<std::string, int>> index(L);
    std::vector<bool> fixed(L, false);
    for (std::size_t l = 0; l < L; ++l) {
        auto it = options.dictionaries.find(out.var_names[l]);
        if (it != options.dictionaries.end()) {
            out.categories[l] = it->second;
            for (std::size_t c = 0; c < it->second.size(); ++c)
                index[l][it->second[c]] = static_cast<int>(c);
            fixed[l] = true;
        }
    }

    std::vector<std::vector<std::vector<int>>> outcome_rows;  // row -> var -> outcome cats
    std::vector<double> weights;
    std::vector<int> trials;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::vector<std::string> cells = detail::split(t, ',');
        if (cells.size() != header.size())
            throw ParseError("row has " + std::to_string(cells.size()) + " cells, header has " +
                                 std::to_string(header.size()),
                             line_no);
        std::vector<std::vector<int>> row(L);
        for (std::size_t l = 0; l < L; ++l) {
            const std::vector<std::string> outcomes =
                detail::split(cells[var_cols[l]], '|');
            for (const std::string& o : outcomes) {
                auto it = index[l].find(o);
                int c;
                if (it == index[l].end()) {
                    if (fixed[l])
                        throw ParseError("unknown category '" + o + "' for variable " +
                                             out.var_names[l],
                                         line_no, var_cols[l] + 1);
                    c = static_cast<int>(out.categories[l].size());
                    out.categories[l].push_back(o);
                    index[l][o] = c;
                } else {
                    c = it->second;
                }
                row[l].push_back(c);
            }
        }
        if (trials.empty()) {
            for (std::size_t l = 0; l < L; ++l)
                trials.push_back(static_cast<int>(row[l].size()));
        } else {
            for (std::size_t l = 0; l < L; ++l)
                if (static_cast<int>(row[l].size()) != trials[l])
                    throw ValidationError("observation " +
                                              std::to_string(outcome_rows.size()) +
                                              " lists " + std::to_string(row[l].size()) +
                                              " outcomes for variable " + out.var_names[l] +
                                              ", expected " + std::to_string(trials[l]),
                                          static_cast<long>(outcome_rows.size()),
                                          static_cast<long>(l));
        }
        outcome_rows.push_back(std::move(row));
        if (label_col >= 0) {
            try {
                out.labels.push_back(std::stoi(cells[label_col]) - 1);
            } catch (const std::exception&) {
                throw ParseError("bad label value '" + cells[label_col] + "'", line_no,
                                 label_col + 1);
            }
        }
        if (weight_col >= 0) {
            double w;
            try {
                w = std::stod(cells[weight_col]);
            } catch (const std::exception&) {
                throw ParseError("bad weight value '" + cells[weight_col] + "'", line_no,
                                 weight_col + 1);
            }
            weights.push_back(w);
        }
    }
    if (outcome_rows.empty()) throw ParseError("no observations", line_no);
    out.has_labels = label_col >= 0;

    std::vector<int> n_cats(L);
    for (std::size_t l = 0; l < L; ++l) {
        n_cats[l] = static_cast<int>(out.categories[l].size());
        if (n_cats[l] < 2)
            throw ValidationError("variable " + out.var_names[l] +
                                      " is constant (a single category)",
                                  -1, static_cast<long>(l));
    }

    // counts from outcome lists
    std::vector<int> offsets(L + 1, 0);
    for (std::size_t l = 0; l < L; ++l) offsets[l + 1] = offsets[l] + n_cats[l];
    std::vector<std::vector<int>> rows;
    rows.reserve(outcome_rows.size());
    for (const auto& obs : outcome_rows) {
        std::vector<int> r(offsets.back(), 0);
        for (std::size_t l = 0; l < L; ++l)
            for (int c : obs[l]) ++r[offsets[l] + c];
        rows.push_back(std::move(r));
    }

    if (weight_col >= 0 && options.weights_mode == WeightsMode::Replicate) {
        std::vector<std::vector<int>> replicated;
        std::vector<int> labels;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double w = weights[i];
            const double rounded = std::round(w);
            if (std::fabs(w - rounded) > 1e-9 || rounded < 1.0)
                throw ValidationError("replicate mode needs positive integer weights, got " +
                                          std::to_string(w),
                                      static_cast<long>(i));
            for (long r = 0; r < static_cast<long>(rounded); ++r) {
                replicated.push_back(rows[i]);
                if (out.has_labels) labels.push_back(out.labels[i]);
            }
        }
        out.labels = std::move(labels);
        out.data = CategoricalDataset::build(replicated, n_cats, trials);
    } else {
        out.data = CategoricalDataset::build(rows, n_cats, trials,
                                             weight_col >= 0 ? weights : std::vector<double>{});
    }
    return out;
}

inline LoadedDataset load_dataset_csv(const std::string& path, const LoadOptions& options = {}) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open dataset file: " + path);
    return load_dataset_csv(in, options);
}

inline void save_dataset_csv(std::ostream& os, const CategoricalDataset& data,
                             const std::vector<std::string>& var_names,
                             const std::vector<std::vector<std::string>>& categories,
                             const std::vector<int>& labels = {}) {
    for (std::size_t l = 0; l < var_names.size(); ++l) {
        if (l) os << ',';
        os << var_names[l];
    }
    if (!labels.empty()) os << ",_planted_label";
    if (data.weighted()) os << ",_weight";
    os << '\n';
    for (int i = 0; i < data.n_obs(); ++i) {
        for (int l = 0; l < data.n_vars(); ++l) {
            if (l) os << ',';
            bool first = true;
            for (int c = 0; c < data.n_cats(l); ++c) {
                const int reps = static_cast<int>(data.count(i, l, c));
                for (int r = 0; r < reps; ++r) {
                    if (!first) os << '|';
                    os << categories[l][c];
                    first = false;
                }
            }
        }
        if (!labels.empty()) os << ',' << labels[i] + 1;
        if (data.weighted()) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.17g", data.weight(i));
            os << ',' << buf;
        }
        os << '\n';
    }
}

inline void save_dataset_csv(const std::string& path, const CategoricalDataset& data,
                             const std::vector<std::string>& var_names,
                             const std::vector<std::vector<std::string>>& categories,
                             const std::vector<int>& labels = {}) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write dataset file: " + path);
    save_dataset_csv(os, data, var_names, categories, labels);
}

}  // namespace mixmml
