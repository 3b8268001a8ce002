#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "mixmml/errors.hpp"

namespace mixmml {

// Categorical observations stored as per-variable category counts.
// Observation i, variable l is a vector of counts y_ilc (c = 0..C_l-1)
// summing to the variable's trial count. Counts are kept as doubles since
// every consumer is floating point; validation enforces integrality.
class CategoricalDataset {
public:
    CategoricalDataset() = default;

    // Builds and validates a dataset. `rows` holds one flattened count
    // vector per observation, laid out variable by variable.
    static CategoricalDataset build(const std::vector<std::vector<int>>& rows,
                                    std::vector<int> n_cats,
                                    std::vector<int> n_trials,
                                    std::vector<double> weights = {}) {
        CategoricalDataset d;
        d.n_cats_ = std::move(n_cats);
        d.n_trials_ = std::move(n_trials);
        if (d.n_cats_.size() != d.n_trials_.size())
            throw ValidationError("category and trial vectors disagree on the number of variables");
        if (d.n_cats_.empty())
            throw ValidationError("dataset needs at least one variable");
        d.offsets_.resize(d.n_cats_.size() + 1, 0);
        for (std::size_t l = 0; l < d.n_cats_.size(); ++l) {
            if (d.n_cats_[l] < 2)
                throw ValidationError("variable " + std::to_string(l) +
                                          " has fewer than 2 categories",
                                      -1, static_cast<long>(l));
            if (d.n_trials_[l] < 1)
                throw ValidationError("variable " + std::to_string(l) +
                                          " has a trial count below 1",
                                      -1, static_cast<long>(l));
            d.offsets_[l + 1] = d.offsets_[l] + d.n_cats_[l];
        }
        const int tc = d.offsets_.back();
        d.n_obs_ = static_cast<int>(rows.size());
        d.counts_.resize(static_cast<std::size_t>(d.n_obs_) * tc);
        for (int i = 0; i < d.n_obs_; ++i) {
            if (static_cast<int>(rows[i].size()) != tc)
                throw ValidationError("observation " + std::to_string(i) +
                                          " has the wrong number of count cells",
                                      i, -1);
            for (std::size_t l = 0; l < d.n_cats_.size(); ++l) {
                long long sum = 0;
                for (int c = 0; c < d.n_cats_[l]; ++c) {
                    const int y = rows[i][d.offsets_[l] + c];
                    if (y < 0)
                        throw ValidationError("negative count at observation " +
                                                  std::to_string(i) + ", variable " +
                                                  std::to_string(l),
                                              i, static_cast<long>(l));
                    sum += y;
                }
                if (sum != d.n_trials_[l])
                    throw ValidationError(
                        "counts at observation " + std::to_string(i) + ", variable " +
                            std::to_string(l) + " sum to " + std::to_string(sum) +
                            " instead of " + std::to_string(d.n_trials_[l]),
                        i, static_cast<long>(l));
            }
            for (int j = 0; j < tc; ++j)
                d.counts_[static_cast<std::size_t>(i) * tc + j] = rows[i][j];
        }
        if (!weights.empty()) {
            if (static_cast<int>(weights.size()) != d.n_obs_)
                throw ValidationError("weight vector length does not match the observation count");
            for (int i = 0; i < d.n_obs_; ++i)
                if (!(weights[i] > 0.0))
                    throw ValidationError("non-positive weight at observation " +
                                              std::to_string(i),
                                          i, -1);
            d.weights_ = std::move(weights);
        }
        d.cache_log_coefficients();
        return d;
    }

    int n_obs() const { return n_obs_; }
    int n_vars() const { return static_cast<int>(n_cats_.size()); }
    int n_cats(int l) const { return n_cats_[l]; }
    int n_trials(int l) const { return n_trials_[l]; }
    const std::vector<int>& n_cats() const { return n_cats_; }
    const std::vector<int>& n_trials() const { return n_trials_; }
    int total_cats() const { return offsets_.back(); }
    int offset(int l) const { return offsets_[l]; }
    const std::vector<int>& offsets() const { return offsets_; }

    double count(int i, int l, int c) const {
        return counts_[static_cast<std::size_t>(i) * total_cats() + offsets_[l] + c];
    }
    const double* row(int i) const {
        return counts_.data() + static_cast<std::size_t>(i) * total_cats();
    }

    bool weighted() const { return !weights_.empty(); }
    double weight(int i) const { return weights_.empty() ? 1.0 : weights_[i]; }
    const std::vector<double>& weights() const { return weights_; }

    // Effective sample size: n for unweighted data, total weight otherwise.
    double total_weight() const {
        if (weights_.empty()) return static_cast<double>(n_obs_);
        return std::accumulate(weights_.begin(), weights_.end(), 0.0);
    }

    // log[ prod_l n_l! / prod_c y_ilc! ], constant in the parameters.
    double log_coefficient(int i) const { return log_coeff_[i]; }

    // Smallest per-variable trial count; drives the identifiability check.
    int min_trials() const {
        int m = n_trials_[0];
        for (int t : n_trials_) m = std::min(m, t);
        return m;
    }

private:
    void cache_log_coefficients() {
        log_coeff_.assign(n_obs_, 0.0);
        double trials_term = 0.0;
        for (std::size_t l = 0; l < n_cats_.size(); ++l)
            trials_term += std::lgamma(static_cast<double>(n_trials_[l]) + 1.0);
        const int tc = total_cats();
        for (int i = 0; i < n_obs_; ++i) {
            double s = trials_term;
            const double* r = row(i);
            for (int j = 0; j < tc; ++j) s -= std::lgamma(r[j] + 1.0);
            log_coeff_[i] = s;
        }
    }

    int n_obs_ = 0;
    std::vector<int> n_cats_;
    std::vector<int> n_trials_;
    std::vector<int> offsets_;
    std::vector<double> counts_;
    std::vector<double> weights_;
    std::vector<double> log_coeff_;
};

// Multinomial mixtures are only guaranteed identifiable when the trial
// count reaches 2K-1. Real survey data (binary, single trial) violates
// this for K >= 2, so the condition warns instead of blocking.
inline std::optional<std::string> identifiability_warning(const CategoricalDataset& data,
                                                          int k_max) {
    const int t = data.min_trials();
    if (t < 2 * k_max - 1) {
        return "identifiability not guaranteed: smallest trial count " + std::to_string(t) +
               " is below 2K-1 = " + std::to_string(2 * k_max - 1) + " for K = " +
               std::to_string(k_max);
    }
    return std::nullopt;
}

}  // namespace mixmml
