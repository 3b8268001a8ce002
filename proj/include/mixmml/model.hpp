#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mixmml/dataset.hpp"
#include "mixmml/errors.hpp"

namespace mixmml {

// Finite mixture of products of multinomials. Component k models variable l
// with a length-C_l probability vector; `probs` stores the K per-component
// parameter rows flattened with the same layout as the dataset counts.
class MixtureModel {
public:
    MixtureModel() = default;

    MixtureModel(std::vector<int> n_cats, int n_components)
        : n_cats_(std::move(n_cats)), mixing_(n_components, 0.0) {
        build_offsets();
        probs_.assign(static_cast<std::size_t>(n_components) * total_cats(), 0.0);
    }

    int n_components() const { return static_cast<int>(mixing_.size()); }
    int n_vars() const { return static_cast<int>(n_cats_.size()); }
    int n_cats(int l) const { return n_cats_[l]; }
    const std::vector<int>& n_cats() const { return n_cats_; }
    int total_cats() const { return offsets_.back(); }
    int offset(int l) const { return offsets_[l]; }

    double mixing(int k) const { return mixing_[k]; }
    std::vector<double>& mixing() { return mixing_; }
    const std::vector<double>& mixing() const { return mixing_; }

    double prob(int k, int l, int c) const {
        return probs_[static_cast<std::size_t>(k) * total_cats() + offsets_[l] + c];
    }
    double& prob(int k, int l, int c) {
        return probs_[static_cast<std::size_t>(k) * total_cats() + offsets_[l] + c];
    }
    const double* component(int k) const {
        return probs_.data() + static_cast<std::size_t>(k) * total_cats();
    }
    double* component(int k) {
        return probs_.data() + static_cast<std::size_t>(k) * total_cats();
    }

    // Free parameters per component: M = sum_l (C_l - 1).
    int component_dim() const {
        int m = 0;
        for (int c : n_cats_) m += c - 1;
        return m;
    }

    // Total free parameters: C = (K-1) + K*M.
    int free_params() const { return n_components() - 1 + n_components() * component_dim(); }

    // Components with strictly positive mixing probability.
    int n_active() const {
        int k = 0;
        for (double a : mixing_)
            if (a > 0.0) ++k;
        return k;
    }

    void remove_component(int k) {
        mixing_.erase(mixing_.begin() + k);
        probs_.erase(probs_.begin() + static_cast<std::size_t>(k) * total_cats(),
                     probs_.begin() + static_cast<std::size_t>(k + 1) * total_cats());
    }

    // Drops zero-weight components and renormalizes the survivors.
    MixtureModel active_only() const {
        MixtureModel out(n_cats_, n_active());
        double sum = 0.0;
        int j = 0;
        for (int k = 0; k < n_components(); ++k) {
            if (mixing_[k] <= 0.0) continue;
            out.mixing_[j] = mixing_[k];
            sum += mixing_[k];
            for (int t = 0; t < total_cats(); ++t)
                out.probs_[static_cast<std::size_t>(j) * total_cats() + t] =
                    probs_[static_cast<std::size_t>(k) * total_cats() + t];
            ++j;
        }
        for (double& a : out.mixing_) a /= sum;
        return out;
    }

    bool dims_match(const CategoricalDataset& data) const {
        return n_cats_ == data.n_cats();
    }

    // Simplex checks; tolerance follows the type invariants.
    void validate() const {
        double s = 0.0;
        for (double a : mixing_) {
            if (a < 0.0) throw ValidationError("negative mixing probability");
            s += a;
        }
        if (std::fabs(s - 1.0) > 1e-12)
            throw ValidationError("mixing probabilities sum to " + std::to_string(s));
        for (int k = 0; k < n_components(); ++k)
            for (int l = 0; l < n_vars(); ++l) {
                double t = 0.0;
                for (int c = 0; c < n_cats_[l]; ++c) {
                    if (prob(k, l, c) < 0.0)
                        throw ValidationError("negative category probability");
                    t += prob(k, l, c);
                }
                if (std::fabs(t - 1.0) > 1e-12)
                    throw ValidationError("component " + std::to_string(k) + ", variable " +
                                          std::to_string(l) + " probabilities sum to " +
                                          std::to_string(t));
            }
    }

private:
    void build_offsets() {
        offsets_.resize(n_cats_.size() + 1, 0);
        for (std::size_t l = 0; l < n_cats_.size(); ++l)
            offsets_[l + 1] = offsets_[l] + n_cats_[l];
    }

    std::vector<int> n_cats_;
    std::vector<int> offsets_;
    std::vector<double> mixing_;
    std::vector<double> probs_;
};

// Posterior membership probabilities, one row per observation.
class ResponsibilityMatrix {
public:
    ResponsibilityMatrix() = default;
    ResponsibilityMatrix(int n_obs, int n_components)
        : n_obs_(n_obs), n_components_(n_components),
          values_(static_cast<std::size_t>(n_obs) * n_components, 0.0) {}

    int n_obs() const { return n_obs_; }
    int n_components() const { return n_components_; }

    double operator()(int i, int k) const {
        return values_[static_cast<std::size_t>(i) * n_components_ + k];
    }
    double& operator()(int i, int k) {
        return values_[static_cast<std::size_t>(i) * n_components_ + k];
    }
    const double* row(int i) const {
        return values_.data() + static_cast<std::size_t>(i) * n_components_;
    }

    // Column sums, weighted by the dataset's observation weights.
    std::vector<double> column_masses(const CategoricalDataset& data) const {
        std::vector<double> s(n_components_, 0.0);
        for (int i = 0; i < n_obs_; ++i) {
            const double w = data.weight(i);
            const double* r = row(i);
            for (int k = 0; k < n_components_; ++k) s[k] += w * r[k];
        }
        return s;
    }

    std::vector<double> column_sums() const {
        std::vector<double> s(n_components_, 0.0);
        for (int i = 0; i < n_obs_; ++i) {
            const double* r = row(i);
            for (int k = 0; k < n_components_; ++k) s[k] += r[k];
        }
        return s;
    }

    void remove_column(int k) {
        std::vector<double> next(static_cast<std::size_t>(n_obs_) * (n_components_ - 1));
        for (int i = 0; i < n_obs_; ++i) {
            const double* r = row(i);
            double* o = next.data() + static_cast<std::size_t>(i) * (n_components_ - 1);
            for (int j = 0, t = 0; j < n_components_; ++j)
                if (j != k) o[t++] = r[j];
        }
        values_ = std::move(next);
        --n_components_;
    }

private:
    int n_obs_ = 0;
    int n_components_ = 0;
    std::vector<double> values_;
};

// Outcome of one expectation-maximization run.
struct FitReport {
    MixtureModel model;
    std::vector<double> objective_trace;  // log-likelihood per iteration
    int iterations = 0;
    bool converged = false;
    std::vector<int> hard_assignment;  // argmax component per observation, 0-based

    double final_log_likelihood() const { return objective_trace.back(); }
};

}  // namespace mixmml
