#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mixmml/dataset.hpp"
#include "mixmml/errors.hpp"
#include "mixmml/model.hpp"
#include "mixmml/rng.hpp"

namespace mixmml {

struct InitSpec {
    std::uint64_t seed = 0;
};

struct FitOptions {
    double delta = 1e-6;    // relative log-likelihood improvement threshold
    int max_iter = 500;
    double smoothing = 0.0; // optional Laplace epsilon in the M-step
};

namespace detail {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Per-component log densities log f_k(y_i), including the multinomial
// coefficient. Stored column-major (one vector per component) so a single
// component's update only touches its own column.
using LogDensityColumns = std::vector<std::vector<double>>;

inline void fill_log_density_column(const CategoricalDataset& data, const MixtureModel& model,
                                    int k, std::vector<double>& col) {
    const int tc = data.total_cats();
    std::vector<double> logp(tc);
    const double* comp = model.component(k);
    for (int t = 0; t < tc; ++t) logp[t] = comp[t] > 0.0 ? std::log(comp[t]) : kNegInf;
    col.resize(data.n_obs());
    for (int i = 0; i < data.n_obs(); ++i) {
        const double* y = data.row(i);
        double s = data.log_coefficient(i);
        for (int t = 0; t < tc; ++t) {
            if (y[t] != 0.0) {
                if (logp[t] == kNegInf) {
                    s = kNegInf;
                    break;
                }
                s += y[t] * logp[t];
            }
        }
        col[i] = s;
    }
}

inline LogDensityColumns log_density_columns(const CategoricalDataset& data,
                                             const MixtureModel& model) {
    LogDensityColumns cols(model.n_components());
    for (int k = 0; k < model.n_components(); ++k)
        fill_log_density_column(data, model, k, cols[k]);
    return cols;
}

// Normalizes responsibilities in log space (max-subtraction) and returns
// the weighted observed-data log-likelihood. Components with zero mixing
// weight are excluded. Throws when some observation has zero density
// under every active component.
inline double responsibilities_from(const CategoricalDataset& data,
                                    const std::vector<double>& mixing,
                                    const LogDensityColumns& cols, ResponsibilityMatrix& resp) {
    const int n = data.n_obs();
    const int K = static_cast<int>(mixing.size());
    std::vector<double> log_mix(K);
    for (int k = 0; k < K; ++k)
        log_mix[k] = mixing[k] > 0.0 ? std::log(mixing[k]) : kNegInf;

    double ll = 0.0;
    std::vector<double> a(K);
    for (int i = 0; i < n; ++i) {
        double m = kNegInf;
        for (int k = 0; k < K; ++k) {
            a[k] = log_mix[k] == kNegInf ? kNegInf : log_mix[k] + cols[k][i];
            m = std::max(m, a[k]);
        }
        if (m == kNegInf)
            throw DegenerateLikelihoodError(
                "observation " + std::to_string(i) + " has zero density under every component", i);
        double z = 0.0;
        for (int k = 0; k < K; ++k) {
            const double e = a[k] == kNegInf ? 0.0 : std::exp(a[k] - m);
            resp(i, k) = e;
            z += e;
        }
        for (int k = 0; k < K; ++k) resp(i, k) /= z;
        ll += data.weight(i) * (m + std::log(z));
    }
    return ll;
}

}  // namespace detail

// Observed-data log-likelihood in nats (natural log throughout).
inline double log_likelihood(const CategoricalDataset& data, const MixtureModel& model) {
    if (!model.dims_match(data))
        throw ValidationError("model and dataset disagree on variables or categories");
    auto cols = detail::log_density_columns(data, model);
    ResponsibilityMatrix resp(data.n_obs(), model.n_components());
    return detail::responsibilities_from(data, model.mixing(), cols, resp);
}

// Posterior membership probabilities (E-step).
inline ResponsibilityMatrix e_step(const CategoricalDataset& data, const MixtureModel& model) {
    if (!model.dims_match(data))
        throw ValidationError("model and dataset disagree on variables or categories");
    auto cols = detail::log_density_columns(data, model);
    ResponsibilityMatrix resp(data.n_obs(), model.n_components());
    detail::responsibilities_from(data, model.mixing(), cols, resp);
    return resp;
}

// Weighted maximum-likelihood M-step. theta_klc = sum_i w_i z_ik y_ilc /
// (n_l sum_i w_i z_ik), alpha_k = sum_i w_i z_ik / W. The optional Laplace
// epsilon guards against exact-zero category probabilities.
inline MixtureModel m_step(const CategoricalDataset& data, const ResponsibilityMatrix& resp,
                           double smoothing = 0.0) {
    const int K = resp.n_components();
    const int tc = data.total_cats();
    MixtureModel model(data.n_cats(), K);

    std::vector<double> mass = resp.column_masses(data);
    const double W = data.total_weight();
    for (int k = 0; k < K; ++k) {
        if (mass[k] <= 0.0)
            throw EmptyComponentError("component " + std::to_string(k) +
                                          " received no responsibility mass",
                                      k);
        model.mixing()[k] = mass[k] / W;
    }

    std::vector<double> acc(tc);
    for (int k = 0; k < K; ++k) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int i = 0; i < data.n_obs(); ++i) {
            const double wz = data.weight(i) * resp(i, k);
            if (wz == 0.0) continue;
            const double* y = data.row(i);
            for (int t = 0; t < tc; ++t) acc[t] += wz * y[t];
        }
        double* comp = model.component(k);
        for (int l = 0; l < data.n_vars(); ++l) {
            const double denom = data.n_trials(l) * mass[k] + smoothing * data.n_cats(l);
            for (int c = 0; c < data.n_cats(l); ++c)
                comp[data.offset(l) + c] = (acc[data.offset(l) + c] + smoothing) / denom;
        }
    }
    return model;
}

// Initial model: per-component perturbation of the empirical category
// frequencies (factors uniform in [0.5, 1.5], renormalized per variable),
// uniform mixing weights. Identical components would stall EM at a
// symmetric fixed point.
inline MixtureModel initial_model(const CategoricalDataset& data, int n_components,
                                  std::uint64_t seed) {
    const int tc = data.total_cats();
    std::vector<double> empirical(tc, 0.0);
    for (int i = 0; i < data.n_obs(); ++i) {
        const double w = data.weight(i);
        const double* y = data.row(i);
        for (int t = 0; t < tc; ++t) empirical[t] += w * y[t];
    }
    const double W = data.total_weight();
    for (int l = 0; l < data.n_vars(); ++l)
        for (int c = 0; c < data.n_cats(l); ++c)
            empirical[data.offset(l) + c] /= W * data.n_trials(l);

    Rng rng(seed);
    MixtureModel model(data.n_cats(), n_components);
    for (int k = 0; k < n_components; ++k) {
        model.mixing()[k] = 1.0 / n_components;
        double* comp = model.component(k);
        for (int t = 0; t < tc; ++t) comp[t] = empirical[t] * rng.uniform(0.5, 1.5);
        for (int l = 0; l < data.n_vars(); ++l) {
            double s = 0.0;
            for (int c = 0; c < data.n_cats(l); ++c) s += comp[data.offset(l) + c];
            for (int c = 0; c < data.n_cats(l); ++c) comp[data.offset(l) + c] /= s;
        }
    }
    return model;
}

inline bool improved(double current, double previous, double delta) {
    return (current - previous) / (std::fabs(previous) + 1e-10) >= delta;
}

inline std::vector<int> argmax_rows(const ResponsibilityMatrix& resp) {
    std::vector<int> labels(resp.n_obs());
    for (int i = 0; i < resp.n_obs(); ++i) {
        const double* r = resp.row(i);
        int best = 0;
        for (int k = 1; k < resp.n_components(); ++k)
            if (r[k] > r[best]) best = k;  // ties keep the smallest index
        labels[i] = best;
    }
    return labels;
}

// Classical EM for a fixed number of components.
inline FitReport fit_em(const CategoricalDataset& data, int n_components, const InitSpec& init,
                        const FitOptions& options = {}) {
    if (n_components < 1) throw ValidationError("component count must be at least 1");
    if (!(options.delta > 0.0)) throw ValidationError("delta must be positive");

    FitReport report;
    MixtureModel model = initial_model(data, n_components, init.seed);
    ResponsibilityMatrix resp(data.n_obs(), n_components);

    double prev = 0.0;
    bool have_prev = false;
    for (int it = 1; it <= options.max_iter; ++it) {
        auto cols = detail::log_density_columns(data, model);
        const double ll = detail::responsibilities_from(data, model.mixing(), cols, resp);
        report.objective_trace.push_back(ll);
        report.iterations = it;
        if (have_prev && !improved(ll, prev, options.delta)) {
            report.converged = true;
            break;
        }
        prev = ll;
        have_prev = true;
        if (it < options.max_iter) {
            model = m_step(data, resp, options.smoothing);
        } else {
            // ran out of iterations: keep the model matching the last trace entry
            break;
        }
    }
    report.model = std::move(model);
    report.hard_assignment = argmax_rows(resp);
    return report;
}

}  // namespace mixmml
