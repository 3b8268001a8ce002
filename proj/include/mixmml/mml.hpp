#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mixmml/dataset.hpp"
#include "mixmml/em.hpp"
#include "mixmml/errors.hpp"
#include "mixmml/model.hpp"

namespace mixmml {

struct MmlConfig {
    int k_min = 1;
    int k_max = 25;
    double delta = 1e-6;      // inner-loop relative log-likelihood threshold
    int max_inner_iter = 500; // sweeps per middle loop
    std::uint64_t seed = 0;
    double smoothing = 0.0;
    bool keep_candidates = false;
};

enum class TraceEvent { InnerIteration, Annihilation, ForcedRemoval };

inline const char* to_string(TraceEvent e) {
    switch (e) {
        case TraceEvent::InnerIteration: return "inner-iteration";
        case TraceEvent::Annihilation: return "annihilation";
        case TraceEvent::ForcedRemoval: return "forced-removal";
    }
    return "?";
}

struct MmlTraceEntry {
    int active;               // surviving component count k_nz
    double log_likelihood;
    double message_length;
    TraceEvent event;
    bool converged;           // true on the record closing a converged middle loop
};

struct MmlResult {
    MixtureModel best_model;
    double best_message_length = std::numeric_limits<double>::infinity();
    std::vector<MmlTraceEntry> trace;
    std::map<int, MixtureModel> candidate_models;  // best model per k_nz, optional
    int selected_components = 0;
};

// Penalty terms of the message length, without the -loglik part.
// Components with zero weight contribute nothing.
inline double message_length_penalty(const MixtureModel& model, double effective_n) {
    const double m = model.component_dim();
    double sum_log = 0.0;
    int active = 0;
    for (double a : model.mixing()) {
        if (a > 0.0) {
            sum_log += std::log(effective_n * a / 12.0);
            ++active;
        }
    }
    return m / 2.0 * sum_log + active / 2.0 * std::log(effective_n / 12.0) +
           active * (m + 1.0) / 2.0;
}

// Two-part code length for the model plus data, in nats.
inline double message_length(const CategoricalDataset& data, const MixtureModel& model) {
    return message_length_penalty(model, data.total_weight()) - log_likelihood(data, model);
}

struct PenalizedMixingUpdate {
    std::vector<double> mixing;
    std::vector<int> annihilated;  // indices whose weight was clipped to zero
};

// Penalized mixing-weight update: alpha_k proportional to
// max{0, mass_k - (C-K+1)/(2K)}. Note (C-K+1)/(2K) equals M/2 when C is
// consistent with the current K.
inline PenalizedMixingUpdate penalized_mixing_update(const std::vector<double>& masses,
                                                     int free_params, int n_components) {
    const double penalty =
        (static_cast<double>(free_params) - n_components + 1.0) / (2.0 * n_components);
    PenalizedMixingUpdate out;
    out.mixing.resize(masses.size());
    double total = 0.0;
    for (std::size_t k = 0; k < masses.size(); ++k) {
        out.mixing[k] = std::max(0.0, masses[k] - penalty);
        total += out.mixing[k];
    }
    if (total <= 0.0)
        throw AnnihilationError(
            "every component fell below the message-length penalty; the dataset is too small "
            "for this component budget, reduce k_max");
    for (std::size_t k = 0; k < masses.size(); ++k) {
        out.mixing[k] /= total;
        if (out.mixing[k] == 0.0) out.annihilated.push_back(static_cast<int>(k));
    }
    return out;
}

inline PenalizedMixingUpdate penalized_mixing_update(const ResponsibilityMatrix& resp,
                                                     const CategoricalDataset& data,
                                                     int free_params) {
    return penalized_mixing_update(resp.column_masses(data), free_params, resp.n_components());
}

namespace detail {

struct MmlState {
    MixtureModel model;
    LogDensityColumns cols;
    ResponsibilityMatrix resp;
    double log_likelihood = 0.0;

    void refresh(const CategoricalDataset& data) {
        log_likelihood = responsibilities_from(data, model.mixing(), cols, resp);
    }
};

inline void update_component(const CategoricalDataset& data, MmlState& st, int k,
                             double smoothing) {
    const std::vector<double> mass = st.resp.column_masses(data);
    const int tc = data.total_cats();
    std::vector<double> acc(tc, 0.0);
    for (int i = 0; i < data.n_obs(); ++i) {
        const double wz = data.weight(i) * st.resp(i, k);
        if (wz == 0.0) continue;
        const double* y = data.row(i);
        for (int t = 0; t < tc; ++t) acc[t] += wz * y[t];
    }
    double* comp = st.model.component(k);
    for (int l = 0; l < data.n_vars(); ++l) {
        const double denom = data.n_trials(l) * mass[k] + smoothing * data.n_cats(l);
        for (int c = 0; c < data.n_cats(l); ++c)
            comp[data.offset(l) + c] = (acc[data.offset(l) + c] + smoothing) / denom;
    }
    fill_log_density_column(data, st.model, k, st.cols[k]);
}

// One k-descending sweep of the penalized component-wise EM. Visits
// components k_max..k_min (1-based), refreshing responsibilities before
// each weight update so annihilation decisions see current column masses.
// `reuse_resp` skips the first refresh so callers can hand in a state.
// Returns the number of annihilated components.
inline int annihilation_sweep(const CategoricalDataset& data, MmlState& st, int k_min,
                              double smoothing, bool reuse_resp,
                              std::vector<MmlTraceEntry>* trace) {
    int removed = 0;
    bool first = true;
    for (int k = st.model.n_components() - 1; k >= k_min - 1; --k) {
        if (!(first && reuse_resp)) st.refresh(data);
        first = false;
        const std::vector<double> mass = st.resp.column_masses(data);
        PenalizedMixingUpdate upd =
            penalized_mixing_update(mass, st.model.free_params(), st.model.n_components());
        if (upd.mixing[k] == 0.0) {
            if (st.model.n_components() - 1 < k_min)
                throw AnnihilationError(
                    "annihilation would drop the mixture below k_min; the penalty dominates "
                    "this dataset, reduce k_min or provide more data");
            upd.mixing.erase(upd.mixing.begin() + k);
            double total = 0.0;
            for (double a : upd.mixing) total += a;
            for (double& a : upd.mixing) a /= total;
            st.model.remove_component(k);
            st.model.mixing() = upd.mixing;
            st.cols.erase(st.cols.begin() + k);
            st.resp.remove_column(k);
            ++removed;
            if (trace) {
                st.refresh(data);
                trace->push_back({st.model.n_components(), st.log_likelihood,
                                  message_length_penalty(st.model, data.total_weight()) -
                                      st.log_likelihood,
                                  TraceEvent::Annihilation, false});
            }
        } else {
            st.model.mixing() = upd.mixing;
            update_component(data, st, k, smoothing);
        }
    }
    st.refresh(data);
    return removed;
}

inline MmlState make_state(const CategoricalDataset& data, MixtureModel model) {
    MmlState st;
    st.cols = log_density_columns(data, model);
    st.resp = ResponsibilityMatrix(data.n_obs(), model.n_components());
    st.model = std::move(model);
    st.refresh(data);
    return st;
}

}  // namespace detail

// One sweep as a standalone operation, starting from the caller's
// responsibilities.
inline std::pair<MixtureModel, ResponsibilityMatrix> component_annihilation_sweep(
    const CategoricalDataset& data, const MixtureModel& model, const ResponsibilityMatrix& resp,
    int k_min = 1, double smoothing = 0.0) {
    detail::MmlState st;
    st.model = model;
    st.cols = detail::log_density_columns(data, model);
    st.resp = resp;
    detail::annihilation_sweep(data, st, k_min, smoothing, /*reuse_resp=*/true, nullptr);
    return {std::move(st.model), std::move(st.resp)};
}

// Estimates the mixture and the number of components in one run by
// direct minimization of the message length: component-wise penalized EM
// sweeps (inner), repeated while the log-likelihood improves (middle),
// then forced removal of the weakest component down to k_min (outer).
// The returned model is the converged state with the smallest message
// length seen anywhere along the path.
inline MmlResult fit_em_mml(const CategoricalDataset& data, const MmlConfig& config) {
    if (config.k_min < 1) throw ValidationError("k_min must be at least 1");
    if (config.k_max < config.k_min) throw ValidationError("k_max must be at least k_min");
    if (!(config.delta > 0.0)) throw ValidationError("delta must be positive");

    MmlResult result;
    std::map<int, double> candidate_ml;
    const double W = data.total_weight();
    detail::MmlState st =
        detail::make_state(data, initial_model(data, config.k_max, config.seed));

    // initial state is recorded for diagnostics only; it never competes
    result.trace.push_back({st.model.n_components(), st.log_likelihood,
                            message_length_penalty(st.model, W) - st.log_likelihood,
                            TraceEvent::InnerIteration, false});

    while (true) {
        double prev = st.log_likelihood;
        bool converged = false;
        for (int sweep = 0; sweep < config.max_inner_iter; ++sweep) {
            detail::annihilation_sweep(data, st, config.k_min, config.smoothing,
                                       /*reuse_resp=*/true, &result.trace);
            const double ml = message_length_penalty(st.model, W) - st.log_likelihood;
            result.trace.push_back({st.model.n_components(), st.log_likelihood, ml,
                                    TraceEvent::InnerIteration, false});
            if (!improved(st.log_likelihood, prev, config.delta)) {
                converged = true;
                break;
            }
            prev = st.log_likelihood;
        }
        result.trace.back().converged = converged;

        const double ml = result.trace.back().message_length;
        if (ml < result.best_message_length) {
            result.best_message_length = ml;
            result.best_model = st.model;
        }
        if (config.keep_candidates) {
            auto it = candidate_ml.find(st.model.n_components());
            if (it == candidate_ml.end() || ml < it->second) {
                candidate_ml[st.model.n_components()] = ml;
                result.candidate_models[st.model.n_components()] = st.model;
            }
        }

        if (st.model.n_components() > config.k_min) {
            int weakest = 0;
            for (int k = 1; k < st.model.n_components(); ++k)
                if (st.model.mixing(k) < st.model.mixing(weakest)) weakest = k;
            st.model.remove_component(weakest);
            double total = 0.0;
            for (double a : st.model.mixing()) total += a;
            for (double& a : st.model.mixing()) a /= total;
            st.cols.erase(st.cols.begin() + weakest);
            st.resp.remove_column(weakest);
            st.refresh(data);
            result.trace.push_back({st.model.n_components(), st.log_likelihood,
                                    message_length_penalty(st.model, W) - st.log_likelihood,
                                    TraceEvent::ForcedRemoval, false});
        } else {
            break;
        }
    }
    result.selected_components = result.best_model.n_components();
    return result;
}

}  // namespace mixmml
