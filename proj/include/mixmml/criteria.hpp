#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mixmml/dataset.hpp"
#include "mixmml/em.hpp"
#include "mixmml/errors.hpp"
#include "mixmml/model.hpp"
#include "mixmml/rng.hpp"

namespace mixmml {

enum class Criterion { BIC, AIC, CAIC, MAIC, ICL };

inline const char* to_string(Criterion c) {
    switch (c) {
        case Criterion::BIC: return "BIC";
        case Criterion::AIC: return "AIC";
        case Criterion::CAIC: return "CAIC";
        case Criterion::MAIC: return "MAIC";
        case Criterion::ICL: return "ICL";
    }
    return "?";
}

inline Criterion criterion_from_string(const std::string& s) {
    if (s == "BIC" || s == "bic") return Criterion::BIC;
    if (s == "AIC" || s == "aic") return Criterion::AIC;
    if (s == "CAIC" || s == "caic") return Criterion::CAIC;
    if (s == "MAIC" || s == "maic") return Criterion::MAIC;
    if (s == "ICL" || s == "icl") return Criterion::ICL;
    throw Error("unknown criterion: " + s);
}

struct CriterionScore {
    Criterion criterion;
    int n_components;
    double value;
    double log_likelihood;
    int free_params;
};

// Entropy of the soft assignment, weighted like every other sum over
// observations. Zero for hard responsibilities.
inline double assignment_entropy(const CategoricalDataset& data,
                                 const ResponsibilityMatrix& resp) {
    double h = 0.0;
    for (int i = 0; i < resp.n_obs(); ++i) {
        const double w = data.weight(i);
        for (int k = 0; k < resp.n_components(); ++k) {
            const double z = resp(i, k);
            if (z > 0.0) h -= w * z * std::log(z);
        }
    }
    return h;
}

inline double criterion_value(Criterion c, double ll, int free_params, double effective_n,
                              double entropy) {
    const double C = free_params;
    switch (c) {
        case Criterion::BIC: return -2.0 * ll + C * std::log(effective_n);
        case Criterion::AIC: return -2.0 * ll + 2.0 * C;
        case Criterion::CAIC: return -2.0 * ll + C * (std::log(effective_n) + 1.0);
        case Criterion::MAIC: return -2.0 * ll + 3.0 * C;  // AIC-3 reading of the modified AIC
        case Criterion::ICL:
            return -2.0 * ll + C * std::log(effective_n) + 2.0 * entropy;
    }
    return 0.0;
}

inline CriterionScore score(Criterion c, const CategoricalDataset& data,
                            const MixtureModel& model, const ResponsibilityMatrix& resp) {
    const double ll = log_likelihood(data, model);
    if (!std::isfinite(ll)) throw Error("criterion undefined for non-finite log-likelihood");
    const double h = c == Criterion::ICL ? assignment_entropy(data, resp) : 0.0;
    return {c, model.n_components(), criterion_value(c, ll, model.free_params(),
                                                     data.total_weight(), h),
            ll, model.free_params()};
}

struct SelectionResult {
    int best_k = 0;
    std::vector<CriterionScore> scores;        // one per candidate K that fitted
    std::map<int, FitReport> fits;             // max-likelihood fit per K
    int restarts_used = 0;
    std::vector<std::string> warnings;
};

// Best-of-restarts EM fits for every K in [k_lo, k_hi]. Ks where every
// restart fails are dropped with a warning. Shared by the criterion
// selector and the benchmark harness (which scores several criteria on
// one set of fits).
inline std::map<int, FitReport> fit_candidate_models(const CategoricalDataset& data, int k_lo,
                                                     int k_hi, int restarts,
                                                     const FitOptions& options,
                                                     std::uint64_t seed,
                                                     std::vector<std::string>* warnings) {
    std::map<int, FitReport> fits;
    for (int k = k_lo; k <= k_hi; ++k) {
        bool have = false;
        FitReport best;
        for (int r = 0; r < restarts; ++r) {
            try {
                FitReport fit = fit_em(data, k, {derive_seed(seed, k, r)}, options);
                if (!have || fit.final_log_likelihood() > best.final_log_likelihood()) {
                    best = std::move(fit);
                    have = true;
                }
            } catch (const Error&) {
                // failed restart (empty component or degenerate state)
            }
        }
        if (have)
            fits[k] = std::move(best);
        else if (warnings)
            warnings->push_back("no successful fit for K = " + std::to_string(k));
    }
    return fits;
}

// Sequential selection: fit each candidate K, score with the criterion,
// return the minimizer. Ties break toward smaller K.
inline SelectionResult select_by_criterion(Criterion criterion, const CategoricalDataset& data,
                                           int k_lo, int k_hi, int restarts = 5,
                                           const FitOptions& options = {},
                                           std::uint64_t seed = 0) {
    if (k_lo < 1 || k_hi < k_lo) throw ValidationError("invalid component range");
    if (restarts < 1) throw ValidationError("restarts must be at least 1");

    SelectionResult result;
    result.restarts_used = restarts;
    result.fits = fit_candidate_models(data, k_lo, k_hi, restarts, options, seed,
                                       &result.warnings);
    if (result.fits.empty()) throw Error("every candidate component count failed to fit");

    bool have_best = false;
    double best_value = 0.0;
    for (const auto& [k, fit] : result.fits) {
        ResponsibilityMatrix resp = e_step(data, fit.model);
        CriterionScore s = score(criterion, data, fit.model, resp);
        result.scores.push_back(s);
        if (!have_best || s.value < best_value - 1e-12) {
            best_value = s.value;
            result.best_k = k;
            have_best = true;
        }
    }
    return result;
}

}  // namespace mixmml
