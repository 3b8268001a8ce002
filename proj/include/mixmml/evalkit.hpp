#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "mixmml/criteria.hpp"
#include "mixmml/dataset.hpp"
#include "mixmml/em.hpp"
#include "mixmml/errors.hpp"
#include "mixmml/mml.hpp"
#include "mixmml/model.hpp"
#include "mixmml/synthgen.hpp"

namespace mixmml {

// Maximum-posterior labels, ties to the smaller component index.
inline std::vector<int> hard_assign(const ResponsibilityMatrix& resp) {
    return argmax_rows(resp);
}

// Cramer's V from a contingency table of counts. All-zero rows and
// columns are dropped before the Pearson statistic is formed.
inline double cramers_v(const std::vector<std::vector<double>>& table) {
    std::vector<double> row_sum, col_sum;
    std::vector<std::vector<double>> cells;
    for (const auto& row : table) {
        double s = 0.0;
        for (double v : row) s += v;
        if (s > 0.0) {
            cells.push_back(row);
            row_sum.push_back(s);
        }
    }
    if (cells.size() < 2) throw AssociationError("contingency table has fewer than 2 non-empty rows");
    const std::size_t width = cells[0].size();
    std::vector<bool> keep(width, false);
    for (std::size_t j = 0; j < width; ++j)
        for (const auto& row : cells)
            if (row[j] > 0.0) keep[j] = true;
    std::size_t c_cols = 0;
    col_sum.assign(width, 0.0);
    for (std::size_t j = 0; j < width; ++j)
        if (keep[j]) ++c_cols;
    if (c_cols < 2) throw AssociationError("contingency table has fewer than 2 non-empty columns");

    double n = 0.0;
    for (std::size_t r = 0; r < cells.size(); ++r)
        for (std::size_t j = 0; j < width; ++j) {
            col_sum[j] += cells[r][j];
            n += cells[r][j];
        }
    double chi2 = 0.0;
    for (std::size_t r = 0; r < cells.size(); ++r)
        for (std::size_t j = 0; j < width; ++j) {
            if (!keep[j]) continue;
            const double expected = row_sum[r] * col_sum[j] / n;
            const double d = cells[r][j] - expected;
            chi2 += d * d / expected;
        }
    const double denom = n * std::min(cells.size() - 1, c_cols - 1);
    return std::sqrt(chi2 / denom);
}

// Association between cluster labels and one categorical variable given
// as per-observation category values (both 0-based).
inline double cramers_v(const std::vector<int>& labels, const std::vector<int>& categories,
                        const std::vector<double>& weights = {}) {
    if (labels.size() != categories.size())
        throw ValidationError("label and category vectors differ in length");
    int rmax = 0, cmax = 0;
    for (int v : labels) rmax = std::max(rmax, v);
    for (int v : categories) cmax = std::max(cmax, v);
    std::vector<std::vector<double>> table(rmax + 1, std::vector<double>(cmax + 1, 0.0));
    for (std::size_t i = 0; i < labels.size(); ++i)
        table[labels[i]][categories[i]] += weights.empty() ? 1.0 : weights[i];
    return cramers_v(table);
}

enum class Method { EmMml, Bic, Aic, Caic, Maic, Icl };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::EmMml: return "EM-MML";
        case Method::Bic: return "BIC";
        case Method::Aic: return "AIC";
        case Method::Caic: return "CAIC";
        case Method::Maic: return "MAIC";
        case Method::Icl: return "ICL";
    }
    return "?";
}

inline Method method_from_string(const std::string& s) {
    if (s == "EM-MML" || s == "em-mml" || s == "EMML" || s == "emml") return Method::EmMml;
    return static_cast<Method>(static_cast<int>(criterion_from_string(s)) + 1);
}

inline Criterion method_criterion(Method m) {
    return static_cast<Criterion>(static_cast<int>(m) - 1);
}

struct ExperimentResult {
    int scenario = 0;
    int run = 0;
    Method method = Method::EmMml;
    int selected_k = 0;
    int true_k = 0;
    double separation = 0.0;
    double wall_time_ms = 0.0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
};

struct ExperimentConfig {
    int k_lo = 1;
    int k_hi = 10;
    int restarts = 1;        // per-K restarts for criterion methods
    double delta = 1e-6;
    int max_iter = 500;
    double smoothing = 0.0;
    int emml_k_max = 10;
    int emml_restarts = 1;   // EM-MML reruns keeping the smallest message length
    int max_inner_iter = 500;
    int jobs = 1;
};

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace detail

// Runs EM-MML `restarts` times with derived seeds and keeps the smallest
// message length, mirroring the max-likelihood restart rule on the EM side.
inline MmlResult fit_em_mml_restarts(const CategoricalDataset& data, MmlConfig config,
                                     int restarts, std::uint64_t seed) {
    MmlResult best;
    for (int r = 0; r < restarts; ++r) {
        config.seed = derive_seed(seed, 7001, r);
        MmlResult res = fit_em_mml(data, config);
        if (res.best_message_length < best.best_message_length) best = std::move(res);
    }
    return best;
}

// Selection-rate experiment: for every scenario x run, generate a dataset
// and run each method on it. Criterion methods share one set of per-K
// fits (they differ only in scoring), so their recorded wall time is the
// shared sequential fit plus their own scoring pass. Cells are
// independent and may run on `jobs` threads; results are ordered by
// (scenario, run, method) regardless of scheduling.
inline std::vector<ExperimentResult> run_selection_experiment(
    const std::vector<GenSpec>& scenarios, const std::vector<Method>& methods,
    int runs_per_cell, const ExperimentConfig& config, std::uint64_t master_seed) {
    if (runs_per_cell < 1) throw ValidationError("runs_per_cell must be at least 1");

    const int n_cells = static_cast<int>(scenarios.size()) * runs_per_cell;
    std::vector<std::vector<ExperimentResult>> cell_results(n_cells);

    auto run_cell = [&](int cell) {
        const int s = cell / runs_per_cell;
        const int r = cell % runs_per_cell;
        const std::uint64_t cell_seed = derive_seed(master_seed, s, r);
        std::vector<ExperimentResult>& out = cell_results[cell];

        GenSpec spec = scenarios[s];
        spec.seed = derive_seed(cell_seed, 1);
        CategoricalDataset data;
        PlantedMixture planted;
        try {
            auto gen = generate(spec);
            data = std::move(gen.first);
            planted = std::move(gen.second);
        } catch (const Error& e) {
            for (Method m : methods)
                out.push_back({s, r, m, 0, spec.k_true, 0.0, 0.0, cell_seed, true,
                               std::string("generation: ") + e.what()});
            return;
        }

        bool need_fits = false;
        for (Method m : methods)
            if (m != Method::EmMml) need_fits = true;

        std::map<int, FitReport> fits;
        std::map<int, ResponsibilityMatrix> resps;
        double fit_ms = 0.0;
        std::string fit_error;
        if (need_fits) {
            const auto t0 = std::chrono::steady_clock::now();
            try {
                FitOptions opts{config.delta, config.max_iter, config.smoothing};
                fits = fit_candidate_models(data, config.k_lo, config.k_hi, config.restarts,
                                            opts, derive_seed(cell_seed, 2), nullptr);
                if (fits.empty()) fit_error = "every candidate K failed";
                for (const auto& [k, fit] : fits) resps[k] = e_step(data, fit.model);
            } catch (const Error& e) {
                fit_error = e.what();
            }
            fit_ms = detail::elapsed_ms(t0);
        }

        for (Method m : methods) {
            ExperimentResult res;
            res.scenario = s;
            res.run = r;
            res.method = m;
            res.true_k = spec.k_true;
            res.separation = planted.separation;
            res.seed = cell_seed;
            try {
                if (m == Method::EmMml) {
                    const auto t0 = std::chrono::steady_clock::now();
                    MmlConfig mc;
                    mc.k_min = 1;
                    mc.k_max = config.emml_k_max;
                    mc.delta = config.delta;
                    mc.max_inner_iter = config.max_inner_iter;
                    mc.smoothing = config.smoothing;
                    MmlResult mml = fit_em_mml_restarts(data, mc, config.emml_restarts,
                                                        derive_seed(cell_seed, 3));
                    res.selected_k = mml.selected_components;
                    res.wall_time_ms = detail::elapsed_ms(t0);
                } else {
                    if (!fit_error.empty()) throw Error(fit_error);
                    const auto t0 = std::chrono::steady_clock::now();
                    const Criterion crit = method_criterion(m);
                    bool have = false;
                    double best_value = 0.0;
                    for (const auto& [k, fit] : fits) {
                        CriterionScore sc = score(crit, data, fit.model, resps.at(k));
                        if (!have || sc.value < best_value - 1e-12) {
                            best_value = sc.value;
                            res.selected_k = k;
                            have = true;
                        }
                    }
                    res.wall_time_ms = fit_ms + detail::elapsed_ms(t0);
                }
            } catch (const Error& e) {
                res.failed = true;
                res.error = e.what();
            }
            out.push_back(res);
        }
    };

    if (config.jobs <= 1) {
        for (int cell = 0; cell < n_cells; ++cell) run_cell(cell);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        const int n_threads = std::min(config.jobs, n_cells);
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back([&] {
                for (int cell = next.fetch_add(1); cell < n_cells; cell = next.fetch_add(1))
                    run_cell(cell);
            });
        for (auto& th : pool) th.join();
    }

    std::vector<ExperimentResult> results;
    results.reserve(static_cast<std::size_t>(n_cells) * methods.size());
    for (auto& cell : cell_results)
        for (auto& r : cell) results.push_back(std::move(r));
    return results;
}

struct RateSummary {
    int scenario = 0;
    Method method = Method::EmMml;
    int runs = 0;
    int correct = 0;
    int failures = 0;
    double rate = 0.0;            // correct / (runs - failures)
    double mean_separation = 0.0; // over successful generations
};

inline std::vector<RateSummary> summarize_rates(const std::vector<ExperimentResult>& results,
                                                int n_scenarios,
                                                const std::vector<Method>& methods) {
    std::vector<RateSummary> out;
    for (int s = 0; s < n_scenarios; ++s)
        for (Method m : methods) {
            RateSummary sum;
            sum.scenario = s;
            sum.method = m;
            double sep = 0.0;
            int sep_count = 0;
            for (const auto& r : results) {
                if (r.scenario != s || r.method != m) continue;
                ++sum.runs;
                if (r.failed) {
                    ++sum.failures;
                    continue;
                }
                sep += r.separation;
                ++sep_count;
                if (r.selected_k == r.true_k) ++sum.correct;
            }
            const int valid = sum.runs - sum.failures;
            sum.rate = valid > 0 ? static_cast<double>(sum.correct) / valid : 0.0;
            sum.mean_separation = sep_count > 0 ? sep / sep_count : 0.0;
            out.push_back(sum);
        }
    return out;
}

struct TimingPair {
    int run = 0;
    std::uint64_t seed = 0;
    double emml_ms = 0.0;
    int emml_k = 0;
    double criterion_ms = 0.0;
    int criterion_k = 0;
};

struct TimingSummary {
    std::vector<TimingPair> pairs;
    Criterion criterion = Criterion::BIC;
    double mean_emml_ms = 0.0;
    double mean_criterion_ms = 0.0;
    double mean_ratio = 0.0;  // mean over pairs of emml/criterion
};

// Paired wall-clock comparison: one EM-MML run against one sequential
// selection over the same component range with a shared initialization
// seed. Pairs run strictly sequentially to keep the comparison fair.
inline TimingSummary run_paired_timing(const GenSpec& base, int runs, int k_max,
                                       Criterion criterion, const FitOptions& options,
                                       int restarts, std::uint64_t master_seed) {
    if (runs < 2) throw ValidationError("paired timing needs at least 2 runs");
    TimingSummary summary;
    summary.criterion = criterion;
    double ratio_sum = 0.0;
    for (int r = 0; r < runs; ++r) {
        GenSpec spec = base;
        spec.seed = derive_seed(master_seed, r, 100);
        auto [data, planted] = generate(spec);
        const std::uint64_t fit_seed = derive_seed(master_seed, r, 200);

        TimingPair pair;
        pair.run = r;
        pair.seed = fit_seed;

        auto t0 = std::chrono::steady_clock::now();
        MmlConfig mc;
        mc.k_min = 1;
        mc.k_max = k_max;
        mc.delta = options.delta;
        mc.smoothing = options.smoothing;
        mc.seed = fit_seed;
        MmlResult mml = fit_em_mml(data, mc);
        pair.emml_ms = detail::elapsed_ms(t0);
        pair.emml_k = mml.selected_components;

        t0 = std::chrono::steady_clock::now();
        SelectionResult sel =
            select_by_criterion(criterion, data, 1, k_max, restarts, options, fit_seed);
        pair.criterion_ms = detail::elapsed_ms(t0);
        pair.criterion_k = sel.best_k;

        summary.mean_emml_ms += pair.emml_ms;
        summary.mean_criterion_ms += pair.criterion_ms;
        ratio_sum += pair.emml_ms / pair.criterion_ms;
        summary.pairs.push_back(pair);
    }
    summary.mean_emml_ms /= runs;
    summary.mean_criterion_ms /= runs;
    summary.mean_ratio = ratio_sum / runs;
    return summary;
}

}  // namespace mixmml
