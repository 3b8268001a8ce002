#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "mixmml/criteria.hpp"
#include "mixmml/evalkit.hpp"
#include "mixmml/mml.hpp"
#include "mixmml/model_io.hpp"
#include "mixmml/synthgen.hpp"

namespace mixmml {

// Report values print with 6 significant digits; full precision lives in
// the model file.
inline std::string fmt6(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

inline std::ofstream open_report(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write report file: " + path);
    return os;
}

inline void write_trace_csv(const std::string& path, const std::vector<MmlTraceEntry>& trace) {
    auto os = open_report(path);
    os << "event,active_components,log_likelihood,message_length,converged\n";
    for (const auto& e : trace)
        os << to_string(e.event) << ',' << e.active << ',' << fmt6(e.log_likelihood) << ','
           << fmt6(e.message_length) << ',' << (e.converged ? 1 : 0) << '\n';
}

inline void write_scores_csv(const std::string& path,
                             const std::vector<CriterionScore>& scores) {
    auto os = open_report(path);
    os << "criterion,n_components,value,log_likelihood,free_params\n";
    for (const auto& s : scores)
        os << to_string(s.criterion) << ',' << s.n_components << ',' << fmt6(s.value) << ','
           << fmt6(s.log_likelihood) << ',' << s.free_params << '\n';
}

// Per-segment category shares, the percentage view of the fitted
// parameters (one row per variable/category pair).
inline void write_segment_profile_csv(const std::string& path, const ModelFile& mf) {
    auto os = open_report(path);
    const MixtureModel& m = mf.model;
    os << "variable,category";
    for (int k = 0; k < m.n_components(); ++k) os << ",segment_" << k + 1;
    os << "\nmixing_weight,";
    for (int k = 0; k < m.n_components(); ++k) os << ',' << fmt6(m.mixing(k));
    os << '\n';
    for (int l = 0; l < m.n_vars(); ++l)
        for (int c = 0; c < m.n_cats(l); ++c) {
            os << mf.var_names[l] << ',' << mf.categories[l][c];
            for (int k = 0; k < m.n_components(); ++k)
                os << ',' << fmt6(100.0 * m.prob(k, l, c));
            os << '\n';
        }
}

inline void write_rates_csv(const std::string& path, const std::vector<RateSummary>& rates,
                            const std::vector<GenSpec>& scenarios) {
    auto os = open_report(path);
    os << "scenario,true_k,target_sep_lo,target_sep_hi,mean_separation,method,runs,correct,"
          "failures,rate\n";
    for (const auto& r : rates) {
        const GenSpec& spec = scenarios[r.scenario];
        os << r.scenario << ',' << spec.k_true << ',' << fmt6(spec.sep_lo) << ','
           << fmt6(spec.sep_hi) << ',' << fmt6(r.mean_separation) << ',' << to_string(r.method)
           << ',' << r.runs << ',' << r.correct << ',' << r.failures << ',' << fmt6(r.rate)
           << '\n';
    }
}

// One row per run; wall_time_ms is measurement, not part of the
// determinism contract.
inline void write_runs_csv(const std::string& path,
                           const std::vector<ExperimentResult>& results) {
    auto os = open_report(path);
    os << "scenario,run,seed,method,selected_k,true_k,separation,wall_time_ms,failed,error\n";
    for (const auto& r : results)
        os << r.scenario << ',' << r.run << ',' << r.seed << ',' << to_string(r.method) << ','
           << r.selected_k << ',' << r.true_k << ',' << fmt6(r.separation) << ','
           << fmt6(r.wall_time_ms) << ',' << (r.failed ? 1 : 0) << ',' << r.error << '\n';
}

inline void write_timing_csv(const std::string& path, const TimingSummary& summary) {
    auto os = open_report(path);
    os << "run,seed,emml_ms,emml_selected_k," << to_string(summary.criterion) << "_ms,"
       << to_string(summary.criterion) << "_selected_k,ratio\n";
    for (const auto& p : summary.pairs)
        os << p.run << ',' << p.seed << ',' << fmt6(p.emml_ms) << ',' << p.emml_k << ','
           << fmt6(p.criterion_ms) << ',' << p.criterion_k << ','
           << fmt6(p.emml_ms / p.criterion_ms) << '\n';
}

inline void write_association_csv(const std::string& path,
                                  const std::vector<std::string>& var_names,
                                  const std::vector<double>& v_values) {
    auto os = open_report(path);
    os << "variable,cramers_v\n";
    double sum = 0.0;
    for (std::size_t l = 0; l < var_names.size(); ++l) {
        os << var_names[l] << ',' << fmt6(v_values[l]) << '\n';
        sum += v_values[l];
    }
    os << "sum," << fmt6(sum) << '\n';
}

inline void write_dict_csv(const std::string& path, const std::vector<std::string>& var_names,
                           const std::vector<std::vector<std::string>>& categories) {
    auto os = open_report(path);
    os << "variable,category_index,category\n";
    for (std::size_t l = 0; l < var_names.size(); ++l)
        for (std::size_t c = 0; c < categories[l].size(); ++c)
            os << var_names[l] << ',' << c + 1 << ',' << categories[l][c] << '\n';
}

inline void write_assignments_csv(const std::string& path, const std::vector<int>& labels) {
    auto os = open_report(path);
    os << "observation,segment\n";
    for (std::size_t i = 0; i < labels.size(); ++i)
        os << i + 1 << ',' << labels[i] + 1 << '\n';
}

}  // namespace mixmml
