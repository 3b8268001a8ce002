#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixmml/errors.hpp"
#include "mixmml/model.hpp"

namespace mixmml {

constexpr int kModelSchemaVersion = 1;

struct FitMetadata {
    std::string algorithm;       // "em" or "em-mml"
    std::uint64_t seed = 0;
    std::string objective;       // "log-likelihood" or "message-length"
    double objective_value = 0.0;
    int iterations = 0;
    bool converged = true;
};

// On-disk model: parameters plus the dataset shape and dictionaries
// needed to apply it to new data.
struct ModelFile {
    MixtureModel model;
    std::vector<int> n_trials;
    std::vector<std::string> var_names;
    std::vector<std::vector<std::string>> categories;
    FitMetadata meta;
};

inline nlohmann::json to_json(const ModelFile& mf) {
    // annihilated components are never serialized
    const MixtureModel m = mf.model.active_only();
    nlohmann::json j;
    j["schema_version"] = kModelSchemaVersion;
    j["n_components"] = m.n_components();
    j["n_vars"] = m.n_vars();
    j["n_cats"] = m.n_cats();
    j["n_trials"] = mf.n_trials;
    j["mixing"] = m.mixing();
    nlohmann::json probs = nlohmann::json::array();
    for (int k = 0; k < m.n_components(); ++k) {
        nlohmann::json comp = nlohmann::json::array();
        for (int l = 0; l < m.n_vars(); ++l) {
            nlohmann::json var = nlohmann::json::array();
            for (int c = 0; c < m.n_cats(l); ++c) var.push_back(m.prob(k, l, c));
            comp.push_back(var);
        }
        probs.push_back(comp);
    }
    j["probs"] = probs;
    j["variables"] = mf.var_names;
    j["categories"] = mf.categories;
    j["fit"] = {{"algorithm", mf.meta.algorithm},
                {"seed", mf.meta.seed},
                {"objective", mf.meta.objective},
                {"objective_value", mf.meta.objective_value},
                {"iterations", mf.meta.iterations},
                {"converged", mf.meta.converged}};
    return j;
}

inline ModelFile model_file_from_json(const nlohmann::json& j) {
    if (!j.contains("schema_version"))
        throw ParseError("model file lacks a schema_version field");
    const int version = j.at("schema_version").get<int>();
    if (version != kModelSchemaVersion)
        throw SchemaError("model schema version " + std::to_string(version) +
                          " is not supported (expected " +
                          std::to_string(kModelSchemaVersion) + ")");
    try {
        ModelFile mf;
        const int K = j.at("n_components").get<int>();
        const std::vector<int> n_cats = j.at("n_cats").get<std::vector<int>>();
        MixtureModel m(n_cats, K);
        m.mixing() = j.at("mixing").get<std::vector<double>>();
        if (static_cast<int>(m.mixing().size()) != K)
            throw ParseError("mixing vector length does not match n_components");
        const auto& probs = j.at("probs");
        if (static_cast<int>(probs.size()) != K)
            throw ParseError("probs length does not match n_components");
        for (int k = 0; k < K; ++k)
            for (std::size_t l = 0; l < n_cats.size(); ++l) {
                const auto& var = probs.at(k).at(l);
                if (static_cast<int>(var.size()) != n_cats[l])
                    throw ParseError("probs row has the wrong category count");
                for (int c = 0; c < n_cats[l]; ++c)
                    m.prob(k, static_cast<int>(l), c) = var.at(c).get<double>();
            }
        mf.model = std::move(m);
        mf.n_trials = j.at("n_trials").get<std::vector<int>>();
        mf.var_names = j.at("variables").get<std::vector<std::string>>();
        mf.categories = j.at("categories").get<std::vector<std::vector<std::string>>>();
        const auto& fit = j.at("fit");
        mf.meta.algorithm = fit.at("algorithm").get<std::string>();
        mf.meta.seed = fit.at("seed").get<std::uint64_t>();
        mf.meta.objective = fit.at("objective").get<std::string>();
        mf.meta.objective_value = fit.at("objective_value").get<double>();
        mf.meta.iterations = fit.at("iterations").get<int>();
        mf.meta.converged = fit.at("converged").get<bool>();
        return mf;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed model file: ") + e.what());
    }
}

inline void save_model(const std::string& path, const ModelFile& mf) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write model file: " + path);
    os << to_json(mf).dump(2) << '\n';
}

inline ModelFile load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model file is not valid JSON: ") + e.what());
    }
    return model_file_from_json(j);
}

}  // namespace mixmml
