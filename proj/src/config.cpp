#include "wspice/config.hpp"

#include <algorithm>
#include <fstream>

namespace wspice {

using nlohmann::json;

const std::vector<std::string>& run_config_keys() {
    static const std::vector<std::string> keys{
        "model",       "scene",         "n1",        "n2",         "kr",        "kd",
        "snr_db",      "threshold",     "power_estimate",          "empty_noise_power",
        "mls_order",   "mls_taps",      "n_targets", "n_offgrid",  "chip",      "algorithms",
        "solver",      "epsilon",       "rel_tol",   "max_iter",   "cg_tol",    "cg_max_iter",
        "cg_precondition",              "record_objective",             "seeds",     "jobs",       "output_dir",
        "data_format", "images"};
    return keys;
}

namespace {

template <typename T>
T get(const json& doc, const char* key, T fallback) {
    const auto it = doc.find(key);
    if (it == doc.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type: " + it->dump());
    }
}

Index get_index(const json& doc, const char* key, Index fallback) {
    const auto it = doc.find(key);
    if (it == doc.end()) return fallback;
    if (!it->is_number_integer()) throw ConfigError(std::string("config key '") + key + "' must be an integer");
    return it->get<Index>();
}

// A scalar is accepted wherever a list is expected.
template <typename T>
std::vector<T> get_list(const json& doc, const char* key, std::vector<T> fallback) {
    const auto it = doc.find(key);
    if (it == doc.end()) return fallback;
    try {
        if (it->is_array()) return it->get<std::vector<T>>();
        return {it->get<T>()};
    } catch (const json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type: " + it->dump());
    }
}

}  // namespace

void RunConfig::validate() const {
    scenario.validate();
    estimator.validate();
    if (snr_db.empty()) throw ConfigError("snr_db must not be empty");
    if (algorithms.empty()) throw ConfigError("algorithms must not be empty");
    for (const auto& a : algorithms) {
        if (a == "1bper") continue;
        OneBitConfig probe = estimator;
        probe.variant = parse_onebit_variant(a);
        probe.validate();
    }
    if (jobs < 1) throw ConfigError("jobs must be at least 1");
    if (data_format != "csv" && data_format != "bin") throw ConfigError("data_format must be csv or bin");
    if (!(estimator.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (!(estimator.rel_tol > 0.0)) throw ConfigError("rel_tol must be positive");
    if (estimator.max_iter < 1) throw ConfigError("max_iter must be at least 1");
}

BenchConfig RunConfig::bench() const {
    BenchConfig b;
    b.scenario = scenario;
    b.algorithms = algorithms;
    b.snr_db = snr_db;
    b.seeds = seeds;
    b.estimator = estimator;
    b.jobs = jobs;
    return b;
}

RunConfig parse_run_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    const auto& keys = run_config_keys();
    for (const auto& item : doc.items()) {
        if (std::find(keys.begin(), keys.end(), item.key()) == keys.end()) {
            throw ConfigError("unknown config key '" + item.key() + "'");
        }
    }

    RunConfig cfg;
    ScenarioConfig& sc = cfg.scenario;
    sc.model = parse_radar_model(get<std::string>(doc, "model", "lfmcw"));
    if (sc.model == RadarModel::Pmcw) {
        sc.n1 = 31;
        sc.n2 = 64;
        sc.kr = 124;
        sc.kd = 320;
        sc.threshold = ThresholdScheme::PerPri;
        cfg.snr_db = {15.0};
        cfg.algorithms = {"1biaa"};
    }
    sc.scene = parse_scene_kind(get<std::string>(doc, "scene", std::string(to_string(sc.scene))));
    sc.n1 = get_index(doc, "n1", sc.n1);
    sc.n2 = get_index(doc, "n2", sc.n2);
    // Grids default to 5x (LFMCW) or 4x / 5x (PMCW) oversampling of whatever dims were given.
    const Index kr_default = sc.model == RadarModel::Pmcw ? 4 * sc.n1 : 5 * sc.n1;
    const Index kd_default = sc.n2 == 1 ? 1 : 5 * sc.n2;
    sc.kr = get_index(doc, "kr", kr_default);
    sc.kd = get_index(doc, "kd", kd_default);
    cfg.snr_db = get_list<double>(doc, "snr_db", cfg.snr_db);
    sc.snr_db = cfg.snr_db.front();
    sc.threshold = parse_threshold_scheme(get<std::string>(doc, "threshold", std::string(to_string(sc.threshold))));
    sc.power_estimate = get<double>(doc, "power_estimate", sc.power_estimate);
    sc.empty_noise_power = get<double>(doc, "empty_noise_power", sc.empty_noise_power);
    sc.mls_order = get<int>(doc, "mls_order", sc.mls_order);
    sc.mls_taps = get<std::uint32_t>(doc, "mls_taps", sc.mls_taps);
    sc.n_targets = get<int>(doc, "n_targets", sc.n_targets);
    sc.n_offgrid = get<int>(doc, "n_offgrid", sc.n_offgrid);
    sc.chip = get<double>(doc, "chip", sc.chip);

    cfg.algorithms = get_list<std::string>(doc, "algorithms", cfg.algorithms);
    for (auto& a : cfg.algorithms) {
        if (a != "1bper") a = std::string(to_string(parse_onebit_variant(a)));
    }
    OneBitConfig& est = cfg.estimator;
    est.variant = cfg.algorithms.front() == "1bper" ? est.variant : parse_onebit_variant(cfg.algorithms.front());
    est.solver = parse_solver_kind(get<std::string>(doc, "solver", std::string(to_string(est.solver))));
    est.epsilon = get<double>(doc, "epsilon", est.epsilon);
    est.rel_tol = get<double>(doc, "rel_tol", est.rel_tol);
    est.max_iter = get<int>(doc, "max_iter", est.max_iter);
    est.cg.tol = get<double>(doc, "cg_tol", est.cg.tol);
    est.cg.max_iter = get_index(doc, "cg_max_iter", est.cg.max_iter);
    est.cg.precondition = get<bool>(doc, "cg_precondition", est.cg.precondition);
    est.record_objective = get<bool>(doc, "record_objective", est.record_objective);

    cfg.seeds = get_list<std::uint64_t>(doc, "seeds", cfg.seeds);
    cfg.jobs = get<int>(doc, "jobs", cfg.jobs);
    cfg.output_dir = get<std::string>(doc, "output_dir", cfg.output_dir.string());
    cfg.data_format = get<std::string>(doc, "data_format", cfg.data_format);
    cfg.images = get<bool>(doc, "images", cfg.images);
    cfg.validate();
    return cfg;
}

json to_json(const RunConfig& cfg) {
    const ScenarioConfig& sc = cfg.scenario;
    const OneBitConfig& est = cfg.estimator;
    json doc;
    doc["model"] = std::string(to_string(sc.model));
    doc["scene"] = std::string(to_string(sc.scene));
    doc["n1"] = sc.n1;
    doc["n2"] = sc.n2;
    doc["kr"] = sc.kr;
    doc["kd"] = sc.kd;
    doc["snr_db"] = cfg.snr_db;
    doc["threshold"] = std::string(to_string(sc.threshold));
    doc["power_estimate"] = sc.power_estimate;
    doc["empty_noise_power"] = sc.empty_noise_power;
    doc["mls_order"] = sc.mls_order;
    doc["mls_taps"] = sc.mls_taps;
    doc["n_targets"] = sc.n_targets;
    doc["n_offgrid"] = sc.n_offgrid;
    doc["chip"] = sc.chip;
    doc["algorithms"] = cfg.algorithms;
    doc["solver"] = std::string(to_string(est.solver));
    doc["epsilon"] = est.epsilon;
    doc["rel_tol"] = est.rel_tol;
    doc["max_iter"] = est.max_iter;
    doc["cg_tol"] = est.cg.tol;
    doc["cg_max_iter"] = est.cg.max_iter;
    doc["cg_precondition"] = est.cg.precondition;
    doc["record_objective"] = est.record_objective;
    doc["seeds"] = cfg.seeds;
    doc["jobs"] = cfg.jobs;
    doc["output_dir"] = cfg.output_dir.string();
    doc["data_format"] = cfg.data_format;
    doc["images"] = cfg.images;
    return doc;
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
}

RunConfig load_run_config(const std::filesystem::path& path) { return parse_run_config(load_json(path)); }

}  // namespace wspice
