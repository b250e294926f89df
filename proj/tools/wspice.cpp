// wspice: simulate, quantize, estimate and bench one-bit radar experiments.
#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "wspice/bench.hpp"
#include "wspice/config.hpp"
#include "wspice/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wspice;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

const std::vector<std::string> kListKeys{"snr_db", "algorithms", "seeds"};

std::string dashed(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

json parse_scalar(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return text;
    }
}

// Flag text to JSON: list keys take comma-separated values, everything else a
// single JSON literal or a bare string.
json flag_value(const std::string& key, const std::string& text) {
    if (std::find(kListKeys.begin(), kListKeys.end(), key) == kListKeys.end()) return parse_scalar(text);
    if (!text.empty() && text.front() == '[') return parse_scalar(text);
    json list = json::array();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) list.push_back(parse_scalar(item));
    return list;
}

// Config-file keys plus the flags mirroring them.
struct ConfigFlags {
    std::string config_path;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;

    void attach(CLI::App* app) {
        app->add_option("-c,--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
        for (const auto& key : run_config_keys()) {
            options[key] = app->add_option("--" + dashed(key), values[key], "overrides config key " + key);
        }
    }

    RunConfig resolve() const {
        json doc = config_path.empty() ? json::object() : load_json(config_path);
        for (const auto& [key, opt] : options) {
            if (opt->count() > 0) doc[key] = flag_value(key, values.at(key));
        }
        return parse_run_config(doc);
    }
};

void prepare_output(const RunConfig& cfg, const std::string& command) {
    fs::create_directories(cfg.output_dir);
    std::ofstream out(cfg.output_dir / (command + "_config.json"));
    out << to_json(cfg).dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write resolved config to " + cfg.output_dir.string());
}

fs::path data_path(const RunConfig& cfg, const std::string& stem) {
    return cfg.output_dir / (stem + (cfg.data_format == "bin" ? ".bin" : ".csv"));
}

std::uint64_t first_seed(const RunConfig& cfg) {
    if (cfg.seeds.empty()) throw ConfigError("a seed is required (--seeds)");
    return cfg.seeds.front();
}

void write_json(const json& doc, const fs::path& path) {
    std::ofstream out(path);
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

int cmd_simulate(const RunConfig& cfg) {
    prepare_output(cfg, "simulate");
    const std::uint64_t seed = first_seed(cfg);
    const Trial trial = simulate_trial(cfg.scenario, seed);
    io::write_scene(trial.scene, cfg.output_dir / "scene.csv");
    io::write_complex(trial.y, data_path(cfg, "data"));
    write_json({{"seed", seed},
                {"samples", trial.y.size()},
                {"signal_power", trial.scene.signal_power()},
                {"noise_variance", trial.noise_variance},
                {"snr_db", cfg.scenario.snr_db}},
               cfg.output_dir / "data_meta.json");
    std::cerr << "simulate: " << trial.scene.targets.size() << " targets, " << trial.y.size() << " samples -> "
              << cfg.output_dir.string() << '\n';
    return 0;
}

int cmd_quantize(const RunConfig& cfg, const std::string& data_file) {
    prepare_output(cfg, "quantize");
    const VectorXcd y = io::read_complex(data_file);
    if (y.size() == 0) throw ConfigError("data file " + data_file + " is empty");
    const double power = cfg.scenario.power_estimate > 0.0 ? cfg.scenario.power_estimate : y.squaredNorm() / y.size();
    const double h_max = std::sqrt(power) / 2.0;
    std::mt19937_64 rng(first_seed(cfg));
    Threshold h;
    switch (cfg.scenario.threshold) {
        case ThresholdScheme::Zero:
            h = Threshold{VectorXcd::Zero(y.size()), ThresholdScheme::Zero, 1};
            break;
        case ThresholdScheme::PerSample:
            h = eight_level_threshold(y.size(), h_max, rng);
            break;
        case ThresholdScheme::PerPri:
            if (cfg.scenario.n1 * cfg.scenario.n2 != y.size()) {
                throw ConfigError("per-pri threshold needs n1 * n2 equal to the data length");
            }
            h = pri_varying_threshold(cfg.scenario.n1, cfg.scenario.n2, h_max, rng);
            break;
    }
    const SignedMeasurements z = signc(y, h);
    io::write_complex(z.z, data_path(cfg, "signs"));
    io::write_complex(h.values, data_path(cfg, "threshold"));
    write_json({{"seed", cfg.seeds.front()},
                {"scheme", std::string(to_string(h.scheme))},
                {"power", power},
                {"h_max", h_max},
                {"samples", y.size()}},
               cfg.output_dir / "quantize_meta.json");
    std::cerr << "quantize: " << y.size() << " samples, h_max " << h_max << '\n';
    return 0;
}

int cmd_estimate(const RunConfig& cfg, const std::string& signs_file, const std::string& threshold_file) {
    if (cfg.algorithms.size() != 1 || cfg.algorithms.front() == "1bper") {
        throw ConfigError("estimate runs exactly one of 1bspice, 1blikes, 1bslim, 1biaa");
    }
    prepare_output(cfg, "estimate");
    const SignedMeasurements z{io::read_complex(signs_file)};
    if (!z.valid()) throw ConfigError(signs_file + " does not hold +/-1 +/- j values");
    const VectorXcd h = io::read_complex(threshold_file);
    const Dictionary dict = make_dictionary(cfg.scenario);
    if (z.size() != dict.rows() || h.size() != dict.rows()) {
        throw ConfigError("signs and threshold need " + std::to_string(dict.rows()) + " samples for n1 * n2");
    }
    OneBitConfig est = cfg.estimator;
    est.variant = parse_onebit_variant(cfg.algorithms.front());
    const auto start = std::chrono::steady_clock::now();
    const OneBitState state = run(z, dict, h, est);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    io::EstimateHeader header{std::string(to_string(est.variant)), dict.rows(), dict.cols(), est.epsilon,
                              state.iterations, state.converged, state.eta};
    io::write_estimate(header, state.beta, state.p, cfg.output_dir / "estimate.csv");
    io::write_trace(state, cfg.output_dir / "trace.csv");
    if (cfg.images) {
        export_rd_image(state.amplitudes().cwiseAbs(), cfg.scenario.kr, cfg.scenario.kd, cfg.output_dir / "spectrum");
    }
    std::cerr << "estimate: " << header.variant << ' ' << state.iterations << " iterations"
              << (state.converged ? "" : " (not converged)") << ", eta " << state.eta
              << (state.scale_resolved() ? "" : " (scale unresolved)") << ", " << seconds << " s\n";
    return 0;
}

int cmd_bench(const RunConfig& cfg) {
    if (cfg.seeds.empty()) throw ConfigError("bench needs an explicit seed list (--seeds)");
    prepare_output(cfg, "bench");
    const BenchConfig bench = cfg.bench();
    const BenchOutput out = monte_carlo(bench);
    io::write_results(out.rows, cfg.output_dir / "results.csv");
    io::write_trials(bench, out, cfg.output_dir / "trials.csv");
    if (cfg.images) {
        for (std::size_t s = 0; s < bench.snr_db.size(); ++s) {
            for (std::size_t a = 0; a < bench.algorithms.size(); ++a) {
                const TrialResult& first = out.trials[s][a].front();
                if (first.failed) continue;
                std::ostringstream stem;
                stem << "spectrum_" << bench.algorithms[a] << "_snr" << bench.snr_db[s];
                export_rd_image(first.estimates.cwiseAbs(), cfg.scenario.kr, cfg.scenario.kd,
                                cfg.output_dir / stem.str());
            }
        }
    }
    int failed = 0;
    for (const auto& row : out.rows) {
        failed += row.n_failed;
        std::cerr << row.algorithm << " snr " << row.snr_db << " nmse " << row.nmse << " sidelobe "
                  << row.sidelobe_power << " runtime " << row.mean_runtime_s << " s\n";
    }
    if (failed > 0) std::cerr << "bench: " << failed << " trial(s) failed, see trials.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"One-bit weighted SPICE radar experiments"};
    app.require_subcommand(1);

    ConfigFlags simulate_flags, quantize_flags, estimate_flags, bench_flags;
    auto* simulate = app.add_subcommand("simulate", "generate a scene and high-precision data");
    simulate_flags.attach(simulate);

    std::string data_file;
    auto* quantize = app.add_subcommand("quantize", "one-bit quantize a data file against a threshold");
    quantize_flags.attach(quantize);
    quantize->add_option("--data", data_file, "complex data file (.csv or .bin)")->required()->check(CLI::ExistingFile);

    std::string signs_file, threshold_file;
    auto* estimate = app.add_subcommand("estimate", "run a one-bit weighted SPICE estimator");
    estimate_flags.attach(estimate);
    estimate->add_option("--signs", signs_file, "signed measurements file")->required()->check(CLI::ExistingFile);
    estimate->add_option("--threshold-file", threshold_file, "threshold file")->required()->check(CLI::ExistingFile);

    auto* bench = app.add_subcommand("bench", "Monte Carlo NMSE / sidelobe / runtime sweep");
    bench_flags.attach(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(simulate_flags.resolve());
        if (quantize->parsed()) return cmd_quantize(quantize_flags.resolve(), data_file);
        if (estimate->parsed()) return cmd_estimate(estimate_flags.resolve(), signs_file, threshold_file);
        return cmd_bench(bench_flags.resolve());
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DimensionError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
