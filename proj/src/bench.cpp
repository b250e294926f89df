#include "wspice/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

namespace wspice {

RadarModel parse_radar_model(std::string_view name) {
    if (name == "lfmcw") return RadarModel::Lfmcw;
    if (name == "pmcw") return RadarModel::Pmcw;
    throw ConfigError("unknown radar model '" + std::string(name) + "' (expected lfmcw or pmcw)");
}

std::string_view to_string(RadarModel model) { return model == RadarModel::Lfmcw ? "lfmcw" : "pmcw"; }

SceneKind parse_scene_kind(std::string_view name) {
    if (name == "reference") return SceneKind::Reference;
    if (name == "empty") return SceneKind::Empty;
    throw ConfigError("unknown scene '" + std::string(name) + "' (expected reference or empty)");
}

std::string_view to_string(SceneKind kind) { return kind == SceneKind::Reference ? "reference" : "empty"; }

void ScenarioConfig::validate() const {
    if (n1 < 1 || n2 < 1 || kr < 1 || kd < 1) throw ConfigError("scenario sizes must be positive");
    if (kr < n1 || kd < n2) throw ConfigError("grid must be at least as fine as the data length");
    if (model == RadarModel::Pmcw) {
        if (mls_order < 2 || mls_order > 31) throw ConfigError("mls_order must be in [2, 31]");
        if ((Index{1} << mls_order) - 1 != n1) throw ConfigError("pmcw n1 must equal 2^mls_order - 1");
        if (n_targets < 0 || n_offgrid < 0 || n_offgrid > n_targets) throw ConfigError("bad pmcw target counts");
        if (n_targets > std::min(kr, kd)) throw ConfigError("pmcw targets need distinct range and Doppler bins");
        if (!(chip > 0.0)) throw ConfigError("chip duration must be positive");
    }
    if (!(empty_noise_power > 0.0)) throw ConfigError("empty_noise_power must be positive");
    if (power_estimate < 0.0) throw ConfigError("power_estimate must be non-negative");
}

Scene lfmcw_reference_scene(Index n, Index grid, std::mt19937_64& rng) {
    (void)grid;
    const double rayleigh = 1.0 / static_cast<double>(n);
    const double freqs[] = {0.150, 0.216, 0.216 + rayleigh, 0.375, 0.450};
    const double amps[] = {1.0, 0.8, 0.8, 0.6, 0.4};
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    Scene scene;
    for (int i = 0; i < 5; ++i) {
        Target t;
        t.range = 2.0 * M_PI * freqs[i];
        t.amplitude = std::polar(amps[i], phase(rng));
        const double bin = freqs[i] * static_cast<double>(grid);
        t.on_grid = std::abs(bin - std::round(bin)) < 1e-9;
        scene.targets.push_back(t);
    }
    return scene;
}

Scene pmcw_random_scene(const ScenarioConfig& cfg, std::mt19937_64& rng) {
    std::vector<Index> rbins(cfg.kr);
    std::vector<Index> dbins(cfg.kd);
    std::iota(rbins.begin(), rbins.end(), 0);
    std::iota(dbins.begin(), dbins.end(), 0);
    std::shuffle(rbins.begin(), rbins.end(), rng);
    std::shuffle(dbins.begin(), dbins.end(), rng);
    std::uniform_real_distribution<double> amp(0.1, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    const double delay_bin = static_cast<double>(cfg.n1) * cfg.chip / static_cast<double>(cfg.kr);
    Scene scene;
    for (int i = 0; i < cfg.n_targets; ++i) {
        const double shift = i < cfg.n_offgrid ? 0.5 : 0.0;
        // The last range bin has no room for a half-bin shift inside the PRI.
        const double rb = static_cast<double>(rbins[i]) + (rbins[i] + 1 < cfg.kr ? shift : -shift);
        Target t;
        t.range = rb * delay_bin;
        t.doppler = grid_frequency(1, cfg.kd) * (static_cast<double>(dbins[i]) + shift);
        const double a = amp(rng);
        t.amplitude = std::polar(a, phase(rng));
        t.on_grid = shift == 0.0;
        scene.targets.push_back(t);
    }
    return scene;
}

VectorXd make_code(const ScenarioConfig& cfg) { return mls_generate(cfg.mls_order, cfg.mls_taps); }

Dictionary make_dictionary(const ScenarioConfig& cfg) {
    cfg.validate();
    if (cfg.model == RadarModel::Lfmcw) return Dictionary::fourier2d(cfg.n1, cfg.n2, cfg.kr, cfg.kd);
    const VectorXd code = make_code(cfg);
    std::vector<double> delays(cfg.kr);
    for (Index k = 0; k < cfg.kr; ++k) {
        delays[k] = static_cast<double>(k) * static_cast<double>(cfg.n1) * cfg.chip / static_cast<double>(cfg.kr);
    }
    return Dictionary::kronecker(pmcw_steering_matrix(code, delays, cfg.chip), doppler_steering(cfg.n2, cfg.kd));
}

Trial simulate_trial(const ScenarioConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    std::mt19937_64 rng(seed);
    Trial trial;
    VectorXcd clean;
    if (cfg.scene == SceneKind::Reference) {
        trial.scene = cfg.model == RadarModel::Lfmcw ? lfmcw_reference_scene(cfg.n1, cfg.kr, rng)
                                                     : pmcw_random_scene(cfg, rng);
    }
    if (cfg.model == RadarModel::Lfmcw) {
        clean = synthesize_lfmcw(trial.scene, cfg.n1, cfg.n2);
    } else {
        clean = synthesize_pmcw(trial.scene, make_code(cfg), cfg.n2, cfg.chip);
    }
    const double signal = trial.scene.signal_power();
    NoisyData noisy = signal > 0.0 || std::isinf(cfg.snr_db) ? add_noise(clean, cfg.snr_db, signal, rng)
                                   : add_noise(clean, 0.0, cfg.empty_noise_power, rng);
    trial.y = std::move(noisy.y);
    trial.noise_variance = noisy.noise_variance;
    const double power = cfg.power_estimate > 0.0 ? cfg.power_estimate : signal + trial.noise_variance;
    trial.h_max = std::sqrt(power) / 2.0;
    const Index n = trial.y.size();
    switch (cfg.threshold) {
        case ThresholdScheme::Zero:
            trial.threshold = Threshold{VectorXcd::Zero(n), ThresholdScheme::Zero, 1};
            break;
        case ThresholdScheme::PerSample:
            trial.threshold = eight_level_threshold(n, trial.h_max, rng);
            break;
        case ThresholdScheme::PerPri:
            trial.threshold = pri_varying_threshold(cfg.n1, cfg.n2, trial.h_max, rng);
            break;
    }
    trial.z = signc(trial.y, trial.threshold);
    return trial;
}

namespace {
Index wrap(Index i, Index n) { return ((i % n) + n) % n; }
}  // namespace

Index nearest_bin(const Target& t, const ScenarioConfig& cfg) {
    const double kr = static_cast<double>(cfg.kr);
    const double kd = static_cast<double>(cfg.kd);
    double r = 0.0;
    if (cfg.model == RadarModel::Lfmcw) {
        r = t.range / (2.0 * M_PI) * kr;
    } else {
        r = t.range / (static_cast<double>(cfg.n1) * cfg.chip) * kr;
    }
    const double d = t.doppler / (2.0 * M_PI) * kd;
    const Index ir = wrap(static_cast<Index>(std::llround(r)), cfg.kr);
    const Index id = wrap(static_cast<Index>(std::llround(d)), cfg.kd);
    return id * cfg.kr + ir;
}

double peak_near(const VectorXcd& gamma, Index bin, Index kr, Index kd, Index radius) {
    require_size(gamma.size(), kr * kd, "peak_near");
    const Index r0 = bin % kr;
    const Index d0 = bin / kr;
    const Index dr = std::min(radius, kd > 1 ? radius : Index{0});
    double best = 0.0;
    for (Index dd = -dr; dd <= dr; ++dd) {
        for (Index rr = -radius; rr <= radius; ++rr) {
            best = std::max(best, std::abs(gamma(wrap(d0 + dd, kd) * kr + wrap(r0 + rr, kr))));
        }
    }
    return best;
}

TrialResult score_trial(const VectorXcd& estimates, const Scene& scene, const ScenarioConfig& cfg) {
    TrialResult r;
    r.estimates = estimates;
    for (const auto& t : scene.targets) {
        r.true_amplitudes.push_back(std::abs(t.amplitude));
        r.estimated_amplitudes.push_back(peak_near(estimates, nearest_bin(t, cfg), cfg.kr, cfg.kd));
    }
    return r;
}

double nmse(const std::vector<TrialResult>& trials) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& t : trials) {
        if (t.failed) continue;
        for (std::size_t i = 0; i < t.true_amplitudes.size(); ++i) {
            const double a = t.true_amplitudes[i];
            const double e = t.estimated_amplitudes[i] - a;
            sum += e * e / (a * a);
            ++count;
        }
    }
    if (count == 0) throw std::invalid_argument("nmse: no scored targets");
    return sum / static_cast<double>(count);
}

double sidelobe_power(const std::vector<TrialResult>& trials) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& t : trials) {
        if (t.failed) continue;
        double s = t.estimates.squaredNorm();
        for (double a : t.estimated_amplitudes) s -= a * a;
        sum += s;
        ++count;
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

VectorXcd onebit_periodogram(const Dictionary& dict, const SignedMeasurements& z, double h_max) {
    const double gain = 8.0 * h_max / 7.0;
    const VectorXcd corr = dict.adjoint_matvec(z.z);
    const VectorXd norms = dict.column_norms_sq();
    return (gain * corr.array() / norms.array().cast<Complex>()).matrix();
}

AlgorithmResult run_algorithm(const std::string& name, const Trial& trial, const Dictionary& dict,
                              const OneBitConfig& base) {
    AlgorithmResult out;
    if (name == "1bper") {
        out.amplitudes = onebit_periodogram(dict, trial.z, trial.h_max);
        out.beta = out.amplitudes;
        out.power = out.amplitudes.cwiseAbs2();
        out.iterations = 0;
        return out;
    }
    OneBitConfig cfg = base;
    cfg.variant = parse_onebit_variant(name);
    const OneBitState state = run(trial.z, dict, trial.threshold.values, cfg);
    out.amplitudes = state.amplitudes();
    out.beta = state.beta;
    out.power = state.p;
    out.eta = state.eta;
    out.iterations = state.iterations;
    out.converged = state.converged;
    out.objective_trace = state.objective_trace;
    return out;
}

Index support_size(const VectorXcd& beta, double rel) {
    const VectorXd mag2 = beta.cwiseAbs2();
    const double cut = rel * mag2.maxCoeff();
    return static_cast<Index>((mag2.array() > cut).count());
}

namespace {

// Strongest local maximum within [center - radius, center + radius], or -1.
Index local_peak(const VectorXd& m, Index center, Index radius) {
    const Index n = m.size();
    Index best = -1;
    for (Index d = -radius; d <= radius; ++d) {
        const Index i = wrap(center + d, n);
        const double v = m(i);
        if (v <= 0.0 || v < m(wrap(i - 1, n)) || v < m(wrap(i + 1, n))) continue;
        if (best < 0 || v > m(best)) best = i;
    }
    return best;
}

}  // namespace

bool resolves_pair(const VectorXd& magnitude, Index bin_a, Index bin_b, Index radius, double valley_db) {
    const Index a = local_peak(magnitude, bin_a, radius);
    const Index b = local_peak(magnitude, bin_b, radius);
    if (a < 0 || b < 0 || a == b) return false;
    const Index lo = std::min(a, b);
    const Index hi = std::max(a, b);
    const double valley = magnitude.segment(lo, hi - lo + 1).minCoeff();
    const double weaker = std::min(magnitude(a), magnitude(b));
    if (valley <= 0.0) return true;
    return 20.0 * std::log10(weaker / valley) >= valley_db;
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t snr_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(snr_index)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

BenchOutput monte_carlo(const BenchConfig& cfg) {
    if (cfg.seeds.empty()) throw ConfigError("bench needs at least one seed");
    if (cfg.algorithms.empty()) throw ConfigError("bench needs at least one algorithm");
    if (cfg.jobs < 1) throw ConfigError("jobs must be at least 1");
    for (const auto& a : cfg.algorithms) {
        if (a != "1bper") {
            OneBitConfig probe = cfg.estimator;
            probe.variant = parse_onebit_variant(a);
            probe.validate();
        }
    }
    cfg.scenario.validate();
    const Dictionary dict = make_dictionary(cfg.scenario);
    const std::size_t n_snr = cfg.snr_db.size();
    const std::size_t n_alg = cfg.algorithms.size();
    const std::size_t n_run = cfg.seeds.size();

    BenchOutput out;
    out.trials.assign(n_snr, std::vector<std::vector<TrialResult>>(n_alg, std::vector<TrialResult>(n_run)));

    auto work = [&](std::size_t task) {
        const std::size_t s = task / n_run;
        const std::size_t r = task % n_run;
        ScenarioConfig sc = cfg.scenario;
        sc.snr_db = cfg.snr_db[s];
        const std::uint64_t seed = trial_seed(cfg.seeds[r], s);
        const Trial trial = simulate_trial(sc, seed);
        for (std::size_t a = 0; a < n_alg; ++a) {
            TrialResult& slot = out.trials[s][a][r];
            const auto start = std::chrono::steady_clock::now();
            try {
                const AlgorithmResult res = run_algorithm(cfg.algorithms[a], trial, dict, cfg.estimator);
                slot = score_trial(res.amplitudes, trial.scene, sc);
                slot.iterations = res.iterations;
            } catch (const std::exception& e) {
                slot = TrialResult{};
                slot.failed = true;
                slot.error = e.what();
            }
            slot.seed = seed;
            slot.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
    };

    const std::size_t tasks = n_snr * n_run;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < tasks; t = next++) work(t);
    };
    const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), tasks);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }

    for (std::size_t s = 0; s < n_snr; ++s) {
        for (std::size_t a = 0; a < n_alg; ++a) {
            const auto& runs = out.trials[s][a];
            BenchRow row;
            row.algorithm = cfg.algorithms[a];
            row.snr_db = cfg.snr_db[s];
            double rt = 0.0;
            double it = 0.0;
            for (const auto& t : runs) {
                if (t.failed) {
                    ++row.n_failed;
                    continue;
                }
                ++row.n_runs;
                rt += t.runtime_s;
                it += t.iterations;
            }
            if (row.n_runs > 0) {
                const bool scored = std::any_of(runs.begin(), runs.end(),
                                                [](const TrialResult& t) { return !t.failed && !t.true_amplitudes.empty(); });
                row.nmse = scored ? nmse(runs) : std::numeric_limits<double>::quiet_NaN();
                row.sidelobe_power = sidelobe_power(runs);
                row.mean_runtime_s = rt / row.n_runs;
                row.mean_iters = it / row.n_runs;
            } else {
                row.nmse = row.sidelobe_power = std::numeric_limits<double>::quiet_NaN();
            }
            out.rows.push_back(row);
        }
    }
    return out;
}

void export_rd_image(const VectorXd& magnitude, Index kr, Index kd, const std::filesystem::path& stem) {
    require_size(magnitude.size(), kr * kd, "export_rd_image");
    constexpr double floor_db = -80.0;
    MatrixXd db(kd, kr);
    for (Index d = 0; d < kd; ++d) {
        for (Index r = 0; r < kr; ++r) {
            const double m = std::abs(magnitude(d * kr + r));
            db(d, r) = m > 0.0 ? std::max(floor_db, 20.0 * std::log10(m)) : floor_db;
        }
    }
    auto csv_path = stem;
    csv_path += ".csv";
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
    csv.precision(17);
    for (Index d = 0; d < kd; ++d) {
        for (Index r = 0; r < kr; ++r) csv << (r ? "," : "") << db(d, r);
        csv << '\n';
    }
    if (!csv) throw std::runtime_error("write failed: " + csv_path.string());

    const double top = db.maxCoeff();
    const double span = top - floor_db;
    auto pgm_path = stem;
    pgm_path += ".pgm";
    std::ofstream pgm(pgm_path, std::ios::binary);
    if (!pgm) throw std::runtime_error("cannot write " + pgm_path.string());
    pgm << "P5\n" << kr << ' ' << kd << "\n255\n";
    for (Index d = 0; d < kd; ++d) {
        for (Index r = 0; r < kr; ++r) {
            const double level = span > 0.0 ? (db(d, r) - floor_db) / span : 0.0;
            pgm.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * level))));
        }
    }
    if (!pgm) throw std::runtime_error("write failed: " + pgm_path.string());
}

MatrixXd load_rd_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size()) throw ConfigError("ragged CSV grid in " + path.string());
        rows.push_back(std::move(row));
    }
    MatrixXd out(static_cast<Index>(rows.size()), rows.empty() ? 0 : static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < out.rows(); ++i) {
        for (Index j = 0; j < out.cols(); ++j) out(i, j) = rows[i][j];
    }
    return out;
}

}  // namespace wspice
