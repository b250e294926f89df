#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wspice/onebit.hpp"
#include "wspice/quantizer.hpp"
#include "wspice/waveforms.hpp"

namespace wspice {

enum class RadarModel { Lfmcw, Pmcw };

RadarModel parse_radar_model(std::string_view name);
std::string_view to_string(RadarModel model);

/// Reference: the five-sinusoid scene (LFMCW) or random targets (PMCW).
enum class SceneKind { Reference, Empty };

SceneKind parse_scene_kind(std::string_view name);
std::string_view to_string(SceneKind kind);

/// Everything needed to regenerate one simulated measurement set.
struct ScenarioConfig {
    RadarModel model = RadarModel::Lfmcw;
    SceneKind scene = SceneKind::Reference;
    Index n1 = 1024;
    Index n2 = 1;
    Index kr = 5120;
    Index kd = 1;
    double snr_db = 20.0;
    ThresholdScheme threshold = ThresholdScheme::PerSample;
    /// Received power used for h_max; <= 0 means the true signal-plus-noise power.
    double power_estimate = 0.0;
    /// Noise variance used when the scene carries no signal power, where SNR is undefined.
    double empty_noise_power = 1.0;
    // PMCW only.
    int mls_order = 5;
    std::uint32_t mls_taps = 0x25;
    int n_targets = 30;
    int n_offgrid = 4;
    double chip = 1.0;

    void validate() const;
};

/// The five-sinusoid scene (amplitudes 1, .8, .8, .6, .4, the middle two one
/// Rayleigh cell apart) with random phases.
Scene lfmcw_reference_scene(Index n, Index grid, std::mt19937_64& rng);

/// `count` targets on distinct range and Doppler bins with amplitudes in
/// [0.1, 1); the first `offgrid` are moved half a bin in both directions.
Scene pmcw_random_scene(const ScenarioConfig& cfg, std::mt19937_64& rng);

Dictionary make_dictionary(const ScenarioConfig& cfg);
VectorXd make_code(const ScenarioConfig& cfg);

struct Trial {
    Scene scene;
    VectorXcd y;
    double noise_variance = 0.0;
    double h_max = 0.0;
    Threshold threshold;
    SignedMeasurements z;
};

/// Scene, noise and threshold all drawn from one generator seeded with `seed`.
Trial simulate_trial(const ScenarioConfig& cfg, std::uint64_t seed);

/// Grid column nearest to a target (kr fastest).
Index nearest_bin(const Target& t, const ScenarioConfig& cfg);

/// Largest |gamma| within +/-1 bin of `bin` in both grid directions, wrapping.
double peak_near(const VectorXcd& gamma, Index bin, Index kr, Index kd, Index radius = 1);

/// One estimator output scored against its scene.
struct TrialResult {
    VectorXcd estimates;
    std::vector<double> true_amplitudes;
    std::vector<double> estimated_amplitudes;
    std::uint64_t seed = 0;
    double runtime_s = 0.0;
    int iterations = 0;
    bool failed = false;
    std::string error;
};

TrialResult score_trial(const VectorXcd& estimates, const Scene& scene, const ScenarioConfig& cfg);

/// Mean of |alpha_hat - alpha|^2 / alpha^2 over all targets of all trials.
double nmse(const std::vector<TrialResult>& trials);
/// Mean over trials of ||gamma_hat||^2 - sum alpha_hat^2.
double sidelobe_power(const std::vector<TrialResult>& trials);

/// Amplitude spectrum of the one-bit periodogram surrogate,
/// gain * |b_k^H z| / ||b_k||^2 with gain = 8 h_max / 7.
VectorXcd onebit_periodogram(const Dictionary& dict, const SignedMeasurements& z, double h_max);

/// Algorithm names accepted by the harness: 1bper, 1bspice, 1blikes, 1bslim, 1biaa.
struct AlgorithmResult {
    VectorXcd amplitudes;
    VectorXcd beta;
    VectorXd power;
    double eta = 0.0;
    int iterations = 0;
    bool converged = true;
    std::vector<double> objective_trace;
};

AlgorithmResult run_algorithm(const std::string& name, const Trial& trial, const Dictionary& dict,
                              const OneBitConfig& base);

/// Count of |beta_k|^2 above rel * max |beta|^2.
Index support_size(const VectorXcd& beta, double rel = 1e-6);

/// True when |spectrum| has two distinct local maxima, one within `radius`
/// bins of each of bin_a and bin_b, and the deepest point between them is at
/// least valley_db below the weaker of the two.
bool resolves_pair(const VectorXd& magnitude, Index bin_a, Index bin_b, Index radius = 2, double valley_db = 3.0);

struct BenchConfig {
    ScenarioConfig scenario;
    std::vector<std::string> algorithms{"1bper", "1bspice", "1blikes", "1bslim", "1biaa"};
    std::vector<double> snr_db{10.0, 20.0, 30.0};
    std::vector<std::uint64_t> seeds;
    OneBitConfig estimator;
    int jobs = 1;
};

struct BenchRow {
    std::string algorithm;
    double snr_db = 0.0;
    int n_runs = 0;
    int n_failed = 0;
    double nmse = 0.0;
    double sidelobe_power = 0.0;
    double mean_runtime_s = 0.0;
    double mean_iters = 0.0;
};

struct BenchOutput {
    std::vector<BenchRow> rows;
    /// trials[snr][algorithm][run], in configuration order.
    std::vector<std::vector<std::vector<TrialResult>>> trials;
};

/// Runs every (SNR, seed) trial once and every algorithm on it. Trials run on
/// `jobs` threads; results are placed by index so the table does not depend on
/// the job count. A failing estimator marks its trial instead of aborting.
BenchOutput monte_carlo(const BenchConfig& cfg);

/// Seed for the trial of the given SNR index and run.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t snr_index);

/// Writes `<stem>.csv` (Kd rows of Kr dB values, floored at -80) and `<stem>.pgm`.
void export_rd_image(const VectorXd& magnitude, Index kr, Index kd, const std::filesystem::path& stem);

/// Reads the CSV written by export_rd_image back as Kd x Kr dB values.
MatrixXd load_rd_csv(const std::filesystem::path& path);

}  // namespace wspice
