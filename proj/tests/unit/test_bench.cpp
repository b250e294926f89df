#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "support.hpp"
#include "wspice/bench.hpp"

using namespace wspice;
using namespace wspice::test;

namespace {

TrialResult scored(std::vector<double> truth, std::vector<double> est, VectorXcd spectrum = {}) {
    TrialResult t;
    t.true_amplitudes = std::move(truth);
    t.estimated_amplitudes = std::move(est);
    t.estimates = std::move(spectrum);
    return t;
}

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("wspice_bench_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

ScenarioConfig small_lfmcw() {
    ScenarioConfig sc;
    sc.n1 = 64;
    sc.kr = 320;
    return sc;
}

}  // namespace

TEST(Bench, NmseExamples) {
    EXPECT_EQ(nmse({scored({1.0, 0.5}, {1.0, 0.5})}), 0.0);
    EXPECT_NEAR(nmse({scored({1.0}, {0.9})}), 0.01, 1e-15);
    EXPECT_THROW(nmse({}), std::invalid_argument);

    std::mt19937_64 rng(90);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<TrialResult> trials;
    double sum = 0.0;
    for (int t = 0; t < 10; ++t) {
        std::vector<double> a(5);
        std::vector<double> e(5);
        for (int k = 0; k < 5; ++k) {
            a[k] = u(rng);
            e[k] = u(rng);
            sum += std::pow((e[k] - a[k]) / a[k], 2);
        }
        trials.push_back(scored(a, e));
    }
    EXPECT_NEAR(nmse(trials), sum / 50.0, 1e-14);

    trials.push_back(scored({1.0}, {100.0}));
    trials.back().failed = true;
    EXPECT_NEAR(nmse(trials), sum / 50.0, 1e-14);
}

TEST(Bench, SidelobeExamples) {
    VectorXcd sparse = VectorXcd::Zero(10);
    sparse(3) = 0.8;
    EXPECT_NEAR(sidelobe_power({scored({1.0}, {0.8}, sparse)}), 0.0, 1e-15);
    VectorXcd spur = sparse;
    spur(7) = Complex(0.0, 0.1);
    EXPECT_NEAR(sidelobe_power({scored({1.0}, {0.8}, spur)}), 0.01, 1e-15);

    std::mt19937_64 rng(91);
    std::vector<TrialResult> trials;
    double sum = 0.0;
    for (int t = 0; t < 6; ++t) {
        const VectorXcd g = random_complex(12, rng);
        const double a0 = std::abs(g(2));
        trials.push_back(scored({1.0}, {a0}, g));
        sum += g.squaredNorm() - a0 * a0;
    }
    EXPECT_NEAR(sidelobe_power(trials), sum / 6.0, 1e-12);
}

TEST(Bench, NearestBinAndPeak) {
    ScenarioConfig sc = small_lfmcw();
    EXPECT_EQ(nearest_bin(Target{2.0 * M_PI * 0.25, 0.0, 1.0, true}, sc), 80);
    EXPECT_EQ(nearest_bin(Target{2.0 * M_PI * 0.9999, 0.0, 1.0, true}, sc), 0);
    ScenarioConfig pm;
    pm.model = RadarModel::Pmcw;
    pm.n1 = 31;
    pm.n2 = 4;
    pm.kr = 124;
    pm.kd = 20;
    // Delay of 10.25 chips on a 4x grid is bin 41; Doppler 2 pi * 3/20 is bin 3.
    EXPECT_EQ(nearest_bin(Target{10.25, 2.0 * M_PI * 3.0 / 20.0, 1.0, true}, pm), 3 * 124 + 41);

    VectorXcd g = VectorXcd::Zero(124 * 20);
    g(4 * 124 + 42) = 0.7;
    g(19 * 124 + 0) = 0.9;
    EXPECT_DOUBLE_EQ(peak_near(g, 3 * 124 + 41, 124, 20), 0.7);
    EXPECT_DOUBLE_EQ(peak_near(g, 0 * 124 + 123, 124, 20), 0.9);  // wraps in both directions
    EXPECT_DOUBLE_EQ(peak_near(g, 3 * 124 + 44, 124, 20), 0.0);

    VectorXcd line = VectorXcd::Zero(10);
    line(9) = 0.5;
    EXPECT_DOUBLE_EQ(peak_near(line, 0, 10, 1), 0.5);
}

TEST(Bench, ReferenceSceneLayout) {
    std::mt19937_64 rng(92);
    const Scene s = lfmcw_reference_scene(1024, 5120, rng);
    ASSERT_EQ(s.targets.size(), 5u);
    const double amps[] = {1.0, 0.8, 0.8, 0.6, 0.4};
    for (int k = 0; k < 5; ++k) EXPECT_NEAR(std::abs(s.targets[k].amplitude), amps[k], 1e-15);
    EXPECT_NEAR(s.targets[2].range - s.targets[1].range, 2.0 * M_PI / 1024.0, 1e-15);
    EXPECT_NEAR(s.signal_power(), 1.0 + 0.64 + 0.64 + 0.36 + 0.16, 1e-12);
}

TEST(Bench, PmcwSceneLayout) {
    ScenarioConfig pm;
    pm.model = RadarModel::Pmcw;
    pm.n1 = 31;
    pm.n2 = 64;
    pm.kr = 124;
    pm.kd = 320;
    std::mt19937_64 rng(93);
    const Scene s = pmcw_random_scene(pm, rng);
    ASSERT_EQ(s.targets.size(), 30u);
    std::set<Index> bins;
    std::set<Index> on_grid_range;
    int offgrid = 0;
    for (const auto& t : s.targets) {
        const double a = std::abs(t.amplitude);
        EXPECT_GE(a, 0.1);
        EXPECT_LT(a, 1.0);
        bins.insert(nearest_bin(t, pm));
        const double rb = t.range / (31.0 / 124.0);
        const double db = t.doppler / (2.0 * M_PI / 320.0);
        if (t.on_grid) {
            EXPECT_NEAR(rb, std::round(rb), 1e-9);
            EXPECT_NEAR(db, std::round(db), 1e-9);
            on_grid_range.insert(std::llround(rb));
        } else {
            ++offgrid;
            EXPECT_NEAR(std::abs(rb - std::floor(rb) - 0.5), 0.0, 1e-9);
            EXPECT_NEAR(std::abs(db - std::floor(db) - 0.5), 0.0, 1e-9);
        }
    }
    EXPECT_EQ(bins.size(), 30u);
    EXPECT_EQ(on_grid_range.size(), 26u);
    EXPECT_EQ(offgrid, 4);
}

TEST(Bench, SimulateTrialIsDeterministic) {
    const ScenarioConfig sc = small_lfmcw();
    const Trial a = simulate_trial(sc, 5);
    const Trial b = simulate_trial(sc, 5);
    const Trial c = simulate_trial(sc, 6);
    EXPECT_EQ(a.y, b.y);
    EXPECT_EQ(a.z.z, b.z.z);
    EXPECT_NE(a.y, c.y);
    EXPECT_TRUE(a.z.valid());
    EXPECT_NEAR(a.noise_variance, a.scene.signal_power() / 100.0, 1e-12);
    EXPECT_NEAR(a.h_max, std::sqrt(a.scene.signal_power() + a.noise_variance) / 2.0, 1e-12);

    ScenarioConfig empty = sc;
    empty.scene = SceneKind::Empty;
    empty.empty_noise_power = 0.25;
    const Trial e = simulate_trial(empty, 1);
    EXPECT_TRUE(e.scene.targets.empty());
    EXPECT_DOUBLE_EQ(e.noise_variance, 0.25);
    EXPECT_NEAR(e.y.squaredNorm() / 64.0, 0.25, 0.1);
}

TEST(Bench, OnebitPeriodogramGain) {
    const auto d = Dictionary::fourier2d(16, 1, 32, 1);
    const SignedMeasurements z{VectorXcd::Constant(16, Complex(1.0, 1.0))};
    const VectorXcd spec = onebit_periodogram(d, z, 0.7);
    EXPECT_LT(std::abs(spec(0) - Complex(0.8, 0.8)), 1e-14);
}

TEST(Bench, SupportSize) {
    VectorXcd b = VectorXcd::Constant(6, 1e-5);
    b(2) = 1.0;
    b(4) = 0.5;
    EXPECT_EQ(support_size(b), 2);
    EXPECT_EQ(support_size(b, 1e-12), 6);
}

TEST(Bench, ResolvesPair) {
    // Truth bins five apart, as for two tones 1/N apart on a 5x grid.
    VectorXd two = VectorXd::Constant(40, 0.01);
    two.segment(10, 6) << 1.0, 0.6, 0.3, 0.3, 0.6, 0.9;
    EXPECT_TRUE(resolves_pair(two, 10, 15));
    two(9) = 1.2;  // peak moved one bin, still inside the window
    EXPECT_TRUE(resolves_pair(two, 10, 15));

    VectorXd merged = VectorXd::Constant(40, 0.01);
    merged.segment(10, 6) << 0.7, 0.8, 0.9, 1.0, 0.9, 0.8;
    EXPECT_FALSE(resolves_pair(merged, 10, 15));

    VectorXd shallow = VectorXd::Constant(40, 0.01);
    shallow.segment(10, 6) << 1.0, 0.85, 0.8, 0.8, 0.85, 0.9;  // valley 1 dB below the weaker peak
    EXPECT_FALSE(resolves_pair(shallow, 10, 15));

    VectorXd far = VectorXd::Constant(40, 0.01);
    far(10) = 1.0;
    far(25) = 1.0;
    EXPECT_FALSE(resolves_pair(far, 10, 15));
}

TEST(Bench, ExportImageExamples) {
    const auto dir = temp_dir("image");
    export_rd_image(VectorXd::Zero(12), 4, 3, dir / "zeros");
    const MatrixXd z = load_rd_csv(dir / "zeros.csv");
    ASSERT_EQ(z.rows(), 3);
    ASSERT_EQ(z.cols(), 4);
    EXPECT_TRUE((z.array() == -80.0).all());

    VectorXd peak = VectorXd::Zero(12);
    peak(6) = 1.0;  // kd = 1, kr = 2
    export_rd_image(peak, 4, 3, dir / "peak");
    const MatrixXd p = load_rd_csv(dir / "peak.csv");
    EXPECT_EQ(p(1, 2), 0.0);
    EXPECT_EQ((p.array() == 0.0).count(), 1);

    std::mt19937_64 rng(94);
    const VectorXd mag = random_positive(12, rng, 1e-3, 3.0);
    export_rd_image(mag, 4, 3, dir / "random");
    const MatrixXd r = load_rd_csv(dir / "random.csv");
    for (Index k = 0; k < 12; ++k) EXPECT_NEAR(r(k / 4, k % 4), 20.0 * std::log10(mag(k)), 1e-12);

    std::ifstream pgm(dir / "random.pgm", std::ios::binary);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    pgm >> magic >> w >> h >> maxval;
    EXPECT_EQ(magic, "P5");
    EXPECT_EQ(w, 4);
    EXPECT_EQ(h, 3);
    EXPECT_EQ(maxval, 255);
    pgm.get();
    std::string pixels((std::istreambuf_iterator<char>(pgm)), {});
    EXPECT_EQ(pixels.size(), 12u);

    EXPECT_THROW(export_rd_image(VectorXd::Zero(11), 4, 3, dir / "bad"), DimensionError);
}

TEST(Bench, MonteCarloDeterministicAcrossJobCounts) {
    BenchConfig cfg;
    cfg.scenario = small_lfmcw();
    cfg.algorithms = {"1bper", "1bslim", "1biaa"};
    cfg.snr_db = {10.0, 30.0};
    cfg.seeds = {11, 12, 13};
    cfg.estimator.max_iter = 20;
    const auto a = monte_carlo(cfg);
    cfg.jobs = 3;
    const auto b = monte_carlo(cfg);
    ASSERT_EQ(a.rows.size(), 6u);
    ASSERT_EQ(b.rows.size(), 6u);
    for (size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].algorithm, b.rows[i].algorithm);
        EXPECT_EQ(a.rows[i].snr_db, b.rows[i].snr_db);
        EXPECT_EQ(a.rows[i].n_runs, 3);
        EXPECT_EQ(a.rows[i].nmse, b.rows[i].nmse);
        EXPECT_EQ(a.rows[i].sidelobe_power, b.rows[i].sidelobe_power);
        EXPECT_EQ(a.rows[i].mean_iters, b.rows[i].mean_iters);
        EXPECT_GE(a.rows[i].mean_runtime_s, 0.0);
    }
}

TEST(Bench, SingleRunReproducesDirectRun) {
    BenchConfig cfg;
    cfg.scenario = small_lfmcw();
    cfg.algorithms = {"1bslim"};
    cfg.snr_db = {20.0};
    cfg.seeds = {77};
    cfg.estimator.max_iter = 30;
    const auto out = monte_carlo(cfg);

    ScenarioConfig sc = cfg.scenario;
    sc.snr_db = 20.0;
    const Trial trial = simulate_trial(sc, trial_seed(77, 0));
    const auto dict = make_dictionary(sc);
    OneBitConfig est = cfg.estimator;
    est.variant = OneBitVariant::Slim;
    const auto direct = run(trial.z, dict, trial.threshold.values, est);
    const auto& got = out.trials[0][0][0];
    EXPECT_EQ(got.estimates, direct.amplitudes());
    EXPECT_EQ(got.iterations, direct.iterations);
    EXPECT_EQ(out.rows[0].nmse, nmse({score_trial(direct.amplitudes(), trial.scene, sc)}));
}

TEST(Bench, MonteCarloRequiresSeeds) {
    BenchConfig cfg;
    cfg.scenario = small_lfmcw();
    EXPECT_THROW(monte_carlo(cfg), ConfigError);
}

TEST(Bench, TrialSeedsDifferPerSnr) {
    EXPECT_NE(trial_seed(1, 0), trial_seed(1, 1));
    EXPECT_NE(trial_seed(1, 0), trial_seed(2, 0));
    EXPECT_EQ(trial_seed(9, 2), trial_seed(9, 2));
}
