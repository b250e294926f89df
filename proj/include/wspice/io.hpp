#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wspice/bench.hpp"
#include "wspice/onebit.hpp"

namespace wspice::io {

/// Scene table: a `range,doppler,amp_re,amp_im,on_grid` header, then one target per line.
void write_scene(const Scene& scene, const std::filesystem::path& path);
Scene read_scene(const std::filesystem::path& path);

/// Complex vectors are stored either as CSV (`re,im` per line, 17 significant
/// digits) or as raw binary: interleaved re/im IEEE-754 float64 in little-endian
/// byte order, no header. The format follows the extension (.bin is binary,
/// anything else CSV).
void write_complex(const VectorXcd& v, const std::filesystem::path& path);
VectorXcd read_complex(const std::filesystem::path& path);

/// Estimator output: `# key=value` header lines (variant, n, m, epsilon,
/// iterations, converged, eta, scale_resolved), then `k,beta_re,beta_im,power`.
struct EstimateHeader {
    std::string variant;
    Index n = 0;
    Index m = 0;
    double epsilon = 0.0;
    int iterations = 0;
    bool converged = false;
    double eta = 0.0;
};

void write_estimate(const EstimateHeader& header, const VectorXcd& beta, const VectorXd& power,
                    const std::filesystem::path& path);

struct Estimate {
    EstimateHeader header;
    VectorXcd beta;
    VectorXd power;
};

Estimate read_estimate(const std::filesystem::path& path);

/// One row per completed iteration: `iteration,objective,rel_change,eta`, where
/// objective is evaluated after that iteration (nan when not recorded). The
/// objective of the starting point goes in a `# initial_objective=` line.
struct TraceRow {
    int iteration = 0;
    double objective = 0.0;
    double rel_change = 0.0;
    double eta = 0.0;
};

void write_trace(const OneBitState& state, const std::filesystem::path& path);
std::vector<TraceRow> read_trace(const std::filesystem::path& path);

/// algorithm,snr_db,n_runs,nmse,sidelobe_power,mean_runtime_s,mean_iters
void write_results(const std::vector<BenchRow>& rows, const std::filesystem::path& path);

/// Per-trial detail: algorithm,snr_db,seed,failed,nmse,sidelobe_power,runtime_s,iterations,error
void write_trials(const BenchConfig& cfg, const BenchOutput& out, const std::filesystem::path& path);

}  // namespace wspice::io
