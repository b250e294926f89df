#include "wspice/io.hpp"

#include <bit>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace wspice::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << std::setprecision(17);
    return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return in;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, sep)) cells.push_back(cell);
    if (!line.empty() && line.back() == sep) cells.emplace_back();
    return cells;
}

double to_double(const std::string& s, const std::filesystem::path& path, std::size_t line) {
    // strtod rather than stod: stod rejects subnormals, which round-trip legitimately.
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    const bool trailing = s.find_first_not_of(" \t\r", static_cast<std::size_t>(end - begin)) != std::string::npos;
    if (end == begin || trailing || (errno == ERANGE && std::isinf(v))) {
        throw ConfigError(path.string() + ":" + std::to_string(line) + ": not a number: '" + s + "'");
    }
    return v;
}

bool is_binary(const std::filesystem::path& path) { return path.extension() == ".bin"; }

void put_le(std::ofstream& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_le(const unsigned char* bytes) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

}  // namespace

void write_scene(const Scene& scene, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "range,doppler,amp_re,amp_im,on_grid\n";
    for (const auto& t : scene.targets) {
        out << t.range << ',' << t.doppler << ',' << t.amplitude.real() << ',' << t.amplitude.imag() << ','
            << (t.on_grid ? 1 : 0) << '\n';
    }
    finish(out, path);
}

Scene read_scene(const std::filesystem::path& path) {
    auto in = open_in(path);
    Scene scene;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || line.rfind("range", 0) == 0) continue;
        const auto cells = split(line);
        if (cells.size() != 5) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected 5 fields");
        Target t;
        t.range = to_double(cells[0], path, lineno);
        t.doppler = to_double(cells[1], path, lineno);
        t.amplitude = {to_double(cells[2], path, lineno), to_double(cells[3], path, lineno)};
        t.on_grid = to_double(cells[4], path, lineno) != 0.0;
        scene.targets.push_back(t);
    }
    return scene;
}

void write_complex(const VectorXcd& v, const std::filesystem::path& path) {
    if (is_binary(path)) {
        auto out = open_out(path, true);
        for (Index i = 0; i < v.size(); ++i) {
            put_le(out, v(i).real());
            put_le(out, v(i).imag());
        }
        finish(out, path);
        return;
    }
    auto out = open_out(path);
    for (Index i = 0; i < v.size(); ++i) out << v(i).real() << ',' << v(i).imag() << '\n';
    finish(out, path);
}

VectorXcd read_complex(const std::filesystem::path& path) {
    if (is_binary(path)) {
        auto in = open_in(path, true);
        const std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        if (raw.size() % 16 != 0) throw ConfigError(path.string() + ": size is not a multiple of 16 bytes");
        VectorXcd v(static_cast<Index>(raw.size() / 16));
        const auto* bytes = reinterpret_cast<const unsigned char*>(raw.data());
        for (Index i = 0; i < v.size(); ++i) v(i) = {get_le(bytes + 16 * i), get_le(bytes + 16 * i + 8)};
        return v;
    }
    auto in = open_in(path);
    std::vector<Complex> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split(line);
        if (cells.size() != 2) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected re,im");
        values.emplace_back(to_double(cells[0], path, lineno), to_double(cells[1], path, lineno));
    }
    return Eigen::Map<const VectorXcd>(values.data(), static_cast<Index>(values.size()));
}

void write_estimate(const EstimateHeader& h, const VectorXcd& beta, const VectorXd& power,
                    const std::filesystem::path& path) {
    require_size(power.size(), beta.size(), "write_estimate");
    auto out = open_out(path);
    out << "# variant=" << h.variant << '\n'
        << "# n=" << h.n << '\n'
        << "# m=" << h.m << '\n'
        << "# epsilon=" << h.epsilon << '\n'
        << "# iterations=" << h.iterations << '\n'
        << "# converged=" << (h.converged ? 1 : 0) << '\n'
        << "# eta=" << h.eta << '\n'
        << "# scale_resolved=" << (h.eta > 0.0 ? 1 : 0) << '\n'
        << "k,beta_re,beta_im,power\n";
    for (Index k = 0; k < beta.size(); ++k) {
        out << k << ',' << beta(k).real() << ',' << beta(k).imag() << ',' << power(k) << '\n';
    }
    finish(out, path);
}

Estimate read_estimate(const std::filesystem::path& path) {
    auto in = open_in(path);
    Estimate est;
    std::vector<Complex> beta;
    std::vector<double> power;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.rfind("k,", 0) == 0) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(2, eq - 2);
            const std::string value = line.substr(eq + 1);
            if (key == "variant") est.header.variant = value;
            else if (key == "n") est.header.n = static_cast<Index>(to_double(value, path, lineno));
            else if (key == "m") est.header.m = static_cast<Index>(to_double(value, path, lineno));
            else if (key == "epsilon") est.header.epsilon = to_double(value, path, lineno);
            else if (key == "iterations") est.header.iterations = static_cast<int>(to_double(value, path, lineno));
            else if (key == "converged") est.header.converged = value == "1";
            else if (key == "eta") est.header.eta = to_double(value, path, lineno);
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != 4) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected 4 fields");
        beta.emplace_back(to_double(cells[1], path, lineno), to_double(cells[2], path, lineno));
        power.push_back(to_double(cells[3], path, lineno));
    }
    est.beta = Eigen::Map<const VectorXcd>(beta.data(), static_cast<Index>(beta.size()));
    est.power = Eigen::Map<const VectorXd>(power.data(), static_cast<Index>(power.size()));
    return est;
}

void write_trace(const OneBitState& state, const std::filesystem::path& path) {
    const auto& obj = state.objective_trace;
    const bool has_obj = obj.size() == state.change_trace.size() + 1;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto out = open_out(path);
    out << "# initial_objective=" << (has_obj ? obj.front() : nan) << '\n' << "iteration,objective,rel_change,eta\n";
    for (std::size_t i = 0; i < state.change_trace.size(); ++i) {
        out << i + 1 << ',' << (has_obj ? obj[i + 1] : nan) << ',' << state.change_trace[i] << ','
            << state.eta_trace[i] << '\n';
    }
    finish(out, path);
}

std::vector<TraceRow> read_trace(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<TraceRow> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || line.rfind("iteration", 0) == 0) continue;
        const auto cells = split(line);
        if (cells.size() != 4) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected 4 fields");
        rows.push_back({static_cast<int>(to_double(cells[0], path, lineno)), to_double(cells[1], path, lineno),
                        to_double(cells[2], path, lineno), to_double(cells[3], path, lineno)});
    }
    return rows;
}

void write_results(const std::vector<BenchRow>& rows, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "algorithm,snr_db,n_runs,nmse,sidelobe_power,mean_runtime_s,mean_iters\n";
    for (const auto& r : rows) {
        out << r.algorithm << ',' << r.snr_db << ',' << r.n_runs << ',' << r.nmse << ',' << r.sidelobe_power << ','
            << r.mean_runtime_s << ',' << r.mean_iters << '\n';
    }
    finish(out, path);
}

void write_trials(const BenchConfig& cfg, const BenchOutput& out_data, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "algorithm,snr_db,seed,failed,nmse,sidelobe_power,runtime_s,iterations,error\n";
    for (std::size_t s = 0; s < out_data.trials.size(); ++s) {
        for (std::size_t a = 0; a < out_data.trials[s].size(); ++a) {
            for (const auto& t : out_data.trials[s][a]) {
                out << cfg.algorithms[a] << ',' << cfg.snr_db[s] << ',' << t.seed << ',' << (t.failed ? 1 : 0) << ',';
                if (t.failed) {
                    std::string msg = t.error;
                    for (char& c : msg) {
                        if (c == ',' || c == '\n') c = ';';
                    }
                    out << ",,," << t.iterations << ',' << msg << '\n';
                } else {
                    out << (t.true_amplitudes.empty() ? std::numeric_limits<double>::quiet_NaN() : nmse({t})) << ',' << sidelobe_power({t}) << ',' << t.runtime_s << ',' << t.iterations
                        << ",\n";
                }
            }
        }
    }
    finish(out, path);
}

}  // namespace wspice::io
