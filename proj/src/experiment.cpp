#include "picketlab/experiment.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "json.hpp"
#include "picketlab/chain.hpp"
#include "picketlab/moments.hpp"
#include "picketlab/parallel.hpp"
#include "picketlab/sampler.hpp"
#include "picketlab/special_functions.hpp"
#include "picketlab/spectrum.hpp"

namespace picketlab {

namespace {

// Canonical key order for serialization; also the complete legal key set.
constexpr std::array<const char*, 11> kKnownKeys = {
    "n", "pattern", "T", "trials", "seed", "c", "chat", "i_max", "n_grid", "nodes", "out",
};

bool known_key(std::string_view key) {
    for (const char* k : kKnownKeys)
        if (key == k)
            return true;
    return false;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* requirement) {
    throw std::invalid_argument("config: key '" + key + "' " + requirement + " (got '" +
                                value + "')");
}

long long parse_integer(const std::string& key, const std::string& value) {
    long long out = 0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last)
        bad_value(key, value, "must be an integer");
    return out;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last)
        bad_value(key, value, "must be a nonnegative integer");
    return out;
}

double parse_real(const std::string& key, const std::string& value) {
    if (value.empty())
        bad_value(key, value, "must be a real number");
    char* end = nullptr;
    const double out = std::strtod(value.c_str(), &end);
    if (end != value.c_str() + value.size() || !std::isfinite(out))
        bad_value(key, value, "must be a finite real number");
    return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
    ExperimentConfig config;
    std::size_t line_start = 0;
    int line_no = 0;
    while (line_start <= text.size()) {
        const std::size_t nl = text.find('\n', line_start);
        const std::string_view raw =
            text.substr(line_start, nl == std::string_view::npos ? std::string_view::npos
                                                                 : nl - line_start);
        line_start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#')
            continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        " has no '='");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (!known_key(key))
            throw std::invalid_argument("config: unknown key '" + key + "' on line " +
                                        std::to_string(line_no));
        if (config.entries_.count(key) != 0)
            throw std::invalid_argument("config: duplicate key '" + key + "' on line " +
                                        std::to_string(line_no));
        config.entries_.emplace(key, value);
    }
    return config;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::invalid_argument("config: cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

std::string ExperimentConfig::serialize() const {
    std::string out;
    for (const char* key : kKnownKeys) {
        const auto it = entries_.find(key);
        if (it != entries_.end()) {
            out += key;
            out += '=';
            out += it->second;
            out += '\n';
        }
    }
    return out;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    if (!known_key(key))
        throw std::invalid_argument("config: unknown key '" + key + "'");
    entries_[key] = value;
}

bool ExperimentConfig::has(const std::string& key) const {
    return entries_.count(key) != 0;
}

int ExperimentConfig::n() const {
    const auto it = entries_.find("n");
    if (it == entries_.end())
        return 1;
    const long long value = parse_integer("n", it->second);
    if (value < 1 || value > 100000)
        bad_value("n", it->second, "must be in [1, 100000]");
    return static_cast<int>(value);
}

std::vector<Entry> ExperimentConfig::pattern() const {
    const auto it = entries_.find("pattern");
    return parse_pattern(it == entries_.end() ? "inf" : it->second);
}

long long ExperimentConfig::T() const {
    const auto it = entries_.find("T");
    if (it == entries_.end())
        return 1000;
    const long long value = parse_integer("T", it->second);
    if (value < 1)
        bad_value("T", it->second, "must be >= 1");
    return value;
}

long long ExperimentConfig::trials() const {
    const auto it = entries_.find("trials");
    if (it == entries_.end())
        return 8;
    const long long value = parse_integer("trials", it->second);
    if (value < 1)
        bad_value("trials", it->second, "must be >= 1");
    return value;
}

std::uint64_t ExperimentConfig::seed() const {
    const auto it = entries_.find("seed");
    return it == entries_.end() ? 12345ULL : parse_unsigned("seed", it->second);
}

double ExperimentConfig::c() const {
    const auto it = entries_.find("c");
    if (it == entries_.end())
        return 0.5;
    const double value = parse_real("c", it->second);
    if (!(value > 0.0))
        bad_value("c", it->second, "must be positive");
    return value;
}

double ExperimentConfig::chat() const {
    const auto it = entries_.find("chat");
    if (it == entries_.end())
        return 1.0;
    const double value = parse_real("chat", it->second);
    if (!(value > 0.0))
        bad_value("chat", it->second, "must be positive");
    return value;
}

int ExperimentConfig::i_max() const {
    const auto it = entries_.find("i_max");
    if (it == entries_.end())
        return 5;
    const long long value = parse_integer("i_max", it->second);
    if (value < 1 || value > 100000)
        bad_value("i_max", it->second, "must be in [1, 100000]");
    return static_cast<int>(value);
}

std::vector<long long> ExperimentConfig::n_grid() const {
    const auto it = entries_.find("n_grid");
    const std::string text = it == entries_.end() ? "100,1000,10000" : it->second;
    std::vector<long long> grid;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string piece(
            trim(std::string_view(text).substr(pos, comma == std::string::npos
                                                        ? std::string::npos
                                                        : comma - pos)));
        const long long value = parse_integer("n_grid", piece);
        if (value < 1)
            bad_value("n_grid", text, "entries must be >= 1");
        grid.push_back(value);
        if (comma == std::string::npos)
            break;
        pos = comma + 1;
    }
    return grid;
}

int ExperimentConfig::nodes() const {
    const auto it = entries_.find("nodes");
    if (it == entries_.end())
        return 256;
    const long long value = parse_integer("nodes", it->second);
    if (value < 8 || value > 16384)
        bad_value("nodes", it->second, "must be in [8, 16384]");
    return static_cast<int>(value);
}

std::string ExperimentConfig::out() const {
    const auto it = entries_.find("out");
    return it == entries_.end() ? std::string() : it->second;
}

namespace {

std::uint32_t rotl32(std::uint32_t x, int k) {
    return (x << k) | (x >> (32 - k));
}

std::string sha1_hex(const std::string& message) {
    std::uint32_t h[5] = {0x67452301u, 0xefcdab89u, 0x98badcfeu, 0x10325476u, 0xc3d2e1f0u};
    std::string padded = message;
    const std::uint64_t bit_length = static_cast<std::uint64_t>(message.size()) * 8u;
    padded.push_back(static_cast<char>(0x80));
    while (padded.size() % 64 != 56)
        padded.push_back('\0');
    for (int i = 7; i >= 0; --i)
        padded.push_back(static_cast<char>((bit_length >> (8 * i)) & 0xffu));

    for (std::size_t chunk = 0; chunk < padded.size(); chunk += 64) {
        std::uint32_t w[80];
        for (int t = 0; t < 16; ++t) {
            const auto byte = [&](int j) {
                return static_cast<std::uint32_t>(
                    static_cast<unsigned char>(padded[chunk + 4 * t + j]));
            };
            w[t] = (byte(0) << 24) | (byte(1) << 16) | (byte(2) << 8) | byte(3);
        }
        for (int t = 16; t < 80; ++t)
            w[t] = rotl32(w[t - 3] ^ w[t - 8] ^ w[t - 14] ^ w[t - 16], 1);
        std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
        for (int t = 0; t < 80; ++t) {
            std::uint32_t f, k;
            if (t < 20) {
                f = (b & c) | (~b & d);
                k = 0x5a827999u;
            } else if (t < 40) {
                f = b ^ c ^ d;
                k = 0x6ed9eba1u;
            } else if (t < 60) {
                f = (b & c) | (b & d) | (c & d);
                k = 0x8f1bbcdcu;
            } else {
                f = b ^ c ^ d;
                k = 0xca62c1d6u;
            }
            const std::uint32_t temp = rotl32(a, 5) + f + e + k + w[t];
            e = d;
            d = c;
            c = rotl32(b, 30);
            b = a;
            a = temp;
        }
        h[0] += a;
        h[1] += b;
        h[2] += c;
        h[3] += d;
        h[4] += e;
    }

    char hex[41];
    for (int i = 0; i < 5; ++i)
        std::snprintf(hex + 8 * i, 9, "%08x", h[i]);
    return std::string(hex, 40);
}

}  // namespace

std::string git_blob_sha1(std::string_view content) {
    std::string message = "blob " + std::to_string(content.size());
    message.push_back('\0');
    message.append(content);
    return sha1_hex(message);
}

std::string format_g17(double x) {
    char buffer[64];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buffer, sizeof buffer, "%.*g", precision, x);
        if (std::strtod(buffer, nullptr) == x)
            return buffer;
    }
    std::snprintf(buffer, sizeof buffer, "%.17g", x);
    return buffer;
}

std::string record_to_csv(const ResultRecord& record) {
    std::string out;
    out += "# experiment=" + record.experiment_id + "\n";
    out += "# config_hash=" + record.config_hash + "\n";
    for (const auto& [key, value] : record.metadata)
        out += "# " + key + "=" + value + "\n";
    for (std::size_t j = 0; j < record.columns.size(); ++j) {
        if (j != 0)
            out += ',';
        out += record.columns[j];
    }
    out += '\n';
    for (const auto& row : record.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j != 0)
                out += ',';
            out += row[j];
        }
        out += '\n';
    }
    return out;
}

void write_record_csv(const ResultRecord& record, const std::string& path) {
    if (path.empty())
        return;
    std::ofstream csv(path, std::ios::binary | std::ios::trunc);
    if (!csv)
        throw std::runtime_error("write_record_csv: cannot open '" + path + "'");
    csv << record_to_csv(record);
    csv.close();
    if (!csv)
        throw std::runtime_error("write_record_csv: write failed for '" + path + "'");

    nlohmann::json meta;
    meta["experiment"] = record.experiment_id;
    meta["config_hash"] = record.config_hash;
    meta["duration_seconds"] = record.duration_seconds;
    meta["columns"] = record.columns;
    nlohmann::json md = nlohmann::json::object();
    for (const auto& [key, value] : record.metadata)
        md[key] = value;
    meta["metadata"] = md;
    meta["versions"] = {
        {"picketlab", "1.0.0"},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                      std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
    };
    const std::string sidecar_path = path + ".meta.json";
    std::ofstream sidecar(sidecar_path, std::ios::binary | std::ios::trunc);
    if (!sidecar)
        throw std::runtime_error("write_record_csv: cannot open '" + sidecar_path + "'");
    sidecar << meta.dump(2) << '\n';
}

namespace {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

ResultRecord make_record(const ExperimentConfig& config, std::string experiment_id) {
    ResultRecord record;
    record.experiment_id = std::move(experiment_id);
    record.config_hash = git_blob_sha1(config.serialize());
    return record;
}

std::string bool_cell(bool value) {
    return value ? "true" : "false";
}

}  // namespace

ResultRecord cmd_analytic(const ExperimentConfig& config) {
    const Stopwatch watch;
    const int n = config.n();
    const EnsembleSequence seq(n, config.pattern());
    const FrequencyMeasure measure = seq.frequency_measure();
    const LyapunovSpectrum spectrum = limit_spectrum(measure, n);

    ResultRecord record = make_record(config, "analytic");
    record.metadata = {
        {"n", std::to_string(n)},
        {"pattern", format_pattern(seq.pattern())},
        {"c_n", format_g17(spectrum.c_n)},
        {"alpha", format_g17(alpha(measure, n))},
    };
    record.columns = {"i", "lambda_i", "normalized_gap_i", "epsilon_bound_i"};
    for (int i = 1; i <= n; ++i)
        record.rows.push_back({
            std::to_string(i),
            format_g17(spectrum.lambda[static_cast<std::size_t>(i - 1)]),
            format_g17(spectrum.normalized_gaps[static_cast<std::size_t>(i - 1)]),
            format_g17(spectrum.epsilon_bounds[static_cast<std::size_t>(i - 1)]),
        });
    record.duration_seconds = watch.seconds();
    return record;
}

namespace {

struct SimulatedTrial {
    long long trial = 0;
    std::vector<double> estimates;  // shift-corrected, sorted descending
    std::vector<double> stderrs;    // batch-means, same order
};

SimulatedTrial run_trial(const EnsembleSequence& seq, long long T, std::uint64_t seed,
                         long long trial, double alpha_value) {
    ChainState state = chain_init(seq.n());
    for (long long tau = 1; tau <= T; ++tau) {
        const Entry entry = seq.at(tau);
        Xoshiro256pp rng(trial_factor_stream(seed, static_cast<std::uint64_t>(trial),
                                             static_cast<std::uint64_t>(tau)));
        const ComplexMatrix X = sample_factor(entry, seq.n(), rng);
        chain_step(state, X, entry);
    }
    const LyapunovEstimate raw = lyapunov_estimate(state);
    SimulatedTrial result;
    result.trial = trial;
    result.stderrs = raw.stderrs;
    result.estimates.reserve(raw.values.size());
    // The raw rate (2/T) log_scales_i tends to lambda_i + alpha - (1/T) sum s;
    // adding the realized shift average and subtracting alpha recenters the
    // estimate on lambda_i itself.
    for (double value : raw.values)
        result.estimates.push_back(value + state.shift_sum / static_cast<double>(T) -
                                   alpha_value);
    return result;
}

}  // namespace

ResultRecord cmd_simulate(const ExperimentConfig& config) {
    const Stopwatch watch;
    const int n = config.n();
    const EnsembleSequence seq(n, config.pattern());
    const long long T = config.T();
    const long long trials = config.trials();
    const std::uint64_t seed = config.seed();
    const FrequencyMeasure measure = seq.frequency_measure();
    const std::vector<double> lambdas = lambda(measure, n);
    const double alpha_value = alpha(measure, n);

    const auto partials = map_blocks<std::vector<SimulatedTrial>>(
        trials, [&](BlockRange range) {
            std::vector<SimulatedTrial> block;
            block.reserve(static_cast<std::size_t>(range.end - range.begin));
            for (long long t = range.begin; t < range.end; ++t)
                block.push_back(run_trial(seq, T, seed, t + 1, alpha_value));
            return block;
        });

    std::vector<SimulatedTrial> results;
    results.reserve(static_cast<std::size_t>(trials));
    for (const auto& block : partials)
        results.insert(results.end(), block.begin(), block.end());

    ResultRecord record = make_record(config, "simulate");
    record.metadata = {
        {"n", std::to_string(n)},
        {"pattern", format_pattern(seq.pattern())},
        {"T", std::to_string(T)},
        {"trials", std::to_string(trials)},
        {"seed", std::to_string(seed)},
        {"alpha", format_g17(alpha_value)},
    };
    record.columns = {"kind", "trial", "i", "estimate", "stderr", "analytic_lambda", "z"};
    for (const SimulatedTrial& trial : results)
        for (int i = 1; i <= n; ++i)
            record.rows.push_back({
                "trial",
                std::to_string(trial.trial),
                std::to_string(i),
                format_g17(trial.estimates[static_cast<std::size_t>(i - 1)]),
                format_g17(trial.stderrs[static_cast<std::size_t>(i - 1)]),
                "",
                "",
            });
    for (int i = 1; i <= n; ++i) {
        double sum = 0.0;
        for (const SimulatedTrial& trial : results)
            sum += trial.estimates[static_cast<std::size_t>(i - 1)];
        const double mean = sum / static_cast<double>(trials);
        double se;
        if (trials >= 2) {
            double ss = 0.0;
            for (const SimulatedTrial& trial : results) {
                const double d = trial.estimates[static_cast<std::size_t>(i - 1)] - mean;
                ss += d * d;
            }
            se = std::sqrt(ss / (static_cast<double>(trials - 1) *
                                 static_cast<double>(trials)));
        } else {
            se = results.front().stderrs[static_cast<std::size_t>(i - 1)];
        }
        const double target = lambdas[static_cast<std::size_t>(i - 1)];
        const double z = se > 0.0 ? (mean - target) / se : 0.0;
        record.rows.push_back({
            "aggregate",
            "",
            std::to_string(i),
            format_g17(mean),
            format_g17(se),
            format_g17(target),
            format_g17(z),
        });
    }
    record.duration_seconds = watch.seconds();
    return record;
}

ResultRecord cmd_moments(const ExperimentConfig& config) {
    const Stopwatch watch;
    const int n = config.n();
    const EnsembleSequence seq(n, config.pattern());
    const long long T = config.T();
    if (T > 200)
        throw std::invalid_argument("cmd_moments: exact product path requires T <= 200");
    const long long trials = config.trials();
    const std::uint64_t seed = config.seed();

    MomentQuery query;
    query.n = n;
    query.prefix = seq.prefix(T);
    query.c = config.c();
    query.m = 1;
    query.shifted = true;

    const MomentResult residue = residue_moment_m1(query);
    const MomentResult quadrature = contour_moment(query, config.nodes());
    const MomentResult monte_carlo = mc_moment(query, trials, RngStream{seed, 0});

    const double quad_gap = std::abs(quadrature.value - residue.value);
    const bool quad_ok = quad_gap <= 1e-8;
    const double mc_gap = std::abs(monte_carlo.value - residue.value);
    const bool mc_ok = mc_gap <= 4.0 * monte_carlo.error_estimate;

    ResultRecord record = make_record(config, "moments");
    record.metadata = {
        {"n", std::to_string(n)},
        {"pattern", format_pattern(seq.pattern())},
        {"T", std::to_string(T)},
        {"c", format_g17(query.c)},
        {"trials", std::to_string(trials)},
        {"seed", std::to_string(seed)},
        {"shifted", "true"},
    };
    record.columns = {"method", "value", "error_estimate", "agrees_with_residue"};
    record.rows = {
        {"residue", format_g17(residue.value), format_g17(0.0), bool_cell(true)},
        {"quadrature", format_g17(quadrature.value), format_g17(quadrature.error_estimate),
         bool_cell(quad_ok)},
        {"monte_carlo", format_g17(monte_carlo.value),
         format_g17(monte_carlo.error_estimate), bool_cell(mc_ok)},
    };
    record.duration_seconds = watch.seconds();
    return record;
}

ResultRecord cmd_picketfence(const ExperimentConfig& config) {
    const Stopwatch watch;
    const int base_n = config.n();
    const EnsembleSequence seq(base_n, config.pattern());
    const FrequencyMeasure measure = seq.frequency_measure();
    const int i_max = config.i_max();
    const std::vector<long long> grid = config.n_grid();
    for (std::size_t j = 1; j < grid.size(); ++j)
        if (grid[j] <= grid[j - 1])
            throw std::invalid_argument("cmd_picketfence: n_grid must be strictly ascending");

    ResultRecord record = make_record(config, "picketfence");
    record.metadata = {
        {"pattern", format_pattern(seq.pattern())},
        {"measure", to_json(measure).dump()},
        {"i_max", std::to_string(i_max)},
    };
    record.columns = {"n", "i", "normalized_gap", "deviation", "epsilon_envelope",
                      "in_window"};
    for (long long grid_n : grid) {
        const int dim = static_cast<int>(std::min<long long>(grid_n, 100000));
        if (dim != grid_n)
            throw std::invalid_argument("cmd_picketfence: n_grid entry too large");
        const std::vector<double> gaps = normalized_gaps(measure, dim);
        const long long window = static_cast<long long>(std::sqrt(static_cast<double>(dim)));
        for (int i = 1; i <= std::min(i_max, dim); ++i) {
            const double gap = gaps[static_cast<std::size_t>(i - 1)];
            const double deviation = gap + static_cast<double>(i - 1);
            const double envelope = static_cast<double>(i - 1) * static_cast<double>(i - 1) /
                                    static_cast<double>(dim - i + 1);
            record.rows.push_back({
                std::to_string(grid_n),
                std::to_string(i),
                format_g17(gap),
                format_g17(deviation),
                format_g17(envelope),
                bool_cell(i <= window),
            });
        }
    }
    record.duration_seconds = watch.seconds();
    return record;
}

namespace {

struct PropertyRow {
    std::string name;
    double discrepancy = 0.0;
    double tolerance = 0.0;
    bool passed() const { return discrepancy <= tolerance; }
};

// Determinant identity over a fixed roster of small chains: the summed QR
// log-scales must reproduce sum_tau log|det X_tau| to rounding.
PropertyRow verify_determinant_identity(std::uint64_t seed, bool corrupt) {
    struct Case {
        int n;
        const char* pattern;
        long long T;
    };
    const Case cases[] = {
        {1, "inf", 500},
        {3, "inf,5,7", 300},
        {5, "6,inf", 200},
        {8, "inf", 120},
    };
    double worst = 0.0;
    std::uint64_t stream = 0;
    for (const Case& c : cases) {
        const EnsembleSequence seq(c.n, parse_pattern(c.pattern));
        for (int rep = 0; rep < 2; ++rep) {
            ++stream;
            ChainState state = chain_init(c.n);
            double det_sum = 0.0;
            for (long long tau = 1; tau <= c.T; ++tau) {
                const Entry entry = seq.at(tau);
                Xoshiro256pp rng(trial_factor_stream(seed, stream,
                                                     static_cast<std::uint64_t>(tau)));
                const ComplexMatrix X = sample_factor(entry, c.n, rng);
                det_sum += 2.0 * std::log(std::abs(X.determinant()));
                chain_step(state, X, entry);
            }
            const double qr_sum = 2.0 * state.log_scales.sum();
            worst = std::max(worst, std::abs(qr_sum - det_sum));
        }
    }
    return {"determinant_identity", worst, corrupt ? 1e-30 : 1e-6};
}

// Closed-form tails of alpha and lambda against raw partial sums to K = 1e6.
PropertyRow verify_tail_vs_brute(const std::vector<FrequencyMeasure>& measures) {
    constexpr long long K = 1000000;
    constexpr int n = 5;
    double worst = 0.0;
    for (const FrequencyMeasure& measure : measures) {
        double alpha_brute = 0.0;
        for (long long k = K; k >= 1; --k)
            alpha_brute += measure.tail_weight(k) *
                           (1.0 / static_cast<double>(k) +
                            std::log1p(-1.0 / static_cast<double>(k + n)));
        worst = std::max(worst, std::abs(alpha_brute - alpha(measure, n)));
        const std::vector<double> lambdas = lambda(measure, n);
        for (int i : {1, n}) {
            double lambda_brute = 0.0;
            for (long long k = K; k >= 1; --k)
                lambda_brute -= measure.tail_weight(k) *
                                (std::log1p(-1.0 / static_cast<double>(k + n)) +
                                 1.0 / static_cast<double>(k + n - i));
            worst = std::max(worst,
                             std::abs(lambda_brute - lambdas[static_cast<std::size_t>(i - 1)]));
        }
    }
    return {"tail_vs_brute_force", worst, 1e-5};
}

PropertyRow verify_laplace_identity(const std::vector<FrequencyMeasure>& measures) {
    double worst = 0.0;
    for (const FrequencyMeasure& measure : measures)
        for (int n = 1; n <= 20; ++n) {
            const std::vector<double> lambdas = lambda(measure, n);
            const double alpha_value = alpha(measure, n);
            for (int i = 1; i <= n; ++i)
                worst = std::max(
                    worst, std::abs(lambdas[static_cast<std::size_t>(i - 1)] + alpha_value -
                                    laplace_identity_value(measure, n, i)));
        }
    return {"laplace_identity", worst, 1e-9};
}

MomentQuery verify_moment_query() {
    MomentQuery query;
    query.n = 2;
    query.prefix = {Entry::infinity(), Entry::finite(5), Entry::infinity(), Entry::finite(5)};
    query.c = 0.3;
    query.m = 1;
    query.shifted = true;
    return query;
}

PropertyRow verify_moment_quadrature() {
    const MomentQuery query = verify_moment_query();
    const double residue = residue_moment_m1(query).value;
    const double quadrature = contour_moment(query, 64).value;
    return {"moment_residue_vs_quadrature", std::abs(quadrature - residue), 1e-8};
}

PropertyRow verify_moment_monte_carlo(std::uint64_t seed) {
    const MomentQuery query = verify_moment_query();
    const double residue = residue_moment_m1(query).value;
    const MomentResult mc = mc_moment(query, 20000, RngStream{seed, 0x4d43u});
    const double z = mc.error_estimate > 0.0
                         ? std::abs(mc.value - residue) / mc.error_estimate
                         : std::numeric_limits<double>::infinity();
    return {"moment_monte_carlo_z", z, 5.0};
}

PropertyRow verify_variance_decay() {
    const std::vector<Entry> pattern = {Entry::infinity()};
    const double v10 = variance_m2(1, pattern, 1.0, 10, 64).value;
    const double v100 = variance_m2(1, pattern, 1.0, 100, 64).value;
    const double v1000 = variance_m2(1, pattern, 1.0, 1000, 64).value;
    const double discrepancy = std::max(v100 - v10, v1000 - v100);
    return {"variance_decay", discrepancy, 0.0};
}

std::string read_config_hash_line(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::invalid_argument("cmd_verify: cannot open '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
        constexpr std::string_view prefix = "# config_hash=";
        if (line.rfind(prefix, 0) == 0)
            return line.substr(prefix.size());
    }
    throw std::invalid_argument("cmd_verify: no config_hash line in '" + path + "'");
}

}  // namespace

VerifyReport cmd_verify(const ExperimentConfig& config, const VerifyOptions& options) {
    const Stopwatch watch;
    const std::uint64_t seed = config.seed();
    if (!options.against.empty()) {
        const std::string recorded = read_config_hash_line(options.against);
        const std::string current = git_blob_sha1(config.serialize());
        if (recorded != current)
            throw std::invalid_argument("cmd_verify: config hash mismatch: '" + recorded +
                                        "' in '" + options.against + "' vs '" + current +
                                        "'");
    }

    const std::vector<FrequencyMeasure> measures = {
        FrequencyMeasure::ginibre_only(),
        FrequencyMeasure({{3, 0.5}}, 0.5),
        FrequencyMeasure({{1, 0.25}, {2, 0.25}}, 0.5),
    };

    std::vector<PropertyRow> properties;
    properties.push_back(verify_determinant_identity(seed, options.corrupt_tolerance));
    properties.push_back(verify_tail_vs_brute(measures));
    properties.push_back(verify_laplace_identity(measures));
    properties.push_back(verify_moment_quadrature());
    properties.push_back(verify_moment_monte_carlo(seed));
    properties.push_back(verify_variance_decay());

    VerifyReport report;
    report.record = make_record(config, "verify");
    report.record.metadata = {
        {"seed", std::to_string(seed)},
    };
    if (options.corrupt_tolerance)
        report.record.metadata.emplace_back("corrupt_tolerance", "true");
    report.record.columns = {"property", "passed", "discrepancy", "tolerance"};
    report.all_passed = true;
    for (const PropertyRow& row : properties) {
        report.all_passed = report.all_passed && row.passed();
        report.record.rows.push_back({
            row.name,
            bool_cell(row.passed()),
            format_g17(row.discrepancy),
            format_g17(row.tolerance),
        });
    }
    report.record.duration_seconds = watch.seconds();
    return report;
}

}  // namespace picketlab
