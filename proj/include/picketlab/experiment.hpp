// experiment.hpp - reproducible experiment runner behind the CLI.
//
// An ExperimentConfig is a flat key=value store with a fixed key set; values
// stay strings until a typed getter parses them, so serialize(parse(text))
// echoes exactly what the getters will see and the config hash is stable.
// The hash is the git blob convention, sha1("blob <len>\0" + canonical text),
// so a config file can be fingerprinted with stock git tooling.
//
// Each cmd_* runs one experiment end to end and returns a ResultRecord: named
// columns, preformatted cells (doubles at 17 significant digits), ordered
// metadata, wall-clock duration.  Cells are formatted before any file IO, and
// trial work is distributed by map_blocks, so the numeric payload is
// byte-identical for any worker count.  Validation happens before any
// sampling or file creation; a failed run leaves no partial output.
//
// CSV layout: "# key=value" preamble (experiment id, config hash, metadata;
// never the duration), then the header row, then data rows.  write_record_csv
// adds a <path>.meta.json sidecar carrying the duration and library versions,
// which is why the CSV itself stays diff-able across reruns.

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "picketlab/ensemble.hpp"

namespace picketlab {

class ExperimentConfig {
public:
    ExperimentConfig() = default;

    // Parses flat key=value text.  Blank lines and lines starting with '#'
    // are skipped; keys outside the known set and duplicate keys are
    // rejected with std::invalid_argument.
    static ExperimentConfig parse(std::string_view text);
    static ExperimentConfig from_file(const std::string& path);

    // Canonical form: known-key order, one "key=value" per line, trailing
    // newline.  parse(serialize(*this)) reproduces *this exactly.
    std::string serialize() const;

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    // Typed getters; absent keys fall back to defaults, malformed or
    // out-of-range values raise std::invalid_argument naming the key.
    int n() const;                         // default 1
    std::vector<Entry> pattern() const;    // default "inf"
    long long T() const;                   // default 1000
    long long trials() const;              // default 8
    std::uint64_t seed() const;            // default 12345
    double c() const;                      // default 0.5
    double chat() const;                   // default 1.0
    int i_max() const;                     // default 5
    std::vector<long long> n_grid() const;  // default 100,1000,10000
    int nodes() const;                     // default 256
    std::string out() const;               // default "" (no file output)

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

private:
    std::map<std::string, std::string> entries_;
};

// sha1 over "blob <len>\0<content>", lowercase hex; matches `git hash-object`.
std::string git_blob_sha1(std::string_view content);

// Shortest round-trip decimal form, capped at 17 significant digits.
std::string format_g17(double x);

struct ResultRecord {
    std::string experiment_id;
    std::string config_hash;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;
    double duration_seconds = 0.0;
};

std::string record_to_csv(const ResultRecord& record);

// Writes the CSV to record-config `out` path (no-op when empty) plus the
// .meta.json sidecar.  Throws std::runtime_error when the file cannot be
// opened.
void write_record_csv(const ResultRecord& record, const std::string& path);

// Limit spectrum table: one row per i with lambda_i, normalized gap, epsilon
// bound; metadata carries n, pattern, c_n, alpha.
ResultRecord cmd_analytic(const ExperimentConfig& config);

// QR-sweep runs over `trials` independent chains.  Per-trial rows carry the
// shift-corrected estimates (2 log_scales_i + sum_tau s)/T - alpha, whose
// limit is lambda_i; aggregate rows add the cross-trial standard error, the
// analytic lambda_i, and the z-score of the discrepancy.  A single trial
// falls back to batch-means errors.
ResultRecord cmd_simulate(const ExperimentConfig& config);

// Shifted moment E[S_c] for the pattern cycled to length T by all three
// methods, with pairwise agreement verdicts (quadrature within 1e-8 of the
// residue value; Monte Carlo within 4 standard errors).
ResultRecord cmd_moments(const ExperimentConfig& config);

// Normalized-gap deviations along an ascending n-grid for i <= i_max, with
// the (i-1)^2/(n-i+1) envelope; rows with i above floor(sqrt(n)) are outside
// the window in which the envelope is meaningful and are flagged, not
// suppressed.  The frequency measure is built once from (n, pattern) and
// held fixed while the grid dimension varies, since the limit statement
// moves n with the gap measure pinned.
ResultRecord cmd_picketfence(const ExperimentConfig& config);

struct VerifyOptions {
    // Shrinks the determinant-identity tolerance to an unattainable value;
    // exists so the harness can prove a red property is reported as red.
    bool corrupt_tolerance = false;
    // Path of a previous output whose "# config_hash=" must match this
    // config; mismatch is a validation error.
    std::string against;
};

struct VerifyReport {
    ResultRecord record;
    bool all_passed = false;
};

// Property suite: determinant identity, series tails vs brute force, Laplace
// identity, three-way moment agreement, variance decay.  One row per
// property with the measured discrepancy and its tolerance.
VerifyReport cmd_verify(const ExperimentConfig& config, const VerifyOptions& options = {});

}  // namespace picketlab
