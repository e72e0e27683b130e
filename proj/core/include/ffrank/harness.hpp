#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ffrank/analytic.hpp"
#include "ffrank/ensemble.hpp"

namespace ffrank {

/// Experiment description, loadable from a JSON file mirroring these fields.
struct ExperimentConfig {
    std::uint32_t q = 2;
    std::string ddist;
    std::string kdist;
    std::string chi = "uniform";
    std::string mode = "simple";
    std::size_t n = 0;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    /// Subset of {"rank", "core", "bound", "kernel-on-core"}.
    std::set<std::string> checks = {"rank", "core", "bound", "kernel-on-core"};
    double tolerance = 0.02; // |mean rank/n - analytic| acceptance threshold
    std::string csv_path;
    std::string json_path;

    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    EnsembleSpec make_ensemble() const;
    void validate() const;
};

struct TrialRecord {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::size_t m = 0;
    std::optional<std::size_t> rank;
    std::optional<std::size_t> nullity;
    std::optional<std::size_t> n_star;
    std::optional<std::size_t> m_star;
    std::optional<std::int64_t> bound;
    std::optional<bool> bound_tight;
    std::optional<bool> kernel_zero_on_core;
    double wall_ms = 0.0;
};

struct ExperimentSummary {
    std::size_t trials_requested = 0;
    std::size_t trials_completed = 0;
    double mean_rank_over_n = 0.0;
    double std_error = 0.0;
    double analytic_rank_limit = 0.0;
    double analytic_core_var_fraction = 0.0;
    double analytic_core_check_fraction = 0.0;
    double tolerance = 0.02;
    bool pass = false;
    std::vector<TrialRecord> records;
    std::vector<std::string> failures; // per-trial failure reasons, if any
    bool budget_exhausted = false;
};

/// csv header, bit-exact:
/// trial,seed,m,rank,nullity,n_star,m_star,bound,bound_tight,kernel_zero_on_core,wall_ms
extern const char* const kTrialCsvHeader;

/// Runs the configured trials with per-trial split seeds over a bounded
/// worker pool (capped by the FFRANK_THREADS environment variable). Results
/// are ordered by trial index regardless of completion order and, wall-clock
/// column aside, are byte-identical for identical config and seed. Writes the
/// per-trial CSV and the JSON summary when paths are configured; partial
/// results are flushed even when trials fail.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

void write_trial_csv(const ExperimentSummary& summary, std::ostream& out);
std::string summary_to_json(const ExperimentConfig& cfg, const ExperimentSummary& summary);

/// CSV with header "alpha,phi,phi_small" on a uniform grid over [0,1].
void emit_curve(const EnsembleSpec& ens, std::size_t grid_points, std::ostream& out);
void emit_curve_file(const EnsembleSpec& ens, std::size_t grid_points, const std::string& path);

struct VerifyCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Assertion battery over the built-in reference ensembles: the mixed
/// 3/15-degree case, the heavy-tailed 3/200 case with 10-regular checks, and
/// the 3,3-regular constants. include_empirical additionally samples
/// instances to confirm that the combinatorial rank bound is not attained.
std::vector<VerifyCheck> verify_reference_cases(bool include_empirical = true);

/// Reference ensembles used by the battery (q = 2).
EnsembleSpec mixed_3_15_ensemble();
EnsembleSpec heavy_3_200_ensemble();
EnsembleSpec regular_3_3_ensemble();

} // namespace ffrank
