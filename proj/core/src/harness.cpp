#include "ffrank/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ffrank/coreops.hpp"
#include "ffrank/linalg.hpp"

namespace ffrank {

const char* const kTrialCsvHeader =
    "trial,seed,m,rank,nullity,n_star,m_star,bound,bound_tight,kernel_zero_on_core,wall_ms";

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    try {
        cfg.q = j.at("q").get<std::uint32_t>();
        cfg.ddist = j.at("ddist").get<std::string>();
        cfg.kdist = j.at("kdist").get<std::string>();
        cfg.n = j.at("n").get<std::size_t>();
        cfg.trials = j.at("trials").get<std::size_t>();
        cfg.seed = j.value("seed", std::uint64_t{0});
        cfg.chi = j.value("chi", std::string("uniform"));
        cfg.mode = j.value("mode", std::string("simple"));
        cfg.tolerance = j.value("tolerance", 0.02);
        cfg.csv_path = j.value("csv", std::string());
        cfg.json_path = j.value("json", std::string());
        if (j.contains("checks")) {
            cfg.checks.clear();
            for (const auto& c : j.at("checks")) cfg.checks.insert(c.get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config field: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (n == 0) throw ConfigError("n must be positive");
    static const std::set<std::string> known = {"rank", "core", "bound", "kernel-on-core"};
    for (const auto& c : checks)
        if (!known.count(c)) throw ConfigError("unknown check '" + c + "'");
}

EnsembleSpec ExperimentConfig::make_ensemble() const {
    std::ostringstream spec;
    spec << "q=" << q << ";d=" << ddist << ";k=" << kdist << ";chi=" << chi
         << ";mode=" << mode << ";n=" << n;
    return parse_ensemble(spec.str());
}

namespace {

std::size_t worker_count(std::size_t trials) {
    std::size_t cap = std::thread::hardware_concurrency();
    if (cap == 0) cap = 1;
    if (const char* env = std::getenv("FFRANK_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) cap = static_cast<std::size_t>(v);
    }
    return std::min(cap, std::max<std::size_t>(trials, 1));
}

TrialRecord run_trial(const EnsembleSpec& ens, const ExperimentConfig& cfg, std::size_t index) {
    const auto t0 = std::chrono::steady_clock::now();
    TrialRecord rec;
    rec.trial = index;
    rec.seed = cfg.seed ^ splitmix64(index);

    const Instance inst = sample_instance(ens, InstanceSeed{rec.seed});
    rec.m = inst.matrix.rows();

    const bool want_kernel = cfg.checks.count("kernel-on-core") != 0;
    const bool want_bound = cfg.checks.count("bound") != 0;
    const bool want_rank = cfg.checks.count("rank") != 0 || want_bound || want_kernel;
    const bool want_core = cfg.checks.count("core") != 0 || want_bound || want_kernel;

    std::optional<KernelBasis> basis;
    if (want_kernel) {
        basis = kernel_basis(inst.matrix);
        rec.nullity = basis->nullity();
        rec.rank = inst.matrix.cols() - basis->nullity();
    } else if (want_rank) {
        rec.rank = rank(inst.matrix);
        rec.nullity = inst.matrix.cols() - *rec.rank;
    }

    std::optional<CoreResult> core;
    if (want_core) {
        core = peel(inst.graph);
        rec.n_star = core->n_star;
        rec.m_star = core->m_star;
    }
    if (want_bound) {
        const auto b = core_rank_bound(inst.graph, inst.matrix, *rec.nullity);
        rec.bound = b.bound;
        rec.bound_tight = b.tight;
        if (static_cast<std::int64_t>(*rec.nullity) < b.bound)
            throw Error("invariant violated: nullity below the combinatorial bound");
    }
    if (want_kernel) rec.kernel_zero_on_core = kernel_zero_on_core(*basis, core->core_vars);
    if (rec.rank && rec.nullity && *rec.rank + *rec.nullity != inst.matrix.cols())
        throw Error("invariant violated: rank + nullity != n");

    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    return rec;
}

template <class T>
void csv_cell(std::ostream& out, const std::optional<T>& v) {
    out << ',';
    if (v) out << *v;
}

} // namespace

void write_trial_csv(const ExperimentSummary& summary, std::ostream& out) {
    out << kTrialCsvHeader << '\n';
    for (const auto& r : summary.records) {
        out << r.trial << ',' << r.seed << ',' << r.m;
        csv_cell(out, r.rank);
        csv_cell(out, r.nullity);
        csv_cell(out, r.n_star);
        csv_cell(out, r.m_star);
        csv_cell(out, r.bound);
        out << ',';
        if (r.bound_tight) out << (*r.bound_tight ? 1 : 0);
        out << ',';
        if (r.kernel_zero_on_core) out << (*r.kernel_zero_on_core ? 1 : 0);
        out << ',' << r.wall_ms << '\n';
    }
}

std::string summary_to_json(const ExperimentConfig& cfg, const ExperimentSummary& s) {
    nlohmann::json j;
    j["q"] = cfg.q;
    j["ddist"] = cfg.ddist;
    j["kdist"] = cfg.kdist;
    j["n"] = cfg.n;
    j["trials_requested"] = s.trials_requested;
    j["trials_completed"] = s.trials_completed;
    j["mean_rank_over_n"] = s.mean_rank_over_n;
    j["std_error"] = s.std_error;
    j["analytic_rank_limit"] = s.analytic_rank_limit;
    j["analytic_core_var_fraction"] = s.analytic_core_var_fraction;
    j["analytic_core_check_fraction"] = s.analytic_core_check_fraction;
    j["tolerance"] = s.tolerance;
    j["pass"] = s.pass;
    if (!s.failures.empty()) j["failures"] = s.failures;
    return j.dump(2);
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const EnsembleSpec ens = cfg.make_ensemble();
    ens.validate_for_sampling();

    ExperimentSummary summary;
    summary.trials_requested = cfg.trials;
    summary.tolerance = cfg.tolerance;

    const AnalyticReport rep = analyze(ens);
    summary.analytic_rank_limit = rep.rank_limit;
    summary.analytic_core_var_fraction = rep.core_var_fraction;
    summary.analytic_core_check_fraction = rep.core_check_fraction;

    std::vector<std::optional<TrialRecord>> slots(cfg.trials);
    std::vector<std::string> failures(cfg.trials);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> budget_hit{false};

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfg.trials) return;
            try {
                slots[i] = run_trial(ens, cfg, i);
            } catch (const RejectionBudgetExhausted& e) {
                failures[i] = e.what();
                budget_hit.store(true);
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };
    const std::size_t nworkers = worker_count(cfg.trials);
    std::vector<std::thread> pool;
    pool.reserve(nworkers);
    for (std::size_t w = 0; w < nworkers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    double sum = 0.0, sumsq = 0.0;
    std::size_t completed = 0, with_rank = 0;
    for (std::size_t i = 0; i < cfg.trials; ++i) {
        if (slots[i]) {
            summary.records.push_back(*slots[i]);
            ++completed;
            if (slots[i]->rank) {
                const double r = static_cast<double>(*slots[i]->rank) /
                                 static_cast<double>(cfg.n);
                sum += r;
                sumsq += r * r;
                ++with_rank;
            }
        } else {
            summary.failures.push_back("trial " + std::to_string(i) + ": " + failures[i]);
        }
    }
    summary.trials_completed = completed;
    summary.budget_exhausted = budget_hit.load();
    if (with_rank > 0) {
        summary.mean_rank_over_n = sum / static_cast<double>(with_rank);
        const double var = std::max(
            0.0, sumsq / static_cast<double>(with_rank) -
                     summary.mean_rank_over_n * summary.mean_rank_over_n);
        summary.std_error = std::sqrt(var / static_cast<double>(with_rank));
        summary.pass = summary.failures.empty() &&
                       std::abs(summary.mean_rank_over_n - summary.analytic_rank_limit) <=
                           cfg.tolerance;
    } else {
        summary.pass = summary.failures.empty();
    }

    if (!cfg.csv_path.empty()) {
        std::ofstream out(cfg.csv_path);
        if (!out) throw ConfigError("cannot write csv to '" + cfg.csv_path + "'");
        write_trial_csv(summary, out);
    }
    if (!cfg.json_path.empty()) {
        std::ofstream out(cfg.json_path);
        if (!out) throw ConfigError("cannot write json to '" + cfg.json_path + "'");
        out << summary_to_json(cfg, summary) << '\n';
    }
    return summary;
}

void emit_curve(const EnsembleSpec& ens, std::size_t grid_points, std::ostream& out) {
    if (grid_points < 2) throw DomainError("curve needs at least 2 grid points");
    out << "alpha,phi,phi_small\n";
    out.precision(15);
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double a = static_cast<double>(i) / static_cast<double>(grid_points - 1);
        out << a << ',' << phi(ens, a) << ',' << phi_small(ens, a) << '\n';
    }
}

void emit_curve_file(const EnsembleSpec& ens, std::size_t grid_points, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write curve to '" + path + "'");
    emit_curve(ens, grid_points, out);
}

EnsembleSpec mixed_3_15_ensemble() {
    return parse_ensemble("q=2;d=explicit:3=0.8,15=0.2;k=explicit:3=0.8,15=0.2");
}

EnsembleSpec heavy_3_200_ensemble() {
    std::ostringstream spec;
    spec.precision(17);
    spec << "q=2;d=explicit:3=" << (190.0 / 197.0) << ",200=" << (7.0 / 197.0) << ";k=point:10";
    return parse_ensemble(spec.str());
}

EnsembleSpec regular_3_3_ensemble() { return parse_ensemble("q=2;d=point:3;k=point:3"); }

namespace {

void push_check(std::vector<VerifyCheck>& out, const std::string& name, bool pass,
                std::string detail) {
    out.push_back({name, pass, std::move(detail)});
}

// Largest point where phi_small strictly changes sign (a zero-touch at an
// endpoint is not a crossing), bisected to 1e-12.
double largest_interior_crossing(const EnsembleSpec& ens) {
    constexpr int kPoints = 4097;
    double prev_x = 1.0;
    double prev_f = phi_small(ens, 1.0);
    for (int i = kPoints - 2; i >= 0; --i) {
        const double x = static_cast<double>(i) / (kPoints - 1);
        const double f = phi_small(ens, x);
        if (f * prev_f < 0.0) {
            double lo = x, hi = prev_x, flo = f;
            while (hi - lo > 1e-12) {
                const double mid = 0.5 * (lo + hi);
                const double fm = phi_small(ens, mid);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            return 0.5 * (lo + hi);
        }
        prev_x = x;
        prev_f = f;
    }
    return 0.0;
}

// Single contiguous positive bump: the indicator {phi > eps} flips exactly
// twice along the grid.
bool single_positive_bump(const EnsembleSpec& ens, std::size_t points) {
    int flips = 0;
    bool prev = false;
    for (std::size_t i = 0; i < points; ++i) {
        const double a = static_cast<double>(i) / static_cast<double>(points - 1);
        const bool pos = phi(ens, a) > 1e-9;
        if (pos != prev) ++flips;
        prev = pos;
    }
    return flips == 2 && !prev;
}

void analytic_example_checks(std::vector<VerifyCheck>& out, const std::string& tag,
                             const EnsembleSpec& ens) {
    const double r = rho(ens);
    push_check(out, tag + ".rho=1", std::abs(r - 1.0) <= 1e-9, "rho=" + std::to_string(r));
    const double p0 = phi(ens, 0.0), p1 = phi(ens, 1.0);
    push_check(out, tag + ".phi(0)=0", std::abs(p0) <= 1e-12, "phi(0)=" + std::to_string(p0));
    push_check(out, tag + ".phi(rho)=0", std::abs(p1) <= 1e-12, "phi(1)=" + std::to_string(p1));
    const MaxPhi mp = max_phi(ens);
    push_check(out, tag + ".interior-max",
               mp.value > 1e-4 && mp.alpha_star > 0.0 && mp.alpha_star < 1.0,
               "max phi=" + std::to_string(mp.value) +
                   " at alpha=" + std::to_string(mp.alpha_star));
    push_check(out, tag + ".single-bump", single_positive_bump(ens, 1001), "");
}

} // namespace

std::vector<VerifyCheck> verify_reference_cases(bool include_empirical) {
    std::vector<VerifyCheck> out;

    analytic_example_checks(out, "mixed_3_15", mixed_3_15_ensemble());
    analytic_example_checks(out, "heavy_3_200", heavy_3_200_ensemble());

    {
        // 3,3-regular constants. phi_small touches zero at alpha=1 (so rho()
        // is 1 and the survival recursion is stationary there); the largest
        // strict crossing of phi_small is the golden ratio and pins down the
        // sign-change bisection machinery exactly.
        const EnsembleSpec ens = regular_3_3_ensemble();
        const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
        push_check(out, "regular_3_3.rho=1", std::abs(rho(ens) - 1.0) <= 1e-9,
                   "rho=" + std::to_string(rho(ens)));
        const double crossing = largest_interior_crossing(ens);
        push_check(out, "regular_3_3.phi-crossing", std::abs(crossing - golden) <= 1e-7,
                   "crossing=" + std::to_string(crossing));
        const double expected = 3.0 * golden * golden - golden * golden * golden - 1.0;
        const double pc = phi(ens, crossing);
        push_check(out, "regular_3_3.phi-at-crossing", std::abs(pc - expected) <= 1e-6,
                   "phi=" + std::to_string(pc));
    }

    if (include_empirical) {
        // The kernel is expected to contain vectors that do not vanish on the
        // 2-core, i.e. the combinatorial bound is not attained.
        EnsembleSpec ens = mixed_3_15_ensemble();
        ens.n = 1200;
        ens.mode = GraphMode::Multigraph; // simple matchings are astronomically rare here
        std::size_t nonvanishing = 0;
        const std::size_t trials = 6;
        for (std::size_t t = 0; t < trials; ++t) {
            const Instance inst = sample_instance(ens, InstanceSeed{0x5eedULL ^ splitmix64(t)});
            const KernelBasis basis = kernel_basis(inst.matrix);
            const CoreResult core = peel(inst.graph);
            if (!kernel_zero_on_core(basis, core.core_vars)) ++nonvanishing;
        }
        push_check(out, "mixed_3_15.kernel-not-zero-on-core", nonvanishing * 2 > trials,
                   std::to_string(nonvanishing) + "/" + std::to_string(trials) + " trials");
    }
    return out;
}

} // namespace ffrank
