#include "ffrank/coreops.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace ffrank {

namespace {

CoreResult peel_impl(const TannerGraph& g, Rng* scramble) {
    const std::size_t n = g.n_vars;
    const std::size_t m = g.num_checks();

    std::vector<std::vector<std::uint32_t>> var_edges(n), check_edges(m);
    for (std::uint32_t e = 0; e < g.edges.size(); ++e) {
        var_edges[g.edges[e].second].push_back(e);
        check_edges[g.edges[e].first].push_back(e);
    }

    std::vector<std::uint32_t> var_deg(n);
    for (std::size_t v = 0; v < n; ++v) var_deg[v] = static_cast<std::uint32_t>(var_edges[v].size());
    std::vector<bool> var_alive(n, true), check_alive(m, true), edge_alive(g.edges.size(), true);
    std::vector<std::uint32_t> round(n, 0);
    std::vector<bool> queued(n, false);

    std::vector<std::uint32_t> pending;
    for (std::uint32_t v = 0; v < n; ++v) {
        if (var_deg[v] <= 1) {
            pending.push_back(v);
            queued[v] = true;
            round[v] = 1;
        }
    }

    std::uint32_t max_round = 0;
    std::size_t head = 0;
    while (head < pending.size()) {
        std::uint32_t x;
        if (scramble) {
            const std::size_t pick =
                head + static_cast<std::size_t>(bounded_uniform(*scramble, pending.size() - head));
            std::swap(pending[head], pending[pick]);
        }
        x = pending[head++];
        var_alive[x] = false;
        max_round = std::max(max_round, round[x]);

        // Locate the at-most-one live edge of x; removing x takes the
        // adjacent check (if any) and all of that check's edges with it.
        std::uint32_t live_edge = static_cast<std::uint32_t>(g.edges.size());
        for (std::uint32_t e : var_edges[x])
            if (edge_alive[e]) {
                live_edge = e;
                break;
            }
        if (live_edge == g.edges.size()) continue;

        const std::uint32_t a = g.edges[live_edge].first;
        check_alive[a] = false;
        for (std::uint32_t e : check_edges[a]) {
            if (!edge_alive[e]) continue;
            edge_alive[e] = false;
            const std::uint32_t u = g.edges[e].second;
            if (!var_alive[u]) continue;
            --var_deg[u];
            if (var_deg[u] <= 1 && !queued[u]) {
                queued[u] = true;
                round[u] = round[x] + 1;
                pending.push_back(u);
            }
        }
    }

    CoreResult res;
    for (std::uint32_t v = 0; v < n; ++v)
        if (var_alive[v]) res.core_vars.push_back(v);
    for (std::uint32_t c = 0; c < m; ++c)
        if (check_alive[c]) res.core_checks.push_back(c);
    res.n_star = res.core_vars.size();
    res.m_star = res.core_checks.size();
    res.peel_rounds = max_round;
    return res;
}

} // namespace

CoreResult peel(const TannerGraph& g) { return peel_impl(g, nullptr); }

CoreResult peel_scrambled(const TannerGraph& g, Rng& rng) { return peel_impl(g, &rng); }

CoreCountsMc core_counts_mc(const EnsembleSpec& ens, std::size_t n, std::size_t trials,
                            std::uint64_t seed) {
    if (trials < 1) throw DomainError("need trials >= 1");
    EnsembleSpec local = ens;
    local.n = n;
    double sv = 0.0, svv = 0.0, sc = 0.0, scc = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const Instance inst = sample_instance(local, InstanceSeed{seed ^ splitmix64(t)});
        const CoreResult core = peel(inst.graph);
        const double fv = static_cast<double>(core.n_star) / static_cast<double>(n);
        const double fc = static_cast<double>(core.m_star) / static_cast<double>(n);
        sv += fv;
        svv += fv * fv;
        sc += fc;
        scc += fc * fc;
    }
    const double tn = static_cast<double>(trials);
    CoreCountsMc out;
    out.trials = trials;
    out.var_fraction_mean = sv / tn;
    out.check_fraction_mean = sc / tn;
    const double vv = std::max(0.0, svv / tn - out.var_fraction_mean * out.var_fraction_mean);
    const double vc = std::max(0.0, scc / tn - out.check_fraction_mean * out.check_fraction_mean);
    out.var_fraction_stderr = std::sqrt(vv / tn);
    out.check_fraction_stderr = std::sqrt(vc / tn);
    return out;
}

CoreRankBoundResult core_rank_bound(const TannerGraph& g, const SparseMatrix& m,
                                    std::size_t precomputed_nullity) {
    const CoreResult core = peel(g);
    const auto n = static_cast<std::int64_t>(g.n_vars);
    // All-zero rows are no constraints; exclude them from both counts.
    const auto m_eff = static_cast<std::int64_t>(m.nonzero_rows());
    std::int64_t m_star_eff = 0;
    for (std::uint32_t c : core.core_checks) m_star_eff += !m.row(c).empty();

    CoreRankBoundResult res;
    res.bound = n - static_cast<std::int64_t>(core.n_star) - (m_eff - m_star_eff);
    res.nullity = precomputed_nullity;
    const auto nul = static_cast<std::int64_t>(res.nullity);
    res.tight = (nul == res.bound) || (nul == n - m_eff && res.bound < n - m_eff);
    return res;
}

CoreRankBoundResult core_rank_bound(const TannerGraph& g, const SparseMatrix& m) {
    return core_rank_bound(g, m, nullity(m));
}

bool kernel_zero_on_core(const KernelBasis& basis, const std::vector<std::uint32_t>& core_vars) {
    for (const auto& v : basis.vectors)
        for (std::uint32_t c : core_vars)
            if (v[c].repr != 0) return false;
    return true;
}

bool kernel_zero_on_core(const SparseMatrix& m, const std::vector<std::uint32_t>& core_vars) {
    return kernel_zero_on_core(kernel_basis(m), core_vars);
}

} // namespace ffrank
