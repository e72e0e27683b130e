#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "ffrank/analytic.hpp"
#include "ffrank/coreops.hpp"
#include "ffrank/harness.hpp"

using namespace ffrank;

namespace {

TannerGraph make_graph(std::size_t n_vars, std::size_t n_checks,
                       std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
    TannerGraph g;
    g.n_vars = n_vars;
    g.check_degrees.assign(n_checks, 0);
    for (const auto& [c, v] : edges) ++g.check_degrees[c];
    g.edges = std::move(edges);
    g.recompute_var_degrees();
    return g;
}

TannerGraph induced_subgraph(const TannerGraph& g, const CoreResult& core) {
    // relabel core vars/checks densely and keep edges inside the core
    std::vector<std::uint32_t> vmap(g.n_vars, UINT32_MAX), cmap(g.num_checks(), UINT32_MAX);
    for (std::uint32_t i = 0; i < core.core_vars.size(); ++i) vmap[core.core_vars[i]] = i;
    for (std::uint32_t i = 0; i < core.core_checks.size(); ++i) cmap[core.core_checks[i]] = i;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const auto& [c, v] : g.edges)
        if (cmap[c] != UINT32_MAX && vmap[v] != UINT32_MAX)
            edges.emplace_back(cmap[c], vmap[v]);
    return make_graph(core.n_star, core.m_star, std::move(edges));
}

} // namespace

TEST_CASE("peeling toy graphs") {
    // path: x0 - a(x0,x1) - x1 - b(x1,x2) - x2 cascades from the endpoints
    const auto path = make_graph(3, 2, {{0, 0}, {0, 1}, {1, 1}, {1, 2}});
    const CoreResult path_core = peel(path);
    CHECK(path_core.n_star == 0);
    CHECK(path_core.m_star == 0);
    CHECK(path_core.peel_rounds >= 1);

    // cycle: three degree-2 variables survive whole
    const auto cycle = make_graph(3, 3, {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 0}});
    const CoreResult cycle_core = peel(cycle);
    CHECK(cycle_core.n_star == 3);
    CHECK(cycle_core.m_star == 3);
    CHECK(cycle_core.peel_rounds == 0);

    // all variables degree 1: everything peels in round one
    EnsembleSpec ens = parse_ensemble("q=2;d=point:1;k=point:3");
    ens.n = 30;
    const Instance inst = sample_instance(ens, {5});
    const CoreResult c = peel(inst.graph);
    CHECK(c.n_star == 0);
    CHECK(c.peel_rounds <= 2); // leaves in round 1, freed stubs right after
}

TEST_CASE("multigraph degree convention: a double edge does not peel") {
    // x0 doubly attached to a, x1 and x2 singly: removing x1 (degree 1) takes
    // the check; a double edge alone keeps x0 at degree 2 until then.
    const auto g = make_graph(2, 1, {{0, 0}, {0, 0}, {0, 1}});
    const CoreResult core = peel(g);
    // x1 has degree 1 -> peels, removing the check -> x0 drops to 0 -> peels
    CHECK(core.n_star == 0);

    // a single check whose only variable is doubly attached: stable core
    const auto h = make_graph(1, 1, {{0, 0}, {0, 0}});
    const CoreResult hcore = peel(h);
    CHECK(hcore.n_star == 1);
    CHECK(hcore.m_star == 1);
}

TEST_CASE("peeling is confluent and idempotent") {
    EnsembleSpec ens = parse_ensemble("q=2;d=tpoisson:ell=1,lambda=3.5;k=point:3");
    ens.n = 402;
    for (std::uint64_t s = 0; s < 3; ++s) {
        const Instance inst = sample_instance(ens, {s});
        const CoreResult ref = peel(inst.graph);
        Rng rng(2000 + s);
        for (int shuffle = 0; shuffle < 20; ++shuffle) {
            const CoreResult alt = peel_scrambled(inst.graph, rng);
            CHECK(alt.core_vars == ref.core_vars);
            CHECK(alt.core_checks == ref.core_checks);
        }

        // min degree in the core is >= 2 and re-peeling is the identity
        const TannerGraph sub = induced_subgraph(inst.graph, ref);
        for (auto d : sub.var_degrees) CHECK(d >= 2);
        const CoreResult again = peel(sub);
        CHECK(again.n_star == ref.n_star);
        CHECK(again.m_star == ref.m_star);
        CHECK(again.peel_rounds == 0);
    }
}

TEST_CASE("core bound invariants on sampled instances") {
    const std::vector<std::string> specs = {
        "q=2;d=tpoisson:ell=1,lambda=3.5;k=point:3",
        "q=2;d=tpoisson:ell=1,lambda=2.0;k=point:3",
        "q=3;d=point:3;k=point:3",
        "q=4;d=explicit:1=0.3,4=0.7;k=point:4",
    };
    for (const auto& spec : specs) {
        for (GraphMode mode : {GraphMode::Simple, GraphMode::Multigraph}) {
            EnsembleSpec ens = parse_ensemble(spec);
            ens.n = 120;
            ens.mode = mode;
            for (std::uint64_t s = 0; s < 5; ++s) {
                const Instance inst = sample_instance(ens, {s});
                const auto res = core_rank_bound(inst.graph, inst.matrix);
                CHECK(static_cast<std::int64_t>(res.nullity) >= res.bound);
                CHECK(res.nullity == nullity(inst.matrix));
            }
        }
    }
}

TEST_CASE("bound tightness classification") {
    // empty-core instance with full row rank: bound = n - m and tight
    EnsembleSpec ens = parse_ensemble("q=2;d=tpoisson:ell=1,lambda=1.2;k=point:3");
    ens.n = 90;
    std::size_t tight_hits = 0, checked = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const Instance inst = sample_instance(ens, {s});
        const CoreResult core = peel(inst.graph);
        if (core.n_star != 0) continue;
        ++checked;
        const auto res = core_rank_bound(inst.graph, inst.matrix);
        const auto n = static_cast<std::int64_t>(inst.graph.n_vars);
        const auto m_eff = static_cast<std::int64_t>(inst.matrix.nonzero_rows());
        CHECK(res.bound == n - m_eff);
        if (res.tight) ++tight_hits;
    }
    CHECK(checked > 0);
    CHECK(tight_hits == checked); // subcritical instances are full row rank whp
}

TEST_CASE("kernel vectors vanishing on the core pin the nullity") {
    // kernel_zero_on_core(M, core) iff appending a unit row per core variable
    // leaves the nullity unchanged
    Rng seed_rng(1);
    EnsembleSpec ens = parse_ensemble("q=2;d=tpoisson:ell=1,lambda=3.5;k=point:3");
    ens.n = 102;
    for (std::uint64_t s = 0; s < 6; ++s) {
        const Instance inst = sample_instance(ens, {s});
        const CoreResult core = peel(inst.graph);
        const KernelBasis basis = kernel_basis(inst.matrix);
        const bool zero_on_core = kernel_zero_on_core(basis, core.core_vars);

        std::vector<std::tuple<std::uint32_t, std::uint32_t, FieldElement>> t;
        for (std::uint32_t r = 0; r < inst.matrix.rows(); ++r)
            for (const auto& e : inst.matrix.row(r)) t.emplace_back(r, e.col, e.value);
        std::uint32_t next_row = static_cast<std::uint32_t>(inst.matrix.rows());
        for (std::uint32_t v : core.core_vars)
            t.emplace_back(next_row++, v, inst.matrix.field().one());
        const SparseMatrix pinned = SparseMatrix::from_triplets(
            inst.matrix.field(), next_row, inst.matrix.cols(), t);
        CHECK(zero_on_core == (nullity(pinned) == basis.nullity()));
    }

    // trivial cases
    const auto empty = make_graph(2, 1, {{0, 0}, {0, 1}});
    Rng rng(1);
    CHECK(kernel_zero_on_core(matrix_from_graph(empty, Field(2), ChiSpec::fixed({1}), rng), {}));
}

TEST_CASE("core counts match the analytic fractions at moderate size") {
    EnsembleSpec ens = parse_ensemble("q=2;d=tpoisson:ell=1,lambda=3.5;k=point:3");
    const auto [nv, mv] = core_fractions(ens);
    const CoreCountsMc mc = core_counts_mc(ens, 4002, 6, 99);
    CHECK(std::abs(mc.var_fraction_mean - nv) < 0.02);
    CHECK(std::abs(mc.check_fraction_mean - mv) < 0.02);

    // subcritical law: core vanishes
    EnsembleSpec sub = parse_ensemble("q=2;d=tpoisson:ell=1,mean=2.0;k=point:3");
    const CoreCountsMc mcsub = core_counts_mc(sub, 2001, 10, 7);
    CHECK(mcsub.var_fraction_mean < 0.01);
    CHECK(mcsub.check_fraction_mean < 0.01);
}

TEST_CASE("reference mixed ensemble: bound is typically not attained") {
    EnsembleSpec ens = mixed_3_15_ensemble();
    ens.n = 900;
    ens.mode = GraphMode::Multigraph;
    std::size_t not_tight = 0;
    const std::size_t trials = 5;
    for (std::uint64_t s = 0; s < trials; ++s) {
        const Instance inst = sample_instance(ens, {s});
        const auto res = core_rank_bound(inst.graph, inst.matrix);
        if (!res.tight) ++not_tight;
    }
    CHECK(not_tight * 2 > trials);
}
