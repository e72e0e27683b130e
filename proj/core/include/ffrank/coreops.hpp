#pragma once

#include <cstdint>
#include <vector>

#include "ffrank/ensemble.hpp"
#include "ffrank/linalg.hpp"

namespace ffrank {

/// 2-core of a Tanner graph: what remains after iteratively removing every
/// variable of degree <= 1 together with its adjacent check (if any).
struct CoreResult {
    std::vector<std::uint32_t> core_vars;   // sorted
    std::vector<std::uint32_t> core_checks; // sorted
    std::size_t n_star = 0;
    std::size_t m_star = 0;
    /// Rounds of the equivalent parallel stripping process (each removal is
    /// tagged 1 + the round of the removal that triggered it).
    std::uint32_t peel_rounds = 0;
};

/// Queue-driven peeling, one variable at a time. In a multigraph a variable
/// held by a double edge has degree 2 and does not peel; degrees are purely
/// graph-theoretic, cancellation effects live only in the matrix.
CoreResult peel(const TannerGraph& g);

/// Same core, randomized processing order (peeling is confluent; used to test
/// exactly that).
CoreResult peel_scrambled(const TannerGraph& g, Rng& rng);

struct CoreCountsMc {
    double var_fraction_mean = 0.0;
    double var_fraction_stderr = 0.0;
    double check_fraction_mean = 0.0;
    double check_fraction_stderr = 0.0;
    std::size_t trials = 0;
};

/// Samples instances at size n and aggregates n*/n and m*/n for comparison
/// against core_fractions().
CoreCountsMc core_counts_mc(const EnsembleSpec& ens, std::size_t n, std::size_t trials,
                            std::uint64_t seed);

struct CoreRankBoundResult {
    std::int64_t bound = 0;    // n - n* - (m - m*), a lower bound on the nullity
    std::size_t nullity = 0;   // exact
    bool tight = false;        // nullity equals the combinatorial bound
};

/// Combinatorial nullity bound from the 2-core. Rows that cancelled to all
/// zero (possible in multigraph mode) constrain nothing, so m and m* count
/// rows with at least one surviving entry; in simple mode that is every row.
CoreRankBoundResult core_rank_bound(const TannerGraph& g, const SparseMatrix& m);
CoreRankBoundResult core_rank_bound(const TannerGraph& g, const SparseMatrix& m,
                                    std::size_t precomputed_nullity);

/// True iff every kernel basis vector vanishes on all core variables.
bool kernel_zero_on_core(const KernelBasis& basis, const std::vector<std::uint32_t>& core_vars);
bool kernel_zero_on_core(const SparseMatrix& m, const std::vector<std::uint32_t>& core_vars);

} // namespace ffrank
