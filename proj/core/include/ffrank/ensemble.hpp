#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ffrank/degrees.hpp"
#include "ffrank/gf.hpp"
#include "ffrank/rng.hpp"

namespace ffrank {

/// Distribution of the nonzero matrix entries: uniform on F_q \ {0} or a
/// fixed nonzero element.
struct ChiSpec {
    enum class Kind { Uniform, Fixed };
    Kind kind = Kind::Uniform;
    FieldElement fixed_value{1};

    static ChiSpec uniform() { return {}; }
    static ChiSpec fixed(FieldElement v) { return {Kind::Fixed, v}; }

    template <class G>
    FieldElement draw(const Field& f, G& rng) const {
        return kind == Kind::Uniform ? f.uniform_nonzero(rng) : fixed_value;
    }
};

enum class GraphMode { Simple, Multigraph, ExactDegrees };

/// The random matrix ensemble: GF(q), variable-degree law d, check-degree
/// law k, entry distribution chi, number of variables n and graph mode.
/// n = 0 is allowed for purely analytic use.
struct EnsembleSpec {
    Field field;
    DegreeDistribution ddist;
    DegreeDistribution kdist;
    ChiSpec chi = ChiSpec::uniform();
    std::size_t n = 0;
    GraphMode mode = GraphMode::Simple;

    /// Checks the degree-role constraints: check degrees >= 3, variable
    /// degrees >= 1, chi supported on nonzero elements.
    void validate_roles() const;
    /// validate_roles plus the divisibility constraint on n.
    void validate_for_sampling() const;
};

/// Parses "q=2;d=point:3;k=point:3[;chi=uniform|fixed:<repr>][;mode=...]".
EnsembleSpec parse_ensemble(std::string_view text);

/// Bipartite variable/check multigraph underlying a sampled matrix.
struct TannerGraph {
    std::size_t n_vars = 0;
    std::vector<std::uint32_t> check_degrees;
    /// (check, var) pairs; repeats allowed in multigraph mode. Edge order is
    /// check-major and deterministic for a given seed.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    /// Actual variable degrees, derived from the edge list.
    std::vector<std::uint32_t> var_degrees;

    std::size_t num_checks() const { return check_degrees.size(); }
    void recompute_var_degrees();
};

struct MatrixEntry {
    std::uint32_t col = 0;
    FieldElement value{};
};

/// Sparse row-major matrix over GF(q). Rows hold strictly increasing column
/// indices and only nonzero values.
class SparseMatrix {
public:
    SparseMatrix(Field field, std::size_t rows, std::size_t cols)
        : field_(std::move(field)), cols_(cols), rows_(rows) {}

    /// Builds from (row, col, value) triplets, summing duplicates in the
    /// field and dropping zero sums.
    static SparseMatrix from_triplets(
        Field field, std::size_t rows, std::size_t cols,
        const std::vector<std::tuple<std::uint32_t, std::uint32_t, FieldElement>>& triplets);

    const Field& field() const noexcept { return field_; }
    std::size_t rows() const noexcept { return rows_.size(); }
    std::size_t cols() const noexcept { return cols_; }
    const std::vector<MatrixEntry>& row(std::size_t r) const { return rows_[r]; }
    std::size_t nonzeros() const noexcept;
    std::size_t nonzero_rows() const noexcept;

    void set_row(std::size_t r, std::vector<MatrixEntry> entries);

private:
    Field field_;
    std::size_t cols_ = 0;
    std::vector<std::vector<MatrixEntry>> rows_;
};

/// Seed for one instance. All internal randomness (m-draw, degree sequences,
/// matching, chi entries) is derived from it through fixed stream tags, so
/// identical seeds give bit-identical instances across runs and thread counts.
struct InstanceSeed {
    std::uint64_t seed = 0;
};

struct Instance {
    TannerGraph graph;
    SparseMatrix matrix;
    InstanceSeed seed;
};

/// Draws m ~ Po(dn/k) and i.i.d. degree sequences, conditioned (by full
/// rejection) on equal edge totals, then matches variable and check clones
/// uniformly at random. In simple mode matchings with multi-edges are
/// redrawn; in multigraph mode parallel edges stay and their chi draws are
/// summed in the field, so entries may cancel.
///
/// Throws DivisibilityError when gcd(supp k) does not divide n, and
/// RejectionBudgetExhausted after 10000*ceil(sqrt(n)) conditioning attempts
/// or 10000 matching attempts.
Instance sample_instance(const EnsembleSpec& ens, InstanceSeed seed);

/// Fixed-degree-count variant: exactly n*P[d=l] variables of degree l and
/// m*P[k=l] checks of degree l with m = dn/k, all of which must be integers
/// (IntegralityError otherwise). Simple mode only.
Instance sample_ldpc_exact(const EnsembleSpec& ens, InstanceSeed seed);

/// Builds the matrix for a given graph: one chi draw per edge, summed per
/// (check, var) pair; zero sums are not stored.
SparseMatrix matrix_from_graph(const TannerGraph& g, const Field& field, const ChiSpec& chi,
                               Rng& rng);

/// Instance dump: JSON with {q, modulus, n, m, edges, entries, seed}.
void dump_instance(const Instance& inst, std::ostream& out);
std::string dump_instance(const Instance& inst);
Instance load_instance(std::istream& in);
Instance load_instance_file(const std::string& path);

} // namespace ffrank
