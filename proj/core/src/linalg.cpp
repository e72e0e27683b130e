#include "ffrank/linalg.hpp"

#include <algorithm>
#include <limits>

namespace ffrank {

namespace {

// ---------------------------------------------------------------------------
// GF(2): bit-packed reduced row echelon form.

struct PackedRref {
    std::size_t rank = 0;
    std::vector<std::uint32_t> pivot_cols;           // in elimination order
    std::vector<std::vector<std::uint64_t>> rows;    // RREF rows, pivot rows first
};

inline bool get_bit(const std::vector<std::uint64_t>& row, std::size_t c) {
    return (row[c >> 6] >> (c & 63)) & 1;
}

PackedRref packed_rref(const SparseMatrix& m) {
    const std::size_t words = (m.cols() + 63) / 64;
    std::vector<std::vector<std::uint64_t>> rows(m.rows(),
                                                 std::vector<std::uint64_t>(words, 0));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (const auto& e : m.row(r)) rows[r][e.col >> 6] |= std::uint64_t{1} << (e.col & 63);

    PackedRref out;
    std::size_t next = 0;
    for (std::size_t c = 0; c < m.cols() && next < rows.size(); ++c) {
        std::size_t pivot = rows.size();
        for (std::size_t r = next; r < rows.size(); ++r) {
            if (get_bit(rows[r], c)) {
                pivot = r;
                break;
            }
        }
        if (pivot == rows.size()) continue;
        std::swap(rows[next], rows[pivot]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r != next && get_bit(rows[r], c)) {
                auto& dst = rows[r];
                const auto& src = rows[next];
                for (std::size_t w = 0; w < words; ++w) dst[w] ^= src[w];
            }
        }
        out.pivot_cols.push_back(static_cast<std::uint32_t>(c));
        ++next;
    }
    out.rank = next;
    rows.resize(next);
    out.rows = std::move(rows);
    return out;
}

// ---------------------------------------------------------------------------
// Generic GF(q): sparse rows with min-column-degree pivoting.

struct SparseRref {
    std::size_t rank = 0;
    std::vector<std::uint32_t> pivot_cols;              // pivot_cols[i] for pivot row i
    std::vector<std::vector<MatrixEntry>> pivot_rows;   // normalized (pivot value 1)
};

FieldElement value_at(const std::vector<MatrixEntry>& row, std::uint32_t col) {
    auto it = std::lower_bound(row.begin(), row.end(), col,
                               [](const MatrixEntry& e, std::uint32_t c) { return e.col < c; });
    return (it != row.end() && it->col == col) ? it->value : FieldElement{0};
}

// dst += coef * src (sorted merge).
std::vector<MatrixEntry> add_scaled(const Field& f, const std::vector<MatrixEntry>& dst,
                                    const std::vector<MatrixEntry>& src, FieldElement coef) {
    std::vector<MatrixEntry> out;
    out.reserve(dst.size() + src.size());
    std::size_t i = 0, j = 0;
    while (i < dst.size() || j < src.size()) {
        if (j == src.size() || (i < dst.size() && dst[i].col < src[j].col)) {
            out.push_back(dst[i++]);
        } else if (i == dst.size() || src[j].col < dst[i].col) {
            const FieldElement v = f.mul(coef, src[j].value);
            if (v.repr != 0) out.push_back({src[j].col, v});
            ++j;
        } else {
            const FieldElement v = f.add(dst[i].value, f.mul(coef, src[j].value));
            if (v.repr != 0) out.push_back({dst[i].col, v});
            ++i;
            ++j;
        }
    }
    return out;
}

SparseRref sparse_rref(const SparseMatrix& m) {
    const Field& f = m.field();
    std::vector<std::vector<MatrixEntry>> rows(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) rows[r] = m.row(r);

    SparseRref out;
    std::vector<bool> is_pivot_row(rows.size(), false);
    std::vector<bool> col_done(m.cols(), false);
    std::vector<std::size_t> pivot_row_of; // parallel to out.pivot_cols

    for (;;) {
        // Column degrees over non-pivot rows and unused columns.
        std::vector<std::uint32_t> degree(m.cols(), 0);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (is_pivot_row[r]) continue;
            for (const auto& e : rows[r])
                if (!col_done[e.col]) ++degree[e.col];
        }
        std::uint32_t best_col = 0;
        std::uint32_t best_deg = std::numeric_limits<std::uint32_t>::max();
        for (std::uint32_t c = 0; c < m.cols(); ++c)
            if (!col_done[c] && degree[c] != 0 && degree[c] < best_deg) {
                best_deg = degree[c];
                best_col = c;
            }
        if (best_deg == std::numeric_limits<std::uint32_t>::max()) break;

        // Pivot row: fewest entries among non-pivot rows hitting the column.
        std::size_t pivot = rows.size();
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (is_pivot_row[r] || value_at(rows[r], best_col).repr == 0) continue;
            if (pivot == rows.size() || rows[r].size() < rows[pivot].size()) pivot = r;
        }

        // Normalize and eliminate the column everywhere else.
        const FieldElement inv = f.inverse(value_at(rows[pivot], best_col));
        if (!(inv == f.one()))
            for (auto& e : rows[pivot]) e.value = f.mul(e.value, inv);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == pivot) continue;
            const FieldElement coef = value_at(rows[r], best_col);
            if (coef.repr == 0) continue;
            rows[r] = add_scaled(f, rows[r], rows[pivot], f.neg(coef));
        }
        is_pivot_row[pivot] = true;
        col_done[best_col] = true;
        out.pivot_cols.push_back(best_col);
        pivot_row_of.push_back(pivot);
    }

    out.rank = out.pivot_cols.size();
    out.pivot_rows.reserve(out.rank);
    for (std::size_t i = 0; i < out.rank; ++i)
        out.pivot_rows.push_back(std::move(rows[pivot_row_of[i]]));
    return out;
}

} // namespace

std::size_t rank(const SparseMatrix& m) {
    if (m.field().q() == 2) return packed_rref(m).rank;
    return sparse_rref(m).rank;
}

std::size_t nullity(const SparseMatrix& m) { return m.cols() - rank(m); }

KernelBasis kernel_basis(const SparseMatrix& m) {
    KernelBasis basis{m.field(), m.cols(), {}, {}};
    std::vector<bool> pivot_col(m.cols(), false);

    if (m.field().q() == 2) {
        const PackedRref rref = packed_rref(m);
        for (std::uint32_t c : rref.pivot_cols) pivot_col[c] = true;
        for (std::uint32_t c = 0; c < m.cols(); ++c)
            if (!pivot_col[c]) basis.free_columns.push_back(c);
        for (std::uint32_t fcol : basis.free_columns) {
            std::vector<FieldElement> v(m.cols(), FieldElement{0});
            v[fcol] = {1};
            for (std::size_t i = 0; i < rref.rank; ++i)
                if (get_bit(rref.rows[i], fcol)) v[rref.pivot_cols[i]] = {1};
            basis.vectors.push_back(std::move(v));
        }
        return basis;
    }

    const SparseRref rref = sparse_rref(m);
    for (std::uint32_t c : rref.pivot_cols) pivot_col[c] = true;
    for (std::uint32_t c = 0; c < m.cols(); ++c)
        if (!pivot_col[c]) basis.free_columns.push_back(c);
    const Field& f = m.field();
    for (std::uint32_t fcol : basis.free_columns) {
        std::vector<FieldElement> v(m.cols(), FieldElement{0});
        v[fcol] = f.one();
        for (std::size_t i = 0; i < rref.rank; ++i) {
            const FieldElement a = value_at(rref.pivot_rows[i], fcol);
            if (a.repr != 0) v[rref.pivot_cols[i]] = f.neg(a);
        }
        basis.vectors.push_back(std::move(v));
    }
    return basis;
}

FrozenSet frozen_variables(const KernelBasis& basis) {
    FrozenSet fs;
    for (std::uint32_t c = 0; c < basis.cols; ++c) {
        bool frozen = true;
        for (const auto& v : basis.vectors)
            if (v[c].repr != 0) {
                frozen = false;
                break;
            }
        if (frozen) fs.indices.push_back(c);
    }
    return fs;
}

FrozenSet frozen_variables(const SparseMatrix& m) { return frozen_variables(kernel_basis(m)); }

std::vector<FieldElement> boltzmann_sample(const KernelBasis& basis, Rng& rng) {
    const Field& f = basis.field;
    std::vector<FieldElement> v(basis.cols, FieldElement{0});
    for (const auto& b : basis.vectors) {
        const FieldElement coef = f.uniform_element(rng);
        if (coef.repr == 0) continue;
        for (std::size_t c = 0; c < basis.cols; ++c)
            if (b[c].repr != 0) v[c] = f.add(v[c], f.mul(coef, b[c]));
    }
    return v;
}

std::vector<FieldElement> boltzmann_sample(const SparseMatrix& m, Rng& rng) {
    const KernelBasis basis = kernel_basis(m);
    return boltzmann_sample(basis, rng);
}

std::size_t rank_dense_oracle(const SparseMatrix& m) {
    if (m.rows() * m.cols() > 1000000) throw SizeLimit("dense oracle limited to 1e6 cells");
    const Field& f = m.field();
    std::vector<std::vector<FieldElement>> a(m.rows(),
                                             std::vector<FieldElement>(m.cols(), FieldElement{0}));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (const auto& e : m.row(r)) a[r][e.col] = e.value;

    std::size_t rank = 0;
    for (std::size_t c = 0; c < m.cols() && rank < m.rows(); ++c) {
        std::size_t pivot = m.rows();
        for (std::size_t r = rank; r < m.rows(); ++r)
            if (a[r][c].repr != 0) {
                pivot = r;
                break;
            }
        if (pivot == m.rows()) continue;
        std::swap(a[rank], a[pivot]);
        const FieldElement inv = f.inverse(a[rank][c]);
        for (std::size_t j = c; j < m.cols(); ++j) a[rank][j] = f.mul(a[rank][j], inv);
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r == rank || a[r][c].repr == 0) continue;
            const FieldElement coef = a[r][c];
            for (std::size_t j = c; j < m.cols(); ++j)
                a[r][j] = f.sub(a[r][j], f.mul(coef, a[rank][j]));
        }
        ++rank;
    }
    return rank;
}

std::vector<FieldElement> matvec(const SparseMatrix& m, const std::vector<FieldElement>& v) {
    const Field& f = m.field();
    std::vector<FieldElement> out(m.rows(), FieldElement{0});
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (const auto& e : m.row(r)) out[r] = f.add(out[r], f.mul(e.value, v[e.col]));
    return out;
}

bool in_kernel(const SparseMatrix& m, const std::vector<FieldElement>& v) {
    const auto out = matvec(m, v);
    return std::all_of(out.begin(), out.end(), [](FieldElement x) { return x.repr == 0; });
}

} // namespace ffrank
