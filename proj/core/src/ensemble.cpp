#include "ffrank/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ffrank {

namespace {

// Stream tags for deriving independent randomness from an InstanceSeed.
constexpr std::uint64_t kStreamM = 0x6d2d64726177ULL;        // "m-draw"
constexpr std::uint64_t kStreamDegreesVar = 0x642d736571ULL; // "d-seq"
constexpr std::uint64_t kStreamDegreesChk = 0x6b2d736571ULL; // "k-seq"
constexpr std::uint64_t kStreamMatching = 0x6d61746368ULL;   // "match"
constexpr std::uint64_t kStreamChi = 0x636869ULL;            // "chi"

} // namespace

void EnsembleSpec::validate_roles() const {
    if (kdist.min_degree() < 3)
        throw DomainError("check-degree distribution needs min support >= 3");
    if (ddist.min_degree() < 1)
        throw DomainError("variable-degree distribution needs min support >= 1");
    if (chi.kind == ChiSpec::Kind::Fixed && chi.fixed_value.repr == 0)
        throw DomainError("chi must put no mass on zero");
    if (chi.kind == ChiSpec::Kind::Fixed && chi.fixed_value.repr >= field.q())
        throw DomainError("chi value outside the field");
}

void EnsembleSpec::validate_for_sampling() const {
    validate_roles();
    if (n == 0) throw DomainError("sampling needs n > 0");
    const int g = kdist.gcd_support();
    if (n % static_cast<std::size_t>(g) != 0)
        throw DivisibilityError("gcd of check-degree support (" + std::to_string(g) +
                                ") does not divide n=" + std::to_string(n));
}

EnsembleSpec parse_ensemble(std::string_view text) {
    std::uint32_t q = 0;
    std::string dspec, kspec, chispec = "uniform", modespec = "simple";
    std::size_t n = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t sep = text.find(';', pos);
        if (sep == std::string_view::npos) sep = text.size();
        const std::string_view item = text.substr(pos, sep - pos);
        pos = sep + 1;
        if (item.empty()) continue;
        const std::size_t eq = item.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("ensemble spec items must be key=value, got '" +
                              std::string(item) + "'");
        const std::string_view key = item.substr(0, eq);
        const std::string value(item.substr(eq + 1));
        if (key == "q")
            q = static_cast<std::uint32_t>(std::stoul(value));
        else if (key == "d")
            dspec = value;
        else if (key == "k")
            kspec = value;
        else if (key == "chi")
            chispec = value;
        else if (key == "mode")
            modespec = value;
        else if (key == "n")
            n = std::stoull(value);
        else
            throw ConfigError("unknown ensemble key '" + std::string(key) + "'");
    }
    if (q == 0 || dspec.empty() || kspec.empty())
        throw ConfigError("ensemble spec needs q, d and k");

    Field field(q);
    ChiSpec chi = ChiSpec::uniform();
    if (chispec.rfind("fixed:", 0) == 0) {
        chi = ChiSpec::fixed(field.element(
            static_cast<std::uint32_t>(std::stoul(chispec.substr(6)))));
    } else if (chispec != "uniform") {
        throw ConfigError("chi must be 'uniform' or 'fixed:<repr>'");
    }
    GraphMode mode = GraphMode::Simple;
    if (modespec == "multigraph")
        mode = GraphMode::Multigraph;
    else if (modespec == "exact-degrees")
        mode = GraphMode::ExactDegrees;
    else if (modespec != "simple")
        throw ConfigError("mode must be simple, multigraph or exact-degrees");

    EnsembleSpec ens{std::move(field), DegreeDistribution::parse(dspec),
                     DegreeDistribution::parse(kspec), chi, n, mode};
    ens.validate_roles();
    return ens;
}

void TannerGraph::recompute_var_degrees() {
    var_degrees.assign(n_vars, 0);
    for (const auto& [c, v] : edges) ++var_degrees[v];
}

SparseMatrix SparseMatrix::from_triplets(
    Field field, std::size_t rows, std::size_t cols,
    const std::vector<std::tuple<std::uint32_t, std::uint32_t, FieldElement>>& triplets) {
    SparseMatrix m(field, rows, cols);
    std::vector<std::vector<MatrixEntry>> acc(rows);
    for (const auto& [r, c, v] : triplets) acc[r].push_back({c, v});
    for (std::size_t r = 0; r < rows; ++r) {
        auto& row = acc[r];
        std::sort(row.begin(), row.end(),
                  [](const MatrixEntry& a, const MatrixEntry& b) { return a.col < b.col; });
        std::vector<MatrixEntry> merged;
        for (std::size_t i = 0; i < row.size();) {
            FieldElement sum = row[i].value;
            std::size_t j = i + 1;
            while (j < row.size() && row[j].col == row[i].col) {
                sum = field.add(sum, row[j].value);
                ++j;
            }
            if (sum.repr != 0) merged.push_back({row[i].col, sum});
            i = j;
        }
        m.set_row(r, std::move(merged));
    }
    return m;
}

void SparseMatrix::set_row(std::size_t r, std::vector<MatrixEntry> entries) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].value.repr == 0 || entries[i].value.repr >= field_.q())
            throw DomainError("matrix entry outside F_q*");
        if (entries[i].col >= cols_ || (i > 0 && entries[i].col <= entries[i - 1].col))
            throw DomainError("row columns must be strictly increasing and in range");
    }
    rows_[r] = std::move(entries);
}

std::size_t SparseMatrix::nonzeros() const noexcept {
    std::size_t s = 0;
    for (const auto& r : rows_) s += r.size();
    return s;
}

std::size_t SparseMatrix::nonzero_rows() const noexcept {
    std::size_t s = 0;
    for (const auto& r : rows_) s += !r.empty();
    return s;
}

namespace {

// Uniform clone matching: pair check clones (in check-major order) with a
// shuffled list of variable clones.
std::vector<std::pair<std::uint32_t, std::uint32_t>> match_clones(
    const std::vector<std::uint32_t>& var_degrees,
    const std::vector<std::uint32_t>& check_degrees, Rng& rng) {
    std::vector<std::uint32_t> var_clones;
    for (std::uint32_t v = 0; v < var_degrees.size(); ++v)
        var_clones.insert(var_clones.end(), var_degrees[v], v);
    shuffle_vector(var_clones, rng);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    edges.reserve(var_clones.size());
    std::size_t t = 0;
    for (std::uint32_t c = 0; c < check_degrees.size(); ++c)
        for (std::uint32_t i = 0; i < check_degrees[c]; ++i)
            edges.emplace_back(c, var_clones[t++]);
    return edges;
}

bool has_multi_edge(std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
    std::sort(edges.begin(), edges.end());
    return std::adjacent_find(edges.begin(), edges.end()) != edges.end();
}

TannerGraph graph_from_degrees(std::size_t n, std::vector<std::uint32_t> var_degrees,
                               std::vector<std::uint32_t> check_degrees, bool simple,
                               std::uint64_t seed, std::uint64_t attempt) {
    constexpr std::uint64_t kMatchingBudget = 10000;
    for (std::uint64_t matching_attempt = 0; matching_attempt < kMatchingBudget;
         ++matching_attempt) {
        Rng rng(stream_seed(seed, kStreamMatching, attempt * kMatchingBudget + matching_attempt));
        auto edges = match_clones(var_degrees, check_degrees, rng);
        if (simple && has_multi_edge(edges)) continue;
        TannerGraph g;
        g.n_vars = n;
        g.check_degrees = std::move(check_degrees);
        g.edges = std::move(edges);
        g.recompute_var_degrees();
        return g;
    }
    throw RejectionBudgetExhausted("no simple matching found within budget");
}

} // namespace

SparseMatrix matrix_from_graph(const TannerGraph& g, const Field& field, const ChiSpec& chi,
                               Rng& rng) {
    std::vector<std::tuple<std::uint32_t, std::uint32_t, FieldElement>> triplets;
    triplets.reserve(g.edges.size());
    for (const auto& [c, v] : g.edges) triplets.emplace_back(c, v, chi.draw(field, rng));
    return SparseMatrix::from_triplets(field, g.num_checks(), g.n_vars, triplets);
}

Instance sample_instance(const EnsembleSpec& ens, InstanceSeed seed) {
    ens.validate_for_sampling();
    if (ens.mode == GraphMode::ExactDegrees) return sample_ldpc_exact(ens, seed);

    const std::size_t n = ens.n;
    const double dmean = ens.ddist.mean();
    const double kmean = ens.kdist.mean();
    const std::uint64_t budget =
        10000 * static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(n))));

    for (std::uint64_t attempt = 0; attempt < budget; ++attempt) {
        Rng m_rng(stream_seed(seed.seed, kStreamM, attempt));
        std::poisson_distribution<std::int64_t> poisson(dmean * static_cast<double>(n) / kmean);
        const auto m = static_cast<std::size_t>(std::max<std::int64_t>(0, poisson(m_rng)));

        Rng d_rng(stream_seed(seed.seed, kStreamDegreesVar, attempt));
        std::vector<std::uint32_t> dv(n);
        std::uint64_t dsum = 0;
        for (auto& d : dv) {
            d = static_cast<std::uint32_t>(ens.ddist.sample(d_rng));
            dsum += d;
        }
        Rng k_rng(stream_seed(seed.seed, kStreamDegreesChk, attempt));
        std::vector<std::uint32_t> kv(m);
        std::uint64_t ksum = 0;
        for (auto& k : kv) {
            k = static_cast<std::uint32_t>(ens.kdist.sample(k_rng));
            ksum += k;
        }
        if (dsum != ksum) continue; // redraw everything: keeps the conditional law

        TannerGraph g = graph_from_degrees(n, std::move(dv), std::move(kv),
                                           ens.mode == GraphMode::Simple, seed.seed, attempt);
        Rng chi_rng(stream_seed(seed.seed, kStreamChi, attempt));
        SparseMatrix matrix = matrix_from_graph(g, ens.field, ens.chi, chi_rng);
        return Instance{std::move(g), std::move(matrix), seed};
    }
    throw RejectionBudgetExhausted("degree-total conditioning not met within budget");
}

namespace {

std::uint64_t integral_or_throw(double x, const std::string& what) {
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-9 * std::max(1.0, std::abs(x)) || r < 0.0)
        throw IntegralityError(what + " = " + std::to_string(x) + " is not a nonnegative integer");
    return static_cast<std::uint64_t>(r);
}

} // namespace

Instance sample_ldpc_exact(const EnsembleSpec& ens, InstanceSeed seed) {
    ens.validate_roles();
    if (ens.n == 0) throw DomainError("sampling needs n > 0");
    const std::size_t n = ens.n;
    const double nd = static_cast<double>(n);

    std::vector<std::uint32_t> dv;
    for (const auto& [deg, p] : ens.ddist.support()) {
        const std::uint64_t count = integral_or_throw(nd * p, "n*P[d=" + std::to_string(deg) + "]");
        dv.insert(dv.end(), count, static_cast<std::uint32_t>(deg));
    }
    if (dv.size() != n) throw IntegralityError("variable degree counts do not sum to n");

    const std::uint64_t m =
        integral_or_throw(nd * ens.ddist.mean() / ens.kdist.mean(), "m = dn/k");
    std::vector<std::uint32_t> kv;
    for (const auto& [deg, p] : ens.kdist.support()) {
        const std::uint64_t count =
            integral_or_throw(static_cast<double>(m) * p, "m*P[k=" + std::to_string(deg) + "]");
        kv.insert(kv.end(), count, static_cast<std::uint32_t>(deg));
    }
    if (kv.size() != m) throw IntegralityError("check degree counts do not sum to m");
    const std::uint64_t dsum = std::accumulate(dv.begin(), dv.end(), std::uint64_t{0});
    const std::uint64_t ksum = std::accumulate(kv.begin(), kv.end(), std::uint64_t{0});
    if (dsum != ksum) throw IntegralityError("edge totals differ under exact degrees");

    TannerGraph g = graph_from_degrees(n, std::move(dv), std::move(kv), true, seed.seed, 0);
    Rng chi_rng(stream_seed(seed.seed, kStreamChi, 0));
    SparseMatrix matrix = matrix_from_graph(g, ens.field, ens.chi, chi_rng);
    return Instance{std::move(g), std::move(matrix), seed};
}

void dump_instance(const Instance& inst, std::ostream& out) {
    nlohmann::json j;
    j["q"] = inst.matrix.field().q();
    j["modulus"] = inst.matrix.field().modulus();
    j["n"] = inst.graph.n_vars;
    j["m"] = inst.graph.num_checks();
    auto& edges = j["edges"] = nlohmann::json::array();
    for (const auto& [c, v] : inst.graph.edges) edges.push_back({c, v});
    auto& entries = j["entries"] = nlohmann::json::array();
    for (std::size_t r = 0; r < inst.matrix.rows(); ++r)
        for (const auto& e : inst.matrix.row(r))
            entries.push_back({r, e.col, e.value.repr});
    j["seed"] = inst.seed.seed;
    out << j.dump();
}

std::string dump_instance(const Instance& inst) {
    std::ostringstream out;
    dump_instance(inst, out);
    return out.str();
}

Instance load_instance(std::istream& in) {
    nlohmann::json j;
    in >> j;
    Field field(j.at("q").get<std::uint32_t>());
    if (j.contains("modulus") && !j.at("modulus").empty()) {
        const auto mod = j.at("modulus").get<std::vector<std::uint16_t>>();
        if (mod != field.modulus())
            throw ConfigError("instance modulus does not match the canonical one for q");
    }
    TannerGraph g;
    g.n_vars = j.at("n").get<std::size_t>();
    const auto m = j.at("m").get<std::size_t>();
    std::vector<std::uint32_t> check_deg(m, 0);
    for (const auto& e : j.at("edges")) {
        const auto c = e.at(0).get<std::uint32_t>();
        const auto v = e.at(1).get<std::uint32_t>();
        if (c >= m || v >= g.n_vars) throw ConfigError("edge endpoint out of range");
        g.edges.emplace_back(c, v);
        ++check_deg[c];
    }
    g.check_degrees = std::move(check_deg);
    g.recompute_var_degrees();

    std::vector<std::tuple<std::uint32_t, std::uint32_t, FieldElement>> triplets;
    for (const auto& e : j.at("entries")) {
        triplets.emplace_back(e.at(0).get<std::uint32_t>(), e.at(1).get<std::uint32_t>(),
                              field.element(e.at(2).get<std::uint32_t>()));
    }
    SparseMatrix matrix = SparseMatrix::from_triplets(field, m, g.n_vars, triplets);
    InstanceSeed seed{j.value("seed", std::uint64_t{0})};
    return Instance{std::move(g), std::move(matrix), seed};
}

Instance load_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open instance file '" + path + "'");
    return load_instance(in);
}

} // namespace ffrank
