#include "ffrank/degrees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ffrank {

double h_function(int r, double x) {
    if (r <= 0) return std::exp(x);
    if (x == 0.0) return 0.0;
    const double ex = std::exp(x);
    double partial = 0.0, term = 1.0;
    for (int j = 0; j < r; ++j) {
        partial += term;
        term *= x / (j + 1);
    }
    const double subtracted = ex - partial;
    // The subtraction cancels when the tail is a small fraction of e^x;
    // fall back to summing the tail directly (all terms positive).
    if (subtracted > 1e-3 * ex) return subtracted;
    double t = std::exp(r * std::log(x) - std::lgamma(r + 1.0));
    double sum = 0.0;
    for (int j = r;; ++j) {
        sum += t;
        t *= x / (j + 1);
        if (t <= sum * 1e-18 || t < 1e-320) break;
    }
    return sum;
}

namespace {

double truncated_poisson_mean_at(int ell, double lambda) {
    return lambda * h_function(ell - 1, lambda) / h_function(ell, lambda);
}

} // namespace

double solve_truncated_poisson(int ell, double target_mean) {
    if (ell < 1) throw DomainError("truncated Poisson needs ell >= 1");
    if (!(target_mean > ell))
        throw Infeasible("truncated Poisson mean must exceed the truncation point");
    double lo = 1e-12;
    double hi = std::max(10.0 * target_mean, 50.0);
    // The mean is strictly increasing in lambda, from ell at 0+ to infinity.
    for (int iter = 0; iter < 400; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double m = truncated_poisson_mean_at(ell, mid);
        if (m < target_mean)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

struct DegreeDistribution::Body {
    DegreeFamily family = DegreeFamily::Explicit;
    std::vector<std::pair<int, double>> atoms; // sorted by degree, positive mass
    double mean = 0.0;
    double variance = 0.0;
    int gcd = 0;

    int tp_ell = 0;
    double tp_lambda = 0.0;

    // Walker alias table over atoms (finitely supported families).
    std::vector<double> alias_prob;
    std::vector<std::uint32_t> alias_idx;
    // Cumulative table over atoms (truncated Poisson inverse-CDF sampling).
    std::vector<double> cumulative;
};

namespace {

void build_alias_table(std::vector<double>& alias_prob, std::vector<std::uint32_t>& alias_idx,
                       const std::vector<std::pair<int, double>>& atoms) {
    const std::size_t n = atoms.size();
    alias_prob.assign(n, 1.0);
    alias_idx.assign(n, 0);
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = atoms[i].second * static_cast<double>(n);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i)
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    while (!small.empty() && !large.empty()) {
        const std::uint32_t s = small.back();
        small.pop_back();
        const std::uint32_t l = large.back();
        alias_prob[s] = scaled[s];
        alias_idx[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    // Leftovers are 1 up to roundoff.
    for (std::uint32_t i : small) alias_prob[i] = 1.0;
    for (std::uint32_t i : large) alias_prob[i] = 1.0;
}

int gcd_of_atoms(const std::vector<std::pair<int, double>>& atoms) {
    int g = 0;
    for (const auto& [deg, p] : atoms) g = std::gcd(g, deg);
    return g;
}

std::shared_ptr<DegreeDistribution::Body> make_finite_body(
    DegreeFamily family, std::vector<std::pair<int, double>> atoms) {
    if (atoms.empty()) throw DomainError("degree distribution has empty support");
    double sum = 0.0;
    for (const auto& [deg, p] : atoms) {
        if (deg < 1) throw DomainError("degree support must be positive integers");
        if (p < 0.0) throw DomainError("negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw DomainError("probabilities sum to " + std::to_string(sum) + ", not 1");
    auto body = std::make_shared<DegreeDistribution::Body>();
    body->family = family;
    for (auto& [deg, p] : atoms) p /= sum;
    std::erase_if(atoms, [](const auto& a) { return a.second == 0.0; });
    std::sort(atoms.begin(), atoms.end());
    body->atoms = std::move(atoms);
    double m = 0.0, m2 = 0.0;
    for (const auto& [deg, p] : body->atoms) {
        m += deg * p;
        m2 += static_cast<double>(deg) * deg * p;
    }
    body->mean = m;
    body->variance = m2 - m * m;
    body->gcd = gcd_of_atoms(body->atoms);
    build_alias_table(body->alias_prob, body->alias_idx, body->atoms);
    return body;
}

} // namespace

DegreeDistribution::DegreeDistribution(std::shared_ptr<const Body> body)
    : body_(std::move(body)) {}

DegreeDistribution DegreeDistribution::point(int degree) {
    auto body = make_finite_body(DegreeFamily::Point, {{degree, 1.0}});
    return DegreeDistribution(std::move(body));
}

DegreeDistribution DegreeDistribution::explicit_pmf(const std::map<int, double>& pmf) {
    std::vector<std::pair<int, double>> atoms(pmf.begin(), pmf.end());
    return DegreeDistribution(make_finite_body(DegreeFamily::Explicit, std::move(atoms)));
}

DegreeDistribution DegreeDistribution::power_law_cutoff(double exponent, int min_degree,
                                                        int max_degree) {
    if (min_degree < 1 || max_degree < min_degree)
        throw DomainError("power law needs 1 <= min <= max");
    std::vector<std::pair<int, double>> atoms;
    double sum = 0.0;
    for (int d = min_degree; d <= max_degree; ++d)
        sum += std::pow(static_cast<double>(d), -exponent);
    for (int d = min_degree; d <= max_degree; ++d)
        atoms.emplace_back(d, std::pow(static_cast<double>(d), -exponent) / sum);
    return DegreeDistribution(make_finite_body(DegreeFamily::PowerLawCutoff, std::move(atoms)));
}

DegreeDistribution DegreeDistribution::truncated_poisson(int ell, double lambda) {
    if (ell < 1) throw DomainError("truncated Poisson needs ell >= 1");
    if (!(lambda > 0.0)) throw DomainError("truncated Poisson needs lambda > 0");
    auto body = std::make_shared<Body>();
    body->family = DegreeFamily::TruncatedPoisson;
    body->tp_ell = ell;
    body->tp_lambda = lambda;
    const double hl = h_function(ell, lambda);
    body->mean = lambda * h_function(ell - 1, lambda) / hl;
    const double second_factorial = lambda * lambda * h_function(ell - 2, lambda) / hl;
    body->variance = second_factorial + body->mean - body->mean * body->mean;

    // Sampling table, truncated where the cumulative mass reaches 1 - 1e-14.
    double t = std::exp(ell * std::log(lambda) - std::lgamma(ell + 1.0)) / hl;
    double cum = 0.0;
    for (int j = ell; cum < 1.0 - 1e-14 && j < ell + 2000000; ++j) {
        body->atoms.emplace_back(j, t);
        cum += t;
        body->cumulative.push_back(std::min(cum, 1.0));
        t *= lambda / (j + 1);
    }
    body->cumulative.back() = 1.0;
    body->gcd = gcd_of_atoms(body->atoms);
    return DegreeDistribution(std::move(body));
}

DegreeDistribution DegreeDistribution::truncated_poisson_mean(int ell, double mean) {
    return truncated_poisson(ell, solve_truncated_poisson(ell, mean));
}

DegreeFamily DegreeDistribution::family() const noexcept { return body_->family; }
double DegreeDistribution::mean() const noexcept { return body_->mean; }
double DegreeDistribution::variance() const noexcept { return body_->variance; }
int DegreeDistribution::min_degree() const noexcept { return body_->atoms.front().first; }
int DegreeDistribution::gcd_support() const noexcept { return body_->gcd; }
int DegreeDistribution::tp_ell() const noexcept { return body_->tp_ell; }
double DegreeDistribution::tp_lambda() const noexcept { return body_->tp_lambda; }

const std::vector<std::pair<int, double>>& DegreeDistribution::support() const noexcept {
    return body_->atoms;
}

double DegreeDistribution::pmf(int degree) const noexcept {
    if (body_->family == DegreeFamily::TruncatedPoisson) {
        if (degree < body_->tp_ell) return 0.0;
        const double l = body_->tp_lambda;
        return std::exp(degree * std::log(l) - std::lgamma(degree + 1.0)) /
               h_function(body_->tp_ell, l);
    }
    const auto& atoms = body_->atoms;
    auto it = std::lower_bound(atoms.begin(), atoms.end(), degree,
                               [](const auto& a, int d) { return a.first < d; });
    return (it != atoms.end() && it->first == degree) ? it->second : 0.0;
}

double DegreeDistribution::pgf(double x, int order) const {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("pgf argument outside [0,1]");
    if (order < 0 || order > 3) throw DomainError("pgf derivative order outside 0..3");
    if (body_->family == DegreeFamily::TruncatedPoisson) {
        const double l = body_->tp_lambda;
        double scale = 1.0;
        for (int i = 0; i < order; ++i) scale *= l;
        return scale * h_function(body_->tp_ell - order, l * x) /
               h_function(body_->tp_ell, l);
    }
    double sum = 0.0;
    for (const auto& [deg, p] : body_->atoms) {
        if (deg < order) continue;
        double falling = 1.0;
        for (int i = 0; i < order; ++i) falling *= deg - i;
        const int ex = deg - order;
        sum += p * falling * (ex == 0 ? 1.0 : std::pow(x, ex));
    }
    return sum;
}

DegreeDistribution DegreeDistribution::size_biased() const {
    if (body_->family == DegreeFamily::Point) return *this;
    std::vector<std::pair<int, double>> atoms;
    atoms.reserve(body_->atoms.size());
    const double m = body_->mean;
    for (const auto& [deg, p] : body_->atoms) atoms.emplace_back(deg, deg * p / m);
    return DegreeDistribution(make_finite_body(DegreeFamily::Explicit, std::move(atoms)));
}

int DegreeDistribution::sample_u64(std::uint64_t raw, double unit) const {
    const auto& b = *body_;
    if (b.atoms.size() == 1) return b.atoms.front().first;
    if (b.family == DegreeFamily::TruncatedPoisson) {
        auto it = std::lower_bound(b.cumulative.begin(), b.cumulative.end(), unit);
        const std::size_t i = static_cast<std::size_t>(it - b.cumulative.begin());
        return b.atoms[std::min(i, b.atoms.size() - 1)].first;
    }
    const std::size_t n = b.atoms.size();
    const auto wide = static_cast<unsigned __int128>(raw) * n;
    const std::size_t i = static_cast<std::size_t>(wide >> 64);
    return unit < b.alias_prob[i] ? b.atoms[i].first : b.atoms[b.alias_idx[i]].first;
}

namespace {

std::vector<std::pair<std::string, std::string>> parse_kv_list(std::string_view args) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t pos = 0;
    while (pos < args.size()) {
        std::size_t comma = args.find(',', pos);
        if (comma == std::string_view::npos) comma = args.size();
        std::string_view item = args.substr(pos, comma - pos);
        const std::size_t eq = item.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("expected key=value in '" + std::string(item) + "'");
        out.emplace_back(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
        pos = comma + 1;
    }
    return out;
}

int parse_int(const std::string& s) {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw ConfigError("bad integer '" + s + "'");
    return v;
}

double parse_double(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ConfigError("bad number '" + s + "'");
    return v;
}

} // namespace

DegreeDistribution DegreeDistribution::parse(std::string_view text) {
    const std::size_t colon = text.find(':');
    if (colon == std::string_view::npos)
        throw ConfigError("degree distribution spec needs 'family:args'");
    const std::string family(text.substr(0, colon));
    const std::string_view args = text.substr(colon + 1);
    try {
        if (family == "point") return point(parse_int(std::string(args)));
        if (family == "tpoisson") {
            int ell = -1;
            double lambda = -1.0, mean = -1.0;
            for (const auto& [k, v] : parse_kv_list(args)) {
                if (k == "ell")
                    ell = parse_int(v);
                else if (k == "lambda")
                    lambda = parse_double(v);
                else if (k == "mean")
                    mean = parse_double(v);
                else
                    throw ConfigError("unknown tpoisson key '" + k + "'");
            }
            if (ell < 1) throw ConfigError("tpoisson needs ell>=1");
            if ((lambda > 0.0) == (mean > 0.0))
                throw ConfigError("tpoisson needs exactly one of lambda, mean");
            return lambda > 0.0 ? truncated_poisson(ell, lambda)
                                : truncated_poisson_mean(ell, mean);
        }
        if (family == "explicit") {
            std::map<int, double> pmf;
            for (const auto& [k, v] : parse_kv_list(args)) pmf[parse_int(k)] = parse_double(v);
            return explicit_pmf(pmf);
        }
        if (family == "powerlaw") {
            double exponent = 0.0;
            int mn = -1, mx = -1;
            for (const auto& [k, v] : parse_kv_list(args)) {
                if (k == "exp")
                    exponent = parse_double(v);
                else if (k == "min")
                    mn = parse_int(v);
                else if (k == "max")
                    mx = parse_int(v);
                else
                    throw ConfigError("unknown powerlaw key '" + k + "'");
            }
            return power_law_cutoff(exponent, mn, mx);
        }
    } catch (const std::invalid_argument&) {
        throw ConfigError("malformed degree distribution '" + std::string(text) + "'");
    } catch (const std::out_of_range&) {
        throw ConfigError("malformed degree distribution '" + std::string(text) + "'");
    }
    throw ConfigError("unknown degree family '" + family + "'");
}

std::string DegreeDistribution::to_string() const {
    std::ostringstream out;
    out.precision(17);
    switch (body_->family) {
        case DegreeFamily::Point:
            out << "point:" << body_->atoms.front().first;
            break;
        case DegreeFamily::TruncatedPoisson:
            out << "tpoisson:ell=" << body_->tp_ell << ",lambda=" << body_->tp_lambda;
            break;
        default: {
            out << "explicit:";
            bool first = true;
            for (const auto& [deg, p] : body_->atoms) {
                if (!first) out << ',';
                out << deg << '=' << p;
                first = false;
            }
        }
    }
    return out.str();
}

} // namespace ffrank
