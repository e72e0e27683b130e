#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ffrank/errors.hpp"
#include "ffrank/rng.hpp"

namespace ffrank {

/// h_r(x) = sum_{j >= r} x^j / j!  (= e^x for r <= 0).
/// Evaluated as e^x minus the partial sum when that is numerically safe,
/// otherwise by direct tail summation, keeping relative error <= 1e-12.
double h_function(int r, double x);

/// Rate lambda of the truncated Poisson Po_{>=ell}(lambda) with the given
/// mean, solved by bisection (the mean is strictly increasing in lambda).
/// Throws Infeasible when target_mean <= ell, the infimum as lambda -> 0.
double solve_truncated_poisson(int ell, double target_mean);

enum class DegreeFamily { Point, TruncatedPoisson, Explicit, PowerLawCutoff };

/// A distribution on positive integer degrees, together with its probability
/// generating function D(x) and derivatives up to third order.
///
/// Finitely supported families evaluate the pgf exactly; the truncated
/// Poisson goes through h_function so analytic evaluation never truncates.
/// Immutable and cheap to copy. Sampling takes a caller-owned generator, so
/// concurrent sampling needs one generator per thread.
class DegreeDistribution {
public:
    static DegreeDistribution point(int degree);
    static DegreeDistribution truncated_poisson(int ell, double lambda);
    /// Mean-parameterized form; calibrates lambda via solve_truncated_poisson.
    static DegreeDistribution truncated_poisson_mean(int ell, double mean);
    /// Probabilities must sum to 1 within 1e-9; they are renormalized exactly.
    static DegreeDistribution explicit_pmf(const std::map<int, double>& pmf);
    static DegreeDistribution power_law_cutoff(double exponent, int min_degree, int max_degree);

    /// Parses the spec grammar used by the CLI and config files:
    ///   point:3
    ///   tpoisson:ell=1,lambda=1.0   or   tpoisson:ell=1,mean=2.0
    ///   explicit:3=0.8,15=0.2
    ///   powerlaw:exp=3.5,min=3,max=100
    static DegreeDistribution parse(std::string_view text);

    DegreeFamily family() const noexcept;
    double mean() const noexcept;
    double variance() const noexcept;
    int min_degree() const noexcept;
    double pmf(int degree) const noexcept;
    int gcd_support() const noexcept;

    /// D(x), D'(x), D''(x) or D'''(x) depending on order (0..3), x in [0,1].
    double pgf(double x, int order = 0) const;

    DegreeDistribution size_biased() const;

    template <class G>
    int sample(G& rng) const {
        return sample_u64(rng(), uniform_unit(rng));
    }

    // TruncatedPoisson parameters (0 / NaN for other families).
    int tp_ell() const noexcept;
    double tp_lambda() const noexcept;

    /// Support atoms with their probabilities. For the truncated Poisson this
    /// is the sampling table, truncated where the tail mass drops below 1e-14;
    /// analytic evaluation does not use it.
    const std::vector<std::pair<int, double>>& support() const noexcept;

    std::string to_string() const;

    struct Body; // opaque shared state

private:
    explicit DegreeDistribution(std::shared_ptr<const Body> body);
    int sample_u64(std::uint64_t raw, double unit) const;
    std::shared_ptr<const Body> body_;
};

} // namespace ffrank
