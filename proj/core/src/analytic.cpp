#include "ffrank/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ffrank {

namespace {

constexpr int kGridPoints = 4097;
constexpr double kRhoTol = 1e-12;
constexpr double kMaxTol = 1e-10;

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha outside [0,1]");
}

} // namespace

double phi(const EnsembleSpec& ens, double alpha) {
    check_alpha(alpha);
    const double d = ens.ddist.mean();
    const double k = ens.kdist.mean();
    const double kp = ens.kdist.pgf(alpha, 1);
    return ens.ddist.pgf(1.0 - kp / k, 0) +
           d / k * (ens.kdist.pgf(alpha, 0) + (1.0 - alpha) * kp - 1.0);
}

double phi_small(const EnsembleSpec& ens, double alpha) {
    check_alpha(alpha);
    const double d = ens.ddist.mean();
    const double k = ens.kdist.mean();
    return 1.0 - alpha - ens.ddist.pgf(1.0 - ens.kdist.pgf(alpha, 1) / k, 1) / d;
}

double phi_small_derivative(const EnsembleSpec& ens, double alpha) {
    check_alpha(alpha);
    const double d = ens.ddist.mean();
    const double k = ens.kdist.mean();
    const double t = 1.0 - ens.kdist.pgf(alpha, 1) / k;
    return -1.0 + ens.ddist.pgf(t, 2) * ens.kdist.pgf(alpha, 2) / (d * k);
}

double rho(const EnsembleSpec& ens) {
    // phi_small(1) = -D'(0)/d <= 0; exact zero there means rho = 1.
    if (std::abs(phi_small(ens, 1.0)) <= kRhoTol) return 1.0;

    // Scan down from 1; phi_small is negative at the top, so the first grid
    // point at which it turns >= 0 brackets the largest zero.
    double hi = 1.0; // phi_small(hi) < 0
    for (int i = kGridPoints - 2; i >= 1; --i) {
        const double x = static_cast<double>(i) / (kGridPoints - 1);
        const double f = phi_small(ens, x);
        if (f >= 0.0 || std::abs(f) <= kRhoTol) {
            double lo = x; // phi_small(lo) >= 0 (or touches zero)
            while (hi - lo > kRhoTol) {
                const double mid = 0.5 * (lo + hi);
                if (phi_small(ens, mid) >= 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            return 0.5 * (lo + hi);
        }
        hi = x;
    }
    return 0.0; // phi_small < 0 on all of (0,1); only the trivial zero remains
}

namespace {

// Golden-section maximization on [lo, hi].
double golden_max(const EnsembleSpec& ens, double lo, double hi, double tol) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = phi(ens, x1), f2 = phi(ens, x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = phi(ens, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = phi(ens, x1);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

MaxPhi max_phi(const EnsembleSpec& ens) {
    std::vector<double> values(kGridPoints);
    for (int i = 0; i < kGridPoints; ++i)
        values[i] = phi(ens, static_cast<double>(i) / (kGridPoints - 1));

    std::vector<double> candidates{0.0, 1.0};
    for (int i = 1; i + 1 < kGridPoints; ++i) {
        if (values[i] >= values[i - 1] && values[i] >= values[i + 1]) {
            const double lo = static_cast<double>(i - 1) / (kGridPoints - 1);
            const double hi = static_cast<double>(i + 1) / (kGridPoints - 1);
            candidates.push_back(golden_max(ens, lo, hi, kMaxTol));
        }
    }

    // Best value first; ties within 1e-12 resolved toward the smallest alpha.
    MaxPhi best{0.0, phi(ens, 0.0)};
    for (double a : candidates) best.value = std::max(best.value, phi(ens, a));
    std::sort(candidates.begin(), candidates.end());
    for (double a : candidates) {
        if (phi(ens, a) >= best.value - 1e-12) {
            best.alpha_star = a;
            break;
        }
    }
    return best;
}

double rank_limit(const EnsembleSpec& ens) { return 1.0 - max_phi(ens).value; }
double ldpc_rate(const EnsembleSpec& ens) { return max_phi(ens).value; }

std::pair<double, double> core_fractions(const EnsembleSpec& ens) {
    const double r = rho(ens);
    const double d = ens.ddist.mean();
    const double k = ens.kdist.mean();
    const double u = ens.kdist.pgf(r, 1) / k;
    const double var_fraction =
        1.0 - ens.ddist.pgf(1.0 - u, 0) - u * ens.ddist.pgf(1.0 - u, 1);
    const double check_fraction = d / k * ens.kdist.pgf(r, 0);
    return {var_fraction, check_fraction};
}

DensityEvolutionResult density_evolution(const EnsembleSpec& ens, int max_iters, double tol) {
    if (max_iters < 1 || !(tol > 0.0)) throw DomainError("need max_iters >= 1 and tol > 0");
    const double d = ens.ddist.mean();
    const double k = ens.kdist.mean();
    double x = 1.0;
    for (int t = 1; t <= max_iters; ++t) {
        const double next = 1.0 - ens.ddist.pgf(1.0 - ens.kdist.pgf(x, 1) / k, 1) / d;
        const double step = std::abs(next - x);
        x = next;
        if (step < tol) {
            const double u = ens.kdist.pgf(x, 1) / k;
            const double lambda =
                1.0 - ens.ddist.pgf(1.0 - u, 0) - u * ens.ddist.pgf(1.0 - u, 1);
            return {x, lambda, t};
        }
    }
    throw NonConvergence("density evolution did not reach tol within max_iters");
}

namespace {

bool variance_zero(const DegreeDistribution& d) {
    return d.support().size() == 1 && d.family() != DegreeFamily::TruncatedPoisson;
}

} // namespace

TightnessReport tightness_report(const EnsembleSpec& ens) {
    TightnessReport rep;
    const bool d_ok = variance_zero(ens.ddist) ||
                      (ens.ddist.family() == DegreeFamily::TruncatedPoisson &&
                       ens.ddist.tp_ell() >= 1);
    const bool k_ok = variance_zero(ens.kdist) ||
                      (ens.kdist.family() == DegreeFamily::TruncatedPoisson &&
                       ens.kdist.tp_ell() >= 3);
    rep.tight = (d_ok && k_ok) ? Tightness::Yes : Tightness::Unknown;
    const double d = ens.ddist.mean();
    const double k = ens.kdist.mean();
    rep.exception_flag =
        ens.ddist.pmf(1) == 0.0 && 2.0 * (k - 1.0) * ens.ddist.pmf(2) > d;
    rep.phi_small_deriv_at_rho = phi_small_derivative(ens, rho(ens));
    return rep;
}

AnalyticReport analyze(const EnsembleSpec& ens) {
    ens.validate_roles();
    AnalyticReport rep;
    const MaxPhi mp = max_phi(ens);
    rep.alpha_star = mp.alpha_star;
    rep.phi_max = mp.value;
    rep.rho = rho(ens);
    rep.phi_at_rho = phi(ens, rep.rho);
    rep.phi_at_zero = phi(ens, 0.0);
    rep.rank_limit = 1.0 - mp.value;
    rep.rate = mp.value;
    const auto [nv, mv] = core_fractions(ens);
    rep.core_var_fraction = nv;
    rep.core_check_fraction = mv;
    const TightnessReport t = tightness_report(ens);
    rep.tight = t.tight;
    rep.exception_flag = t.exception_flag;
    rep.phi_small_deriv_at_rho = t.phi_small_deriv_at_rho;
    rep.core_formula_warning = !(t.phi_small_deriv_at_rho < 0.0);
    return rep;
}

BetheEstimate bethe_at_alpha(const EnsembleSpec& ens, double alpha, std::size_t num_samples,
                             std::uint64_t seed) {
    check_alpha(alpha);
    if (num_samples < 1) throw DomainError("need num_samples >= 1");
    const double d = ens.ddist.mean();
    const double k = ens.kdist.mean();
    const DegreeDistribution k_hat = ens.kdist.size_biased();

    double sum = 0.0, sumsq = 0.0;
    for (std::size_t s = 0; s < num_samples; ++s) {
        SplitMix64 rng(stream_seed(seed, 0x6265746865ULL /* "bethe" */, s));

        // Variable term: log_q of q^{max(f,1)-dv} where f counts adjacent
        // checks whose other incoming messages are all frozen.
        const int dv = ens.ddist.sample(rng);
        int frozen_checks = 0;
        for (int i = 0; i < dv; ++i) {
            const int kh = k_hat.sample(rng);
            bool all_frozen = true;
            for (int j = 1; j < kh; ++j)
                if (!(uniform_unit(rng) < alpha)) all_frozen = false;
            frozen_checks += all_frozen;
        }
        const double var_term =
            dv == 0 ? 1.0 : static_cast<double>(std::max(frozen_checks, 1) - dv);

        // Check term: log_q is 0 when all k incoming messages are frozen,
        // otherwise -1; weighted by (k-1) and the edge density d/k.
        const int kc = ens.kdist.sample(rng);
        bool all_frozen = true;
        for (int j = 0; j < kc; ++j)
            if (!(uniform_unit(rng) < alpha)) all_frozen = false;
        const double check_term = all_frozen ? 0.0 : -1.0;

        const double x = var_term - d / k * (kc - 1) * check_term;
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / static_cast<double>(num_samples);
    double var = sumsq / static_cast<double>(num_samples) - mean * mean;
    if (var < 0.0) var = 0.0;
    return {mean, std::sqrt(var / static_cast<double>(num_samples))};
}

} // namespace ffrank
