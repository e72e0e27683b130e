#pragma once

#include <cstdint>
#include <utility>

#include "ffrank/ensemble.hpp"

namespace ffrank {

/// Rank functional over the mix parameter alpha in [0,1]:
///   Phi(alpha) = D(1 - K'(alpha)/k) + (d/k) (K(alpha) + (1-alpha) K'(alpha) - 1)
/// where D, K are the pgfs of the variable/check degree laws and d, k their
/// means. Its maximum over [0,1] is the asymptotic nullity fraction (and the
/// design rate); 1 minus the maximum is the asymptotic rank fraction.
double phi(const EnsembleSpec& ens, double alpha);

/// Survival functional phi(alpha) = 1 - alpha - D'(1 - K'(alpha)/k) / d.
/// Phi'(alpha) = (d/k) K''(alpha) phi(alpha), so zeros of phi locate the
/// stationary points of Phi on (0,1].
double phi_small(const EnsembleSpec& ens, double alpha);

/// Analytic derivative phi'(alpha) = -1 + D''(1 - K'(alpha)/k) K''(alpha) / (d k).
double phi_small_derivative(const EnsembleSpec& ens, double alpha);

/// Largest stationary point of Phi: max{x in [0,1] : Phi'(x) = 0}. Found by
/// scanning phi_small downward from 1 on a 4097-point grid and bisecting the
/// first sign change to 1e-12. Always >= 0 because Phi'(0) = 0.
double rho(const EnsembleSpec& ens);

struct MaxPhi {
    double alpha_star = 0.0;
    double value = 0.0;
};

/// Global maximum of Phi on [0,1]: 4097-point grid, golden-section refinement
/// of every local-max bracket to 1e-10, ties resolved toward smaller alpha.
MaxPhi max_phi(const EnsembleSpec& ens);

double rank_limit(const EnsembleSpec& ens);
double ldpc_rate(const EnsembleSpec& ens);

/// Asymptotic 2-core fractions (variable nodes / n, check nodes / n),
/// evaluated at rho:
///   n*/n = 1 - D(1 - K'(rho)/k) - (K'(rho)/k) D'(1 - K'(rho)/k)
///   m*/n = (d/k) K(rho)
std::pair<double, double> core_fractions(const EnsembleSpec& ens);

struct DensityEvolutionResult {
    double rho_de = 0.0;    // fixed point of the edge-survival recursion
    double lambda_de = 0.0; // variable-survival fraction at the fixed point
    int iterations = 0;
};

/// Iterates rho_{t+1} = 1 - D'(1 - K'(rho_t)/k)/d from rho_0 = 1 until the
/// step is below tol. Throws NonConvergence when max_iters is exhausted.
DensityEvolutionResult density_evolution(const EnsembleSpec& ens, int max_iters, double tol);

enum class Tightness { Yes, No, Unknown };

struct TightnessReport {
    Tightness tight = Tightness::Unknown;
    /// P[d=1] = 0 and 2(k-1) P[d=2] > d: the graph is all core and the
    /// combinatorial rank bound degenerates.
    bool exception_flag = false;
    double phi_small_deriv_at_rho = 0.0;
};

/// The graph-theoretic rank bound is known to be attained when both degree
/// laws are constants or truncated Poissons (with check truncation >= 3);
/// outside those families the report says Unknown rather than extrapolate.
TightnessReport tightness_report(const EnsembleSpec& ens);

struct AnalyticReport {
    double alpha_star = 0.0;
    double phi_max = 0.0;
    double rho = 0.0;
    double phi_at_rho = 0.0;
    double phi_at_zero = 0.0;
    double rank_limit = 0.0; // 1 - phi_max
    double rate = 0.0;       // phi_max
    double core_var_fraction = 0.0;
    double core_check_fraction = 0.0;
    Tightness tight = Tightness::Unknown;
    bool exception_flag = false;
    double phi_small_deriv_at_rho = 0.0;
    /// Set when phi'(rho) >= 0: the core-fraction formulas are reported but
    /// their hypothesis fails.
    bool core_formula_warning = false;
};

AnalyticReport analyze(const EnsembleSpec& ens);

struct BetheEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo estimate of the Bethe free entropy restricted to the
/// two-atom message distribution pi_alpha = alpha delta_{delta_0} +
/// (1-alpha) delta_{uniform}: equals phi(ens, alpha) in expectation.
///
/// Per sample the inner sums over F_q assignments are evaluated in closed
/// form (a check factor is 1 when all incoming messages are frozen and the
/// pinned value is 0, and 1/q otherwise), so no enumeration over F_q^k is
/// needed and the result does not depend on the chi law. Deterministic given
/// (seed, num_samples); samples are split by index.
BetheEstimate bethe_at_alpha(const EnsembleSpec& ens, double alpha, std::size_t num_samples,
                             std::uint64_t seed);

} // namespace ffrank
