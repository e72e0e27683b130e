#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ffrank/analytic.hpp"
#include "ffrank/harness.hpp"

using namespace ffrank;

namespace {

EnsembleSpec regular33() { return regular_3_3_ensemble(); }

EnsembleSpec make_ens(const std::string& d, const std::string& k) {
    return parse_ensemble("q=2;d=" + d + ";k=" + k);
}

// Brute-force maximizer on a dense uniform grid.
MaxPhi grid_max(const EnsembleSpec& ens, std::size_t points) {
    MaxPhi best{0.0, phi(ens, 0.0)};
    for (std::size_t i = 1; i < points; ++i) {
        const double a = static_cast<double>(i) / static_cast<double>(points - 1);
        const double v = phi(ens, a);
        if (v > best.value) {
            best.value = v;
            best.alpha_star = a;
        }
    }
    return best;
}

std::map<int, double> random_pmf(Rng& rng, int min_degree, int max_degree, int atoms) {
    std::map<int, double> pmf;
    std::uniform_int_distribution<int> deg(min_degree, max_degree);
    std::uniform_real_distribution<double> mass(0.05, 1.0);
    double total = 0.0;
    while (static_cast<int>(pmf.size()) < atoms) {
        const int d = deg(rng);
        if (!pmf.count(d)) {
            pmf[d] = mass(rng);
            total += pmf[d];
        }
    }
    for (auto& [d, p] : pmf) p /= total;
    return pmf;
}

} // namespace

TEST_CASE("phi closed-form values") {
    CHECK(phi(mixed_3_15_ensemble(), 0.0) == doctest::Approx(0.0).epsilon(1e-15));

    // K(0)=K'(0)=0 for min check degree >= 3, so phi(0) = 1 - d/k
    const auto ens = make_ens("tpoisson:ell=1,lambda=2.0", "point:4");
    CHECK(phi(ens, 0.0) ==
          doctest::Approx(1.0 - ens.ddist.mean() / ens.kdist.mean()).epsilon(1e-14));

    CHECK(phi(regular33(), 0.5) == doctest::Approx(-0.078125).epsilon(1e-15));
    CHECK_THROWS_AS(phi(regular33(), 1.5), DomainError);
}

TEST_CASE("phi_small closed-form values") {
    CHECK(phi_small(make_ens("point:2", "point:5"), 0.0) == doctest::Approx(0.0).epsilon(1e-14));

    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    CHECK(phi_small(regular33(), golden) == doctest::Approx(0.0).epsilon(1e-12));

    // phi_small(1) = -D'(0)/d, zero when P[d=1]=0
    CHECK(phi_small(regular33(), 1.0) == 0.0);
    const auto with_leaves = make_ens("explicit:1=0.25,3=0.75", "point:3");
    CHECK(phi_small(with_leaves, 1.0) ==
          doctest::Approx(-0.25 / with_leaves.ddist.mean()).epsilon(1e-13));
}

TEST_CASE("phi_small derivative matches central differences") {
    for (const auto& ens :
         {regular33(), mixed_3_15_ensemble(), make_ens("tpoisson:ell=1,lambda=3.0", "point:3")}) {
        for (double a : {0.15, 0.4, 0.65, 0.9}) {
            const double h = 1e-6;
            const double fd = (phi_small(ens, a + h) - phi_small(ens, a - h)) / (2 * h);
            CHECK(phi_small_derivative(ens, a) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("rho: stationary-point location") {
    // phi_small(1) = 0 exactly for min variable degree >= 2, so rho = 1 for
    // the regular and reference mixtures.
    CHECK(rho(regular33()) == doctest::Approx(1.0));
    CHECK(rho(mixed_3_15_ensemble()) == doctest::Approx(1.0));
    CHECK(rho(heavy_3_200_ensemble()) == doctest::Approx(1.0));

    // With P[d=1] > 0 the top zero is a strict crossing.
    const auto sub = make_ens("tpoisson:ell=1,lambda=1.5", "point:3");
    CHECK(rho(sub) == doctest::Approx(0.0).epsilon(1e-9)); // subcritical: collapses

    const auto super = make_ens("tpoisson:ell=1,lambda=3.5", "point:3");
    const double r = rho(super);
    CHECK(r > 0.5);
    CHECK(phi_small(super, r) == doctest::Approx(0.0).epsilon(1e-10));
    // Phi'(rho) = 0 via finite differences of phi
    const double h = 1e-6;
    CHECK((phi(super, r + h) - phi(super, r - h)) / (2 * h) ==
          doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("max_phi against the brute-force grid oracle") {
    const auto cases = {
        mixed_3_15_ensemble(),
        heavy_3_200_ensemble(),
        regular33(),
        make_ens("point:1", "point:3"),
        make_ens("tpoisson:ell=1,lambda=3.0", "point:3"),
    };
    for (const auto& ens : cases) {
        const MaxPhi fast = max_phi(ens);
        const MaxPhi slow = grid_max(ens, 1000001);
        CHECK(fast.value >= slow.value - 1e-10);
        CHECK(std::abs(fast.value - slow.value) < 1e-8);
    }
}

TEST_CASE("max_phi special cases") {
    const MaxPhi reg = max_phi(regular33());
    CHECK(reg.alpha_star == doctest::Approx(0.0));
    CHECK(reg.value == doctest::Approx(0.0).epsilon(1e-12));

    const MaxPhi triv = max_phi(make_ens("point:1", "point:3"));
    CHECK(triv.alpha_star == doctest::Approx(0.0));
    CHECK(triv.value == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    const MaxPhi mixed = max_phi(mixed_3_15_ensemble());
    CHECK(mixed.value > 1e-4);
    CHECK(mixed.alpha_star > 0.0);
    CHECK(mixed.alpha_star < 1.0);

    CHECK(rank_limit(mixed_3_15_ensemble()) == doctest::Approx(1.0 - mixed.value));
    CHECK(ldpc_rate(mixed_3_15_ensemble()) == doctest::Approx(mixed.value));
    CHECK(rank_limit(regular33()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("phi endpoint identities across randomized explicit ensembles") {
    Rng rng(20240811);
    for (int rep = 0; rep < 20; ++rep) {
        const auto dd = DegreeDistribution::explicit_pmf(random_pmf(rng, 1, 12, 3));
        const auto kk = DegreeDistribution::explicit_pmf(random_pmf(rng, 3, 12, 3));
        EnsembleSpec ens{Field(2), dd, kk, ChiSpec::uniform(), 0, GraphMode::Simple};
        CHECK(std::abs(phi(ens, 0.0) - (1.0 - dd.mean() / kk.mean())) <= 1e-12);
        CHECK(std::abs(phi(ens, 1.0) - 0.0) <= 1e-12); // P[d=0] = 0 always
    }
}

TEST_CASE("sign of Phi' equals sign of phi_small where K'' > 0") {
    const auto cases = {regular33(), mixed_3_15_ensemble(),
                        make_ens("tpoisson:ell=1,lambda=3.0", "point:3")};
    for (const auto& ens : cases) {
        for (int i = 1; i < 40; ++i) {
            const double a = static_cast<double>(i) / 40.0;
            const double h = 1e-7;
            const double dphi = (phi(ens, a + h) - phi(ens, a - h)) / (2 * h);
            const double ps = phi_small(ens, a);
            if (std::abs(ps) > 1e-6) CHECK((dphi > 0) == (ps > 0));
        }
    }
}

TEST_CASE("max_phi dominates random evaluations") {
    const auto ens = heavy_3_200_ensemble();
    const MaxPhi best = max_phi(ens);
    Rng rng(99);
    for (int i = 0; i < 10000; ++i) {
        const double a = uniform_unit(rng);
        CHECK(phi(ens, a) <= best.value + 1e-12);
    }
}

TEST_CASE("core fractions") {
    // rho = 0 cases evaluate to zero
    const auto sub = make_ens("tpoisson:ell=1,lambda=1.5", "point:3");
    const auto [v0, c0] = core_fractions(sub);
    CHECK(v0 == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(c0 == doctest::Approx(0.0).epsilon(1e-9));

    // min degree >= 2 everywhere: nothing peels, rho = 1 and the display
    // evaluates to the full graph
    const auto [v1, c1] = core_fractions(regular33());
    CHECK(v1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c1 == doctest::Approx(1.0).epsilon(1e-12));

    // The same display evaluated at the golden crossing reproduces the
    // hand-computed constants (rho^2 = 1 - rho).
    {
        const EnsembleSpec ens = regular33();
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        const double u = ens.kdist.pgf(g, 1) / ens.kdist.mean();
        const double nv = 1.0 - ens.ddist.pgf(1.0 - u, 0) - u * ens.ddist.pgf(1.0 - u, 1);
        const double mv = ens.ddist.mean() / ens.kdist.mean() * ens.kdist.pgf(g, 0);
        CHECK(nv == doctest::Approx(0.326238).epsilon(1e-5));
        CHECK(mv == doctest::Approx(0.236068).epsilon(1e-5));
    }
}

TEST_CASE("density evolution") {
    // stationary at 1 when P[d=1] = 0 (D'(0) = 0)
    const auto de_reg = density_evolution(regular33(), 1000, 1e-12);
    CHECK(de_reg.rho_de == doctest::Approx(1.0));
    CHECK(de_reg.iterations == 1);
    CHECK(de_reg.lambda_de == doctest::Approx(1.0));

    const auto de_mixed = density_evolution(mixed_3_15_ensemble(), 1000, 1e-12);
    CHECK(de_mixed.rho_de == doctest::Approx(1.0));

    // subcritical: collapses to zero; oracle is direct iteration of the map
    const auto sub = make_ens("tpoisson:ell=1,mean=2.0", "point:3");
    const auto de_sub = density_evolution(sub, 100000, 1e-12);
    double x = 1.0;
    for (int t = 0; t < de_sub.iterations; ++t)
        x = 1.0 - sub.ddist.pgf(1.0 - sub.kdist.pgf(x, 1) / sub.kdist.mean(), 1) /
                      sub.ddist.mean();
    CHECK(de_sub.rho_de == doctest::Approx(x).epsilon(1e-12));
    CHECK(de_sub.rho_de < 1e-6);

    // the stated closed-form collapse map behaves the same way
    double y = 1.0;
    for (int t = 0; t < 200; ++t) y = 1.0 - std::exp(-2.0 * y * y);
    CHECK(y < 1e-6);

    CHECK_THROWS_AS(density_evolution(make_ens("tpoisson:ell=1,lambda=3.5", "point:3"), 2, 1e-14),
                    NonConvergence);
}

TEST_CASE("density evolution fixed point equals rho when phi'(rho) < 0") {
    const std::vector<std::pair<std::string, std::string>> laws = {
        {"tpoisson:ell=1,lambda=3.0", "point:3"},
        {"tpoisson:ell=1,lambda=3.5", "point:3"},
        {"tpoisson:ell=1,lambda=4.0", "point:4"},
        {"explicit:1=0.3,4=0.7", "point:3"},
        {"tpoisson:ell=1,lambda=1.2", "point:3"},
        {"point:3", "point:3"},
    };
    for (const auto& [d, k] : laws) {
        const auto ens = make_ens(d, k);
        const auto rep = tightness_report(ens);
        if (!(rep.phi_small_deriv_at_rho < 0.0)) continue;
        const auto de = density_evolution(ens, 100000, 1e-13);
        CHECK(std::abs(de.rho_de - rho(ens)) < 1e-8);
    }
}

TEST_CASE("tightness report") {
    const auto reg = tightness_report(regular33());
    CHECK(reg.tight == Tightness::Yes);
    CHECK_FALSE(reg.exception_flag); // 2(k-1)P[d=2] = 0, not > 3
    CHECK(reg.phi_small_deriv_at_rho < 0.0);

    const auto d2 = tightness_report(make_ens("point:2", "point:3"));
    CHECK(d2.exception_flag); // 2*2*1 = 4 > 2

    const auto mixed = tightness_report(mixed_3_15_ensemble());
    CHECK(mixed.tight == Tightness::Unknown);

    const auto tp = tightness_report(make_ens("tpoisson:ell=1,lambda=3.0",
                                              "tpoisson:ell=3,lambda=4.0"));
    CHECK(tp.tight == Tightness::Yes);
}

TEST_CASE("analytic report invariants") {
    for (const auto& ens : {regular33(), mixed_3_15_ensemble(),
                            make_ens("tpoisson:ell=1,lambda=3.0", "point:3")}) {
        const AnalyticReport rep = analyze(ens);
        CHECK(rep.rank_limit + rep.rate == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(rep.phi_max >= rep.phi_at_zero - 1e-12);
        CHECK(rep.phi_max >= rep.phi_at_rho - 1e-12);
        CHECK(rep.rho >= 0.0);
        CHECK(rep.rho <= 1.0);
        CHECK(rep.core_var_fraction >= 0.0);
        CHECK(rep.core_var_fraction <= 1.0);
        CHECK(rep.core_check_fraction >= 0.0);
    }
}

TEST_CASE("analytic report does not depend on chi") {
    auto a = make_ens("tpoisson:ell=1,lambda=3.0", "point:3");
    auto b = a;
    a.field = Field(9);
    b.field = Field(9);
    b.chi = ChiSpec::fixed(b.field.element(5));
    const AnalyticReport ra = analyze(a);
    const AnalyticReport rb = analyze(b);
    CHECK(ra.phi_max == rb.phi_max);
    CHECK(ra.alpha_star == rb.alpha_star);
    CHECK(ra.rho == rb.rho);
    CHECK(ra.rank_limit == rb.rank_limit);
    CHECK(ra.core_var_fraction == rb.core_var_fraction);
    CHECK(ra.core_check_fraction == rb.core_check_fraction);
}

TEST_CASE("Bethe estimator agrees with phi") {
    const std::uint64_t seed = 0xb000;
    for (const auto& ens : {regular33(), mixed_3_15_ensemble()}) {
        for (double a : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const BetheEstimate est = bethe_at_alpha(ens, a, 200000, seed);
            const double target = phi(ens, a);
            const double slack = std::max(3.0 * est.std_error, 1e-12);
            CHECK(std::abs(est.value - target) <= slack);
        }
    }
    // all-frozen limit: zero-variance estimator, exact value P[d=0] = 0
    const BetheEstimate frozen = bethe_at_alpha(regular33(), 1.0, 100, seed);
    CHECK(frozen.value == 0.0);
    CHECK(frozen.std_error == 0.0);

    // deterministic given (seed, num_samples)
    const BetheEstimate e1 = bethe_at_alpha(mixed_3_15_ensemble(), 0.5, 5000, 42);
    const BetheEstimate e2 = bethe_at_alpha(mixed_3_15_ensemble(), 0.5, 5000, 42);
    CHECK(e1.value == e2.value);
    CHECK(e1.std_error == e2.std_error);
}
