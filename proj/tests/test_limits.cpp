#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bondsim/limits.hpp"

using namespace bondsim;

namespace {
ModelParams base() {
    ModelParams p;
    p.u = 2.0;
    p.gamma = 0.5;
    p.c = 1.0;
    p.r = 0.5;
    p.d = 1.0;
    p.alpha = 0.5;
    p.a = 0.05;
    return p;
}

// drift minimized at nbar = u/gamma with value c - (d-r)^2/(alpha d gamma)
ModelParams tuned(double c, double r, double d, double alpha, double gamma) {
    ModelParams p;
    p.r = r;
    p.d = d;
    p.alpha = alpha;
    p.gamma = gamma;
    p.c = c;
    p.u = (1.0 - r / d) / alpha;
    p.a = 0.1;
    return p;
}
} // namespace

TEST_CASE("drift and its derivatives at hand-checkable points") {
    auto p = base();
    CHECK(F_eval(0.0, p).F == Catch::Approx(p.c));
    CHECK(F_eval(0.0, p).dF == Catch::Approx(p.r - p.d * std::exp(p.alpha * p.u)));
    const double infl = 2.0 / (p.alpha * p.gamma);
    CHECK(F_eval(infl, p).d2F == Catch::Approx(0.0).margin(1e-14));
    // central-difference cross-check
    const double h = 1e-6, n = 1.7;
    CHECK(F_eval(n, p).dF ==
          Catch::Approx((F_eval(n + h, p).F - F_eval(n - h, p).F) / (2 * h)).epsilon(1e-7));
    CHECK(F_eval(n, p).d2F ==
          Catch::Approx((F_eval(n + h, p).dF - F_eval(n - h, p).dF) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("ode path stays put at an equilibrium") {
    ModelParams p;
    p.u = 10.0;
    p.gamma = 0.3;
    p.c = 4.0;
    p.r = 5.0;
    p.d = 3.0;
    p.alpha = 0.1;
    p.u_star = 1.0; // creation off
    auto rep = classify_equilibria(p);
    REQUIRE(rep.equilibria.size() == 2);
    const double e2 = rep.equilibria[1].value;
    auto traj = ode_integrate(p, e2, 5.0, 1e-3);
    CHECK(traj.states.back() == Catch::Approx(e2).epsilon(1e-8));
}

TEST_CASE("ode from zero with creation off is identically zero") {
    auto p = base();
    p.u_star = 1.0; // u = 2 > u_star
    auto traj = ode_integrate(p, 0.0, 3.0, 1e-3);
    for (double n : traj.states) CHECK(n == 0.0);
}

TEST_CASE("ode self-convergence under step halving") {
    auto p = base();
    const double c1 = ode_integrate(p, 0.0, 4.0, 1e-2).states.back();
    const double c2 = ode_integrate(p, 0.0, 4.0, 5e-3).states.back();
    const double c3 = ode_integrate(p, 0.0, 4.0, 2.5e-3).states.back();
    CHECK(std::abs(c2 - c3) < std::abs(c1 - c2) + 1e-14);
    CHECK(std::abs(c1 - c2) < 1e-8);
}

TEST_CASE("equilibria: creation off, two states") {
    ModelParams p;
    p.u = 10.0;
    p.gamma = 0.3;
    p.c = 4.0;
    p.r = 5.0;
    p.d = 3.0;
    p.alpha = 0.1;
    p.u_star = 1.0;
    auto rep = classify_equilibria(p);
    CHECK(rep.case_label == "no_creation_two_states");
    REQUIRE(rep.equilibria.size() == 2);
    CHECK(rep.equilibria[0].value == 0.0);
    CHECK(rep.equilibria[0].stability == Stability::stable);
    const double expected = p.u / p.gamma - std::log(p.r / p.d) / (p.alpha * p.gamma);
    CHECK(rep.equilibria[1].value == Catch::Approx(expected).epsilon(1e-12));
    CHECK(rep.equilibria[1].stability == Stability::unstable);
    for (const auto& e : rep.equilibria) CHECK(std::abs(F_eval(e.value, p).F) < 1e-9);
}

TEST_CASE("equilibria: creation off, zero only") {
    ModelParams p;
    p.u = 1.0;
    p.gamma = 0.3;
    p.c = 4.0;
    p.r = 5.0;
    p.d = 3.0;
    p.alpha = 0.1;
    p.u_star = 0.5; // u > u_star and u < log(r/d)/alpha ~ 5.1
    auto rep = classify_equilibria(p);
    CHECK(rep.case_label == "no_creation_zero_only");
    REQUIRE(rep.equilibria.size() == 1);
    CHECK(rep.equilibria[0].value == 0.0);
}

TEST_CASE("equilibria: creation with slow flow diverges") {
    ModelParams p;
    p.u = 2.0;
    p.gamma = 0.3;
    p.c = 4.0;
    p.r = 5.0;
    p.d = 3.0;
    p.alpha = 0.1; // u <= log(r/d)/alpha
    auto rep = classify_equilibria(p);
    CHECK(rep.case_label == "creation_unbounded");
    REQUIRE(rep.equilibria.size() == 1);
    CHECK(std::isinf(rep.equilibria[0].value));
    CHECK(rep.equilibria[0].stability == Stability::stable);
}

TEST_CASE("equilibria: tuned flow puts the drift minimum at u/gamma") {
    const double r = 0.6, d = 0.7, alpha = 0.8, gamma = 0.5;
    const double c_crit = (d - r) * (d - r) / (alpha * d * gamma);
    for (double c : {2.0 * c_crit, c_crit, 0.5 * c_crit}) {
        auto p = tuned(c, r, d, alpha, gamma);
        auto rep = classify_equilibria(p);
        REQUIRE(std::isfinite(rep.nbar));
        CHECK(rep.nbar == Catch::Approx(p.u / p.gamma).epsilon(1e-10));
        CHECK(rep.F_at_nbar == Catch::Approx(c - c_crit).margin(1e-12));
    }
    CHECK(classify_equilibria(tuned(2.0 * c_crit, r, d, alpha, gamma)).case_label ==
          "creation_above_minimum");
    CHECK(classify_equilibria(tuned(0.5 * c_crit, r, d, alpha, gamma)).case_label ==
          "creation_bistable");
    // the tangent case is a measure-zero set; allow a hair of slack
    auto rep = classify_equilibria(tuned(c_crit, r, d, alpha, gamma));
    CHECK((rep.case_label == "creation_tangent" || std::abs(rep.F_at_nbar) < 1e-12));
}

TEST_CASE("equilibria: bistable case has two finite roots straddling nbar") {
    const double r = 0.6, d = 0.7, alpha = 0.8, gamma = 0.5;
    const double c_crit = (d - r) * (d - r) / (alpha * d * gamma);
    auto p = tuned(0.25 * c_crit, r, d, alpha, gamma);
    auto rep = classify_equilibria(p);
    REQUIRE(rep.equilibria.size() == 2);
    CHECK(rep.equilibria[0].value < rep.nbar);
    CHECK(rep.equilibria[1].value > rep.nbar);
    CHECK(rep.equilibria[0].stability == Stability::stable);
    CHECK(rep.equilibria[1].stability == Stability::unstable);
    for (const auto& e : rep.equilibria) CHECK(std::abs(F_eval(e.value, p).F) < 1e-9);
}

TEST_CASE("equilibria: constant-rate degeneracy") {
    ModelParams p;
    p.u = 1.0;
    p.gamma = 1.0;
    p.c = 4.0;
    p.r = 3.0;
    p.d = 5.0;
    p.alpha = 0.0;
    auto rep = classify_equilibria(p);
    CHECK(rep.case_label == "degenerate_linear");
    REQUIRE(rep.equilibria.size() == 1);
    CHECK(rep.equilibria[0].value == Catch::Approx(2.0));
    CHECK(rep.equilibria[0].stability == Stability::stable);
}

TEST_CASE("renormalized process at K=1 reproduces the plain chain") {
    auto p = base();
    ScalingRegime reg{RegimeKind::non_accelerated, 1, 1.0};
    auto a = simulate_renormalized(p, reg, 2.0, 3.0, 314);
    auto b = simulate_ssa(p, 2, 3.0, false, 314);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.times[i] == b.times[i]);
        CHECK(a.states[i] == b.states[i]);
    }
}

TEST_CASE("renormalized lattice spacing is 1/K") {
    auto p = base();
    ScalingRegime reg{RegimeKind::accelerated_creation, 50, 1.0};
    auto traj = simulate_renormalized(p, reg, 0.5, 0.2, 7);
    for (std::size_t i = 1; i < traj.size(); ++i)
        CHECK(std::abs(traj.states[i] - traj.states[i - 1]) == Catch::Approx(1.0 / 50.0));
}

TEST_CASE("accelerated-creation paths approach the ode as K grows") {
    auto p = base();
    auto ode = ode_integrate(p, 0.0, 2.0, 1e-4);
    std::vector<double> grid;
    for (int i = 1; i <= 40; ++i) grid.push_back(2.0 * i / 40.0);
    double prev_err = std::numeric_limits<double>::infinity();
    for (long K : {10L, 100L, 1000L}) {
        ScalingRegime reg{RegimeKind::accelerated_creation, K, 1.0};
        double acc = 0.0;
        const int n_rep = 30;
        for (int rep = 0; rep < n_rep; ++rep) {
            auto traj = simulate_renormalized(p, reg, 0.0, 2.0, Rng::stream_seed(21, rep));
            double sup = 0.0;
            for (double t : grid) sup = std::max(sup, std::abs(traj.value_at(t) - ode.value_at(t)));
            acc += sup;
        }
        const double err = acc / n_rep;
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 0.1);
}

TEST_CASE("non-accelerated limit drops the creation term") {
    auto p = base();
    auto ode = ode_integrate(p, 1.0, 2.0, 1e-4, /*include_creation=*/false);
    ScalingRegime reg{RegimeKind::non_accelerated, 2000, 1.0};
    double acc = 0.0;
    const int n_rep = 20;
    for (int rep = 0; rep < n_rep; ++rep) {
        auto traj = simulate_renormalized(p, reg, 1.0, 2.0, Rng::stream_seed(77, rep));
        acc += std::abs(traj.value_at(2.0) - ode.value_at(2.0));
    }
    CHECK(acc / n_rep < 0.05);
}
