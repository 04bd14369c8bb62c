#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "cqm/closed_form.hpp"
#include "cqm/errors.hpp"

using namespace cqm;

namespace {

ModelParams params(double g, double lambda) {
    ModelParams p;
    p.g = g;
    p.lambda = lambda;
    p.Omega = 1000.0;
    return p;
}

// Var[P^2 - zeta X^2] by explicit matrices in a space large enough that the
// truncated products are exact on the state's support.
double brute_force_variance(const Eigen::VectorXcd& state, double zeta) {
    const int dim = static_cast<int>(state.size()) + 4;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    const Eigen::MatrixXcd ad = a.adjoint();
    const Eigen::MatrixXcd x = (a + ad) / std::sqrt(2.0);
    const Eigen::MatrixXcd p = std::complex<double>(0, 1) * (ad - a) / std::sqrt(2.0);
    const Eigen::MatrixXcd op = p * p - zeta * x * x;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    psi.head(state.size()) = state;
    const auto mean = psi.dot(op * psi);
    const auto second = psi.dot(op * op * psi);
    return (second - mean * mean).real();
}

}  // namespace

TEST_CASE("initial state construction") {
    const auto s = BosonInitialState::superposition_01();
    CHECK(s.n_max() == 5);
    CHECK(s.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-15));
    Eigen::VectorXcd bad(2);
    bad << 1.0, 1.0;
    CHECK_THROWS_AS(BosonInitialState{bad}, InvalidParams);
    CHECK_THROWS_AS((void)BosonInitialState::superposition_01().padded(1), CutoffTooSmall);
    CHECK(BosonInitialState::fock(2, 6).padded(10)(2) == std::complex<double>(1.0, 0.0));
}

TEST_CASE("critical-state quadratic variance is 5/4") {
    const auto s = BosonInitialState::superposition_01();
    CHECK(brute_force_variance(s.amplitudes(), 0.0) == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(quadratic_variance(s, 0.0) == doctest::Approx(1.25).epsilon(1e-14));
    // 1 / (2 Var) -> 0.4 as eps_g -> 0
    auto p = params(0.0, 0.0);
    p.g = std::sqrt(1.0 - 1e-9);
    CHECK(ig_fg_ratio(s, p) == doctest::Approx(0.4).epsilon(1e-6));
}

TEST_CASE("quadratic variance matches explicit matrices for random states") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> zd(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(8);
        for (int n = 0; n < 6; ++n) {
            v(n) = {nd(rng), nd(rng)};
        }
        v.normalize();
        const double zeta = zd(rng);
        CHECK(quadratic_variance(BosonInitialState(v), zeta) ==
              doctest::Approx(brute_force_variance(v, zeta)).epsilon(1e-12));
    }
    Eigen::VectorXcd top = Eigen::VectorXcd::Zero(6);
    top(5) = 1.0;
    CHECK_THROWS_AS((void)quadratic_variance(BosonInitialState(top), 0.1), CutoffTooSmall);
}

TEST_CASE("quadrature closed forms against an independent evaluation") {
    // mpmath, 50 digits, Heisenberg solution with numerical d/dg
    struct Ref {
        double lambda, g, t, x, dx, var, inv;
    };
    const Ref refs[] = {
        {0.0, 0.9, 5.0, 1.3308951073141836, 15.879706853712102, 2.098194707737156,
         120.1819301278212},
        {-0.2475, 0.099, 100.0, 4.9484251805802529, 1900.9087542528115, 24.51233267944224,
         147413.71779053372},
        {-0.247, 0.1, 37.0, 1.7259591223085328, 98.305897865831654, 2.985956594586694,
         3236.5003472346154},
    };
    for (const auto& r : refs) {
        const auto p = params(r.g, r.lambda);
        CHECK(x_mean(p, r.t) == doctest::Approx(r.x).epsilon(1e-11));
        CHECK(x_deriv_g(p, r.t) == doctest::Approx(r.dx).epsilon(1e-10));
        CHECK(x_variance(p, r.t) == doctest::Approx(r.var).epsilon(1e-11));
        CHECK(inverted_variance(p, r.t) == doctest::Approx(r.inv).epsilon(1e-10));
        const auto q = quadrature_sample(p, r.t);
        CHECK(q.inv_var == doctest::Approx(q.x_deriv_g * q.x_deriv_g / q.x_var).epsilon(1e-12));
    }
}

TEST_CASE("trivial limits") {
    const auto p = params(0.9, 0.0);
    CHECK(x_mean(p, 0.0) == 0.0);
    CHECK(x_deriv_g(p, 0.0) == 0.0);
    CHECK(x_variance(p, 0.0) == 1.0);
    CHECK(inverted_variance(p, 0.0) == 0.0);
    const auto s = BosonInitialState::superposition_01();
    CHECK(qfi_g(p, 0.0, var_n(s, p)).value == 0.0);
    // eps_g = 1 at g = 0: unit variance and no sensitivity at the first order
    CHECK(x_variance(params(0.0, 0.0), 3.3) == doctest::Approx(1.0 + (0.5 - 1.0) * std::pow(std::sin(3.3), 2)));
}

TEST_CASE("optimal times and peaks") {
    const auto p = params(0.9, 0.0);
    const auto taus = optimal_times(p, 50);
    CHECK(taus.front() == doctest::Approx(7.2073078414566795).epsilon(1e-14));
    CHECK(inverted_variance_peak(p, 1) == doctest::Approx(582.76567756833215).epsilon(1e-13));
    for (const auto& q : {params(0.9, 0.0), params(0.1, -0.247), params(0.099, -0.2475)}) {
        const auto ts = optimal_times(q, 50);
        for (int n = 1; n <= 50; ++n) {
            CHECK(inverted_variance(q, ts[n - 1]) ==
                  doctest::Approx(inverted_variance_peak(q, n)).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS((void)optimal_times(p, 0), InvalidParams);
}

TEST_CASE("closed-form ratio at the optimal times is the analytic ratio") {
    const auto s = BosonInitialState::superposition_01();
    for (const auto& q : {params(0.9, 0.0), params(0.1, -0.247), params(0.099, -0.2475)}) {
        const auto ts = optimal_times(q, 20);
        const double expected = ig_fg_ratio(s, q);
        for (int n = 1; n <= 20; ++n) {
            const double ratio = inverted_variance(q, ts[n - 1]) / qfi_g(q, ts[n - 1], var_n(s, q)).value;
            CHECK(ratio == doctest::Approx(expected).epsilon(1e-10));
        }
    }
}

TEST_CASE("variance identity holds on a parameter grid") {
    for (int i = 0; i < 20; ++i) {
        const double lambda = -0.24 + 0.05 * i;
        const double gc = std::sqrt(1.0 + 4.0 * lambda);
        for (int j = 1; j < 20; ++j) {
            const auto p = params(gc * j / 20.0, lambda);
            for (int k = 0; k < 20; ++k) {
                const double t = 0.5 + 7.3 * k;
                const double m = x_mean(p, t);
                CHECK(x2_mean(p, t) - m * m == doctest::Approx(x_variance(p, t)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("qfi grows near the critical point") {
    const auto s = BosonInitialState::superposition_01();
    double previous = 0.0;
    for (double g : {0.097, 0.098, 0.099}) {
        const auto p = params(g, -0.2475);
        const double f = qfi_g(p, 1000.0, var_n(s, p)).value;
        CHECK(f > previous);
        previous = f;
    }
}

TEST_CASE("qfi along a line of fixed eps_g depends on lambda only through omega_bar") {
    // omega_bar^2 F_g / (1 - eps_g) at t = T / omega_bar is a function of (eps_g, T) alone
    const auto s = BosonInitialState::superposition_01();
    for (double eps_g : {0.2, 0.05, 0.01}) {
        double reference = 0.0;
        for (double lambda : {0.0, -0.2, -0.2475, 0.3}) {
            const double wb2 = 1.0 + 4.0 * lambda;
            const auto p = params(std::sqrt(wb2 * (1.0 - eps_g)), lambda);
            const double t = 50.0 / std::sqrt(wb2);
            const double scaled = wb2 * qfi_g(p, t, var_n(s, p)).value / (1.0 - eps_g);
            if (lambda == 0.0) {
                reference = scaled;
            } else {
                CHECK(scaled == doctest::Approx(reference).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("regime checks") {
    const auto s = BosonInitialState::superposition_01();
    CHECK_THROWS_AS((void)x_mean(params(1.0, 0.0), 1.0), RegimeError);
    CHECK_THROWS_AS((void)x_mean(params(1.2, 0.0), 1.0), RegimeError);
    CHECK_THROWS_AS((void)qfi_g(params(1.2, 0.0), 1.0, 1.0), RegimeError);
    CHECK_THROWS_AS((void)qfi_g_beyond(params(0.9, 0.0), 1.0, 1.0), RegimeError);
    CHECK_THROWS_AS((void)var_n_beyond(s, params(0.9, 0.0)), RegimeError);
    CHECK_THROWS_AS((void)x_deriv_g_beyond(params(0.9, 0.0), 1.0), RegimeError);
    CHECK_THROWS_AS((void)qfi_g(params(0.9, 0.0), 1.0, -1.0), InvalidParams);
}

TEST_CASE("series branches are continuous") {
    for (double x : {0.05}) {
        const double below = std::nextafter(x, 0.0);
        CHECK(sine_deficit_over_cube(below) == doctest::Approx(sine_deficit_over_cube(x)).epsilon(1e-13));
        CHECK(sine_cosine_bracket_over_cube(below) ==
              doctest::Approx(sine_cosine_bracket_over_cube(x)).epsilon(1e-13));
    }
    CHECK(sine_deficit_over_cube(0.0) == doctest::Approx(1.0 / 6.0));
    CHECK(sine_cosine_bracket_over_cube(0.0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("beyond-critical quadrature forms") {
    const auto p = params(1.3, 0.0);
    CHECK(x_variance_beyond(p, 0.0) == 1.0);
    CHECK(x_mean_beyond(p, 0.0) == 0.0);
    for (double t : {0.7, 3.0, 12.5}) {
        const double h = 1e-6;
        const double fd = (x_mean_beyond(p.with_g(1.3 + h), t) - x_mean_beyond(p.with_g(1.3 - h), t)) / (2 * h);
        CHECK(x_deriv_g_beyond(p, t) == doctest::Approx(fd).epsilon(1e-7));
        const auto q = quadrature_sample_beyond(p, t);
        CHECK(q.inv_var == doctest::Approx(q.x_deriv_g * q.x_deriv_g / q.x_var).epsilon(1e-14));
    }
    const auto s = BosonInitialState::superposition_01();
    CHECK(qfi_g_beyond(p, 100.0, var_n_beyond(s, p)).value > 0.0);
}
