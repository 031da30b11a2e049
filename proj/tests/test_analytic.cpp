#include <catch_amalgamated.hpp>

#include <complex>
#include <numbers>
#include <random>

#include "test_helpers.hpp"

using namespace dephase;
using Catch::Approx;
using dephase::testing::beta_for_delta2;
using dephase::testing::reservoir_of;
using dephase::testing::simple_model;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("mode factor basics") {
    std::mt19937 rng(7);
    SECTION("normalization at u = 0 and |g| <= 1") {
        for (int trial = 0; trial < 30; ++trial) {
            const auto mode = testing::random_mode(rng);
            CHECK(std::abs(mode_factor(mode, 1.0, 0.0) - Cplx(1.0, 0.0)) <= 1e-13);
            std::uniform_real_distribution<double> upick(-12.0, 12.0);
            for (double y : {0.5, 1.0, 2.0, 1.3}) {
                const double u = upick(rng);
                CHECK(std::abs(mode_factor(mode, y, u)) <= 1.0 + 1e-12);
            }
        }
    }
    SECTION("thermal mode reproduces the geometric closed form") {
        const double beta = 0.6;
        const auto mode = make_thermal_mode(beta, 1e-16);
        const double q = std::exp(-beta);
        for (double u : {0.05, 0.4, 1.3, 2.9, 3.14, 5.5}) {
            const Cplx g = mode_factor(mode, 1.0, u);
            const Cplx expected = (1.0 - q) / (1.0 - q * Cplx(std::cos(u), -std::sin(u)));
            CHECK(std::abs(g - expected) <= 1e-13);
            // |g|^2 equals the closed-form bracket
            const double bracket = (1.0 - q) * (1.0 - q) / (1.0 + q * q - 2.0 * q * std::cos(u));
            CHECK(std::norm(g) == Approx(bracket).margin(1e-13));
        }
    }
    SECTION("uniform mode gives the Dirichlet kernel") {
        const auto mode = make_phase_state_mode(10, 0);
        CHECK(std::abs(mode_factor(mode, 1.0, 0.3)) ==
              Approx(0.6064321869909682).margin(1e-13));
        for (double u : {0.1, 0.7, 2.2, 4.9}) {
            const double expected = std::abs(std::sin(11.0 * u / 2.0) / (11.0 * std::sin(u / 2.0)));
            CHECK(std::abs(mode_factor(mode, 1.0, u)) == Approx(expected).margin(1e-13));
        }
    }
    SECTION("factorization identity against the raw double sum") {
        std::mt19937 gen(20240812);
        std::uniform_real_distribution<double> upick(-8.0, 8.0);
        for (int trial = 0; trial < 25; ++trial) {
            const auto mode = testing::random_mode(gen, 10);
            for (double y : {0.5, 1.0, 2.0}) {
                const double u = upick(gen);
                const auto powers = std::vector<double>([&] {
                    std::vector<double> p(static_cast<size_t>(mode.dim));
                    for (int n = 0; n < mode.dim; ++n) p[static_cast<size_t>(n)] = std::pow(n, y);
                    return p;
                }());
                double direct = 0.0;
                for (int r = 0; r < mode.dim; ++r)
                    for (int s = 0; s < mode.dim; ++s)
                        direct += mode.probs[static_cast<size_t>(r)] * mode.probs[static_cast<size_t>(s)] *
                                  std::cos(u * (powers[static_cast<size_t>(r)] - powers[static_cast<size_t>(s)]));
                CHECK(direct == Approx(std::norm(mode_factor(mode, y, u))).margin(1e-14));
            }
        }
    }
}

TEST_CASE("linear entropy of the exact model") {
    const SystemState sys = make_superposition_system();

    SECTION("pure product state at t = 0") {
        auto model = simple_model({Rational{1, 10}});
        const auto res = reservoir_of({make_thermal_mode(0.7)});
        CHECK(std::abs(linear_entropy(model, sys, res, 0.0)) <= 1e-13);
    }
    SECTION("single thermal mode matches the closed form to 1e-12") {
        auto model = simple_model({Rational{1, 10}});
        const double beta = 0.7;
        const auto res = reservoir_of({make_thermal_mode(beta, 1e-16)});
        for (int i = 0; i < 100; ++i) {
            const double t = 0.7 * i;
            const double direct = linear_entropy(model, sys, res, t);
            const double closed = thermal_linear_entropy(1, beta, 0.1, 1.0, t);
            CHECK(std::abs(direct - closed) <= 1e-12);
        }
    }
    SECTION("purity returns at t = 2 pi / (hbar lambda) for equal couplings") {
        auto model = simple_model({Rational{1, 10}, Rational{1, 10}});
        const auto res = reservoir_of({make_thermal_mode(0.5), make_phase_state_mode(7, 0)});
        const double t_R = 2.0 * kPi / 0.1;
        CHECK(linear_entropy(model, sys, res, t_R) < 1e-12);
    }
    SECTION("mode count mismatch is a configuration error") {
        auto model = simple_model({Rational{1, 10}, Rational{1, 5}});
        const auto res = reservoir_of({make_thermal_mode(0.5)});
        CHECK_THROWS_AS(linear_entropy(model, sys, res, 1.0), ConfigError);
    }
    SECTION("bounds 0 <= delta <= 1 - 1/d_s for pure systems") {
        std::mt19937 rng(99);
        std::uniform_real_distribution<double> amp(-1.0, 1.0);
        std::uniform_real_distribution<double> tpick(0.0, 50.0);
        for (int trial = 0; trial < 25; ++trial) {
            const int d = 2 + trial % 3;
            std::vector<Cplx> amps(static_cast<size_t>(d));
            for (auto& a : amps) a = Cplx(amp(rng), amp(rng));
            const SystemState psi = make_pure_system(amps);
            auto model = simple_model({Rational{1, 10}});
            const auto res = reservoir_of({testing::random_mode(rng)});
            const double delta = linear_entropy(model, psi, res, tpick(rng));
            CHECK(delta >= -1e-12);
            CHECK(delta <= 1.0 - 1.0 / d + 1e-12);
        }
    }
    SECTION("independent of the free Hamiltonian parameters") {
        auto model_a = simple_model({Rational{1, 10}});
        model_a.omega = 0.3;
        model_a.g = 0.7;
        model_a.Omega = 1.1;
        auto model_b = model_a;
        model_b.omega = 2.9;
        model_b.g = 0.0;
        model_b.Omega = 0.4;
        const auto res = reservoir_of({make_thermal_mode(0.9)});
        for (double t : {0.1, 1.4, 7.7, 30.2})
            CHECK(linear_entropy(model_a, sys, res, t) == linear_entropy(model_b, sys, res, t));
    }
}

TEST_CASE("series evaluation agrees with pointwise evaluation") {
    const SystemState sys = make_pure_system({Cplx(0.6, 0.1), Cplx(0.5, -0.3), Cplx(0.4, 0.0)});
    auto model = simple_model({Rational{1, 10}, Rational{1, 5}});
    model.y = Exponent::of(Rational{1, 2});
    const auto res = reservoir_of({make_thermal_mode(0.8), make_phase_state_mode(9, 2)});

    SECTION("uniform grid uses the rotation fast path") {
        const auto grid = uniform_grid(0.0, 40.0, 700);
        const auto series = linear_entropy_series(model, sys, res, grid);
        for (size_t i = 0; i < grid.size(); i += 17)
            CHECK(std::abs(series.values[i] - linear_entropy(model, sys, res, grid[i])) <= 5e-13);
    }
    SECTION("non-uniform grids fall back to pointwise") {
        std::vector<double> grid;
        for (int i = 0; i < 60; ++i) grid.push_back(0.01 * i * i);
        const auto series = linear_entropy_series(model, sys, res, grid);
        for (size_t i = 0; i < grid.size(); ++i)
            CHECK(series.values[i] == linear_entropy(model, sys, res, grid[i]));
    }
}

TEST_CASE("thermal closed form") {
    CHECK(thermal_linear_entropy(1, 0.7, 0.1, 1.0, 0.0) == 0.0);
    // hand-evaluated at lambda hbar t = pi, q = 1/2, M = 1: (1/2)(1 - 0.25/2.25) = 4/9
    const double beta = std::log(2.0);
    CHECK(thermal_linear_entropy(1, beta, 0.1, 1.0, kPi / 0.1) ==
          Approx(4.0 / 9.0).margin(1e-12));
    SECTION("monotone in M at fixed plateau time") {
        const double t = 0.43 * kPi / 0.1;
        double prev = -1.0;
        for (int M : {1, 3, 9, 40, 201}) {
            const double d = thermal_linear_entropy(M, 0.7, 0.1, 1.0, t);
            CHECK(d >= prev);
            prev = d;
        }
    }
    SECTION("periodic in t") {
        const double period = 2.0 * kPi / (0.1 * 1.0);
        for (double t : {0.3, 4.4, 11.0})
            CHECK(thermal_linear_entropy(5, 0.9, 0.1, 1.0, t) ==
                  Approx(thermal_linear_entropy(5, 0.9, 0.1, 1.0, t + period)).margin(1e-12));
    }
    CHECK_THROWS_AS(thermal_linear_entropy(0, 0.7, 0.1, 1.0, 0.0), PreconditionError);
    CHECK_THROWS_AS(thermal_linear_entropy(1, -0.1, 0.1, 1.0, 0.0), InvalidTemperatureError);
}

TEST_CASE("decoherence time reproduces the figure-caption values") {
    const SystemState sys = make_superposition_system();
    struct Row {
        int M;
        double delta2_per_mode;
        double lambda_t_D;
    };
    // frozen from the closed form 1 / (0.5 sqrt(2 M) delta2)
    const Row rows[] = {
        {201, 3.16, 0.03156675114264661},
        {1, 44.83, 0.031546142368349205},
        {1, 6.61, 0.21395061457989334},
        {15, 1.71, 0.2135370594562051},
    };
    for (const auto& row : rows) {
        ModelSpec model;
        ReservoirSpec res;
        const auto mode = make_thermal_mode(beta_for_delta2(row.delta2_per_mode));
        for (int l = 0; l < row.M; ++l) {
            model.couplings.push_back(Coupling::of(Rational{1, 10}));
            res.modes.push_back(mode);
        }
        const double t_D = decoherence_time(model, sys, res);
        CHECK(0.1 * t_D == Approx(row.lambda_t_D).margin(1e-6));
    }
}

TEST_CASE("decoherence time edge behavior") {
    const SystemState sys = make_superposition_system();
    SECTION("doubling every coupling halves t_D exactly") {
        const auto mode = make_custom_mode({0.5, 0.0, 0.5});
        auto slow = simple_model({Rational{1, 4}});
        auto fast = simple_model({Rational{1, 2}});
        const auto res = reservoir_of({mode});
        CHECK(decoherence_time(slow, sys, res) == 2.0 * decoherence_time(fast, sys, res));
    }
    SECTION("equal aggregate variance gives bitwise-equal t_D") {
        auto many = simple_model({Rational{1, 4}, Rational{1, 4}, Rational{1, 4}, Rational{1, 4}});
        ReservoirSpec many_res;
        for (int i = 0; i < 4; ++i) many_res.modes.push_back(make_custom_mode({0.5, 0.0, 0.5}));
        auto one = simple_model({Rational{1, 4}});
        const auto one_res = reservoir_of({make_custom_mode({0.5, 0.0, 0.0, 0.0, 0.5})});
        CHECK(decoherence_time(many, sys, many_res) == decoherence_time(one, sys, one_res));
    }
    SECTION("thermal mode-count/temperature trade") {
        const int M = 201;
        const auto per_mode = make_thermal_mode(beta_for_delta2(3.16));
        const double v = variance_of_power(per_mode, 1.0);
        ModelSpec many;
        ReservoirSpec many_res;
        for (int l = 0; l < M; ++l) {
            many.couplings.push_back(Coupling::of(Rational{1, 10}));
            many_res.modes.push_back(per_mode);
        }
        auto one = simple_model({Rational{1, 10}});
        const auto one_res = reservoir_of({make_thermal_mode(beta_for_delta2(std::sqrt(M * v)))});
        const double a = decoherence_time(many, sys, many_res);
        const double b = decoherence_time(one, sys, one_res);
        CHECK(a == Approx(b).epsilon(1e-8));
    }
    SECTION("no-decoherence signals return infinity") {
        auto model = simple_model({Rational{1, 10}});
        const auto res = reservoir_of({make_thermal_mode(0.7)});
        const SystemState fock = make_fock_system(2);
        CHECK(std::isinf(decoherence_time(model, fock, res)));  // Delta1 = 0

        auto decoupled = simple_model({Rational{0, 1}});
        CHECK(std::isinf(decoherence_time(decoupled, sys, res)));  // lambda = 0
    }
    SECTION("mixed system state violates the precondition") {
        SystemState mixed;
        mixed.dim = 2;
        mixed.B = {Cplx(0.5, 0), Cplx(0, 0), Cplx(0, 0), Cplx(0.5, 0)};
        auto model = simple_model({Rational{1, 10}});
        const auto res = reservoir_of({make_thermal_mode(0.7)});
        CHECK_THROWS_AS(decoherence_time(model, mixed, res), PreconditionError);
    }
}

TEST_CASE("revival time and coupling commensurability") {
    SECTION("single coupling") {
        auto model = simple_model({Rational{1, 10}});
        const auto t_R = revival_time(model);
        REQUIRE(t_R);
        CHECK(*t_R == Approx(20.0 * kPi).margin(1e-12));
        const auto t_R3 = revival_time(model, 3);
        REQUIRE(t_R3);
        CHECK(*t_R3 == Approx(60.0 * kPi).margin(1e-12));
    }
    SECTION("commensurate pair closes every phase") {
        auto model = simple_model({Rational{1, 10}, Rational{1, 5}});
        const auto t_R = revival_time(model);
        REQUIRE(t_R);
        CHECK(*t_R == Approx(20.0 * kPi).margin(1e-12));
        const auto res = reservoir_of({make_thermal_mode(0.8), make_phase_state_mode(5, 0)});
        CHECK(linear_entropy(model, make_superposition_system(), res, *t_R) < 1e-12);
    }
    SECTION("awkward but commensurate denominators") {
        auto model = simple_model({Rational{1, 10}, Rational{1, 7}});
        const auto t_R = revival_time(model);
        REQUIRE(t_R);
        CHECK(*t_R == Approx(140.0 * kPi).margin(1e-9));
    }
    SECTION("absent for non-integer exponents") {
        auto model = simple_model({Rational{1, 10}});
        model.y = Exponent::of(Rational{1, 2});
        CHECK_FALSE(revival_time(model));
        model.y = Exponent::of(Rational{1, 1});
        model.x = Exponent::of(0.37);
        CHECK_FALSE(revival_time(model));
    }
    SECTION("absent for float couplings without exact annotation") {
        ModelSpec model;
        model.couplings.push_back(Coupling::of(0.1));  // 0.1 is not a small exact fraction
        CHECK_FALSE(revival_time(model));
    }
    SECTION("absent when every coupling vanishes") {
        auto model = simple_model({Rational{0, 1}});
        CHECK_FALSE(revival_time(model));
    }
    SECTION("zero couplings are ignored in the gcd") {
        auto model = simple_model({Rational{1, 10}, Rational{0, 1}});
        const auto t_R = revival_time(model);
        REQUIRE(t_R);
        CHECK(*t_R == Approx(20.0 * kPi).margin(1e-12));
    }
}

TEST_CASE("revival lifetime identities") {
    const SystemState sys = make_superposition_system();
    auto model = simple_model({Rational{1, 10}, Rational{1, 5}});
    const auto res = reservoir_of({make_thermal_mode(0.8), make_phase_state_mode(5, 0)});

    const double tau = revival_lifetime(model, sys, res);
    const double t_D = decoherence_time(model, sys, res);
    CHECK(tau == 2.0 * t_D);  // exact by construction

    // closed form sqrt(2) / (hbar^(x+y-1) Lambda Delta1 Delta2)
    const auto gcd = coupling_gcd(model);
    REQUIRE(gcd);
    const double delta1 = std::sqrt(system_power_variance(sys, 1.0));
    const double delta2 = aggregate_delta2(model, res, *gcd);
    const double closed = std::numbers::sqrt2 / (gcd->value() * delta1 * delta2);
    CHECK(tau == Approx(closed).epsilon(1e-12));

    SECTION("lambda tau_R = 0.428 for the Delta2 = 6.61 thermal row") {
        auto m1 = simple_model({Rational{1, 10}});
        const auto r1 = reservoir_of({make_thermal_mode(beta_for_delta2(6.61))});
        CHECK(0.1 * revival_lifetime(m1, sys, r1) == Approx(0.428).margin(1e-3));
    }
    SECTION("tau_R shrinks monotonically with Delta2") {
        auto m1 = simple_model({Rational{1, 10}});
        double prev = std::numeric_limits<double>::infinity();
        for (double d2 : {1.0, 4.0, 16.0, 64.0}) {
            const auto r1 = reservoir_of({make_thermal_mode(beta_for_delta2(d2))});
            const double t = revival_lifetime(m1, sys, r1);
            CHECK(t < prev);
            prev = t;
        }
    }
}

TEST_CASE("characteristic times bundle") {
    const SystemState sys = make_superposition_system();
    auto model = simple_model({Rational{1, 10}, Rational{1, 5}});
    const auto res = reservoir_of({make_thermal_mode(0.8), make_phase_state_mode(5, 0)});
    const auto ct = characteristic_times(model, sys, res);
    CHECK(ct.tau_R == 2.0 * ct.t_D);
    REQUIRE(ct.Lambda);
    CHECK(*ct.Lambda == Approx(0.1).margin(1e-15));
    REQUIRE(ct.t_R);
    REQUIRE(ct.k.size() == 2);
    CHECK(ct.k[0] == Approx(1.0));
    CHECK(ct.k[1] == Approx(0.5));

    auto irr = model;
    irr.y = Exponent::of(Rational{1, 2});
    const auto ct2 = characteristic_times(irr, sys, res);
    CHECK_FALSE(ct2.t_R);
    CHECK_FALSE(ct2.Lambda);
    CHECK(ct2.tau_R == 2.0 * ct2.t_D);
}

TEST_CASE("periodicity and mirror symmetry for commensurate couplings") {
    const SystemState sys = make_superposition_system();
    auto model = simple_model({Rational{1, 10}});
    const auto res = reservoir_of({make_thermal_mode(beta_for_delta2(6.61))});
    const double t_R = *revival_time(model);
    for (double t : {0.3, 1.7, 5.2, 12.9, 31.4}) {
        const double base = linear_entropy(model, sys, res, t);
        CHECK(std::abs(linear_entropy(model, sys, res, t + t_R) - base) <= 1e-12);
        CHECK(std::abs(linear_entropy(model, sys, res, t_R - t) - base) <= 1e-12);
    }
}

TEST_CASE("quadratic onset: vanishing first derivative at t = 0") {
    const SystemState sys = make_superposition_system();
    struct Case {
        ModelSpec model;
        ReservoirSpec res;
    };
    std::vector<Case> cases;
    {
        Case c{simple_model({Rational{1, 10}}), reservoir_of({make_thermal_mode(beta_for_delta2(6.61))})};
        cases.push_back(c);
    }
    {
        Case c{simple_model({Rational{1, 10}}), reservoir_of({make_phase_state_mode(10, 0)})};
        c.model.y = Exponent::of(Rational{1, 2});
        cases.push_back(c);
    }
    for (auto& c : cases) {
        const double t_D = decoherence_time(c.model, sys, c.res);
        const double delta2 = 1.0 / (t_D * t_D);
        const double h = 1e-3 * t_D;
        const double deriv = (linear_entropy(c.model, sys, c.res, h) -
                              linear_entropy(c.model, sys, c.res, -h)) /
                             (2.0 * h);
        CHECK(std::abs(deriv) < 1e-8 * delta2);
    }
}

TEST_CASE("recurrence time") {
    SECTION("free Kerr evolution") {
        const auto r = recurrence_time(1.0, Coupling::of(Rational{0, 1}), 1.0);
        REQUIRE(r.status == RecurrenceStatus::found);
        CHECK(*r.time == Approx(kPi).margin(1e-14));
        const auto r3 = recurrence_time(1.0, Coupling::of(Rational{0, 1}), 1.0, 3);
        CHECK(*r3.time == Approx(3.0 * kPi).margin(1e-13));
    }
    SECTION("rational 2g/lambda") {
        const auto r = recurrence_time(1.0, Coupling::of(Rational{1, 10}), 1.0);
        REQUIRE(r.status == RecurrenceStatus::found);
        CHECK(*r.time == Approx(kPi).margin(1e-12));  // n/m = 20/1

        const auto r2 = recurrence_time(0.75, Coupling::of(Rational{1, 2}), 1.0);
        REQUIRE(r2.status == RecurrenceStatus::found);
        CHECK(*r2.time == Approx(4.0 * kPi / 3.0).margin(1e-12));  // n/m = 3/1
    }
    SECTION("irrational ratio is absent") {
        const auto r = recurrence_time(1.0, Coupling::of(2.0 / std::sqrt(2.0)), 1.0);
        CHECK(r.status == RecurrenceStatus::irrational_ratio);
        CHECK_FALSE(r.time);
    }
    SECTION("degenerate when g and lambda both vanish") {
        const auto r = recurrence_time(0.0, Coupling::of(Rational{0, 1}), 1.0);
        CHECK(r.status == RecurrenceStatus::degenerate);
        CHECK_FALSE(r.time);
    }
    SECTION("pure coupling phase closure when g = 0") {
        const auto r = recurrence_time(0.0, Coupling::of(Rational{1, 10}), 1.0);
        REQUIRE(r.status == RecurrenceStatus::found);
        CHECK(*r.time == Approx(20.0 * kPi).margin(1e-12));
    }
    CHECK_THROWS_AS(recurrence_time(-1.0, Coupling::of(Rational{1, 10}), 1.0), PreconditionError);
}

TEST_CASE("effective Hilbert space size") {
    CHECK(effective_hilbert_size(0.0) == 1.0);
    SECTION("phase state identity Hs = r + 1") {
        for (int r : {0, 1, 8, 289}) {
            const auto mode = make_phase_state_mode(r, 0);
            const double d2 = std::sqrt(variance_of_power(mode, 1.0));
            const double hs = effective_hilbert_size(d2);
            CHECK(hs == Approx(static_cast<double>(r + 1)).epsilon(1e-12));
            CHECK(std::lround(hs) == r + 1);
        }
    }
    CHECK(effective_hilbert_size(44.83) == Approx(155.29889503792356).margin(1e-9));
    SECTION("strictly increasing") {
        double prev = effective_hilbert_size(0.0);
        for (double d2 : {0.1, 0.5, 2.0, 10.0, 100.0}) {
            const double hs = effective_hilbert_size(d2);
            CHECK(hs > prev);
            prev = hs;
        }
    }
    CHECK_THROWS_AS(effective_hilbert_size(-0.1), PreconditionError);
}

TEST_CASE("equivalent reservoir inversion") {
    const auto zero = equivalent_reservoir(0.0);
    CHECK(zero.nbar == 0.0);
    CHECK(zero.r_trunc == 0);

    SECTION("phase-state round trip is exact") {
        for (int r : {0, 1, 8, 289}) {
            const double d2 = std::sqrt(variance_of_power(make_phase_state_mode(r, 0), 1.0));
            CHECK(equivalent_reservoir(d2).r_trunc == r);
        }
    }
    SECTION("thermal round trip within 1e-9") {
        for (double d2 : {1.0, 3.16, 6.61, 44.83}) {
            const auto eq = equivalent_reservoir(d2);
            const auto mode = make_thermal_mode(std::log1p(1.0 / eq.nbar));
            const double var = variance_of_power(mode, 1.0);
            CHECK(var == Approx(d2 * d2).epsilon(1e-9));
        }
    }
    CHECK(equivalent_reservoir(44.83).nbar == Approx(44.332788224691086).margin(1e-9));
}
