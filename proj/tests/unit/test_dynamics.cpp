#include <doctest.h>

#include <qrelax/dynamics.hpp>
#include <qrelax/errors.hpp>
#include <qrelax/state.hpp>

#include <cmath>
#include <complex>

#include "oracles.hpp"

using namespace qrelax;

namespace {

// angular state d * (chi00 + i*sqrt(2) chi10): its single node circles the
// origin at radius 1/sqrt(2), passing (0, 1/sqrt(2)) at T = 0
AngularState circling_node_state() {
    AngularState st(1);
    const double d = 1.0 / std::sqrt(3.0);
    st.at(0, 0) = Complex{d, 0.0};
    st.at(1, 0) = Complex{0.0, std::sqrt(2.0) * d};
    st.at(0, 1) = Complex{0.0, 0.0};
    return st;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("velocity equals the phase gradient of the wave function") {
    for (int m : {1, 2, 3}) {
        const AngularState st = random_state(m, 400 + m);
        for (double T : {0.0, 0.9, 4.4}) {
            for (const PolarPoint p : {PolarPoint{0.8, 0.3}, PolarPoint{1.7, 2.2},
                                       PolarPoint{3.1, 5.9}}) {
                const Velocity v = velocity(st, p, T);

                const auto psi_eta = [&](double eta) {
                    return eval_psi_angular(st, {eta, p.phi}, T);
                };
                const auto psi_phi = [&](double phi) {
                    return eval_psi_angular(st, {p.eta, phi}, T);
                };
                const Complex psi = eval_psi_angular(st, p, T);
                const Complex d_eta = oracles::fd_derivative(psi_eta, p.eta, 1e-5);
                const Complex d_phi = oracles::fd_derivative(psi_phi, p.phi, 1e-5);

                CHECK(v.eta_dot == doctest::Approx(std::imag(d_eta / psi)).epsilon(1e-7));
                CHECK(v.phi_dot ==
                      doctest::Approx(std::imag(d_phi / psi) / (p.eta * p.eta)).epsilon(1e-7));
            }
        }
    }
}

TEST_CASE("polar and cartesian velocities describe the same vector") {
    const AngularState st = random_state(3, 555);
    for (const PolarPoint p : {PolarPoint{0.6, 1.0}, PolarPoint{2.4, 4.0}}) {
        const double T = 1.3;
        const Velocity v = velocity(st, p, T);
        const CartesianVelocity w = velocity_cartesian(st, to_cartesian(p), T);

        const double c = std::cos(p.phi);
        const double s = std::sin(p.phi);
        CHECK(w.x_dot == doctest::Approx(v.eta_dot * c - p.eta * s * v.phi_dot).epsilon(1e-10));
        CHECK(w.y_dot == doctest::Approx(v.eta_dot * s + p.eta * c * v.phi_dot).epsilon(1e-10));

        const GuidanceField field(st);
        const CartesianVelocity w2 = field.velocity(to_cartesian(p), T);
        CHECK(w2.x_dot == doctest::Approx(w.x_dot).epsilon(1e-12));
        CHECK(w2.y_dot == doctest::Approx(w.y_dot).epsilon(1e-12));
    }
}

TEST_CASE("single-quantum eigenstates drive rigid circulation") {
    AngularState plus(1);
    plus.at(1, 0) = Complex{1.0, 0.0};
    AngularState minus(1);
    minus.at(0, 1) = Complex{1.0, 0.0};

    for (double eta : {0.5, 1.0, 2.0, 3.5}) {
        const Velocity vp = velocity(plus, {eta, 0.7}, 2.0);
        CHECK(vp.eta_dot == doctest::Approx(0.0));
        CHECK(vp.phi_dot == doctest::Approx(1.0 / (eta * eta)).epsilon(1e-12));

        const Velocity vm = velocity(minus, {eta, 0.7}, 2.0);
        CHECK(vm.eta_dot == doctest::Approx(0.0));
        CHECK(vm.phi_dot == doctest::Approx(-1.0 / (eta * eta)).epsilon(1e-12));
    }
}

TEST_CASE("integrator reproduces the analytic circular orbit") {
    AngularState plus(1);
    plus.at(1, 0) = Complex{1.0, 0.0};

    // phi advances at 1/eta^2; over T = pi from eta = 2 that is pi/4
    const Trajectory traj = evolve(plus, {2.0, 0.0}, 0.0, kPi);
    REQUIRE(traj.status == TrajectoryStatus::completed);
    REQUIRE(traj.samples.size() > 2);
    CHECK(traj.samples.front().T == 0.0);
    CHECK(traj.samples.back().T == kPi);

    const PolarPoint end = traj.samples.back().p;
    CHECK(end.eta == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(end.phi == doctest::Approx(kPi / 4.0).epsilon(1e-9));

    for (const auto& s : traj.samples) CHECK(s.p.eta == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("looser tolerances still track the orbit, just less sharply") {
    AngularState plus(1);
    plus.at(1, 0) = Complex{1.0, 0.0};

    IntegratorConfig loose;
    loose.rel_tol = 1e-6;
    loose.abs_tol = 1e-8;
    const Trajectory t1 = evolve(plus, {2.0, 0.0}, 0.0, kPi, loose);
    REQUIRE(t1.status == TrajectoryStatus::completed);
    const double err_loose = std::abs(t1.samples.back().p.phi - kPi / 4.0);
    CHECK(err_loose < 1e-4);

    IntegratorConfig tight;
    tight.rel_tol = 1e-12;
    tight.abs_tol = 1e-14;
    const Trajectory t2 = evolve(plus, {2.0, 0.0}, 0.0, kPi, tight);
    REQUIRE(t2.status == TrajectoryStatus::completed);
    const double err_tight = std::abs(t2.samples.back().p.phi - kPi / 4.0);
    CHECK(err_tight < 1e-10);
    CHECK(t2.samples.size() >= t1.samples.size());
}

TEST_CASE("trajectories retrace under time reversal") {
    const AngularState st = random_state(2, 808);
    const PolarPoint p0{1.9, 0.4};

    const Trajectory fwd = evolve(st, p0, 0.0, 3.7);
    REQUIRE(fwd.status == TrajectoryStatus::completed);
    const Trajectory bwd = evolve(st, fwd.samples.back().p, 3.7, 0.0);
    REQUIRE(bwd.status == TrajectoryStatus::completed);

    const CartesianPoint a = to_cartesian(p0);
    const CartesianPoint b = to_cartesian(bwd.samples.back().p);
    CHECK(std::hypot(a.x - b.x, a.y - b.y) < 1e-7);
}

TEST_CASE("the guidance field is periodic with period two pi") {
    const AngularState st = random_state(3, 99);
    CHECK(period(st) == kTwoPi);

    const PolarPoint p{1.4, 2.5};
    const Velocity v0 = velocity(st, p, 0.77);
    const Velocity v1 = velocity(st, p, 0.77 + kTwoPi);
    CHECK(v1.eta_dot == doctest::Approx(v0.eta_dot).epsilon(1e-12));
    CHECK(v1.phi_dot == doctest::Approx(v0.phi_dot).epsilon(1e-12));
}

TEST_CASE("the flow is irrotational away from nodes") {
    const AngularState st = random_state(3, 2718);
    const GuidanceField field(st);
    const double T = 0.6;

    for (const CartesianPoint q : {CartesianPoint{0.9, 0.4}, CartesianPoint{-1.2, 1.8},
                                   CartesianPoint{2.0, -2.6}}) {
        const auto vy_of_x = [&](double x) { return field.velocity({x, q.y}, T).y_dot; };
        const auto vx_of_y = [&](double y) { return field.velocity({q.x, y}, T).x_dot; };
        const double curl =
            oracles::fd_derivative(vy_of_x, q.x, 1e-5) - oracles::fd_derivative(vx_of_y, q.y, 1e-5);
        const double scale = std::abs(field.velocity(q, T).x_dot) +
                             std::abs(field.velocity(q, T).y_dot) + 1.0;
        CHECK(std::abs(curl) < 1e-6 * scale);
    }
}

TEST_CASE("velocity stays finite at the coordinate origin") {
    AngularState st(1);
    st.at(0, 0) = Complex{0.8, 0.0};
    st.at(1, 0) = Complex{0.0, 0.6};

    const GuidanceField field(st);
    const CartesianVelocity v = field.velocity({0.0, 0.0}, 0.0);
    CHECK(std::isfinite(v.x_dot));
    CHECK(std::isfinite(v.y_dot));

    // the cartesian fallback joins smoothly onto the polar evaluation
    const CartesianVelocity near = field.velocity({1e-9, 1e-9}, 0.0);
    const CartesianVelocity out = field.velocity({1e-6, 1e-6}, 0.0);
    CHECK(near.x_dot == doctest::Approx(out.x_dot).epsilon(1e-4));
    CHECK(near.y_dot == doctest::Approx(out.y_dot).epsilon(1e-4));
}

TEST_CASE("trajectories that run into a node abort with a diagnosis") {
    const AngularState st = circling_node_state();

    // starting essentially on the node trips the floor on the first evaluation
    const double r = 1.0 / std::sqrt(2.0);
    const Trajectory t = evolve(st, to_polar({0.0, r + 1e-13}), 0.0, 1.0);
    CHECK(t.status == TrajectoryStatus::aborted_near_node);
    REQUIRE(!t.samples.empty());
    CHECK(t.samples.front().T == 0.0);

    // well away from the node the same state integrates fine
    const Trajectory ok = evolve(st, {3.0, 0.0}, 0.0, 1.0);
    CHECK(ok.status == TrajectoryStatus::completed);
}

TEST_CASE("velocity evaluation at a node throws") {
    const AngularState st = circling_node_state();
    const double r = 1.0 / std::sqrt(2.0);
    CHECK_THROWS_AS(velocity(st, to_polar({0.0, r}), 0.0), NodeProximityError);
}

TEST_CASE("hopeless tolerance demands surface as step underflow") {
    const AngularState st = random_state(2, 13);
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-16;
    cfg.abs_tol = 1e-300;
    cfg.min_step = 1e-2;

    const Trajectory t = evolve(st, {1.5, 0.2}, 0.0, 1.0, cfg);
    CHECK(t.status == TrajectoryStatus::step_underflow);
}

TEST_CASE("single steps report scaled error and a next-step suggestion") {
    const AngularState st = random_state(2, 5150);
    const StepResult r = step(st, {1.5, 0.2}, 0.0, 1e-3);
    CHECK(r.accepted);
    CHECK(r.error <= 1.0);
    CHECK(r.h_next > 0.0);
    CHECK(r.p.eta > 0.0);
}

TEST_CASE("default integrator configuration is pinned") {
    const IntegratorConfig cfg;
    CHECK(cfg.rel_tol == 1e-10);
    CHECK(cfg.abs_tol == 1e-12);
    CHECK(cfg.max_step == doctest::Approx(0.01 * kTwoPi));
    CHECK(cfg.min_step == 1e-12);
    CHECK(cfg.max_rejects == 60);
    CHECK(cfg.node_floor_factor == 1e-20);
}

}
