#include <doctest.h>

#include <qrelax/errors.hpp>
#include <qrelax/state.hpp>
#include <qrelax/vorticity.hpp>

#include <cmath>
#include <cstdlib>

#include "oracles.hpp"

using namespace qrelax;

TEST_SUITE("vorticity") {

TEST_CASE("theorem, brute force, and Laurent routes agree on random states") {
    for (int m = 1; m <= 5; ++m) {
        for (int rep = 0; rep < 8; ++rep) {
            const AngularState st = random_state(m, 9000 + 17 * m + rep);
            const VorticityReport thm = total_vorticity_theorem(st);
            const VorticityReport brute = total_vorticity_bruteforce(st);
            const int laurent = total_vorticity_laurent(st);

            CHECK(brute.n == thm.n);
            CHECK(laurent == thm.n);
            CHECK(thm.method == VorticityMethod::theorem);
            CHECK(brute.method == VorticityMethod::brute_force);
            REQUIRE(thm.zero_count.has_value());
            CHECK(thm.n == 2 * *thm.zero_count - m);
        }
    }
}

#ifdef QRELAX_HAVE_EIGEN
TEST_CASE("zero counts match companion-matrix root finding") {
    for (int m = 1; m <= 6; ++m) {
        for (int rep = 0; rep < 6; ++rep) {
            const AngularState st = random_state(m, 41000 + 13 * m + rep);
            const ShellPolynomial g = shell_polynomial(st);
            const VorticityReport thm = total_vorticity_theorem(st);
            REQUIRE(thm.zero_count.has_value());
            CHECK(*thm.zero_count == oracles::roots_in_unit_disk(g.coeffs));
        }
    }
}
#endif

TEST_CASE("pure top-shell eigenstates carry their angular momentum as vorticity") {
    AngularState plus2(2);
    plus2.at(2, 0) = Complex{1.0, 0.0};
    CHECK(total_vorticity_theorem(plus2).n == 2);
    CHECK(total_vorticity_bruteforce(plus2).n == 2);

    AngularState minus2(2);
    minus2.at(0, 2) = Complex{1.0, 0.0};
    CHECK(total_vorticity_theorem(minus2).n == -2);

    // lower shells do not move the total: the top shell decides alone
    AngularState mixed(2);
    mixed.at(0, 0) = Complex{0.6, 0.0};
    mixed.at(1, 0) = Complex{0.0, 0.5};
    mixed.at(2, 0) = Complex{0.62449979983984, 0.0};
    CHECK(total_vorticity_theorem(mixed).n == 2);
    CHECK(total_vorticity_bruteforce(mixed).n == 2);
}

TEST_CASE("the three-state superposition picks the heavier circulation") {
    AngularState st(1);
    st.at(0, 0) = Complex{0.5, 0.0};
    st.at(1, 0) = Complex{0.7, 0.1};
    st.at(0, 1) = Complex{0.2, -0.4};
    st.normalize();
    CHECK(total_vorticity_theorem(st).n == 1);

    std::swap(st.at(1, 0), st.at(0, 1));
    CHECK(total_vorticity_theorem(st).n == -1);
}

TEST_CASE("allowed vorticities step by two between -m and m") {
    CHECK(allowed_vorticities(0) == std::vector<int>{0});
    CHECK(allowed_vorticities(1) == std::vector<int>{-1, 1});
    CHECK(allowed_vorticities(2) == std::vector<int>{-2, 0, 2});
    CHECK(allowed_vorticities(3) == std::vector<int>{-3, -1, 1, 3});
    CHECK(allowed_vorticities(4) == std::vector<int>{-4, -2, 0, 2, 4});

    for (int m = 1; m <= 6; ++m) {
        for (int rep = 0; rep < 5; ++rep) {
            const int n = total_vorticity_theorem(random_state(m, 600 + 31 * m + rep)).n;
            CHECK(std::abs(n) <= m);
            CHECK((n - m) % 2 == 0);
        }
    }
}

TEST_CASE("a zero pinned to the unit circle is refused, not guessed") {
    AngularState st(1);
    st.at(1, 0) = Complex{1.0 / std::sqrt(2.0), 0.0};
    st.at(0, 1) = Complex{1.0 / std::sqrt(2.0), 0.0};
    CHECK_THROWS_AS(total_vorticity_theorem(st), ZeroNearCircleError);
}

TEST_CASE("an empty top shell is an error, not vorticity zero") {
    AngularState st(2);
    st.at(0, 0) = Complex{0.8, 0.0};
    st.at(1, 0) = Complex{0.0, 0.6};
    CHECK_THROWS_AS(shell_polynomial(st), EmptyShellError);
    CHECK_THROWS_AS(total_vorticity_theorem(st), EmptyShellError);
}

TEST_CASE("shell polynomial collects the top shell with factorial weights") {
    AngularState st(2);
    st.at(0, 2) = Complex{0.5, 0.0};
    st.at(1, 1) = Complex{0.0, 0.5};
    st.at(2, 0) = Complex{-0.5, 0.5};
    st.at(0, 0) = Complex{0.5, 0.0};
    const ShellPolynomial g = shell_polynomial(st);
    CHECK(g.m == 2);
    REQUIRE(g.coeffs.size() == 3);
    const double r2 = std::sqrt(2.0);
    CHECK(g.coeffs[0] == Complex{0.5 / r2, 0.0});
    CHECK(g.coeffs[1] == Complex{0.0, 0.5});
    CHECK(g.coeffs[2].real() == doctest::Approx(-0.5 / r2));
    CHECK(g.coeffs[2].imag() == doctest::Approx(0.5 / r2));
}

TEST_CASE("vorticity histograms are reproducible and complete") {
    const VorticityHistogram h1 = sample_vorticity_distribution(2, 400, 321);
    const VorticityHistogram h2 = sample_vorticity_distribution(2, 400, 321);
    CHECK(h1.counts == h2.counts);
    CHECK(h1.resampled == h2.resampled);

    long long total = 0;
    for (const auto& [n, count] : h1.counts) {
        total += count;
        CHECK(std::abs(n) <= 2);
        CHECK(n % 2 == 0);
    }
    CHECK(total == 400);
    CHECK(h1.m == 2);
    CHECK(h1.samples == 400);
    CHECK(h1.seed == 321);

    // a different seed reshuffles the draw
    const VorticityHistogram h3 = sample_vorticity_distribution(2, 400, 322);
    CHECK(h3.counts != h1.counts);
}

TEST_CASE("the zero-vorticity class dominates the second shell") {
    // coarse smoke check; the acceptance gate pins the percentages tightly
    const VorticityHistogram h = sample_vorticity_distribution(2, 3000, 7);
    const double p0 = static_cast<double>(h.counts.at(0)) / static_cast<double>(h.samples);
    CHECK(p0 > 0.60);
    CHECK(p0 < 0.72);
}

TEST_CASE("states can be drawn conditioned on their vorticity") {
    for (int target : {-2, 0, 2}) {
        const AngularState st = generate_state_with_vorticity(2, target, 55);
        CHECK(total_vorticity_theorem(st).n == target);
        CHECK(st.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (int target : {-3, -1, 1, 3}) {
        const AngularState st = generate_state_with_vorticity(3, target, 56);
        CHECK(total_vorticity_theorem(st).n == target);
    }

    CHECK_THROWS_AS(generate_state_with_vorticity(2, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_state_with_vorticity(2, 4, 1), std::invalid_argument);

    // same seed, same draw
    const AngularState a = generate_state_with_vorticity(3, 1, 99);
    const AngularState b = generate_state_with_vorticity(3, 1, 99);
    for (std::size_t i = 0; i < a.c.size(); ++i) CHECK(a.c[i] == b.c[i]);
}

TEST_CASE("brute force is stable against probe radius and sampling density") {
    const AngularState st = random_state(3, 424242);
    const int n0 = total_vorticity_bruteforce(st).n;
    CHECK(total_vorticity_bruteforce(st, 8.0).n == n0);
    CHECK(total_vorticity_bruteforce(st, 20.0).n == n0);
    CHECK(total_vorticity_bruteforce(st, -1.0, 0.0, 1024).n == n0);
    // the winding is time independent
    CHECK(total_vorticity_bruteforce(st, -1.0, 2.2).n == n0);
}

}
