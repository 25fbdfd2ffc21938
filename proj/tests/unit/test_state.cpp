#include <doctest.h>

#include <qrelax/state.hpp>

#include <cmath>
#include <set>
#include <vector>

using namespace qrelax;

TEST_SUITE("state") {

TEST_CASE("triangular layout covers each index pair exactly once") {
    CHECK(triangular_size(0) == 1);
    CHECK(triangular_size(1) == 3);
    CHECK(triangular_size(2) == 6);
    CHECK(triangular_size(3) == 10);
    CHECK(triangular_size(4) == 15);

    for (int m = 0; m <= 8; ++m) {
        std::set<int> seen;
        for (int s = 0; s <= m; ++s) {
            for (int a = 0; a <= s; ++a) {
                const int off = triangular_offset(a, s - a);
                CHECK(off >= 0);
                CHECK(off < triangular_size(m));
                seen.insert(off);
            }
        }
        CHECK(static_cast<int>(seen.size()) == triangular_size(m));
    }

    // offsets are ordered shell-major, then by the first index
    CHECK(triangular_offset(0, 0) == 0);
    CHECK(triangular_offset(0, 1) == 1);
    CHECK(triangular_offset(1, 0) == 2);
    CHECK(triangular_offset(0, 2) == 3);
    CHECK(triangular_offset(1, 1) == 4);
    CHECK(triangular_offset(2, 0) == 5);
}

TEST_CASE("shell_for_basis_count inverts triangular_size and rejects junk") {
    for (int m = 0; m <= 12; ++m) {
        CHECK(shell_for_basis_count(triangular_size(m)) == m);
    }
    CHECK_THROWS_AS(shell_for_basis_count(0), std::invalid_argument);
    CHECK_THROWS_AS(shell_for_basis_count(2), std::invalid_argument);
    CHECK_THROWS_AS(shell_for_basis_count(4), std::invalid_argument);
    CHECK_THROWS_AS(shell_for_basis_count(5), std::invalid_argument);
    CHECK_THROWS_AS(shell_for_basis_count(7), std::invalid_argument);
    CHECK_THROWS_AS(shell_for_basis_count(-3), std::invalid_argument);
}

TEST_CASE("default state is the normalized ground state") {
    AngularState st;
    CHECK(st.m == 0);
    REQUIRE(st.basis_count() == 1);
    CHECK(st.at(0, 0) == Complex{1.0, 0.0});
    CHECK(st.norm_sq() == doctest::Approx(1.0));

    CartesianState cs;
    CHECK(cs.m == 0);
    CHECK(cs.at(0, 0) == Complex{1.0, 0.0});
}

TEST_CASE("at() addresses the same storage as the raw vector") {
    AngularState st(3);
    REQUIRE(st.basis_count() == 10);
    st.at(2, 1) = Complex{0.25, -0.5};
    CHECK(st.c[triangular_offset(2, 1)] == Complex{0.25, -0.5});
    st.c[triangular_offset(0, 3)] = Complex{0.0, 1.0};
    CHECK(st.at(0, 3) == Complex{0.0, 1.0});
}

TEST_CASE("normalize rescales to unit norm and rejects the zero vector") {
    AngularState st(2);
    st.at(0, 0) = Complex{3.0, 0.0};
    st.at(1, 1) = Complex{0.0, 4.0};
    st.normalize();
    CHECK(st.norm_sq() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(st.at(0, 0)) == doctest::Approx(0.6));
    CHECK(std::abs(st.at(1, 1)) == doctest::Approx(0.8));

    AngularState zero(1);
    for (auto& c : zero.c) c = Complex{0.0, 0.0};
    CHECK_THROWS_AS(zero.normalize(), std::invalid_argument);
}

TEST_CASE("random states are unit norm, fill every shell, and reproduce bit for bit") {
    for (int m : {1, 2, 4, 7}) {
        const AngularState a = random_state(m, 12345);
        const AngularState b = random_state(m, 12345);
        const AngularState c = random_state(m, 54321);

        CHECK(a.m == m);
        CHECK(a.basis_count() == triangular_size(m));
        CHECK(a.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));

        REQUIRE(a.c.size() == b.c.size());
        for (std::size_t i = 0; i < a.c.size(); ++i) {
            CHECK(a.c[i].real() == b.c[i].real());
            CHECK(a.c[i].imag() == b.c[i].imag());
        }

        bool differs = false;
        for (std::size_t i = 0; i < a.c.size(); ++i) {
            if (a.c[i] != c.c[i]) differs = true;
        }
        CHECK(differs);

        for (const auto& coef : a.c) CHECK(std::abs(coef) > 0.0);
    }
}

TEST_CASE("uniform01 stays in the half-open unit interval") {
    std::mt19937_64 eng(99);
    double lo = 1.0;
    double hi = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = rng::uniform01(eng);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("derive_seed gives distinct reproducible streams") {
    const std::uint64_t master = 777;
    std::set<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        seeds.insert(rng::derive_seed(master, i));
    }
    CHECK(seeds.size() == 1000);
    CHECK(rng::derive_seed(master, 5) == rng::derive_seed(master, 5));
    CHECK(rng::derive_seed(master, 5) != rng::derive_seed(master + 1, 5));

    // splitmix64 reference values from the published algorithm
    std::uint64_t s = 0;
    CHECK(rng::splitmix64(s) == 0xE220A8397B1DCDAFull);
    CHECK(rng::splitmix64(s) == 0x6E789E6AA1B965F4ull);
    CHECK(rng::splitmix64(s) == 0x06C45D188009454Full);
}

}
