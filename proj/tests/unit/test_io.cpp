#include <doctest.h>

#include <qrelax/basis.hpp>
#include <qrelax/errors.hpp>
#include <qrelax/state.hpp>
#include <qrelax/state_io.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

using namespace qrelax;

namespace {

AnyState parse(const std::string& text, bool renormalize = false) {
    std::istringstream is(text);
    return load_state(is, renormalize);
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("angular states round trip bit for bit") {
    const AngularState original = random_state(4, 2024);
    std::stringstream buf;
    save_state(original, buf);

    const AnyState loaded = load_state(buf);
    REQUIRE(std::holds_alternative<AngularState>(loaded));
    const auto& back = std::get<AngularState>(loaded);

    CHECK(back.m == original.m);
    REQUIRE(back.c.size() == original.c.size());
    for (std::size_t i = 0; i < back.c.size(); ++i) {
        CHECK(back.c[i].real() == original.c[i].real());
        CHECK(back.c[i].imag() == original.c[i].imag());
    }
}

TEST_CASE("cartesian states round trip bit for bit") {
    CartesianState original = angular_to_cartesian(random_state(3, 77));
    std::stringstream buf;
    save_state(original, buf);

    const AnyState loaded = load_state(buf);
    REQUIRE(std::holds_alternative<CartesianState>(loaded));
    const auto& back = std::get<CartesianState>(loaded);

    CHECK(back.m == original.m);
    REQUIRE(back.c.size() == original.c.size());
    for (std::size_t i = 0; i < back.c.size(); ++i) {
        CHECK(back.c[i].real() == original.c[i].real());
        CHECK(back.c[i].imag() == original.c[i].imag());
    }
}

TEST_CASE("omitted coefficients default to zero") {
    const auto st = std::get<AngularState>(parse(R"({
        "basis": "angular", "m": 2,
        "coefficients": [{"nd": 2, "ng": 0, "re": 1.0, "im": 0.0}]
    })"));
    CHECK(st.m == 2);
    CHECK(st.at(2, 0) == Complex{1.0, 0.0});
    CHECK(st.at(0, 0) == Complex{0.0, 0.0});
    CHECK(st.at(1, 1) == Complex{0.0, 0.0});
}

TEST_CASE("both parts of each amplitude are required") {
    // a typo'd field name must not silently load as zero
    CHECK_THROWS_AS(parse(R"({
        "basis": "angular", "m": 1,
        "coefficients": [{"nd": 1, "ng": 0, "re": 1.0}]
    })"),
                    SchemaError);
}

TEST_CASE("schema violations are rejected") {
    // not JSON at all
    CHECK_THROWS_AS(parse("definitely not json"), SchemaError);
    // wrong basis label
    CHECK_THROWS_AS(parse(R"({"basis": "spherical", "m": 1, "coefficients": []})"), SchemaError);
    // missing shell index
    CHECK_THROWS_AS(parse(R"({"basis": "angular", "coefficients": []})"), SchemaError);
    // duplicate entry
    CHECK_THROWS_AS(parse(R"({"basis": "angular", "m": 1, "coefficients": [
        {"nd": 1, "ng": 0, "re": 0.8, "im": 0.0},
        {"nd": 1, "ng": 0, "re": 0.6, "im": 0.0}]})"),
                    SchemaError);
    // index outside the shell
    CHECK_THROWS_AS(parse(R"({"basis": "angular", "m": 1, "coefficients": [
        {"nd": 2, "ng": 0, "re": 1.0, "im": 0.0}]})"),
                    SchemaError);
    // negative index
    CHECK_THROWS_AS(parse(R"({"basis": "angular", "m": 1, "coefficients": [
        {"nd": -1, "ng": 1, "re": 1.0, "im": 0.0}]})"),
                    SchemaError);
    // cartesian keys in an angular file
    CHECK_THROWS_AS(parse(R"({"basis": "angular", "m": 1, "coefficients": [
        {"nx": 1, "ny": 0, "re": 1.0, "im": 0.0}]})"),
                    SchemaError);
    // non-numeric amplitude
    CHECK_THROWS_AS(parse(R"({"basis": "angular", "m": 1, "coefficients": [
        {"nd": 1, "ng": 0, "re": "big", "im": 0.0}]})"),
                    SchemaError);
}

TEST_CASE("norm is checked unless renormalize is requested") {
    const std::string off = R"({"basis": "angular", "m": 0,
        "coefficients": [{"nd": 0, "ng": 0, "re": 0.9, "im": 0.0}]})";
    CHECK_THROWS_AS(parse(off), NormalizationError);

    const auto st = std::get<AngularState>(parse(off, true));
    CHECK(st.norm_sq() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(st.at(0, 0).real() == doctest::Approx(1.0));

    // norm within tolerance passes untouched
    const auto ok = std::get<AngularState>(parse(
        R"({"basis": "angular", "m": 0,
            "coefficients": [{"nd": 0, "ng": 0, "re": 1.0, "im": 0.0}]})"));
    CHECK(ok.at(0, 0) == Complex{1.0, 0.0});
}

TEST_CASE("cartesian files load as angular states through the basis change") {
    const AngularState reference = random_state(2, 31415);
    const CartesianState cart = angular_to_cartesian(reference);

    const std::string path = "io_test_cart.json";
    save_state_file(cart, path);
    const AngularState loaded = load_angular_state_file(path);
    std::remove(path.c_str());

    REQUIRE(loaded.m == reference.m);
    for (std::size_t i = 0; i < loaded.c.size(); ++i) {
        CHECK(loaded.c[i].real() == doctest::Approx(reference.c[i].real()).epsilon(1e-13));
        CHECK(loaded.c[i].imag() == doctest::Approx(reference.c[i].imag()).epsilon(1e-13));
    }
}

TEST_CASE("file loader reports missing files") {
    CHECK_THROWS_AS(load_state_file("no_such_file_anywhere.json"), SchemaError);
}

}
