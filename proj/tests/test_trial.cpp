#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "aecrit/trial.hpp"

using namespace aecrit;

TEST_CASE("built-in bounded trial functions pass every class condition") {
    auto grid = default_probe_grid();
    for (const auto& phi : {trial_arctan(), trial_ratio1(), trial_ratio2()}) {
        auto rep = validate_class(phi, grid);
        INFO(phi.name);
        CHECK(rep.positivity.pass);
        CHECK(rep.monotonicity.pass);
        CHECK(rep.continuity.pass);
        CHECK(rep.evenness.pass);
        CHECK(rep.boundedness.pass);
        CHECK(rep.overall_pass);
    }
}

TEST_CASE("grid maxima approach the declared bounds") {
    auto grid = default_probe_grid();
    auto near = [&](const TrialFunction& phi, double bound) {
        auto rep = validate_class(phi, grid);
        REQUIRE(rep.empirical_max <= bound + 1e-12);
        REQUIRE(rep.empirical_max >= bound - 1.01e-6);
    };
    near(trial_arctan(), std::numbers::pi / 2.0);
    near(trial_ratio1(), 1.0);
    near(trial_ratio2(), 1.0);
}

TEST_CASE("the identity function fails positivity and evenness") {
    TrialFunction ident;
    ident.name = "identity";
    ident.declared_class = TrialClass::KB;
    ident.eval = [](double x) { return x; };
    auto rep = validate_class(ident, default_probe_grid());
    CHECK_FALSE(rep.positivity.pass);  // negative on the left axis
    CHECK_FALSE(rep.evenness.pass);    // phi(-x) = -phi(x)
    CHECK_FALSE(rep.overall_pass);
}

TEST_CASE("the square passes everything except boundedness") {
    auto rep = validate_class(trial_power(2.0), default_probe_grid());
    CHECK(rep.positivity.pass);
    CHECK(rep.monotonicity.pass);
    CHECK(rep.continuity.pass);
    CHECK(rep.evenness.pass);
    CHECK_FALSE(rep.boundedness.pass);
    CHECK(rep.overall_pass);  // declared class K only needs A-D
}

TEST_CASE("a hidden jump trips the continuity probe") {
    TrialFunction stepped;
    stepped.name = "stepped";
    stepped.declared_class = TrialClass::KB;
    stepped.declared_bound = 3.0;
    stepped.eval = [](double x) {
        double a = std::abs(x);
        return a / (1.0 + a) + (a > 1.5e-6 ? 0.5 : 0.0);  // jump inside the fine-step region
    };
    auto rep = validate_class(stepped, default_probe_grid(), 1e-3);
    CHECK_FALSE(rep.continuity.pass);
    CHECK(rep.continuity.worst_violation > 0.4);
}

TEST_CASE("validation grid error paths") {
    REQUIRE_THROWS_MATCHES(validate_class(trial_arctan(), {}), ToolkitError,
                           Catch::Matchers::Predicate<ToolkitError>(
                               [](const ToolkitError& e) { return e.code() == Errc::EmptyGrid; }));
    std::vector<double> unsorted = default_probe_grid();
    std::swap(unsorted[3], unsorted[4]);
    REQUIRE_THROWS_MATCHES(validate_class(trial_arctan(), unsorted), ToolkitError,
                           Catch::Matchers::Predicate<ToolkitError>(
                               [](const ToolkitError& e) { return e.code() == Errc::UnsortedGrid; }));
    std::vector<double> narrow = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0,
                                  9.0, 10.0, 11.0, 12.0, 13.0, 14.0, 15.0, 16.0};
    REQUIRE_THROWS_AS(validate_class(trial_arctan(), narrow), ToolkitError);
}

TEST_CASE("failures persist on supergrids") {
    auto coarse = default_probe_grid();
    std::vector<double> fine;
    for (std::size_t i = 0; i + 1 < coarse.size(); ++i) {
        fine.push_back(coarse[i]);
        fine.push_back(std::sqrt(coarse[i] * coarse[i + 1]));  // geometric midpoints
    }
    fine.push_back(coarse.back());
    auto phi = trial_power(2.0);
    REQUIRE_FALSE(validate_class(phi, coarse).boundedness.pass);
    REQUIRE_FALSE(validate_class(phi, fine).boundedness.pass);
}

TEST_CASE("doubling ratios: homogeneous powers are exact") {
    std::vector<double> grid;
    for (int i = 1; i <= 64; ++i) grid.push_back(0.05 * i);
    REQUIRE(delta2_ratio(trial_power(2.0), grid) == Catch::Approx(4.0).margin(1e-12));
    REQUIRE(delta2_ratio(trial_power(0.5), grid) == Catch::Approx(std::sqrt(2.0)).margin(1e-12));
    REQUIRE(delta2_ratio(trial_power(3.0), grid) == Catch::Approx(8.0).margin(1e-11));
}

TEST_CASE("doubling ratio blows up for the exponential Young function") {
    TrialFunction expm1;
    expm1.name = "expm1";
    expm1.declared_class = TrialClass::K;
    expm1.is_young_orlicz = true;
    expm1.eval = [](double x) { return std::expm1(std::abs(x)); };
    std::vector<double> grid;
    for (int i = 1; i <= 50; ++i) grid.push_back(static_cast<double>(i));
    double ratio = delta2_ratio(expm1, grid);
    // phi(2x)/phi(x) ~ e^x at the top of the grid: no doubling condition
    REQUIRE(ratio > 1e20);
    REQUIRE(std::isfinite(ratio));
}

TEST_CASE("doubling ratio refuses a vanishing denominator") {
    TrialFunction flat;
    flat.name = "flat-near-zero";
    flat.declared_class = TrialClass::K;
    flat.eval = [](double x) { return std::abs(x) < 0.5 ? 0.0 : std::abs(x); };
    REQUIRE_THROWS_MATCHES(delta2_ratio(flat, {0.25, 1.0, 2.0}), ToolkitError,
                           Catch::Matchers::Predicate<ToolkitError>([](const ToolkitError& e) {
                               return e.code() == Errc::ZeroDenominator;
                           }));
}

TEST_CASE("bounded members stay inside [0, sup]") {
    for (const auto& phi : {trial_arctan(), trial_ratio1(), trial_ratio2()}) {
        REQUIRE(phi.declared_bound.has_value());
        for (double x : {-1e308, -12.0, -1e-9, 0.0, 0.3, 7.0, 1e100}) {
            double v = phi(x);
            REQUIRE(v >= 0.0);
            REQUIRE(v <= *phi.declared_bound + 1e-12);
        }
    }
}

TEST_CASE("selector parsing") {
    REQUIRE(parse_trial_function("arctan").name == "arctan");
    REQUIRE(parse_trial_function("power:2.5").name == "power:2.5");
    REQUIRE(parse_trial_function("power:2.5").declared_class == TrialClass::K);
    REQUIRE(parse_trial_function("power:1").is_young_orlicz);
    REQUIRE_FALSE(parse_trial_function("power:0.5").is_young_orlicz);
    REQUIRE_THROWS_AS(parse_trial_function("tanh"), ToolkitError);
    REQUIRE_THROWS_AS(parse_trial_function("power:-1"), ToolkitError);
}
