#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "aecrit/measure.hpp"
#include "oracles.hpp"

using namespace aecrit;

namespace {

double total_weight(const SamplePopulation& pop) {
    CompensatedSum s;
    for (double w : pop.weights) s.add(w);
    return s.value();
}

double weight_in(const SamplePopulation& pop, double lo, double hi) {
    CompensatedSum s;
    for (std::size_t i = 0; i < pop.size(); ++i)
        if (pop.scalar(i) >= lo && pop.scalar(i) < hi) s.add(pop.weights[i]);
    return s.value();
}

}  // namespace

TEST_CASE("equivalent probability measure: single block carries all weight") {
    auto pop = equivalent_probability_measure({interval_block(1, 0.0, 7.3)}, 10);
    REQUIRE(pop.size() == 10);
    REQUIRE(total_weight(pop) == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(pop.truncation_index == 1);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        REQUIRE(pop.scalar(i) > 0.0);
        REQUIRE(pop.scalar(i) < 7.3);
        REQUIRE(pop.weights[i] == Catch::Approx(0.1).margin(1e-15));
    }
}

TEST_CASE("equivalent probability measure: geometric reweighting of unit blocks") {
    // blocks [m-1, m) with Lebesgue mass, truncated at 20
    std::vector<PartitionBlock> blocks;
    for (int m = 1; m <= 20; ++m) blocks.push_back(interval_block(m, m - 1.0, m));
    auto pop = equivalent_probability_measure(blocks, 8);
    REQUIRE(total_weight(pop) == Catch::Approx(1.0).margin(1e-12));
    double expected = (0.5 + 0.25) / (1.0 - std::ldexp(1.0, -20));
    REQUIRE(weight_in(pop, 0.0, 2.0) == Catch::Approx(expected).margin(1e-14));
}

TEST_CASE("equivalent probability measure: three unit masses give block weight 1/7") {
    auto blocks = std::vector<PartitionBlock>{interval_block(1, 0.0, 1.0),
                                              interval_block(2, 1.0, 2.0),
                                              interval_block(3, 2.0, 3.0)};
    auto pop = equivalent_probability_measure(blocks, 5);
    REQUIRE(weight_in(pop, 2.0, 3.0) == Catch::Approx(1.0 / 7.0).margin(1e-15));
}

TEST_CASE("equivalent probability measure: error paths") {
    REQUIRE_THROWS_MATCHES(equivalent_probability_measure({}, 4), ToolkitError,
                           Catch::Matchers::Predicate<ToolkitError>(
                               [](const ToolkitError& e) { return e.code() == Errc::EmptyPartition; }));
    auto bad = interval_block(1, 1.0, 1.0);  // zero mass
    REQUIRE_THROWS_MATCHES(equivalent_probability_measure({bad}, 4), ToolkitError,
                           Catch::Matchers::Predicate<ToolkitError>(
                               [](const ToolkitError& e) { return e.code() == Errc::NonPositiveMass; }));
    auto skewed = std::vector<PartitionBlock>{interval_block(1, 0.0, 1.0), interval_block(3, 1.0, 2.0)};
    REQUIRE_THROWS_MATCHES(equivalent_probability_measure(skewed, 4), ToolkitError,
                           Catch::Matchers::Predicate<ToolkitError>([](const ToolkitError& e) {
                               return e.code() == Errc::InvalidArgument;
                           }));
}

TEST_CASE("equivalent probability measure: truncation rescales by the geometric tail") {
    auto make = [](int M) {
        std::vector<PartitionBlock> blocks;
        for (int m = 1; m <= M; ++m) blocks.push_back(interval_block(m, m - 1.0, m));
        return equivalent_probability_measure(blocks, 3);
    };
    for (int M : {2, 5, 11}) {
        auto small = make(M);
        auto big = make(M + 1);
        double factor = (1.0 - std::ldexp(1.0, -M)) / (1.0 - std::ldexp(1.0, -(M + 1)));
        for (std::size_t i = 0; i < small.size(); ++i)
            REQUIRE(big.weights[i] == Catch::Approx(small.weights[i] * factor).epsilon(1e-12));
    }
}

TEST_CASE("null-set equivalence at population resolution") {
    // mask one node inside block 2: zero sampler weight -> zero nu-weight
    PartitionBlock masked;
    masked.index = 2;
    masked.mass = 1.0;
    masked.sampler = [](int n, std::vector<double>& pts, std::vector<double>& wts) {
        pts.assign(static_cast<std::size_t>(n), 0.0);
        wts.assign(static_cast<std::size_t>(n), 1.0);
        for (int i = 0; i < n; ++i) pts[static_cast<std::size_t>(i)] = 1.0 + (i + 0.5) / n;
        wts[0] = 0.0;  // the masked point
    };
    auto pop = equivalent_probability_measure({interval_block(1, 0.0, 1.0), masked}, 4);
    REQUIRE(total_weight(pop) == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(pop.weights[4] == 0.0);  // first node of block 2
    for (std::size_t i = 0; i < pop.size(); ++i)
        if (i != 4) REQUIRE(pop.weights[i] > 0.0);
}

TEST_CASE("uniform population: midpoint mean and Gauss moments") {
    auto mid = uniform_population(0.0, 1.0, 100, QuadratureRule::Midpoint);
    REQUIRE(total_weight(mid) == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(integrate_scalar([](double x) { return x; }, mid).value ==
            Catch::Approx(0.5).margin(1e-4));

    auto full = uniform_population(0.0, 2.0 * std::numbers::pi, 64, QuadratureRule::GaussLegendre);
    REQUIRE(std::abs(integrate_scalar([](double x) { return std::cos(x); }, full).value) < 1e-10);

    auto cube = uniform_population(0.0, 1.0, 50, QuadratureRule::GaussLegendre);
    REQUIRE(integrate_scalar([](double x) { return x * x * x; }, cube).value ==
            Catch::Approx(0.25).margin(1e-12));
}

TEST_CASE("uniform population: Gauss rule reproduces polynomial moments exactly") {
    const int N = 8;
    auto pop = uniform_population(0.0, 1.0, N, QuadratureRule::GaussLegendre);
    for (int k = 0; k <= 2 * N - 1; ++k) {
        double est = integrate_scalar([k](double x) { return std::pow(x, k); }, pop).value;
        REQUIRE(est == Catch::Approx(1.0 / (k + 1)).margin(1e-13));
    }
}

TEST_CASE("uniform population: degenerate interval") {
    REQUIRE_THROWS_MATCHES(uniform_population(1.0, 1.0, 16, QuadratureRule::Midpoint), ToolkitError,
                           Catch::Matchers::Predicate<ToolkitError>([](const ToolkitError& e) {
                               return e.code() == Errc::DegenerateInterval;
                           }));
}

TEST_CASE("integrate: constants, a closed form, and the non-finite path") {
    auto pop = uniform_population(0.0, 1.0, 200, QuadratureRule::GaussLegendre);
    auto c = integrate_scalar([](double) { return 3.25; }, pop);
    REQUIRE(c.value == Catch::Approx(3.25).margin(1e-13));
    REQUIRE(c.standard_error == 0.0);
    REQUIRE(c.node_count == 200);

    const double closed_form = std::numbers::pi / 4.0 - std::log(2.0) / 2.0;
    auto est = integrate_scalar([](double x) { return std::atan(x); }, pop);
    REQUIRE(est.value == Catch::Approx(closed_form).margin(1e-10));
    double oracle = oracles::adaptive_simpson([](double x) { return std::atan(x); }, 0.0, 1.0, 1e-13);
    REQUIRE(est.value == Catch::Approx(oracle).margin(1e-10));

    REQUIRE_THROWS_MATCHES(
        integrate_scalar([](double x) { return x > 0.4 && x < 0.6 ? std::nan("") : 1.0; }, pop),
        ToolkitError, Catch::Matchers::Predicate<ToolkitError>([](const ToolkitError& e) {
            return e.code() == Errc::NonFiniteIntegrand;
        }));
}

TEST_CASE("population CSV round trip is bitwise") {
    auto pop = uniform_population(-2.0, 5.0, 37, QuadratureRule::GaussLegendre);
    auto again = population_from_csv(population_to_csv(pop));
    REQUIRE(again.size() == pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
        REQUIRE(again.scalar(i) == pop.scalar(i));
        REQUIRE(again.weights[i] == pop.weights[i]);
    }

    SamplePopulation vec;
    vec.dim = 2;
    vec.coords = {0.25, -1.5, 3.0, 0.125};
    vec.weights = {0.5, 0.5};
    std::string csv = population_to_csv(vec);
    REQUIRE(csv.rfind("p1,p2,weight\n", 0) == 0);
    auto vec2 = population_from_csv(csv);
    REQUIRE(vec2.dim == 2);
    REQUIRE(vec2.coords == vec.coords);
}

TEST_CASE("Monte Carlo populations are reproducible and carry standard errors") {
    auto a = monte_carlo_population(987, 5000);
    auto b = monte_carlo_population(987, 5000);
    REQUIRE(a.coords == b.coords);
    REQUIRE(a.seed == 987);
    REQUIRE(a.path_count == 5000);

    // per-path standard normals: mean near 0 at the 5-sigma scale
    auto est = integrate(
        [&](std::span<const double> x) {
            return counter_normal(987, static_cast<std::uint64_t>(x[0]), 1);
        },
        a);
    REQUIRE(est.standard_error > 0.0);
    REQUIRE(std::abs(est.value) < 5.0 * est.standard_error);
}
