#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "aecrit/corpus.hpp"
#include "aecrit/fourier.hpp"
#include "oracles.hpp"

using namespace aecrit;

namespace {

const double kPi = std::numbers::pi;

const PeriodicFunction& square_wave() {
    static auto corpus = builtin_corpus();
    return *find_corpus_entry(corpus, "square-wave")->periodic;
}

const PeriodicFunction& trigpoly8() {
    static auto corpus = builtin_corpus();
    return *find_corpus_entry(corpus, "trigpoly-8")->periodic;
}

}  // namespace

TEST_CASE("Dirichlet kernel values and symmetry") {
    REQUIRE(dirichlet_kernel(5, 0.0) == Catch::Approx(11.0 / (2.0 * kPi)).margin(1e-13));
    for (double x : {-3.0, -0.5, 0.1, 2.9})
        REQUIRE(dirichlet_kernel(0, x) == Catch::Approx(1.0 / (2.0 * kPi)).margin(1e-15));
    for (double x : {1e-9, 1e-6, 0.37, 2.0, 3.1})
        for (long n : {1L, 8L, 33L})
            REQUIRE(dirichlet_kernel(n, -x) == Catch::Approx(dirichlet_kernel(n, x)).margin(1e-13));
    // periodicity through the argument reduction
    REQUIRE(dirichlet_kernel(7, 0.3 + 4.0 * kPi) ==
            Catch::Approx(dirichlet_kernel(7, 0.3)).margin(1e-12));
    REQUIRE_THROWS_AS(dirichlet_kernel(-1, 0.0), ToolkitError);
}

TEST_CASE("Dirichlet kernel integrates to one") {
    for (long n : {0L, 1L, 7L, 33L, 64L}) {
        double integral = oracles::adaptive_simpson(
            [n](double x) { return dirichlet_kernel(n, x); }, 0.0, 2.0 * kPi, 1e-12,
            std::max(32, 8 * (static_cast<int>(n) + 1)));
        REQUIRE(integral == Catch::Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("difference kernel: identity, limit, and the single-harmonic case") {
    REQUIRE(difference_kernel(5, 3, 1.0) ==
            Catch::Approx(dirichlet_kernel(5, 1.0) - dirichlet_kernel(3, 1.0)).margin(1e-12));

    // x -> 0 limit is (m - n)/pi
    REQUIRE(difference_kernel(5, 3, 0.0) == Catch::Approx(2.0 / kPi).margin(1e-13));
    REQUIRE(difference_kernel(9, 2, 1e-12) == Catch::Approx(7.0 / kPi).margin(1e-12));

    // m = n + 1 collapses to one harmonic pair: cos((n+1)x)/pi
    for (long n : {0L, 2L, 9L})
        for (double x : {1e-7, 0.2, 1.0, 2.8})
            REQUIRE(difference_kernel(n + 1, n, x) ==
                    Catch::Approx(std::cos((n + 1) * x) / kPi).margin(1e-12));

    REQUIRE_THROWS_MATCHES(difference_kernel(3, 3, 0.5), ToolkitError,
                           Catch::Matchers::Predicate<ToolkitError>(
                               [](const ToolkitError& e) { return e.code() == Errc::BadDegrees; }));
}

TEST_CASE("difference kernel identity on a grid crossing the singularity") {
    std::vector<double> xs;
    for (int i = 0; i < 994; ++i) xs.push_back(-kPi + (i + 0.5) * (2.0 * kPi / 994.0));
    for (double t : {1e-6, -1e-6, 1e-7}) xs.push_back(t);
    for (auto [m, n] : {std::pair<long, long>{5, 3}, {12, 2}, {64, 63}}) {
        for (double x : xs) {
            double direct = difference_kernel(m, n, x);
            double via_kernels = dirichlet_kernel(m, x) - dirichlet_kernel(n, x);
            REQUIRE(direct == Catch::Approx(via_kernels).margin(1e-12));
        }
    }
}

TEST_CASE("partial sums reproduce single harmonics") {
    PeriodicFunction cosine{"cosine", [](double x) { return std::cos(x); },
                            SmoothnessHint::trig_poly(1)};
    for (long n : {1L, 2L, 9L}) {
        for (double x : {0.0, 0.31, 1.7, 5.9}) {
            REQUIRE(partial_sum(cosine, n, x, PartialSumMethod::Convolution) ==
                    Catch::Approx(std::cos(x)).margin(1e-10));
            REQUIRE(partial_sum(cosine, n, x, PartialSumMethod::Coefficients) ==
                    Catch::Approx(std::cos(x)).margin(1e-10));
        }
    }
    // n = 0 keeps only the (zero) mean
    REQUIRE(partial_sum(cosine, 0, 0.4, PartialSumMethod::Convolution) ==
            Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("the two partial-sum routes agree on smooth inputs") {
    for (const PeriodicFunction* g : {&trigpoly8(), &square_wave()}) {
        for (long n : {3L, 9L, 17L}) {
            for (int i = 0; i < 9; ++i) {
                double x = 2.0 * kPi * (i + 0.3) / 9.0;
                double conv = partial_sum(*g, n, x, PartialSumMethod::Convolution);
                double coef = partial_sum(*g, n, x, PartialSumMethod::Coefficients);
                INFO(g->name << " n=" << n << " x=" << x);
                REQUIRE(conv == Catch::Approx(coef).margin(1e-6));
            }
        }
    }
}

TEST_CASE("square-wave partial sum at the quarter period") {
    // odd-harmonic sum: (4/pi) (1 - 1/3 + 1/5 - 1/7 + 1/9)
    double oracle = 0.0;
    for (int j : {1, 3, 5, 7, 9}) oracle += std::sin(j * kPi / 2.0) / j;
    oracle *= 4.0 / kPi;
    double conv = partial_sum(square_wave(), 9, kPi / 2.0, PartialSumMethod::Convolution);
    double coef = partial_sum(square_wave(), 9, kPi / 2.0, PartialSumMethod::Coefficients);
    REQUIRE(conv == Catch::Approx(oracle).margin(1e-6));
    REQUIRE(coef == Catch::Approx(oracle).margin(1e-6));
    // the square wave's even harmonics vanish; spot-check the coefficients
    auto co = fourier_coefficients(square_wave(), 10);
    REQUIRE(co.b[1] == Catch::Approx(4.0 / kPi).margin(1e-10));
    REQUIRE(co.b[2] == Catch::Approx(0.0).margin(1e-10));
    REQUIRE(co.b[9] == Catch::Approx(4.0 / (9.0 * kPi)).margin(1e-10));
    REQUIRE(co.a[5] == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("theta vanishes once the window passes the polynomial degree") {
    auto pop = uniform_population(0.0, 2.0 * kPi, 1024, QuadratureRule::Midpoint);
    FourierSeries cos_series(
        PeriodicFunction{"cosine", [](double x) { return std::cos(x); }, SmoothnessHint::trig_poly(1)},
        64);
    for (long n : {1L, 4L}) REQUIRE(theta_window(cos_series, pop, n, 4 * n).value < 1e-10);

    FourierSeries poly_series(trigpoly8(), 80);
    for (long n : {8L, 16L}) REQUIRE(theta_window(poly_series, pop, n, 4 * n).value < 1e-10);
    // below the degree the tail is genuinely nonzero
    REQUIRE(theta_window(poly_series, pop, 2, 8).value > 1e-3);
    REQUIRE_THROWS_AS(theta_window(poly_series, pop, 8, 8), ToolkitError);
    REQUIRE_THROWS_AS(theta_window(poly_series, pop, 8, 200), ToolkitError);
}

TEST_CASE("theta verdict: square wave converges; the table is monotone") {
    auto corpus = builtin_corpus();
    const auto* sw = find_corpus_entry(corpus, "square-wave");
    auto pop = sw->make_population(PopulationRequest{});
    WindowGrid grid;
    grid.n_grid = {8, 16, 32, 64};
    grid.m_cap = m_cap_multiple(4);
    auto series = std::make_shared<const FourierSeries>(*sw->periodic, 4 * 64 + 1);
    auto table = build_theta_table(series, pop, grid);
    VerdictThresholds th;
    th.eps_pass = 0.05;
    auto v = make_verdict(table, th);
    REQUIRE(v.verdict == Verdict::Converges);
    for (std::size_t i = 0; i < table.values.size(); ++i)
        for (std::size_t j = 1; j < table.values[i].size(); ++j)
            REQUIRE(table.values[i][j] >= table.values[i][j - 1] - 1e-12);
    for (std::size_t i = 1; i < v.tail_profile.size(); ++i)
        REQUIRE(v.tail_profile[i].value < v.tail_profile[i - 1].value);

    // the uniform variant dominates scaled pointwise values near the jump
    double uniform = theta_uniform_variant(*series, pop, 8, 32);
    REQUIRE(uniform > 0.0);
    REQUIRE(uniform <= 2.0 * kPi * kPi / 2.0);
}

TEST_CASE("Antonov functional under both cutoff conventions") {
    auto pop = uniform_population(0.0, 2.0 * kPi, 512, QuadratureRule::Midpoint);
    const double e = std::numbers::e;

    PeriodicFunction one{"one", [](double) { return 1.0; }, SmoothnessHint::trig_poly(0)};
    double printed = antonov_functional(one, pop, LnPlusVariant::Printed).value;
    double conventional = antonov_functional(one, pop, LnPlusVariant::Conventional).value;
    REQUIRE(printed == Catch::Approx(2.0 * kPi * e * e).margin(1e-6));
    REQUIRE(conventional == Catch::Approx(2.0 * kPi).margin(1e-6));
    REQUIRE(std::abs(printed - conventional) > 1.0);

    PeriodicFunction zero{"zero", [](double) { return 0.0; }, SmoothnessHint::trig_poly(0)};
    REQUIRE(antonov_functional(zero, pop, LnPlusVariant::Printed).value == 0.0);

    // g = e^e: printed chain gives e * e, conventional gives e * 1
    PeriodicFunction gee{"e-to-e", [e](double) { return std::exp(e); }, SmoothnessHint::trig_poly(0)};
    double p2 = antonov_functional(gee, pop, LnPlusVariant::Printed).value;
    double c2 = antonov_functional(gee, pop, LnPlusVariant::Conventional).value;
    REQUIRE(p2 == Catch::Approx(2.0 * kPi * std::exp(e + 2.0)).epsilon(1e-12));
    REQUIRE(c2 == Catch::Approx(2.0 * kPi * std::exp(e + 1.0)).epsilon(1e-12));
    // regression lock (values from the closed-form chain above)
    REQUIRE(p2 == Catch::Approx(703.564034297964).epsilon(1e-12));
    REQUIRE(c2 == Catch::Approx(258.82674376586056).epsilon(1e-12));
}
