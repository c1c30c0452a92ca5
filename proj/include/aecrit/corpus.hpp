#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aecrit/criterion.hpp"
#include "aecrit/errors.hpp"
#include "aecrit/fourier.hpp"
#include "aecrit/measure.hpp"
#include "aecrit/numeric.hpp"
#include "aecrit/sequence.hpp"

namespace aecrit {

inline constexpr std::uint64_t kDefaultSeed = 12345;
inline constexpr long kDefaultPaths = 10000;

struct PopulationRequest {
    int nodes = 0;  // 0 keeps the entry default
    std::uint64_t seed = kDefaultSeed;
    long paths = kDefaultPaths;
    std::optional<QuadratureRule> rule;  // quadrature entries only
};

struct LpGroundTruth {
    double p = 1.0;
    bool converges = false;
};

struct GroundTruth {
    std::optional<bool> ae_converges;
    std::optional<bool> in_measure;
    std::vector<LpGroundTruth> lp_converges;
};

/// A ground-truth input with known convergence behavior: either an indexed
/// function sequence (analyzed by the window functionals) or a periodic
/// function (analyzed through its Fourier partial sums).
struct CorpusEntry {
    std::string name;
    std::string description;
    std::string oracle_notes;
    AnalysisMode default_mode = AnalysisMode::Kappa;
    std::optional<FunctionSequence> sequence;
    std::optional<PeriodicFunction> periodic;
    std::function<SamplePopulation(const PopulationRequest&)> make_population;
    std::function<long(long)> m_cap_rule;  // null: 4n
    GroundTruth ground_truth;
};

// ---------------------------------------------------------------------------
// Typewriter indexing: pass j sweeps [0,1) with 2^j blocks of length 2^-j;
// global index n enumerates blocks across passes, 2 + 4 + ... cumulatively.
// Dyadic boundaries keep quadrature on dyadic midpoint grids exact.
// ---------------------------------------------------------------------------

struct TypewriterBlock {
    long pass = 0;
    long block = 0;  // 1-based within the pass
    double lo = 0.0;
    double hi = 0.0;
};

inline TypewriterBlock typewriter_block(long n) {
    if (n < 1) raise(Errc::InvalidArgument, "typewriter index starts at 1");
    long j = 1;
    while ((2L << j) - 2 < n) ++j;  // cumulative count through pass j is 2^{j+1} - 2
    TypewriterBlock blk;
    blk.pass = j;
    blk.block = n - ((2L << (j - 1)) - 2);
    double len = std::ldexp(1.0, -static_cast<int>(j));
    blk.lo = static_cast<double>(blk.block - 1) * len;
    blk.hi = static_cast<double>(blk.block) * len;
    return blk;
}

/// Last index of the pass after n's pass: a window [n, cap] always covers
/// one full sweep of [0,1), which saturates the windowed max everywhere.
inline long typewriter_full_pass_cap(long n) {
    long j = typewriter_block(n).pass;
    return (4L << j) - 2;  // 2^{j+2} - 2
}

namespace detail {

/// Prefix sums of the 2d random walk with steps Z_j / j^2, resumable per
/// (seed, path). Fresh and resumed evaluations accumulate terms in the same
/// j-ascending order, so results are bitwise identical either way.
inline void random_walk_2d_prefix(std::uint64_t seed, long path, long n, double& out_x,
                                  double& out_y) {
    struct Cache {
        std::uint64_t seed = 0;
        long path = -1;
        long k = 0;
        double sx = 0.0, sy = 0.0;
        bool valid = false;
    };
    thread_local Cache c;
    if (!c.valid || c.seed != seed || c.path != path || c.k > n) {
        c.seed = seed;
        c.path = path;
        c.k = 0;
        c.sx = 0.0;
        c.sy = 0.0;
        c.valid = true;
    }
    for (long j = c.k + 1; j <= n; ++j) {
        double inv = 1.0 / (static_cast<double>(j) * static_cast<double>(j));
        c.sx += counter_normal(seed, static_cast<std::uint64_t>(path), static_cast<std::uint64_t>(j), 0) * inv;
        c.sy += counter_normal(seed, static_cast<std::uint64_t>(path), static_cast<std::uint64_t>(j), 1) * inv;
    }
    c.k = n;
    out_x = c.sx;
    out_y = c.sy;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Built-in corpus
// ---------------------------------------------------------------------------

inline std::vector<CorpusEntry> builtin_corpus() {
    std::vector<CorpusEntry> entries;

    {
        CorpusEntry e;
        e.name = "power";
        e.description = "f_n(x) = x^n on uniform [0,1]";
        e.oracle_notes =
            "Window max over [n,m] is x^n; kappa_n^m = int_0^1 arctan(x^n) dx, so "
            "kappa_1^m = pi/4 - ln(2)/2 for every m >= 2 and S(n) <= 1/(n+1).";
        e.default_mode = AnalysisMode::Kappa;
        e.sequence = make_scalar_sequence(
            [](long n, double x) { return std::pow(x, static_cast<double>(n)); });
        e.make_population = [](const PopulationRequest& req) {
            return uniform_population(0.0, 1.0, req.nodes > 0 ? req.nodes : 200,
                                      req.rule.value_or(QuadratureRule::GaussLegendre));
        };
        e.ground_truth.ae_converges = true;
        e.ground_truth.in_measure = true;
        e.ground_truth.lp_converges = {{1.0, true}, {2.0, true}, {4.0, true}};
        entries.push_back(std::move(e));
    }

    {
        CorpusEntry e;
        e.name = "typewriter";
        e.description = "indicator blocks sweeping [0,1), pass j has 2^j blocks of length 2^-j";
        e.oracle_notes =
            "Converges in measure (block lengths shrink) but at no point: every pass "
            "revisits every x. With m_cap covering one full pass the windowed max is 1 "
            "a.e., so S(n) = arctan(1) = pi/4. Use a dyadic population; block edges then "
            "fall on cell boundaries and the quadrature is exact.";
        e.default_mode = AnalysisMode::Kappa;
        e.sequence = make_scalar_sequence([](long n, double x) {
            TypewriterBlock blk = typewriter_block(n);
            return (x >= blk.lo && x < blk.hi) ? 1.0 : 0.0;
        });
        e.make_population = [](const PopulationRequest& req) {
            return uniform_population(0.0, 1.0, req.nodes > 0 ? req.nodes : 4096,
                                      req.rule.value_or(QuadratureRule::Midpoint));
        };
        e.m_cap_rule = [](long n) { return typewriter_full_pass_cap(n); };
        e.ground_truth.ae_converges = false;
        e.ground_truth.in_measure = true;
        e.ground_truth.lp_converges = {{1.0, true}, {2.0, true}};
        entries.push_back(std::move(e));
    }

    {
        CorpusEntry e;
        e.name = "recip";
        e.description = "f_n = 1/n, constant in x";
        e.oracle_notes = "S(n) = arctan(1/n) exactly; Cauchy window gives arctan(1/n - 1/m).";
        e.default_mode = AnalysisMode::Kappa;
        e.sequence = make_index_sequence([](long n) { return 1.0 / static_cast<double>(n); });
        e.make_population = [](const PopulationRequest& req) {
            return uniform_population(0.0, 1.0, req.nodes > 0 ? req.nodes : 64,
                                      req.rule.value_or(QuadratureRule::Midpoint));
        };
        e.ground_truth.ae_converges = true;
        e.ground_truth.in_measure = true;
        e.ground_truth.lp_converges = {{1.0, true}, {2.0, true}};
        entries.push_back(std::move(e));
    }

    {
        CorpusEntry e;
        e.name = "oscillate";
        e.description = "f_n = (-1)^n, constant in x";
        e.oracle_notes = "S(n) = arctan(1) in kappa mode and arctan(2) in gamma mode, for all n.";
        e.default_mode = AnalysisMode::Kappa;
        e.sequence = make_index_sequence([](long n) { return n % 2 == 0 ? 1.0 : -1.0; });
        e.make_population = [](const PopulationRequest& req) {
            return uniform_population(0.0, 1.0, req.nodes > 0 ? req.nodes : 64,
                                      req.rule.value_or(QuadratureRule::Midpoint));
        };
        e.ground_truth.ae_converges = false;
        e.ground_truth.in_measure = false;
        e.ground_truth.lp_converges = {{1.0, false}, {2.0, false}};
        entries.push_back(std::move(e));
    }

    {
        CorpusEntry e;
        e.name = "shrink-spike";
        e.description = "f_n = n on [0, 1/n^2], else 0";
        e.oracle_notes =
            "Tends to 0 a.e. (for x > 0 the spike leaves x eventually) while |f_n|_p = "
            "n^{1-2/p} blows up for p > 2. S(n) <= (pi/2) / n^2.";
        e.default_mode = AnalysisMode::Kappa;
        e.sequence = make_scalar_sequence([](long n, double x) {
            double edge = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
            return x <= edge ? static_cast<double>(n) : 0.0;
        });
        e.make_population = [](const PopulationRequest& req) {
            return uniform_population(0.0, 1.0, req.nodes > 0 ? req.nodes : 4096,
                                      req.rule.value_or(QuadratureRule::Midpoint));
        };
        e.ground_truth.ae_converges = true;
        e.ground_truth.in_measure = true;
        e.ground_truth.lp_converges = {{1.0, true}, {2.0, false}, {4.0, false}};
        entries.push_back(std::move(e));
    }

    {
        CorpusEntry e;
        e.name = "random-decay";
        e.description = "xi_n = Z_n / n^2, Z_n iid standard normal per path";
        e.oracle_notes =
            "|Z_n|/n^2 -> 0 a.s.; S(n) ~ E max_{k>=n} |Z_k|/k^2 = O(log(n)/n^2). "
            "Monte Carlo estimates carry standard errors.";
        e.default_mode = AnalysisMode::Kappa;
        // sequence stays empty: Monte Carlo entries are bound to a seed via
        // bind_corpus_sequence.
        e.make_population = [](const PopulationRequest& req) {
            return monte_carlo_population(req.seed, req.paths > 0 ? req.paths : kDefaultPaths);
        };
        e.ground_truth.ae_converges = true;
        e.ground_truth.in_measure = true;
        e.ground_truth.lp_converges = {{2.0, true}};
        entries.push_back(std::move(e));
    }

    {
        CorpusEntry e;
        e.name = "random-walk-2d";
        e.description = "zeta(k) = sum_{j<=k} Z_j / j^2 in R^2, Z_j iid standard normal";
        e.oracle_notes =
            "The partial sums converge a.s. (summable step sizes), so the sequence is "
            "a.s. Cauchy; analyzed with the tau (vector Cauchy) functional. The tail sup "
            "past n is of order n^{-3/2}.";
        e.default_mode = AnalysisMode::Tau;
        e.make_population = [](const PopulationRequest& req) {
            return monte_carlo_population(req.seed, req.paths > 0 ? req.paths : kDefaultPaths);
        };
        e.ground_truth.ae_converges = true;
        e.ground_truth.in_measure = true;
        entries.push_back(std::move(e));
    }

    {
        CorpusEntry e;
        e.name = "cosine";
        e.description = "g(x) = cos(x)";
        e.oracle_notes = "Partial sums reproduce g exactly for n >= 1; theta vanishes.";
        e.default_mode = AnalysisMode::Theta;
        e.periodic = PeriodicFunction{"cosine", [](double x) { return std::cos(x); },
                                      SmoothnessHint::trig_poly(1)};
        e.make_population = [](const PopulationRequest& req) {
            return uniform_population(0.0, kTwoPi, req.nodes > 0 ? req.nodes : 2048,
                                      req.rule.value_or(QuadratureRule::Midpoint));
        };
        e.ground_truth.ae_converges = true;
        e.ground_truth.in_measure = true;
        entries.push_back(std::move(e));
    }

    {
        CorpusEntry e;
        e.name = "trigpoly-8";
        e.description = "trig polynomial of degree 8: a_k = 1/(k^2+1), b_k = k/(k^2+1)";
        e.oracle_notes = "Partial sums are exact from n = 8 on; theta_n^m = 0 for n >= 8.";
        e.default_mode = AnalysisMode::Theta;
        e.periodic = PeriodicFunction{
            "trigpoly-8",
            [](double x) {
                double s = 1.0;  // a_0/2 with a_0 = 2
                for (int k = 1; k <= 8; ++k) {
                    double den = static_cast<double>(k) * k + 1.0;
                    s += std::cos(k * x) / den + static_cast<double>(k) * std::sin(k * x) / den;
                }
                return s;
            },
            SmoothnessHint::trig_poly(8)};
        e.make_population = [](const PopulationRequest& req) {
            return uniform_population(0.0, kTwoPi, req.nodes > 0 ? req.nodes : 2048,
                                      req.rule.value_or(QuadratureRule::Midpoint));
        };
        e.ground_truth.ae_converges = true;
        e.ground_truth.in_measure = true;
        entries.push_back(std::move(e));
    }

    {
        CorpusEntry e;
        e.name = "square-wave";
        e.description = "g(x) = sign(pi - x) on [0, 2 pi)";
        e.oracle_notes =
            "Coefficients: b_k = 4/(pi k) for odd k, 0 otherwise. Partial sums converge "
            "a.e. (everywhere except the jumps); s_9 at pi/2 equals the odd-harmonic sum "
            "(4/pi)(1 - 1/3 + 1/5 - 1/7 + 1/9).";
        e.default_mode = AnalysisMode::Theta;
        e.periodic = PeriodicFunction{"square-wave",
                                      [](double x) {
                                          if (x == 0.0 || x == std::numbers::pi) return 0.0;
                                          return x < std::numbers::pi ? 1.0 : -1.0;
                                      },
                                      SmoothnessHint::piecewise({0.0, std::numbers::pi})};
        e.make_population = [](const PopulationRequest& req) {
            return uniform_population(0.0, kTwoPi, req.nodes > 0 ? req.nodes : 2048,
                                      req.rule.value_or(QuadratureRule::Midpoint));
        };
        e.ground_truth.ae_converges = true;
        e.ground_truth.in_measure = true;
        entries.push_back(std::move(e));
    }

    {
        CorpusEntry e;
        e.name = "sawtooth";
        e.description = "g(x) = (pi - x)/pi on [0, 2 pi)";
        e.oracle_notes = "Fourier series (2/pi) sum sin(kx)/k; converges a.e.";
        e.default_mode = AnalysisMode::Theta;
        e.periodic = PeriodicFunction{"sawtooth",
                                      [](double x) { return (std::numbers::pi - x) / std::numbers::pi; },
                                      SmoothnessHint::piecewise({0.0})};
        e.make_population = [](const PopulationRequest& req) {
            return uniform_population(0.0, kTwoPi, req.nodes > 0 ? req.nodes : 2048,
                                      req.rule.value_or(QuadratureRule::Midpoint));
        };
        e.ground_truth.ae_converges = true;
        e.ground_truth.in_measure = true;
        entries.push_back(std::move(e));
    }

    return entries;
}

/// The entry's function sequence; Monte Carlo entries are bound to the seed
/// their population was drawn with.
inline FunctionSequence bind_corpus_sequence(const CorpusEntry& entry, std::uint64_t seed) {
    if (entry.name == "random-decay") {
        FunctionSequence seq;
        seq.value_dim = 1;
        seq.eval = [seed](long n, std::span<const double> x, std::span<double> out) {
            long path = static_cast<long>(x[0]);
            out[0] = counter_normal(seed, static_cast<std::uint64_t>(path),
                                    static_cast<std::uint64_t>(n)) /
                     (static_cast<double>(n) * static_cast<double>(n));
        };
        return seq;
    }
    if (entry.name == "random-walk-2d") {
        FunctionSequence seq;
        seq.value_dim = 2;
        seq.norm = VectorNorm::Euclidean;
        seq.eval = [seed](long n, std::span<const double> x, std::span<double> out) {
            long path = static_cast<long>(x[0]);
            detail::random_walk_2d_prefix(seed, path, n, out[0], out[1]);
        };
        return seq;
    }
    if (!entry.sequence)
        raise(Errc::InvalidArgument, "corpus entry '" + entry.name + "' has no function sequence");
    return *entry.sequence;
}

inline bool corpus_entry_is_random(const CorpusEntry& entry) {
    return entry.name == "random-decay" || entry.name == "random-walk-2d";
}

inline const CorpusEntry* find_corpus_entry(const std::vector<CorpusEntry>& corpus,
                                            const std::string& name) {
    for (const auto& e : corpus)
        if (e.name == name) return &e;
    return nullptr;
}

}  // namespace aecrit
