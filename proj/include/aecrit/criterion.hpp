#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aecrit/errors.hpp"
#include "aecrit/measure.hpp"
#include "aecrit/numeric.hpp"
#include "aecrit/parallel.hpp"
#include "aecrit/sequence.hpp"
#include "aecrit/trial.hpp"

namespace aecrit {

enum class AnalysisMode { Kappa, Gamma, Tau, Theta, Lambda, Lp, InProb, Moment };

inline const char* mode_name(AnalysisMode m) {
    switch (m) {
        case AnalysisMode::Kappa: return "kappa";
        case AnalysisMode::Gamma: return "gamma";
        case AnalysisMode::Tau: return "tau";
        case AnalysisMode::Theta: return "theta";
        case AnalysisMode::Lambda: return "lambda";
        case AnalysisMode::Lp: return "lp";
        case AnalysisMode::InProb: return "in-prob";
        case AnalysisMode::Moment: return "moment";
    }
    return "?";
}

/// Window functional values over an (n, m) grid. Row i holds the values for
/// n = n_grid[i] at m = n + 1 .. m_cap[i]; cap_probe[i] is the value one
/// step past the cap, kept as a saturation diagnostic and never part of the
/// table proper.
struct CriticalWindowTable {
    AnalysisMode mode = AnalysisMode::Kappa;
    std::string phi_name;
    std::vector<long> n_grid;
    std::vector<long> m_cap;
    std::vector<std::vector<double>> values;
    std::vector<std::vector<double>> std_errors;  // zeros for quadrature populations
    std::vector<double> cap_probe;                // NaN when not probed
    bool monte_carlo = false;
    bool sup_at_right_endpoint = true;  // windowed maxima are monotone in m

    double value_at(std::size_t row, long m) const {
        return values[row][static_cast<std::size_t>(m - n_grid[row] - 1)];
    }
    double std_err_at(std::size_t row, long m) const {
        return std_errors[row][static_cast<std::size_t>(m - n_grid[row] - 1)];
    }
};

struct TailPoint {
    long n = 0;
    double value = 0.0;
    double std_err = 0.0;
};

enum class Verdict { Converges, Diverges, Inconclusive };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Converges: return "CONVERGES";
        case Verdict::Diverges: return "DIVERGES";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

struct VerdictThresholds {
    double eps_pass = 0.01;
    double eps_fail = 0.2;
    double plateau_rel_change = 0.1;  // relative change over the last three n values
    double mc_margin_sigmas = 3.0;    // required margin in standard errors
    double rise_rel_tol = 0.05;       // tail still rising at m_cap when the probe step
    double rise_abs_tol = 1e-9;       // exceeds max(abs, rel * S(n))
};

struct ConvergenceVerdict {
    Verdict verdict = Verdict::Inconclusive;
    std::vector<TailPoint> tail_profile;
    VerdictThresholds thresholds;
    std::vector<std::string> warnings;
    std::string caveat;
};

// ---------------------------------------------------------------------------
// Window engine
// ---------------------------------------------------------------------------

/// AbsMax: max_k ||f_k||      (vanishing-limit form)
/// CauchyMax: max_k ||f_k - f_n||  (existence-of-limit form)
enum class WindowKind { AbsMax, CauchyMax };

struct WindowGrid {
    std::vector<long> n_grid;
    std::function<long(long)> m_cap;  // cap per n, must be > n
    bool probe_beyond_cap = true;
    int workers = 1;
};

inline std::vector<long> default_n_grid() { return {4, 8, 16, 32, 64, 128}; }

inline std::function<long(long)> m_cap_multiple(long factor) {
    return [factor](long n) { return factor * n; };
}

namespace detail {

struct RowAccumulator {
    std::vector<CompensatedSum> sum;
    std::vector<CompensatedSum> sum_sq;
    std::size_t bad_point = SIZE_MAX;
    long bad_index = 0;
};

/// One table row: integrals of phi(windowed max) for every m in (n, cap],
/// plus an optional probe at cap + 1. Deterministic for any worker count.
inline void window_row(const FunctionSequence& seq, const SamplePopulation& pop,
                       const TrialFunction& phi, WindowKind kind, long n, long cap,
                       bool probe, int workers, std::vector<double>& out_values,
                       std::vector<double>& out_errors, double& out_probe) {
    const long last = probe ? cap + 1 : cap;
    const std::size_t cols = static_cast<std::size_t>(last - n);
    const std::size_t points = pop.size();
    const std::size_t chunks = chunk_count(points);
    const bool mc = pop.provenance == Provenance::MonteCarlo;

    std::vector<RowAccumulator> acc(chunks);
    for_each_chunk(points, workers, [&](std::size_t c, std::size_t lo, std::size_t hi) {
        RowAccumulator& a = acc[c];
        a.sum.resize(cols);
        if (mc) a.sum_sq.resize(cols);
        SequenceScratch scratch(seq);
        std::vector<double> reference(static_cast<std::size_t>(seq.value_dim));
        for (std::size_t i = lo; i < hi; ++i) {
            auto x = pop.point(i);
            const double w = pop.weights[i];
            double running = 0.0;
            if (kind == WindowKind::AbsMax) {
                running = sequence_magnitude(seq, n, x, scratch);
            } else {
                sequence_value(seq, n, x, std::span<double>(reference), scratch);
            }
            for (long m = n + 1; m <= last; ++m) {
                double mag;
                if (kind == WindowKind::AbsMax) {
                    mag = sequence_magnitude(seq, m, x, scratch);
                } else {
                    sequence_value(seq, m, x, std::span<double>(scratch.value), scratch);
                    for (std::size_t d = 0; d < reference.size(); ++d)
                        scratch.value[d] -= reference[d];
                    mag = vector_norm(std::span<const double>(scratch.value), seq.norm);
                }
                running = std::max(running, mag);
                double v = phi(running);
                if (!std::isfinite(v) || !std::isfinite(running)) {
                    if (a.bad_point == SIZE_MAX) {
                        a.bad_point = i;
                        a.bad_index = m;
                    }
                    break;
                }
                const std::size_t col = static_cast<std::size_t>(m - n - 1);
                a.sum[col].add(w * v);
                if (mc) a.sum_sq[col].add(w * v * v);
            }
        }
    });

    for (const auto& a : acc) {
        if (a.bad_point != SIZE_MAX)
            raise(Errc::NonFiniteIntegrand,
                  "sequence value not finite at point #" + std::to_string(a.bad_point) +
                      ", index " + std::to_string(a.bad_index));
    }

    out_values.assign(cols, 0.0);
    out_errors.assign(cols, 0.0);
    const double paths = static_cast<double>(pop.path_count.value_or(static_cast<long>(points)));
    for (std::size_t col = 0; col < cols; ++col) {
        CompensatedSum total, total_sq;
        for (const auto& a : acc) {
            total.add(a.sum[col].value());
            if (mc) total_sq.add(a.sum_sq[col].value());
        }
        out_values[col] = total.value();
        if (mc) {
            double var = total_sq.value() - out_values[col] * out_values[col];
            if (paths > 1.0) var *= paths / (paths - 1.0);
            out_errors[col] = std::sqrt(std::max(0.0, var) / paths);
        }
    }
    if (probe) {
        out_probe = out_values.back();
        out_values.pop_back();
        out_errors.pop_back();
    } else {
        out_probe = std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace detail

inline CriticalWindowTable build_window_table(const FunctionSequence& seq,
                                              const SamplePopulation& pop,
                                              const TrialFunction& phi, WindowKind kind,
                                              AnalysisMode mode, const WindowGrid& grid) {
    if (grid.n_grid.empty()) raise(Errc::InvalidArgument, "n_grid is empty");
    for (std::size_t i = 0; i + 1 < grid.n_grid.size(); ++i)
        if (grid.n_grid[i] >= grid.n_grid[i + 1])
            raise(Errc::InvalidArgument, "n_grid must be strictly increasing");

    CriticalWindowTable table;
    table.mode = mode;
    table.phi_name = phi.name;
    table.n_grid = grid.n_grid;
    table.monte_carlo = pop.provenance == Provenance::MonteCarlo;
    table.values.resize(grid.n_grid.size());
    table.std_errors.resize(grid.n_grid.size());
    table.cap_probe.resize(grid.n_grid.size());
    table.m_cap.resize(grid.n_grid.size());
    for (std::size_t i = 0; i < grid.n_grid.size(); ++i) {
        long n = grid.n_grid[i];
        long cap = grid.m_cap ? grid.m_cap(n) : 4 * n;
        if (cap <= n) raise(Errc::WindowEmpty, "m_cap(" + std::to_string(n) + ") <= n");
        table.m_cap[i] = cap;
        detail::window_row(seq, pop, phi, kind, n, cap, grid.probe_beyond_cap, grid.workers,
                           table.values[i], table.std_errors[i], table.cap_probe[i]);
    }
    return table;
}

// ---------------------------------------------------------------------------
// Single-window functionals
// ---------------------------------------------------------------------------

/// kappa_n^m: integral of phi(max_{k=n..m} ||f_k||), one pass per point with
/// a running maximum over the window.
inline IntegralEstimate kappa_window(const FunctionSequence& seq, const SamplePopulation& pop,
                                     const TrialFunction& phi, long n, long m, int workers = 1) {
    if (m <= n) raise(Errc::WindowEmpty, "window needs m >= n + 1");
    std::vector<double> vals, errs;
    double probe;
    detail::window_row(seq, pop, phi, WindowKind::AbsMax, n, m, false, workers, vals, errs, probe);
    return IntegralEstimate{vals.back(), errs.back(), static_cast<long>(pop.size())};
}

/// gamma_n^m: expectation of arctan(max_{k=n..m} |xi(k) - xi(n)|).
inline IntegralEstimate gamma_window(const FunctionSequence& seq, const SamplePopulation& pop,
                                     long n, long m, int workers = 1) {
    if (m <= n) raise(Errc::WindowEmpty, "window needs m >= n + 1");
    std::vector<double> vals, errs;
    double probe;
    detail::window_row(seq, pop, trial_arctan(), WindowKind::CauchyMax, n, m, false, workers, vals,
                       errs, probe);
    return IntegralEstimate{vals.back(), errs.back(), static_cast<long>(pop.size())};
}

/// tau_n^m: the gamma functional for Banach-valued sequences; the trial
/// function is composed with the selected norm of zeta(k) - zeta(n).
inline IntegralEstimate tau_window(const FunctionSequence& seq, const SamplePopulation& pop,
                                   long n, long m, int workers = 1) {
    if (seq.value_dim < 2)
        raise(Errc::InvalidArgument, "tau window needs value_dim >= 2 (use gamma for scalars)");
    return gamma_window(seq, pop, n, m, workers);
}

/// E max_{k=n..m} phi(||f_k||): the same quantity as kappa via monotonicity
/// of phi, computed along the other algebraic route (max of phi values).
inline IntegralEstimate phi_max_expectation(const FunctionSequence& seq,
                                            const SamplePopulation& pop, const TrialFunction& phi,
                                            long n, long m, int workers = 1) {
    if (m < n) raise(Errc::WindowEmpty, "window needs m >= n");
    return integrate(
        [&](std::span<const double> x) {
            SequenceScratch scratch(seq);
            double best = 0.0;
            for (long k = n; k <= m; ++k)
                best = std::max(best, phi(sequence_magnitude(seq, k, x, scratch)));
            return best;
        },
        pop, workers);
}

// ---------------------------------------------------------------------------
// Tail profile and verdict
// ---------------------------------------------------------------------------

/// S(n): the window sup at the cap. For monotone (running max) tables this
/// is the right endpoint; otherwise the explicit row maximum.
inline std::vector<TailPoint> tail_sup_profile(const CriticalWindowTable& table) {
    std::vector<TailPoint> profile;
    profile.reserve(table.n_grid.size());
    for (std::size_t i = 0; i < table.n_grid.size(); ++i) {
        TailPoint p;
        p.n = table.n_grid[i];
        if (table.sup_at_right_endpoint) {
            p.value = table.values[i].back();
            p.std_err = table.std_errors[i].back();
        } else {
            std::size_t best = 0;
            for (std::size_t j = 1; j < table.values[i].size(); ++j)
                if (table.values[i][j] > table.values[i][best]) best = j;
            p.value = table.values[i][best];
            p.std_err = table.std_errors[i][best];
        }
        profile.push_back(p);
    }
    return profile;
}

/// Applies the decision rule to a completed table. CONVERGES requires the
/// final tail value under eps_pass with a nonincreasing tail; DIVERGES
/// requires a plateau at or above eps_fail. Monte Carlo tables must clear
/// the thresholds by mc_margin_sigmas standard errors, and a tail that is
/// still rising at the cap downgrades CONVERGES to INCONCLUSIVE.
inline ConvergenceVerdict make_verdict(const CriticalWindowTable& table,
                                       const VerdictThresholds& th,
                                       const std::string& caveat_context = "") {
    if (!(th.eps_pass > 0.0) || !(th.eps_pass < th.eps_fail))
        raise(Errc::BadThresholds, "need 0 < eps_pass < eps_fail");
    if (table.n_grid.size() < 4)
        raise(Errc::InvalidArgument, "verdict needs an n_grid with >= 4 entries");

    ConvergenceVerdict out;
    out.thresholds = th;
    out.tail_profile = tail_sup_profile(table);
    const auto& S = out.tail_profile;
    const std::size_t N = S.size();

    bool rising = false;
    for (std::size_t i = N - 3; i < N; ++i) {
        if (!std::isnan(table.cap_probe[i])) {
            double step = table.cap_probe[i] - S[i].value;
            double tol = std::max(th.rise_abs_tol, th.rise_rel_tol * S[i].value);
            if (table.monte_carlo) tol = std::max(tol, th.mc_margin_sigmas * S[i].std_err);
            if (step > tol) {
                rising = true;
                out.warnings.push_back("tail sup still rising at m_cap for n=" +
                                       std::to_string(S[i].n) +
                                       " (step " + format_double(step) +
                                       " past the cap); widen m_cap");
            }
        }
    }

    bool nonincreasing = true;
    for (std::size_t i = N - 2; i < N; ++i) {
        double slack = std::max(1e-12, th.mc_margin_sigmas * (S[i - 1].std_err + S[i].std_err));
        if (S[i].value > S[i - 1].value + slack) nonincreasing = false;
    }

    bool pass_level = S.back().value < th.eps_pass;
    bool pass_margin = !table.monte_carlo ||
                       (th.eps_pass - S.back().value) > th.mc_margin_sigmas * S.back().std_err;

    bool fail_level = true, fail_margin = true;
    double last3_min = S[N - 3].value, last3_max = S[N - 3].value;
    for (std::size_t i = N - 3; i < N; ++i) {
        if (S[i].value < th.eps_fail) fail_level = false;
        if (table.monte_carlo &&
            (S[i].value - th.eps_fail) <= th.mc_margin_sigmas * S[i].std_err)
            fail_margin = false;
        last3_min = std::min(last3_min, S[i].value);
        last3_max = std::max(last3_max, S[i].value);
    }
    // plateau: the last three values agree to within the relative tolerance;
    // a tail that is still visibly decaying stays INCONCLUSIVE
    bool plateau = last3_max > 0.0 && (last3_max - last3_min) < th.plateau_rel_change * last3_max;

    if (fail_level && plateau && fail_margin) {
        out.verdict = Verdict::Diverges;
    } else if (pass_level && nonincreasing && pass_margin && !rising) {
        out.verdict = Verdict::Converges;
    } else {
        out.verdict = Verdict::Inconclusive;
        if (pass_level && nonincreasing && !pass_margin)
            out.warnings.push_back("tail is below eps_pass but within " +
                                   format_double(th.mc_margin_sigmas) +
                                   " standard errors of it; raise the path count");
    }

    out.caveat =
        "Numerical evidence at truncation scale only (n_max=" + std::to_string(S.back().n) +
        ", m_cap(n_max)=" + std::to_string(table.m_cap.back()) + ", " +
        std::to_string(table.values.back().size()) + " window columns, population of " +
        (table.monte_carlo ? std::string("sample paths") : std::string("quadrature nodes")) +
        "); verdicts are evidence, not proofs." +
        (caveat_context.empty() ? "" : " " + caveat_context);
    return out;
}

// ---------------------------------------------------------------------------
// In-probability criterion
// ---------------------------------------------------------------------------

struct PairTable {
    std::vector<std::pair<long, long>> pairs;
    std::vector<double> values;
    std::vector<double> std_errors;
};

/// E arctan||eta_n - eta_m|| over a pair grid; the diagonal tending to zero
/// evidences convergence in probability (in measure).
inline PairTable in_probability_criterion(const FunctionSequence& seq,
                                          const SamplePopulation& pop,
                                          const std::vector<std::pair<long, long>>& pair_grid,
                                          int workers = 1) {
    if (pair_grid.empty()) raise(Errc::InvalidArgument, "pair grid is empty");
    PairTable out;
    out.pairs = pair_grid;
    const TrialFunction phi = trial_arctan();
    for (auto [n, m] : pair_grid) {
        if (m <= n) raise(Errc::WindowEmpty, "pair needs m > n");
        auto est = integrate(
            [&](std::span<const double> x) {
                SequenceScratch scratch(seq);
                std::vector<double> a(static_cast<std::size_t>(seq.value_dim));
                sequence_value(seq, n, x, std::span<double>(a), scratch);
                sequence_value(seq, m, x, std::span<double>(scratch.value), scratch);
                for (std::size_t d = 0; d < a.size(); ++d) a[d] -= scratch.value[d];
                return phi(vector_norm(std::span<const double>(a), seq.norm));
            },
            pop, workers);
        out.values.push_back(est.value);
        out.std_errors.push_back(est.standard_error);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Moment (Orlicz-style) convergence check
// ---------------------------------------------------------------------------

struct MomentReport {
    std::vector<long> n_grid;
    std::vector<double> values;      // integral of phi(||f_n||) per n
    std::vector<double> std_errors;
    double sup_value = 0.0;          // sup over the probed n
    double window_sup = 0.0;         // sup_n sup_m kappa_n^m at the caps
    bool tends_to_zero = false;
    bool bound_holds = false;
};

/// Per-n moments of an unbounded trial function, their running sup, and the
/// numerical check that the sup is dominated by the window-functional sup.
inline MomentReport moment_convergence_check(const FunctionSequence& seq,
                                             const SamplePopulation& pop,
                                             const TrialFunction& phi,
                                             const WindowGrid& grid,
                                             double zero_tol = 0.01) {
    if (phi.declared_class != TrialClass::K)
        raise(Errc::InvalidArgument, "moment check expects an unbounded (class K) trial function");
    MomentReport rep;
    rep.n_grid = grid.n_grid;
    for (long n : grid.n_grid) {
        IntegralEstimate est;
        try {
            est = integrate(
                [&](std::span<const double> x) {
                    SequenceScratch scratch(seq);
                    return phi(sequence_magnitude(seq, n, x, scratch));
                },
                pop, grid.workers);
        } catch (const ToolkitError& e) {
            if (e.code() == Errc::NonFiniteIntegrand)
                raise(Errc::Overflow, std::string("phi(||f_n||) overflowed: ") + e.what() +
                                          " at n=" + std::to_string(n));
            throw;
        }
        rep.values.push_back(est.value);
        rep.std_errors.push_back(est.standard_error);
        rep.sup_value = std::max(rep.sup_value, est.value);
    }
    auto table = build_window_table(seq, pop, phi, WindowKind::AbsMax, AnalysisMode::Moment, grid);
    for (auto S : tail_sup_profile(table)) rep.window_sup = std::max(rep.window_sup, S.value);
    const std::size_t N = rep.values.size();
    rep.tends_to_zero = N >= 3 && rep.values[N - 1] < zero_tol &&
                        rep.values[N - 1] <= rep.values[N - 3] + 1e-12;
    rep.bound_holds = rep.sup_value <= rep.window_sup + 1e-12;
    return rep;
}

// ---------------------------------------------------------------------------
// Tchebychev step of the sufficiency proof
// ---------------------------------------------------------------------------

struct TchebyshevBound {
    double measure_lhs = 0.0;  // nu{ max_{k in [N, N+Q]} arctan||f_k|| >= 1/s }
    double bound_rhs = 0.0;    // kappa_N^{N+Q} / arctan(1/s)
    bool holds = false;
};

inline TchebyshevBound tchebyshev_window_bound(const FunctionSequence& seq,
                                               const SamplePopulation& pop, long N, long Q,
                                               double s, int workers = 1) {
    if (Q < 1) raise(Errc::WindowEmpty, "Q must be >= 1");
    if (!(s > 0.0)) raise(Errc::InvalidArgument, "s must be positive");
    const TrialFunction phi = trial_arctan();
    const double level = 1.0 / s;
    auto indicator = integrate(
        [&](std::span<const double> x) {
            SequenceScratch scratch(seq);
            double best = 0.0;
            for (long k = N; k <= N + Q; ++k)
                best = std::max(best, std::atan(sequence_magnitude(seq, k, x, scratch)));
            return best >= level ? 1.0 : 0.0;
        },
        pop, workers);
    auto kappa = kappa_window(seq, pop, phi, N, N + Q, workers);
    TchebyshevBound out;
    out.measure_lhs = indicator.value;
    out.bound_rhs = kappa.value / std::atan(level);
    out.holds = out.measure_lhs <= out.bound_rhs + 1e-12;
    return out;
}

}  // namespace aecrit
