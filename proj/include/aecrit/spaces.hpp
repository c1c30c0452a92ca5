#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "aecrit/criterion.hpp"
#include "aecrit/errors.hpp"
#include "aecrit/measure.hpp"
#include "aecrit/sequence.hpp"

namespace aecrit {

/// A Grand Lebesgue Space given by its generating function psi on a finite
/// p-grid inside (1, R). psi is typically the natural function of a
/// sequence, truncated at n_max_used.
struct GrandLebesgueSpec {
    std::vector<double> p_grid;
    double R = std::numeric_limits<double>::infinity();
    std::vector<double> psi;
    long n_max_used = 0;
};

/// Geometric p-grid in (1, R): default 32 points from just above 1 up to
/// min(R (1 - 2^-10), 64).
inline std::vector<double> make_p_grid(double R, int count = 32) {
    if (!(R > 1.0)) raise(Errc::InvalidArgument, "Grand Lebesgue exponent bound needs R > 1");
    if (count < 2) raise(Errc::InvalidArgument, "p-grid needs >= 2 points");
    const double p_min = 1.0 + 1.0 / 1024.0;
    double p_max = std::isinf(R) ? 64.0 : std::min(R * (1.0 - 1.0 / 1024.0), 64.0);
    if (!(p_max > p_min)) raise(Errc::InvalidArgument, "p-grid range collapsed; R too close to 1");
    std::vector<double> grid(static_cast<std::size_t>(count));
    const double ratio = std::log(p_max / p_min) / (count - 1);
    for (int i = 0; i < count; ++i)
        grid[static_cast<std::size_t>(i)] = p_min * std::exp(ratio * i);
    grid.front() = p_min;
    grid.back() = p_max;
    return grid;
}

namespace detail {

/// Weighted p-mean of precomputed nonnegative magnitudes, rescaled by the
/// max so that large p cannot overflow.
inline double lp_norm_field(std::span<const double> mags, const SamplePopulation& pop, double p) {
    if (!(p >= 1.0)) raise(Errc::InvalidArgument, "Lebesgue norm needs p >= 1");
    double peak = 0.0;
    for (std::size_t i = 0; i < mags.size(); ++i) {
        if (!std::isfinite(mags[i]))
            raise(Errc::NonFiniteIntegrand, "norm integrand not finite at point #" + std::to_string(i));
        peak = std::max(peak, mags[i]);
    }
    if (peak == 0.0) return 0.0;
    if (std::isinf(p)) return peak;
    CompensatedSum s;
    for (std::size_t i = 0; i < mags.size(); ++i) {
        if (mags[i] > 0.0) s.add(pop.weights[i] * std::pow(mags[i] / peak, p));
    }
    double norm = peak * std::pow(s.value(), 1.0 / p);
    if (!std::isfinite(norm))
        raise(Errc::Overflow, "p-norm overflowed at p = " + format_double(p));
    return norm;
}

inline std::vector<double> magnitude_field(const FunctionSequence& seq,
                                           const SamplePopulation& pop, long n) {
    std::vector<double> mags(pop.size());
    SequenceScratch scratch(seq);
    for (std::size_t i = 0; i < pop.size(); ++i)
        mags[i] = sequence_magnitude(seq, n, pop.point(i), scratch);
    return mags;
}

}  // namespace detail

/// |h|_p on the population; p = infinity gives the population max.
inline double lp_norm(const std::function<double(std::span<const double>)>& h,
                      const SamplePopulation& pop, double p) {
    std::vector<double> mags(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) mags[i] = std::abs(h(pop.point(i)));
    return detail::lp_norm_field(mags, pop, p);
}

inline double lp_norm_scalar(const std::function<double(double)>& h, const SamplePopulation& pop,
                             double p) {
    return lp_norm([&](std::span<const double> x) { return h(x[0]); }, pop, p);
}

/// psi(p) = max_{n <= N_max} |f_n|_p on the grid: the natural function of
/// the sequence, truncated at N_max (recorded on the result).
inline GrandLebesgueSpec natural_function(const FunctionSequence& seq, const SamplePopulation& pop,
                                          const std::vector<double>& p_grid, long n_max,
                                          double R = std::numeric_limits<double>::infinity()) {
    if (n_max < 1) raise(Errc::InvalidArgument, "natural function needs N_max >= 1");
    if (p_grid.empty()) raise(Errc::EmptyGrid, "p-grid is empty");
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
        if (!(p_grid[i] > 1.0) || !(p_grid[i] < R))
            raise(Errc::InvalidArgument, "p-grid must lie inside (1, R)");
        if (i > 0 && !(p_grid[i] > p_grid[i - 1]))
            raise(Errc::UnsortedGrid, "p-grid must be strictly increasing");
    }
    GrandLebesgueSpec spec;
    spec.p_grid = p_grid;
    spec.R = R;
    spec.n_max_used = n_max;
    spec.psi.assign(p_grid.size(), 0.0);
    for (long n = 1; n <= n_max; ++n) {
        auto mags = detail::magnitude_field(seq, pop, n);
        for (std::size_t j = 0; j < p_grid.size(); ++j)
            spec.psi[j] = std::max(spec.psi[j], detail::lp_norm_field(mags, pop, p_grid[j]));
    }
    for (std::size_t j = 0; j < p_grid.size(); ++j)
        if (!(spec.psi[j] > 0.0))
            raise(Errc::InvalidArgument,
                  "natural function vanishes at p = " + format_double(p_grid[j]) +
                      " (sequence identically zero up to N_max?)");
    return spec;
}

namespace detail {

inline double gls_norm_field(std::span<const double> mags, const SamplePopulation& pop,
                             const GrandLebesgueSpec& spec) {
    double sup = 0.0;
    for (std::size_t j = 0; j < spec.p_grid.size(); ++j)
        sup = std::max(sup, lp_norm_field(mags, pop, spec.p_grid[j]) / spec.psi[j]);
    return sup;
}

}  // namespace detail

/// ||h||_{G psi} = sup over the p-grid of |h|_p / psi(p).
inline double gls_norm(const std::function<double(std::span<const double>)>& h,
                       const SamplePopulation& pop, const GrandLebesgueSpec& spec) {
    if (spec.p_grid.size() != spec.psi.size() || spec.p_grid.empty())
        raise(Errc::InvalidArgument, "invalid Grand Lebesgue spec");
    std::vector<double> mags(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) mags[i] = std::abs(h(pop.point(i)));
    return detail::gls_norm_field(mags, pop, spec);
}

inline double gls_norm_scalar(const std::function<double(double)>& h, const SamplePopulation& pop,
                              const GrandLebesgueSpec& spec) {
    return gls_norm([&](std::span<const double> x) { return h(x[0]); }, pop, spec);
}

// ---------------------------------------------------------------------------
// lambda windows: Grand Lebesgue norm of the windowed pointwise max
// ---------------------------------------------------------------------------

/// lambda_n^m = || max_{k = n+1..m} |f_k| ||_{G psi}.
inline double lambda_window(const FunctionSequence& seq, const SamplePopulation& pop,
                            const GrandLebesgueSpec& spec, long n, long m) {
    if (m <= n) raise(Errc::WindowEmpty, "lambda window needs m >= n + 1");
    std::vector<double> runmax(pop.size(), 0.0);
    for (long k = n + 1; k <= m; ++k) {
        auto mags = detail::magnitude_field(seq, pop, k);
        for (std::size_t i = 0; i < pop.size(); ++i) runmax[i] = std::max(runmax[i], mags[i]);
    }
    return detail::gls_norm_field(runmax, pop, spec);
}

inline CriticalWindowTable build_lambda_table(const FunctionSequence& seq,
                                              const SamplePopulation& pop,
                                              const GrandLebesgueSpec& spec,
                                              const WindowGrid& grid) {
    CriticalWindowTable table;
    table.mode = AnalysisMode::Lambda;
    table.phi_name = "gls";
    table.n_grid = grid.n_grid;
    table.monte_carlo = false;  // a norm estimate, not a sample mean
    table.sup_at_right_endpoint = true;
    for (long n : grid.n_grid) {
        long cap = grid.m_cap ? grid.m_cap(n) : 4 * n;
        if (cap <= n) raise(Errc::WindowEmpty, "m_cap(" + std::to_string(n) + ") <= n");
        table.m_cap.push_back(cap);
        std::vector<double> row;
        std::vector<double> runmax(pop.size(), 0.0);
        double probe = std::numeric_limits<double>::quiet_NaN();
        for (long m = n + 1; m <= cap + (grid.probe_beyond_cap ? 1 : 0); ++m) {
            auto mags = detail::magnitude_field(seq, pop, m);
            for (std::size_t i = 0; i < pop.size(); ++i) runmax[i] = std::max(runmax[i], mags[i]);
            double v = detail::gls_norm_field(runmax, pop, spec);
            if (m <= cap)
                row.push_back(v);
            else
                probe = v;
        }
        table.values.push_back(std::move(row));
        table.std_errors.emplace_back(table.values.back().size(), 0.0);
        table.cap_probe.push_back(probe);
    }
    return table;
}

// ---------------------------------------------------------------------------
// Lebesgue-Riesz tail: |f_n - f_m|_p
// ---------------------------------------------------------------------------

inline double lp_tail(const FunctionSequence& seq, const SamplePopulation& pop, double p, long n,
                      long m) {
    if (m <= n) raise(Errc::WindowEmpty, "lp tail needs m >= n + 1");
    std::vector<double> mags(pop.size());
    SequenceScratch scratch(seq);
    std::vector<double> a(static_cast<std::size_t>(seq.value_dim));
    for (std::size_t i = 0; i < pop.size(); ++i) {
        auto x = pop.point(i);
        sequence_value(seq, n, x, std::span<double>(a), scratch);
        sequence_value(seq, m, x, std::span<double>(scratch.value), scratch);
        for (std::size_t d = 0; d < a.size(); ++d) a[d] -= scratch.value[d];
        mags[i] = vector_norm(std::span<const double>(a), seq.norm);
    }
    return detail::lp_norm_field(mags, pop, p);
}

/// Table of |f_n - f_m|_p. Unlike the windowed-max functionals this is not
/// monotone in m; the tail sup is the explicit row maximum.
inline CriticalWindowTable build_lp_table(const FunctionSequence& seq, const SamplePopulation& pop,
                                          double p, const WindowGrid& grid) {
    CriticalWindowTable table;
    table.mode = AnalysisMode::Lp;
    table.phi_name = "p=" + format_double(p);
    table.n_grid = grid.n_grid;
    table.monte_carlo = false;
    table.sup_at_right_endpoint = false;
    SequenceScratch scratch(seq);
    std::vector<double> ref(static_cast<std::size_t>(seq.value_dim));
    std::vector<double> cur(static_cast<std::size_t>(seq.value_dim));
    for (long n : grid.n_grid) {
        long cap = grid.m_cap ? grid.m_cap(n) : 4 * n;
        if (cap <= n) raise(Errc::WindowEmpty, "m_cap(" + std::to_string(n) + ") <= n");
        table.m_cap.push_back(cap);
        std::vector<double> row;
        double probe = std::numeric_limits<double>::quiet_NaN();
        std::vector<double> mags(pop.size());
        for (long m = n + 1; m <= cap + (grid.probe_beyond_cap ? 1 : 0); ++m) {
            for (std::size_t i = 0; i < pop.size(); ++i) {
                auto x = pop.point(i);
                sequence_value(seq, n, x, std::span<double>(ref), scratch);
                sequence_value(seq, m, x, std::span<double>(cur), scratch);
                for (std::size_t d = 0; d < ref.size(); ++d) ref[d] -= cur[d];
                mags[i] = vector_norm(std::span<const double>(ref), seq.norm);
            }
            double v = detail::lp_norm_field(mags, pop, p);
            if (m <= cap)
                row.push_back(v);
            else
                probe = v;
        }
        table.values.push_back(std::move(row));
        table.std_errors.emplace_back(table.values.back().size(), 0.0);
        table.cap_probe.push_back(probe);
    }
    return table;
}

/// Fixed-pair diagonal |f_n - f_{2n}|_p per grid n: the pairwise reading of
/// the tail, reported alongside the sup form that drives the verdict.
inline std::vector<TailPoint> lp_pairwise_profile(const FunctionSequence& seq,
                                                  const SamplePopulation& pop, double p,
                                                  const std::vector<long>& n_grid) {
    std::vector<TailPoint> out;
    for (long n : n_grid) out.push_back(TailPoint{n, lp_tail(seq, pop, p, n, 2 * n), 0.0});
    return out;
}

}  // namespace aecrit
