#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "aecrit/criterion.hpp"
#include "aecrit/errors.hpp"
#include "aecrit/measure.hpp"
#include "aecrit/sequence.hpp"

namespace aecrit {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct SmoothnessHint {
    enum class Kind { TrigPoly, Piecewise, Generic };
    Kind kind = Kind::Generic;
    int degree = 0;                    // TrigPoly only
    std::vector<double> breakpoints;   // Piecewise only, in [0, 2*pi)

    static SmoothnessHint trig_poly(int degree) {
        SmoothnessHint h;
        h.kind = Kind::TrigPoly;
        h.degree = degree;
        return h;
    }
    static SmoothnessHint piecewise(std::vector<double> breakpoints) {
        SmoothnessHint h;
        h.kind = Kind::Piecewise;
        h.breakpoints = std::move(breakpoints);
        return h;
    }
    static SmoothnessHint generic() { return SmoothnessHint{}; }
};

/// A 2*pi-periodic integrable function. The evaluator is defined on
/// [0, 2*pi); `value` reduces any real argument into that window first.
struct PeriodicFunction {
    std::string name;
    std::function<double(double)> eval;
    SmoothnessHint hint;
};

inline double reduce_period(double x) {
    double t = std::fmod(x, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    return t;
}

inline double periodic_value(const PeriodicFunction& g, double x) { return g.eval(reduce_period(x)); }

// ---------------------------------------------------------------------------
// Dirichlet kernels
// ---------------------------------------------------------------------------

/// D_n(x) = sin((n + 1/2) x) / (2 pi sin(x/2)), total on R. Near x in
/// 2*pi*Z (|sin(x/2)| < 1e-8) the removable singularity is evaluated by a
/// series branch accurate to machine precision.
inline double dirichlet_kernel(long n, double x) {
    if (n < 0) raise(Errc::BadDegrees, "Dirichlet kernel needs n >= 0");
    const double a = static_cast<double>(n) + 0.5;
    const double t = std::remainder(x, kTwoPi);  // sign flips of num/denom cancel
    const double s = std::sin(0.5 * t);
    if (std::abs(s) < 1e-8) {
        const double t2 = t * t;
        return a / std::numbers::pi * (1.0 - t2 * (a * a / 6.0 - 1.0 / 24.0));
    }
    return std::sin(a * t) / (kTwoPi * s);
}

/// Difference kernel D_m - D_n in closed form:
/// sin((m-n)x/2) cos((m+n+1)x/2) / (pi sin(x/2)), with the same singularity
/// guard; the x -> 0 limit is (m - n)/pi.
inline double difference_kernel(long m, long n, double x) {
    if (n < 0 || m < n + 1) raise(Errc::BadDegrees, "difference kernel needs m >= n + 1, n >= 0");
    const double b = static_cast<double>(m - n);
    const double c = static_cast<double>(m + n + 1);
    const double t = std::remainder(x, kTwoPi);
    const double s = std::sin(0.5 * t);
    if (std::abs(s) < 1e-8) {
        const double t2 = t * t;
        return b / std::numbers::pi * (1.0 - t2 * (b * b / 24.0 + c * c / 8.0 - 1.0 / 24.0));
    }
    return std::sin(0.5 * b * t) * std::cos(0.5 * c * t) / (std::numbers::pi * s);
}

// ---------------------------------------------------------------------------
// Quadrature over one period, adapted to the smoothness hint
// ---------------------------------------------------------------------------

namespace detail {

struct PeriodicRule {
    std::vector<double> nodes;
    std::vector<double> weights;  // raw dx weights summing to 2*pi
};

/// Node set for integrands with g's breakpoints oscillating like trig
/// degree `osc`. Piecewise hints get per-piece Gauss panels (the panel
/// budget resolves the oscillation); everything else gets midpoint rules.
inline PeriodicRule periodic_rule(const SmoothnessHint& hint, long osc) {
    PeriodicRule rule;
    osc = std::max<long>(osc, 0);
    if (hint.kind == SmoothnessHint::Kind::Piecewise && !hint.breakpoints.empty()) {
        std::vector<double> brk;
        for (double b : hint.breakpoints) brk.push_back(reduce_period(b));
        std::sort(brk.begin(), brk.end());
        brk.erase(std::unique(brk.begin(), brk.end()), brk.end());
        const auto& gauss = gauss_legendre(16);
        const std::size_t pieces = brk.size();
        for (std::size_t i = 0; i < pieces; ++i) {
            double lo = brk[i];
            double hi = (i + 1 < pieces) ? brk[i + 1] : brk[0] + kTwoPi;
            double len = hi - lo;
            if (len <= 0.0) continue;
            long panels = std::max<long>(1, static_cast<long>(
                                                std::ceil(len * static_cast<double>(osc + 1) /
                                                          std::numbers::pi)));
            double w = len / static_cast<double>(panels);
            for (long p = 0; p < panels; ++p) {
                double a = lo + static_cast<double>(p) * w;
                for (std::size_t q = 0; q < gauss.first.size(); ++q) {
                    rule.nodes.push_back(a + 0.5 * w * (gauss.first[q] + 1.0));
                    rule.weights.push_back(0.5 * w * gauss.second[q]);
                }
            }
        }
        return rule;
    }
    long n_nodes = std::max<long>(64, 8 * (osc + 1));
    if (hint.kind == SmoothnessHint::Kind::TrigPoly)
        n_nodes = std::max(n_nodes, osc + hint.degree + 8);
    else if (hint.kind == SmoothnessHint::Kind::Generic)
        n_nodes = std::max<long>(n_nodes, 4096);
    if (n_nodes % 2 == 1) ++n_nodes;  // keep midpoints off half-period breakpoints
    double h = kTwoPi / static_cast<double>(n_nodes);
    rule.nodes.resize(static_cast<std::size_t>(n_nodes));
    rule.weights.assign(static_cast<std::size_t>(n_nodes), h);
    for (long i = 0; i < n_nodes; ++i)
        rule.nodes[static_cast<std::size_t>(i)] = (static_cast<double>(i) + 0.5) * h;
    return rule;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Partial Fourier sums
// ---------------------------------------------------------------------------

enum class PartialSumMethod { Convolution, Coefficients };

struct FourierCoefficients {
    std::vector<double> a;  // a[0..degree]
    std::vector<double> b;  // b[0..degree], b[0] unused
};

/// Cosine/sine coefficients up to `degree` by quadrature on one shared node
/// set resolving the highest harmonic.
inline FourierCoefficients fourier_coefficients(const PeriodicFunction& g, long degree) {
    if (degree < 0) raise(Errc::BadDegrees, "coefficients need degree >= 0");
    auto rule = detail::periodic_rule(g.hint, degree);
    std::vector<double> gv(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        gv[i] = g.eval(reduce_period(rule.nodes[i]));
        if (!std::isfinite(gv[i]))
            raise(Errc::NonFiniteIntegrand,
                  "g not finite at x = " + format_double(rule.nodes[i]));
    }
    FourierCoefficients co;
    co.a.assign(static_cast<std::size_t>(degree) + 1, 0.0);
    co.b.assign(static_cast<std::size_t>(degree) + 1, 0.0);
    for (long k = 0; k <= degree; ++k) {
        CompensatedSum sa, sb;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            double kx = static_cast<double>(k) * rule.nodes[i];
            sa.add(rule.weights[i] * gv[i] * std::cos(kx));
            if (k > 0) sb.add(rule.weights[i] * gv[i] * std::sin(kx));
        }
        co.a[static_cast<std::size_t>(k)] = sa.value() / std::numbers::pi;
        if (k > 0) co.b[static_cast<std::size_t>(k)] = sb.value() / std::numbers::pi;
    }
    return co;
}

inline double evaluate_partial_sum(const FourierCoefficients& co, long n, double x) {
    if (n < 0 || n >= static_cast<long>(co.a.size()))
        raise(Errc::BadDegrees, "partial sum degree exceeds the coefficient table");
    CompensatedSum s;
    s.add(0.5 * co.a[0]);
    for (long k = 1; k <= n; ++k) {
        double kx = static_cast<double>(k) * x;
        s.add(co.a[static_cast<std::size_t>(k)] * std::cos(kx));
        s.add(co.b[static_cast<std::size_t>(k)] * std::sin(kx));
    }
    return s.value();
}

/// s_n[g](x), by direct kernel convolution (node count >= 8(n+1), adapted
/// to the smoothness hint) or through quadrature coefficients — two
/// independent routes that must agree on smooth inputs.
inline double partial_sum(const PeriodicFunction& g, long n, double x,
                          PartialSumMethod method = PartialSumMethod::Convolution) {
    if (n < 0) raise(Errc::BadDegrees, "partial sum needs n >= 0");
    if (method == PartialSumMethod::Coefficients)
        return evaluate_partial_sum(fourier_coefficients(g, n), n, x);
    auto rule = detail::periodic_rule(g.hint, n);
    CompensatedSum s;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        double y = rule.nodes[i];
        double gy = g.eval(reduce_period(y));
        if (!std::isfinite(gy))
            raise(Errc::NonFiniteIntegrand, "g not finite at x = " + format_double(y));
        s.add(rule.weights[i] * dirichlet_kernel(n, x - y) * gy);
    }
    return s.value();
}

// ---------------------------------------------------------------------------
// Cached partial sums (immutable after construction; concurrent readers ok)
// ---------------------------------------------------------------------------

class FourierSeries {
public:
    FourierSeries(PeriodicFunction g, long max_degree)
        : g_(std::move(g)), coeffs_(fourier_coefficients(g_, max_degree)) {}

    long max_degree() const { return static_cast<long>(coeffs_.a.size()) - 1; }
    const PeriodicFunction& function() const { return g_; }
    const FourierCoefficients& coefficients() const { return coeffs_; }

    double partial_sum(long n, double x) const { return evaluate_partial_sum(coeffs_, n, x); }

    /// Incremental evaluation tuned for ascending-degree sweeps at a fixed
    /// point (the window engine's access pattern). Bitwise identical to
    /// partial_sum: the cached state continues the same left-to-right term
    /// accumulation a fresh evaluation would perform.
    double partial_sum_sequential(long n, double x) const {
        struct Cache {
            const FourierSeries* src = nullptr;
            double x = 0.0;
            long k = -1;
            double plain = 0.0, comp = 0.0;  // compensated running sum state
        };
        thread_local Cache c;
        if (c.src != this || c.x != x || c.k > n) {
            c.src = this;
            c.x = x;
            c.k = 0;
            c.plain = 0.0;
            c.comp = 0.0;
            add_term(c.plain, c.comp, 0.5 * coeffs_.a[0]);
        }
        for (long k = c.k + 1; k <= n; ++k) {
            double kx = static_cast<double>(k) * x;
            add_term(c.plain, c.comp, coeffs_.a[static_cast<std::size_t>(k)] * std::cos(kx));
            add_term(c.plain, c.comp, coeffs_.b[static_cast<std::size_t>(k)] * std::sin(kx));
        }
        c.k = n;
        return c.plain + c.comp;
    }

private:
    static void add_term(double& sum, double& comp, double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }

    PeriodicFunction g_;
    FourierCoefficients coeffs_;
};

/// The partial sums of g as an indexed sequence with limit candidate g,
/// for use with the window engine.
inline FunctionSequence partial_sum_sequence(std::shared_ptr<const FourierSeries> series) {
    FunctionSequence seq;
    seq.value_dim = 1;
    seq.eval = [series](long n, std::span<const double> x, std::span<double> out) {
        out[0] = series->partial_sum_sequential(n, x[0]);
    };
    return seq;
}

/// Convolution-path variant of the same sequence (no caching; every call
/// performs the full kernel quadrature).
inline FunctionSequence partial_sum_sequence_convolution(std::shared_ptr<const PeriodicFunction> g) {
    FunctionSequence seq;
    seq.value_dim = 1;
    seq.eval = [g](long n, std::span<const double> x, std::span<double> out) {
        out[0] = partial_sum(*g, n, x[0], PartialSumMethod::Convolution);
    };
    return seq;
}

// ---------------------------------------------------------------------------
// Critical functional for Fourier partial sums
// ---------------------------------------------------------------------------

/// theta_n^m: integral of arctan(max_{k in (n, m]} |s_k(x) - s_n(x)|) over
/// the normalized measure dx/(2 pi) — the pointwise form consistent with
/// the kappa machinery.
inline IntegralEstimate theta_window(const FourierSeries& series, const SamplePopulation& pop,
                                     long n, long m, int workers = 1) {
    if (m <= n) raise(Errc::WindowEmpty, "theta window needs m >= n + 1");
    if (m > series.max_degree())
        raise(Errc::BadDegrees, "theta window exceeds the prepared coefficient degree");
    auto seq = partial_sum_sequence(
        std::shared_ptr<const FourierSeries>(&series, [](const FourierSeries*) {}));
    return gamma_window(seq, pop, n, m, workers);
}

/// The constant-integrand variant (sup over x taken before integrating):
/// 2 pi * max_{k in (n, m]} arctan(sup_x |s_k(x) - s_n(x)|), the sup over
/// the population nodes. Reported alongside the pointwise form on demand.
inline double theta_uniform_variant(const FourierSeries& series, const SamplePopulation& pop,
                                    long n, long m) {
    if (m <= n) raise(Errc::WindowEmpty, "theta window needs m >= n + 1");
    double best = 0.0;
    for (long k = n + 1; k <= m; ++k) {
        double sup = 0.0;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            double x = pop.scalar(i);
            sup = std::max(sup, std::abs(series.partial_sum(k, x) - series.partial_sum(n, x)));
        }
        best = std::max(best, std::atan(sup));
    }
    return kTwoPi * best;
}

inline CriticalWindowTable build_theta_table(std::shared_ptr<const FourierSeries> series,
                                             const SamplePopulation& pop, const WindowGrid& grid) {
    for (long n : grid.n_grid) {
        long cap = grid.m_cap ? grid.m_cap(n) : 4 * n;
        if (cap + 1 > series->max_degree())
            raise(Errc::BadDegrees, "coefficient table too short for m_cap(" + std::to_string(n) +
                                        ") = " + std::to_string(cap));
    }
    return build_window_table(partial_sum_sequence(series), pop, trial_arctan(),
                              WindowKind::CauchyMax, AnalysisMode::Theta, grid);
}

// ---------------------------------------------------------------------------
// Antonov integrability functional
// ---------------------------------------------------------------------------

/// Two readings of the iterated-log cutoff: Printed clamps the logarithm
/// value from below (max(e, ln z)); Conventional clamps the argument
/// (ln(max(e, z))). Both are emitted by the CLI; they differ by design.
enum class LnPlusVariant { Printed, Conventional };

inline double ln_plus(double z, LnPlusVariant v) {
    constexpr double e = std::numbers::e;
    if (v == LnPlusVariant::Printed) return std::max(e, std::log(z));
    return std::log(std::max(e, z));
}

/// integral over [0, 2 pi] (unnormalized dx) of
/// |g| * ln+|g| * ln+ln+ln+|g|. The population must discretize the
/// normalized measure dx/(2 pi) on [0, 2 pi]; the 2 pi factor restores dx.
inline IntegralEstimate antonov_functional(const PeriodicFunction& g, const SamplePopulation& pop,
                                           LnPlusVariant variant = LnPlusVariant::Printed,
                                           int workers = 1) {
    auto est = integrate(
        [&](std::span<const double> x) {
            double a = std::abs(g.eval(reduce_period(x[0])));
            if (!std::isfinite(a)) return a;  // reported by integrate
            if (a == 0.0) return 0.0;
            double l1 = ln_plus(a, variant);
            double l3 = ln_plus(ln_plus(ln_plus(a, variant), variant), variant);
            return a * l1 * l3;
        },
        pop, workers);
    est.value *= kTwoPi;
    est.standard_error *= kTwoPi;
    return est;
}

}  // namespace aecrit
