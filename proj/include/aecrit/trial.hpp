#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "aecrit/errors.hpp"
#include "aecrit/numeric.hpp"

namespace aecrit {

/// KB: positive, strictly increasing on the right axis, continuous, even,
/// bounded. K: the same without the boundedness requirement.
enum class TrialClass { KB, K };

/// A trial function composed with windowed maxima before integration.
/// Evaluators must be pure; concurrent use is unrestricted.
struct TrialFunction {
    std::string name;
    TrialClass declared_class = TrialClass::KB;
    bool is_young_orlicz = false;
    std::optional<double> declared_bound;  // sup over R, when known
    std::function<double(double)> eval;

    double operator()(double x) const { return eval(x); }
};

inline TrialFunction trial_arctan() {
    TrialFunction phi;
    phi.name = "arctan";
    phi.declared_class = TrialClass::KB;
    phi.declared_bound = 1.5707963267948966;  // pi/2
    phi.eval = [](double x) { return std::atan(std::abs(x)); };
    return phi;
}

inline TrialFunction trial_ratio1() {
    TrialFunction phi;
    phi.name = "ratio1";
    phi.declared_class = TrialClass::KB;
    phi.declared_bound = 1.0;
    phi.eval = [](double x) {
        double a = std::abs(x);
        return std::isinf(a) ? 1.0 : a / (1.0 + a);
    };
    return phi;
}

inline TrialFunction trial_ratio2() {
    TrialFunction phi;
    phi.name = "ratio2";
    phi.declared_class = TrialClass::KB;
    phi.declared_bound = 1.0;
    phi.eval = [](double x) {
        double a = std::abs(x);
        if (a > 1e150) return 1.0;  // x*x would overflow
        return a * a / (1.0 + a * a);
    };
    return phi;
}

/// |x|^p, p > 0. Unbounded (class K); a Young-Orlicz function for p >= 1.
inline TrialFunction trial_power(double p) {
    if (!(p > 0.0)) raise(Errc::InvalidArgument, "power trial function needs p > 0");
    TrialFunction phi;
    phi.name = "power:" + format_double(p);
    phi.declared_class = TrialClass::K;
    phi.is_young_orlicz = p >= 1.0;
    phi.eval = [p](double x) { return std::pow(std::abs(x), p); };
    return phi;
}

/// Resolves the CLI selector: arctan | ratio1 | ratio2 | power:p.
inline TrialFunction parse_trial_function(const std::string& selector) {
    if (selector == "arctan") return trial_arctan();
    if (selector == "ratio1") return trial_ratio1();
    if (selector == "ratio2") return trial_ratio2();
    if (selector.rfind("power:", 0) == 0) return trial_power(parse_double(selector.substr(6)));
    raise(Errc::InvalidArgument, "unknown trial function '" + selector + "'");
}

// ---------------------------------------------------------------------------
// Class validation
// ---------------------------------------------------------------------------

struct ConditionResult {
    bool pass = true;
    double worst_violation = 0.0;
    std::string note;
};

/// Per-condition diagnostics from a finite probing grid. Numerics cannot
/// certify class membership; the declared class stays authoritative for
/// dispatch and this report is a gate for obvious violations.
struct ClassValidationReport {
    ConditionResult positivity;      // A
    ConditionResult monotonicity;    // B
    ConditionResult continuity;      // C
    ConditionResult evenness;        // D
    ConditionResult boundedness;     // E
    std::vector<double> grid;
    double empirical_max = 0.0;
    bool overall_pass = false;  // KB: A-E, K: A-D
};

/// Geometric probing grid spanning [1e-6, 1e6], 16 points per decade.
inline std::vector<double> default_probe_grid() {
    std::vector<double> g;
    const int per_decade = 16;
    const int decades = 12;  // 1e-6 .. 1e6
    for (int i = 0; i <= decades * per_decade; ++i)
        g.push_back(std::pow(10.0, -6.0 + static_cast<double>(i) / per_decade));
    return g;
}

inline ClassValidationReport validate_class(const TrialFunction& phi,
                                            const std::vector<double>& grid,
                                            double continuity_tol = 1e-3) {
    if (grid.empty()) raise(Errc::EmptyGrid, "validation grid is empty");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1])) raise(Errc::UnsortedGrid, "grid must be strictly increasing");
    if (grid.size() < 16 || grid.front() > 1e-6 || grid.back() < 1e6)
        raise(Errc::InvalidArgument, "grid must have >= 16 points and span [1e-6, 1e6]");
    if (!(grid.front() > 0.0)) raise(Errc::InvalidArgument, "grid points must be positive");

    ClassValidationReport rep;
    rep.grid = grid;

    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = phi(grid[i]);

    // A: phi(0) = 0 and phi > 0 at +-x over the grid.
    double at_zero = phi(0.0);
    if (std::abs(at_zero) > 1e-12) {
        rep.positivity.pass = false;
        rep.positivity.worst_violation = std::abs(at_zero);
        rep.positivity.note = "phi(0) != 0";
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double neg = phi(-grid[i]);
        if (!(vals[i] > 0.0) || !(neg > 0.0)) {
            rep.positivity.pass = false;
            rep.positivity.worst_violation =
                std::max({rep.positivity.worst_violation, -vals[i], -neg});
            if (rep.positivity.note.empty())
                rep.positivity.note = "phi not positive at |x| = " + format_double(grid[i]);
        }
    }

    // B: strictly increasing along the grid.
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!(vals[i] < vals[i + 1])) {
            rep.monotonicity.pass = false;
            rep.monotonicity.worst_violation =
                std::max(rep.monotonicity.worst_violation, vals[i] - vals[i + 1]);
        }
    }

    // C: jump bound at the grid's fine step. Only gaps comparable to the
    // smallest gap are informative for discontinuity detection.
    double fine = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) fine = std::min(fine, grid[i + 1] - grid[i]);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (grid[i + 1] - grid[i] <= 1.5 * fine) {
            double jump = std::abs(vals[i + 1] - vals[i]);
            if (jump > continuity_tol) {
                rep.continuity.pass = false;
                rep.continuity.worst_violation = std::max(rep.continuity.worst_violation, jump);
            }
        }
    }

    // D: evenness.
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double diff = std::abs(phi(-grid[i]) - vals[i]);
        if (diff > 1e-12) {
            rep.evenness.pass = false;
            rep.evenness.worst_violation = std::max(rep.evenness.worst_violation, diff);
        }
    }

    // E: growth probe over the two largest decades, plus the declared bound.
    rep.empirical_max = *std::max_element(vals.begin(), vals.end());
    double hi = grid.back();
    double max_last = 0.0, max_prev = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] > hi / 10.0)
            max_last = std::max(max_last, vals[i]);
        else if (grid[i] > hi / 100.0)
            max_prev = std::max(max_prev, vals[i]);
    }
    if (max_prev > 0.0 && max_last / max_prev > 1.05) {
        rep.boundedness.pass = false;
        rep.boundedness.worst_violation = max_last / max_prev - 1.0;
        rep.boundedness.note = "still growing across the top decades";
    }
    if (phi.declared_bound && rep.empirical_max > *phi.declared_bound * (1.0 + 1e-9)) {
        rep.boundedness.pass = false;
        rep.boundedness.note = "grid maximum exceeds the declared bound";
        rep.boundedness.worst_violation =
            std::max(rep.boundedness.worst_violation, rep.empirical_max - *phi.declared_bound);
    }

    bool core = rep.positivity.pass && rep.monotonicity.pass && rep.continuity.pass && rep.evenness.pass;
    rep.overall_pass = phi.declared_class == TrialClass::KB ? (core && rep.boundedness.pass) : core;
    return rep;
}

/// sup over the grid of phi(2x)/phi(x); finite values are empirical evidence
/// for the doubling (Delta-2) condition at grid resolution.
inline double delta2_ratio(const TrialFunction& phi, const std::vector<double>& grid) {
    if (grid.empty()) raise(Errc::EmptyGrid, "delta2 grid is empty");
    double sup = 0.0;
    for (double x : grid) {
        if (!(x > 0.0)) raise(Errc::InvalidArgument, "delta2 grid points must be positive");
        double denom = phi(x);
        if (denom == 0.0)
            raise(Errc::ZeroDenominator, "phi vanishes at x = " + format_double(x));
        sup = std::max(sup, phi(2.0 * x) / denom);
    }
    return sup;
}

}  // namespace aecrit
