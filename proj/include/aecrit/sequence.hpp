#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "aecrit/errors.hpp"

namespace aecrit {

enum class VectorNorm { Euclidean, Sup, One };

inline const char* norm_name(VectorNorm n) {
    switch (n) {
        case VectorNorm::Euclidean: return "euclidean";
        case VectorNorm::Sup: return "sup";
        case VectorNorm::One: return "one";
    }
    return "?";
}

inline VectorNorm parse_norm(const std::string& s) {
    if (s == "euclidean" || s == "euclid" || s == "l2") return VectorNorm::Euclidean;
    if (s == "sup" || s == "max") return VectorNorm::Sup;
    if (s == "one" || s == "l1") return VectorNorm::One;
    raise(Errc::InvalidArgument, "unknown norm '" + s + "'");
}

inline double vector_norm(std::span<const double> v, VectorNorm norm) {
    if (v.size() == 1) return std::abs(v[0]);
    switch (norm) {
        case VectorNorm::Euclidean: {
            double s = 0.0;
            for (double x : v) s += x * x;
            return std::sqrt(s);
        }
        case VectorNorm::Sup: {
            double s = 0.0;
            for (double x : v) s = std::max(s, std::abs(x));
            return s;
        }
        case VectorNorm::One: {
            double s = 0.0;
            for (double x : v) s += std::abs(x);
            return s;
        }
    }
    return 0.0;
}

/// An indexed family f_n evaluated at population points. Values may be
/// scalar or vector (value_dim > 1, reduced by `norm`). When a limit
/// candidate is present it is subtracted before any magnitude is taken.
struct FunctionSequence {
    int value_dim = 1;
    VectorNorm norm = VectorNorm::Euclidean;
    /// Writes value_dim doubles into out. Indices start at 1. Must be pure
    /// up to internal caching; concurrent calls with any (n, x) are allowed.
    std::function<void(long n, std::span<const double> x, std::span<double> out)> eval;
    std::function<void(std::span<const double> x, std::span<double> out)> limit_candidate;
};

/// Scalar sequence from (n, x) -> value on one-dimensional populations.
inline FunctionSequence make_scalar_sequence(std::function<double(long, double)> f) {
    FunctionSequence seq;
    seq.value_dim = 1;
    seq.eval = [f = std::move(f)](long n, std::span<const double> x, std::span<double> out) {
        out[0] = f(n, x[0]);
    };
    return seq;
}

/// Sequence that is constant in x (a plain numerical sequence).
inline FunctionSequence make_index_sequence(std::function<double(long)> f) {
    FunctionSequence seq;
    seq.value_dim = 1;
    seq.eval = [f = std::move(f)](long n, std::span<const double>, std::span<double> out) {
        out[0] = f(n);
    };
    return seq;
}

/// c1 * F1 + c2 * F2 (same value_dim; norms must match).
inline FunctionSequence linear_combination(const FunctionSequence& f1, const FunctionSequence& f2,
                                           double c1, double c2) {
    if (f1.value_dim != f2.value_dim)
        raise(Errc::InvalidArgument, "linear combination of sequences with different value_dim");
    FunctionSequence seq;
    seq.value_dim = f1.value_dim;
    seq.norm = f1.norm;
    seq.eval = [f1e = f1.eval, f2e = f2.eval, c1, c2, dim = f1.value_dim](
                   long n, std::span<const double> x, std::span<double> out) {
        std::vector<double> tmp(static_cast<std::size_t>(dim));
        f1e(n, x, out);
        f2e(n, x, std::span<double>(tmp));
        for (int d = 0; d < dim; ++d) out[static_cast<std::size_t>(d)] =
            c1 * out[static_cast<std::size_t>(d)] + c2 * tmp[static_cast<std::size_t>(d)];
    };
    return seq;
}

/// Reusable evaluation scratch sized for one sequence.
struct SequenceScratch {
    std::vector<double> value;
    std::vector<double> limit;

    explicit SequenceScratch(const FunctionSequence& seq)
        : value(static_cast<std::size_t>(seq.value_dim)),
          limit(static_cast<std::size_t>(seq.value_dim)) {}
};

/// ||f_n(x) - f_inf(x)|| under the sequence's norm.
inline double sequence_magnitude(const FunctionSequence& seq, long n, std::span<const double> x,
                                 SequenceScratch& scratch) {
    seq.eval(n, x, std::span<double>(scratch.value));
    if (seq.limit_candidate) {
        seq.limit_candidate(x, std::span<double>(scratch.limit));
        for (std::size_t d = 0; d < scratch.value.size(); ++d) scratch.value[d] -= scratch.limit[d];
    }
    return vector_norm(std::span<const double>(scratch.value), seq.norm);
}

/// Fills out with f_n(x) - f_inf(x).
inline void sequence_value(const FunctionSequence& seq, long n, std::span<const double> x,
                           std::span<double> out, SequenceScratch& scratch) {
    seq.eval(n, x, out);
    if (seq.limit_candidate) {
        seq.limit_candidate(x, std::span<double>(scratch.limit));
        for (std::size_t d = 0; d < out.size(); ++d) out[d] -= scratch.limit[d];
    }
}

}  // namespace aecrit
