#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "aecrit/errors.hpp"
#include "aecrit/numeric.hpp"
#include "aecrit/parallel.hpp"

namespace aecrit {

enum class Provenance { Quadrature, MonteCarlo };

enum class QuadratureRule { Midpoint, GaussLegendre };

/// A discretized probability space: finitely many points (scalars, tuples, or
/// Monte Carlo path ids) with nonnegative weights summing to one. All values
/// are immutable after construction; integration over the same population is
/// safe from any number of threads.
struct SamplePopulation {
    int dim = 1;
    std::vector<double> coords;   // dim * count values, point-major
    std::vector<double> weights;  // count values
    Provenance provenance = Provenance::Quadrature;
    std::optional<std::uint64_t> seed;    // Monte Carlo only
    std::optional<long> path_count;       // Monte Carlo only
    std::optional<int> truncation_index;  // partition populations only

    std::size_t size() const { return weights.size(); }

    std::span<const double> point(std::size_t i) const {
        return std::span<const double>(coords.data() + static_cast<std::size_t>(dim) * i,
                                       static_cast<std::size_t>(dim));
    }

    double scalar(std::size_t i) const { return coords[static_cast<std::size_t>(dim) * i]; }
};

struct IntegralEstimate {
    double value = 0.0;
    double standard_error = 0.0;  // 0 for deterministic quadrature
    long node_count = 0;
};

/// One block of a sigma-finite partition. The sampler fills `pts`/`wts` with
/// `node_count` abscissae and weights proportional to the source measure
/// restricted to the block (any positive scale; they are renormalized).
struct PartitionBlock {
    int index = 0;
    double mass = 0.0;
    std::function<void(int node_count, std::vector<double>& pts, std::vector<double>& wts)> sampler;
};

/// Interval block with the Lebesgue measure, sampled by midpoints.
inline PartitionBlock interval_block(int index, double a, double b) {
    PartitionBlock blk;
    blk.index = index;
    blk.mass = b - a;
    blk.sampler = [a, b](int n, std::vector<double>& pts, std::vector<double>& wts) {
        pts.resize(static_cast<std::size_t>(n));
        wts.resize(static_cast<std::size_t>(n));
        double h = (b - a) / n;
        for (int i = 0; i < n; ++i) {
            pts[static_cast<std::size_t>(i)] = a + (i + 0.5) * h;
            wts[static_cast<std::size_t>(i)] = h;
        }
    };
    return blk;
}

namespace detail {

inline void renormalize_weights(std::vector<double>& w) {
    CompensatedSum total;
    for (double x : w) total.add(x);
    double t = total.value();
    if (!(t > 0.0) || !std::isfinite(t))
        raise(Errc::InvalidArgument, "population weights must have positive finite total");
    if (std::abs(t - 1.0) <= 1e-13) return;  // already normal; keep weights bit-stable
    for (double& x : w) x /= t;
}

}  // namespace detail

/// Builds the equivalent probability measure of a truncated sigma-finite
/// partition: block m receives total weight 2^{-m} / sum_{m'<=M} 2^{-m'},
/// and within a block the point weights follow the source measure. The
/// truncation index M is recorded on the result.
inline SamplePopulation equivalent_probability_measure(const std::vector<PartitionBlock>& blocks,
                                                       int nodes_per_block) {
    if (blocks.empty()) raise(Errc::EmptyPartition, "partition has no blocks");
    if (nodes_per_block < 1) raise(Errc::InvalidArgument, "nodes_per_block must be >= 1");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& blk = blocks[i];
        if (!(blk.mass > 0.0) || !std::isfinite(blk.mass))
            raise(Errc::NonPositiveMass,
                  "block " + std::to_string(blk.index) + " has mass " + format_double(blk.mass));
        if (blk.index != static_cast<int>(i) + 1)
            raise(Errc::InvalidArgument, "block indices must be contiguous from 1");
        if (!blk.sampler) raise(Errc::InvalidArgument, "block " + std::to_string(blk.index) + " has no sampler");
    }

    const int M = static_cast<int>(blocks.size());
    // sum_{m=1..M} 2^{-m} = 1 - 2^{-M}
    const double tail_norm = 1.0 - std::ldexp(1.0, -M);

    SamplePopulation pop;
    pop.dim = 1;
    pop.provenance = Provenance::Quadrature;
    pop.truncation_index = M;
    pop.coords.reserve(blocks.size() * static_cast<std::size_t>(nodes_per_block));
    pop.weights.reserve(blocks.size() * static_cast<std::size_t>(nodes_per_block));

    std::vector<double> pts, wts;
    for (const auto& blk : blocks) {
        blk.sampler(nodes_per_block, pts, wts);
        if (pts.size() != wts.size() || pts.empty())
            raise(Errc::InvalidArgument, "block sampler returned inconsistent nodes");
        CompensatedSum local;
        for (double w : wts) {
            if (!(w >= 0.0) || !std::isfinite(w))
                raise(Errc::InvalidArgument, "block sampler returned a negative or non-finite weight");
            local.add(w);
        }
        double local_total = local.value();
        if (!(local_total > 0.0))
            raise(Errc::NonPositiveMass, "block " + std::to_string(blk.index) + " sampled zero mass");
        double block_weight = std::ldexp(1.0, -blk.index) / tail_norm;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            pop.coords.push_back(pts[i]);
            pop.weights.push_back(block_weight * wts[i] / local_total);
        }
    }
    detail::renormalize_weights(pop.weights);
    return pop;
}

/// Uniform probability population on [a, b] (the normalized Lebesgue measure
/// dx / (b - a)), by midpoint or Gauss-Legendre nodes.
inline SamplePopulation uniform_population(double a, double b, int node_count, QuadratureRule rule) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        raise(Errc::DegenerateInterval, "[" + format_double(a) + ", " + format_double(b) + "]");
    if (node_count < 2) raise(Errc::InvalidArgument, "node_count must be >= 2");

    SamplePopulation pop;
    pop.dim = 1;
    pop.provenance = Provenance::Quadrature;
    pop.coords.resize(static_cast<std::size_t>(node_count));
    pop.weights.resize(static_cast<std::size_t>(node_count));
    if (rule == QuadratureRule::Midpoint) {
        double h = (b - a) / node_count;
        for (int i = 0; i < node_count; ++i) {
            pop.coords[static_cast<std::size_t>(i)] = a + (i + 0.5) * h;
            pop.weights[static_cast<std::size_t>(i)] = 1.0 / node_count;
        }
    } else {
        const auto& rule_nw = gauss_legendre(node_count);
        for (int i = 0; i < node_count; ++i) {
            double t = rule_nw.first[static_cast<std::size_t>(i)];
            pop.coords[static_cast<std::size_t>(i)] = a + (b - a) * 0.5 * (t + 1.0);
            // Gauss weights sum to 2 on [-1,1]; halving normalizes the measure.
            pop.weights[static_cast<std::size_t>(i)] = rule_nw.second[static_cast<std::size_t>(i)] * 0.5;
        }
    }
    return pop;
}

/// Monte Carlo population over `paths` seeded sample paths: point i is the
/// path id, weights are 1/paths. Sequences evaluated on it draw their own
/// variates from (seed, path, index) counters.
inline SamplePopulation monte_carlo_population(std::uint64_t seed, long paths) {
    if (paths < 2) raise(Errc::InvalidArgument, "path count must be >= 2");
    SamplePopulation pop;
    pop.dim = 1;
    pop.provenance = Provenance::MonteCarlo;
    pop.seed = seed;
    pop.path_count = paths;
    pop.coords.resize(static_cast<std::size_t>(paths));
    pop.weights.assign(static_cast<std::size_t>(paths), 1.0 / static_cast<double>(paths));
    for (long i = 0; i < paths; ++i) pop.coords[static_cast<std::size_t>(i)] = static_cast<double>(i);
    return pop;
}

/// Weighted sum of `integrand` over the population. Deterministic for any
/// worker count: chunk partials are merged in chunk order. For Monte Carlo
/// populations the standard error is sample-sd / sqrt(path_count).
inline IntegralEstimate integrate(const std::function<double(std::span<const double>)>& integrand,
                                  const SamplePopulation& pop, int workers = 1) {
    const std::size_t n = pop.size();
    const std::size_t chunks = chunk_count(n);
    std::vector<double> partial(chunks, 0.0), partial_sq(chunks, 0.0);
    std::vector<std::size_t> bad(chunks, SIZE_MAX);

    const bool mc = pop.provenance == Provenance::MonteCarlo;
    for_each_chunk(n, workers, [&](std::size_t c, std::size_t lo, std::size_t hi) {
        CompensatedSum s, sq;
        for (std::size_t i = lo; i < hi; ++i) {
            double v = integrand(pop.point(i));
            if (!std::isfinite(v)) {
                if (bad[c] == SIZE_MAX) bad[c] = i;
                continue;
            }
            s.add(pop.weights[i] * v);
            if (mc) sq.add(pop.weights[i] * v * v);
        }
        partial[c] = s.value();
        if (mc) partial_sq[c] = sq.value();
    });

    for (std::size_t c = 0; c < chunks; ++c) {
        if (bad[c] != SIZE_MAX) {
            std::ostringstream os;
            os << "integrand not finite at point #" << bad[c] << " (";
            auto p = pop.point(bad[c]);
            for (std::size_t k = 0; k < p.size(); ++k) os << (k ? "," : "") << format_double(p[k]);
            os << ")";
            raise(Errc::NonFiniteIntegrand, os.str());
        }
    }

    CompensatedSum total;
    for (double v : partial) total.add(v);
    IntegralEstimate est;
    est.value = total.value();
    est.node_count = static_cast<long>(n);
    if (mc) {
        CompensatedSum total_sq;
        for (double v : partial_sq) total_sq.add(v);
        const double paths = static_cast<double>(pop.path_count.value_or(static_cast<long>(n)));
        double var = total_sq.value() - est.value * est.value;
        if (paths > 1.0) var *= paths / (paths - 1.0);
        est.standard_error = std::sqrt(std::max(0.0, var) / paths);
    }
    return est;
}

inline IntegralEstimate integrate_scalar(const std::function<double(double)>& integrand,
                                         const SamplePopulation& pop, int workers = 1) {
    return integrate([&](std::span<const double> x) { return integrand(x[0]); }, pop, workers);
}

// ---------------------------------------------------------------------------
// CSV import/export: header `point,weight` (dim 1) or `p1,...,pd,weight`,
// round-trip decimal formatting.
// ---------------------------------------------------------------------------

inline std::string population_to_csv(const SamplePopulation& pop) {
    std::string out;
    if (pop.dim == 1) {
        out = "point,weight\n";
    } else {
        for (int d = 0; d < pop.dim; ++d) out += "p" + std::to_string(d + 1) + ",";
        out += "weight\n";
    }
    for (std::size_t i = 0; i < pop.size(); ++i) {
        auto p = pop.point(i);
        for (double c : p) {
            out += format_double(c);
            out += ',';
        }
        out += format_double(pop.weights[i]);
        out += '\n';
    }
    return out;
}

inline SamplePopulation population_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) raise(Errc::IoError, "empty population CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    int dim;
    if (line == "point,weight") {
        dim = 1;
    } else {
        dim = 0;
        std::istringstream hs(line);
        std::string col;
        while (std::getline(hs, col, ',')) {
            if (col == "weight") break;
            if (col != "p" + std::to_string(dim + 1))
                raise(Errc::IoError, "unexpected population CSV header: " + line);
            ++dim;
        }
        if (dim == 0) raise(Errc::IoError, "unexpected population CSV header: " + line);
    }
    SamplePopulation pop;
    pop.dim = dim;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) row.push_back(parse_double(cell));
        if (row.size() != static_cast<std::size_t>(dim) + 1)
            raise(Errc::IoError, "population CSV line " + std::to_string(lineno) + ": wrong column count");
        for (int d = 0; d < dim; ++d) pop.coords.push_back(row[static_cast<std::size_t>(d)]);
        double w = row.back();
        if (!(w >= 0.0) || !std::isfinite(w))
            raise(Errc::IoError, "population CSV line " + std::to_string(lineno) + ": bad weight");
        pop.weights.push_back(w);
    }
    if (pop.weights.empty()) raise(Errc::IoError, "population CSV has no rows");
    detail::renormalize_weights(pop.weights);
    return pop;
}

}  // namespace aecrit
