#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aecrit/aecrit.hpp"

namespace aecrit::cli {

// Exit codes: 0 CONVERGES, 1 DIVERGES, 2 INCONCLUSIVE, 3 bad config,
// 4 input not found, 5 toolkit error, 6 unexpected failure.
inline constexpr int kExitConverges = 0;
inline constexpr int kExitDiverges = 1;
inline constexpr int kExitInconclusive = 2;
inline constexpr int kExitConfigInvalid = 3;
inline constexpr int kExitInputNotFound = 4;
inline constexpr int kExitToolkitError = 5;
inline constexpr int kExitUnexpected = 6;

namespace detail {

inline int verdict_exit_code(Verdict v) {
    switch (v) {
        case Verdict::Converges: return kExitConverges;
        case Verdict::Diverges: return kExitDiverges;
        case Verdict::Inconclusive: return kExitInconclusive;
    }
    return kExitUnexpected;
}

inline std::vector<long> parse_n_grid(const std::string& text) {
    std::vector<long> grid;
    std::istringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        if (cell.empty()) continue;
        grid.push_back(std::stol(cell));
    }
    if (grid.empty()) raise(Errc::ConfigInvalid, "--n-grid: no indices given");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 1) raise(Errc::ConfigInvalid, "--n-grid: indices start at 1");
        if (i > 0 && grid[i] <= grid[i - 1])
            raise(Errc::ConfigInvalid, "--n-grid: must be strictly increasing");
    }
    return grid;
}

/// m_cap rule: "<k>n" (multiple), "n+<k>" (offset), "full-pass" (dyadic
/// sweep geometry), or a plain integer (constant cap).
inline std::function<long(long)> parse_m_cap_rule(const std::string& text) {
    if (text == "full-pass") return [](long n) { return typewriter_full_pass_cap(n); };
    if (text.rfind("n+", 0) == 0) {
        long k = std::stol(text.substr(2));
        if (k < 1) raise(Errc::ConfigInvalid, "--m-cap: offset must be >= 1");
        return [k](long n) { return n + k; };
    }
    if (!text.empty() && text.back() == 'n') {
        long k = std::stol(text.substr(0, text.size() - 1));
        if (k < 2) raise(Errc::ConfigInvalid, "--m-cap: multiple must be >= 2");
        return [k](long n) { return k * n; };
    }
    long cap = std::stol(text);
    if (cap < 2) raise(Errc::ConfigInvalid, "--m-cap: constant cap must be >= 2");
    return [cap](long) { return cap; };
}

struct ResolvedInput {
    std::string name;  // corpus name or file path
    const CorpusEntry* entry = nullptr;       // in `corpus` (owned elsewhere)
    std::optional<FunctionSequence> file_seq;  // sequence loaded from CSV
    std::optional<SamplePopulation> file_pop;
    long file_max_index = 0;
};

/// Sampled external sequence: header point,weight,f1,...,fN.
inline void load_sequence_csv(const std::string& path, ResolvedInput& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::InputNotFound, "cannot open sequence file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    std::istringstream lines(text);
    std::string line;
    if (!std::getline(lines, line)) raise(Errc::IoError, path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header;
    {
        std::istringstream hs(line);
        std::string col;
        while (std::getline(hs, col, ',')) header.push_back(col);
    }
    if (header.size() < 3 || header[0] != "point" || header[1] != "weight")
        raise(Errc::IoError, path + ": expected header point,weight,f1,...");
    const long max_index = static_cast<long>(header.size()) - 2;
    for (long k = 1; k <= max_index; ++k)
        if (header[static_cast<std::size_t>(k) + 1] != "f" + std::to_string(k))
            raise(Errc::IoError, path + ": expected column f" + std::to_string(k));

    auto values = std::make_shared<std::vector<std::vector<double>>>();  // [point][index]
    SamplePopulation pop;
    pop.dim = 1;
    std::size_t lineno = 1;
    while (std::getline(lines, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) row.push_back(parse_double(cell));
        if (row.size() != header.size())
            raise(Errc::IoError, path + ":" + std::to_string(lineno) + ": wrong column count");
        pop.coords.push_back(row[0]);
        pop.weights.push_back(row[1]);
        values->emplace_back(row.begin() + 2, row.end());
    }
    if (pop.weights.empty()) raise(Errc::IoError, path + ": no data rows");
    aecrit::detail::renormalize_weights(pop.weights);

    auto index_of = std::make_shared<std::map<double, std::size_t>>();
    for (std::size_t i = 0; i < pop.coords.size(); ++i) (*index_of)[pop.coords[i]] = i;

    FunctionSequence seq;
    seq.value_dim = 1;
    seq.eval = [values, index_of, max_index, path](long n, std::span<const double> x,
                                                   std::span<double> outv) {
        if (n < 1 || n > max_index)
            raise(Errc::InvalidArgument,
                  "sequence file '" + path + "' is truncated at index " + std::to_string(max_index));
        auto it = index_of->find(x[0]);
        if (it == index_of->end())
            raise(Errc::InvalidArgument, "point not in the sequence file population");
        outv[0] = (*values)[it->second][static_cast<std::size_t>(n - 1)];
    };
    out.file_seq = std::move(seq);
    out.file_pop = std::move(pop);
    out.file_max_index = max_index;
}

/// Periodic function samples: header x,value on [0, 2 pi); evaluated by
/// periodic linear interpolation.
inline PeriodicFunction load_periodic_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::InputNotFound, "cannot open function file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) raise(Errc::IoError, path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,value") raise(Errc::IoError, path + ": expected header x,value");
    auto xs = std::make_shared<std::vector<double>>();
    auto vs = std::make_shared<std::vector<double>>();
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            raise(Errc::IoError, path + ":" + std::to_string(lineno) + ": wrong column count");
        double x = parse_double(line.substr(0, comma));
        double v = parse_double(line.substr(comma + 1));
        if (!(x >= 0.0) || !(x < kTwoPi))
            raise(Errc::IoError, path + ":" + std::to_string(lineno) + ": x outside [0, 2pi)");
        if (!xs->empty() && x <= xs->back())
            raise(Errc::IoError, path + ":" + std::to_string(lineno) + ": x must be increasing");
        xs->push_back(x);
        vs->push_back(v);
    }
    if (xs->size() < 2) raise(Errc::IoError, path + ": need at least two samples");
    PeriodicFunction g;
    g.name = std::filesystem::path(path).filename().string();
    g.hint = SmoothnessHint::generic();
    g.eval = [xs, vs](double x) {
        const auto& X = *xs;
        const auto& V = *vs;
        auto it = std::upper_bound(X.begin(), X.end(), x);
        double x0, x1, v0, v1;
        if (it == X.begin()) {  // before the first sample: wrap the last one
            x0 = X.back() - kTwoPi;
            v0 = V.back();
            x1 = X.front();
            v1 = V.front();
        } else if (it == X.end()) {
            x0 = X.back();
            v0 = V.back();
            x1 = X.front() + kTwoPi;
            v1 = V.front();
        } else {
            std::size_t j = static_cast<std::size_t>(it - X.begin());
            x0 = X[j - 1];
            v0 = V[j - 1];
            x1 = X[j];
            v1 = V[j];
        }
        double t = (x - x0) / (x1 - x0);
        return v0 + t * (v1 - v0);
    };
    return g;
}

inline json population_json(const SamplePopulation& pop, const std::string& rule_name) {
    json j;
    j["provenance"] = pop.provenance == Provenance::MonteCarlo ? "monte-carlo" : "quadrature";
    j["rule"] = rule_name;
    j["points"] = pop.size();
    j["dim"] = pop.dim;
    if (pop.seed)
        j["seed"] = *pop.seed;
    else
        j["seed"] = nullptr;
    if (pop.path_count)
        j["paths"] = *pop.path_count;
    else
        j["paths"] = nullptr;
    return j;
}

inline json grid_json(const std::vector<long>& grid) {
    json arr = json::array();
    for (long n : grid) arr.push_back(n);
    return arr;
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

/// Flat key=value config: each key mirrors a long flag of the invoked
/// subcommand. Keys already present on the command line are skipped, so
/// flags override file values.
inline std::vector<std::string> apply_flat_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) raise(Errc::InputNotFound, "--config: cannot open '" + path + "'");
    std::set<std::string> present;
    for (const auto& a : args)
        if (a.rfind("--", 0) == 0) present.insert(a.substr(0, a.find('=')));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            raise(Errc::ConfigInvalid,
                  path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || key == "config")
            raise(Errc::ConfigInvalid, path + ":" + std::to_string(lineno) + ": bad key");
        if (present.count("--" + key)) continue;
        args.push_back("--" + key);
        args.push_back(value);
    }
    return args;
}

inline void emit_report(const std::filesystem::path& out_dir, const std::string& name,
                        const std::string& content) {
    std::filesystem::create_directories(out_dir);
    write_file_atomic(out_dir / name, content);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Shared option bundle
// ---------------------------------------------------------------------------

struct CommonOptions {
    std::string input;
    std::string phi = "arctan";
    std::string n_grid_text;
    std::string m_cap_text;
    std::string norm = "euclidean";
    std::string out_dir = ".";
    std::string population_csv;
    std::string dump_population;
    std::string config_path;
    std::string rule;  // midpoint | gauss ("" keeps entry default)
    int nodes = 0;
    std::uint64_t seed = kDefaultSeed;
    long paths = kDefaultPaths;
    int workers = 0;
    VerdictThresholds thresholds;
};

namespace detail {

struct PreparedRun {
    ResolvedInput input;
    std::vector<CorpusEntry> corpus;
    FunctionSequence sequence;
    SamplePopulation population;
    std::string population_rule_name;
    std::vector<long> n_grid;
    std::function<long(long)> m_cap_rule;
    std::string m_cap_name;
};

inline PreparedRun prepare_sequence_run(const CommonOptions& opt,
                                        const std::vector<long>& default_grid) {
    PreparedRun run;
    run.corpus = builtin_corpus();
    run.input.name = opt.input;
    const CorpusEntry* entry = find_corpus_entry(run.corpus, opt.input);
    if (entry != nullptr) {
        if (!entry->sequence && !corpus_entry_is_random(*entry))
            raise(Errc::ConfigInvalid,
                  "--input: corpus entry '" + opt.input + "' is periodic; use the fourier command");
        run.input.entry = entry;
    } else if (std::filesystem::exists(opt.input)) {
        load_sequence_csv(opt.input, run.input);
    } else {
        raise(Errc::InputNotFound,
              "--input: '" + opt.input + "' is neither a corpus entry nor a file");
    }

    PopulationRequest req;
    req.nodes = opt.nodes;
    req.seed = opt.seed;
    req.paths = opt.paths;
    if (!opt.rule.empty()) {
        if (opt.rule == "midpoint")
            req.rule = QuadratureRule::Midpoint;
        else if (opt.rule == "gauss")
            req.rule = QuadratureRule::GaussLegendre;
        else
            raise(Errc::ConfigInvalid, "--rule: expected midpoint or gauss");
    }

    if (!opt.population_csv.empty()) {
        std::ifstream in(opt.population_csv, std::ios::binary);
        if (!in) raise(Errc::InputNotFound, "--population-csv: cannot open " + opt.population_csv);
        std::stringstream buf;
        buf << in.rdbuf();
        run.population = population_from_csv(buf.str());
        run.population_rule_name = "csv:" + opt.population_csv;
    } else if (entry != nullptr) {
        run.population = entry->make_population(req);
        run.population_rule_name = run.population.provenance == Provenance::MonteCarlo
                                       ? "paths"
                                       : (req.rule == QuadratureRule::GaussLegendre ? "gauss"
                                          : req.rule == QuadratureRule::Midpoint
                                              ? "midpoint"
                                              : "entry-default");
    } else {
        run.population = *run.input.file_pop;
        run.population_rule_name = "file";
    }

    if (entry != nullptr) {
        run.sequence = bind_corpus_sequence(*entry, opt.seed);
    } else {
        run.sequence = *run.input.file_seq;
    }
    if (run.sequence.value_dim > 1) run.sequence.norm = parse_norm(opt.norm);

    run.n_grid = opt.n_grid_text.empty() ? default_grid : parse_n_grid(opt.n_grid_text);

    if (!opt.m_cap_text.empty()) {
        run.m_cap_rule = parse_m_cap_rule(opt.m_cap_text);
        run.m_cap_name = opt.m_cap_text;
    } else if (entry != nullptr && entry->m_cap_rule) {
        run.m_cap_rule = entry->m_cap_rule;
        run.m_cap_name = "entry-default";
    } else {
        run.m_cap_rule = m_cap_multiple(4);
        run.m_cap_name = "4n";
    }

    if (run.input.file_max_index > 0) {
        for (long n : run.n_grid)
            if (run.m_cap_rule(n) + 1 > run.input.file_max_index)
                raise(Errc::ConfigInvalid,
                      "--n-grid/--m-cap: window exceeds the file's largest index f" +
                          std::to_string(run.input.file_max_index) +
                          " (the probe needs one extra index past m_cap)");
    }
    return run;
}

inline json common_config_json(const CommonOptions& opt, const PreparedRun& run,
                               const std::string& mode) {
    json j;
    j["mode"] = mode;
    j["input"] = opt.input;
    j["phi"] = opt.phi;
    j["norm"] = run.sequence.value_dim > 1 ? norm_name(run.sequence.norm) : "abs";
    j["n_grid"] = grid_json(run.n_grid);
    j["m_cap_rule"] = run.m_cap_name;
    j["thresholds"] = thresholds_json(opt.thresholds);
    json pop;
    pop["rule"] = run.population_rule_name;
    pop["nodes"] = opt.nodes;
    pop["seed"] = opt.seed;
    pop["paths"] = opt.paths;
    j["population_spec"] = pop;
    return j;
}

inline json interpretation_json(const FunctionSequence& seq) {
    json j;
    j["vector_values"] = seq.value_dim > 1
                             ? std::string("trial function composed with the ") +
                                   norm_name(seq.norm) + " norm of the value"
                             : "scalar absolute value";
    j["window_sup"] = "finite windows are exact; only the n-limit is extrapolated";
    return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

inline int run_analyze(const CommonOptions& opt, std::string mode_text, std::ostream& err) {
    auto run = detail::prepare_sequence_run(opt, default_n_grid());

    // auto mode: the corpus entry's natural functional
    if (mode_text.empty() || mode_text == "auto") {
        mode_text = run.input.entry != nullptr ? mode_name(run.input.entry->default_mode) : "kappa";
        if (mode_text != std::string("kappa") && mode_text != std::string("gamma") &&
            mode_text != std::string("tau") && mode_text != std::string("in-prob") &&
            mode_text != std::string("moment"))
            mode_text = "kappa";
    }

    TrialFunction phi = parse_trial_function(opt.phi);
    WindowGrid grid;
    grid.n_grid = run.n_grid;
    grid.m_cap = run.m_cap_rule;
    grid.workers = opt.workers;

    json report;
    report["schema"] = kReportSchemaVersion;
    report["tool"] = tool_header_json();
    report["command"] = "analyze";
    report["config"] = detail::common_config_json(opt, run, mode_text);
    report["interpretation"] = detail::interpretation_json(run.sequence);
    report["population"] = detail::population_json(run.population, run.population_rule_name);

    std::filesystem::path out_dir(opt.out_dir);
    if (!opt.dump_population.empty())
        write_file_atomic(opt.dump_population, population_to_csv(run.population));

    ConvergenceVerdict verdict;
    if (mode_text == "kappa" || mode_text == "gamma" || mode_text == "tau") {
        WindowKind kind = mode_text == "kappa" ? WindowKind::AbsMax : WindowKind::CauchyMax;
        AnalysisMode mode = mode_text == "kappa"  ? AnalysisMode::Kappa
                            : mode_text == "gamma" ? AnalysisMode::Gamma
                                                   : AnalysisMode::Tau;
        if (mode == AnalysisMode::Tau && run.sequence.value_dim < 2)
            raise(Errc::ConfigInvalid, "--mode tau: input is scalar; use gamma");
        auto table = build_window_table(run.sequence, run.population, phi, kind, mode, grid);
        verdict = make_verdict(table, opt.thresholds);
        detail::emit_report(out_dir, "table.csv", window_table_csv(table));
        detail::emit_report(out_dir, "tail_profile.csv", tail_profile_csv(verdict.tail_profile));
        report["m_cap"] = detail::grid_json(table.m_cap);
    } else if (mode_text == "in-prob") {
        std::vector<std::pair<long, long>> pairs;
        for (long n : run.n_grid) {
            pairs.emplace_back(n, n + 1);
            pairs.emplace_back(n, run.m_cap_rule(n));
        }
        auto table = in_probability_criterion(run.sequence, run.population, pairs, opt.workers);
        // verdict from the (n, n+1) diagonal
        CriticalWindowTable diag;
        diag.mode = AnalysisMode::InProb;
        diag.phi_name = "arctan";
        diag.monte_carlo = run.population.provenance == Provenance::MonteCarlo;
        for (std::size_t i = 0; i < pairs.size(); i += 2) {
            diag.n_grid.push_back(pairs[i].first);
            diag.m_cap.push_back(pairs[i].second);
            diag.values.push_back({table.values[i]});
            diag.std_errors.push_back({table.std_errors[i]});
            diag.cap_probe.push_back(std::numeric_limits<double>::quiet_NaN());
        }
        verdict = make_verdict(diag, opt.thresholds,
                               "In-probability (in-measure) criterion: pairwise, no windowed sup.");
        detail::emit_report(out_dir, "table.csv", pair_table_csv(table));
        detail::emit_report(out_dir, "tail_profile.csv", tail_profile_csv(verdict.tail_profile));
    } else if (mode_text == "moment") {
        if (opt.phi == "arctan") {
            // bounded trial functions carry no moment information
            raise(Errc::ConfigInvalid,
                  "--mode moment needs an unbounded trial function, e.g. --phi power:2");
        }
        auto rep = moment_convergence_check(run.sequence, run.population, phi, grid,
                                            opt.thresholds.eps_pass);
        CriticalWindowTable single;
        single.mode = AnalysisMode::Moment;
        single.phi_name = phi.name;
        single.monte_carlo = run.population.provenance == Provenance::MonteCarlo;
        std::string table_csv = "n,m,value,std_err\n";
        for (std::size_t i = 0; i < rep.n_grid.size(); ++i) {
            single.n_grid.push_back(rep.n_grid[i]);
            single.m_cap.push_back(rep.n_grid[i]);
            single.values.push_back({rep.values[i]});
            single.std_errors.push_back({rep.std_errors[i]});
            single.cap_probe.push_back(std::numeric_limits<double>::quiet_NaN());
            table_csv += std::to_string(rep.n_grid[i]) + "," + std::to_string(rep.n_grid[i]) + "," +
                         format_double(rep.values[i]) + "," + format_double(rep.std_errors[i]) + "\n";
        }
        verdict = make_verdict(single, opt.thresholds,
                               "Moment (Orlicz-style) convergence of phi(||f_n||) means; not an "
                               "a.e. statement on its own.");
        json moment;
        moment["sup_value"] = rep.sup_value;
        moment["window_sup"] = rep.window_sup;
        moment["tends_to_zero"] = rep.tends_to_zero;
        moment["uniform_bound_holds"] = rep.bound_holds;
        report["moment"] = moment;
        detail::emit_report(out_dir, "table.csv", table_csv);
        detail::emit_report(out_dir, "tail_profile.csv", tail_profile_csv(verdict.tail_profile));
    } else {
        raise(Errc::ConfigInvalid, "--mode: expected kappa|gamma|tau|in-prob|moment");
    }

    report["tail_profile"] = tail_profile_json(verdict.tail_profile);
    report["warnings"] = verdict.warnings;
    report["verdict"] = verdict_name(verdict.verdict);
    report["caveat"] = verdict.caveat;
    detail::emit_report(out_dir, "verdict.json", report.dump(2) + "\n");
    for (const auto& w : verdict.warnings) err << "warning: " << w << "\n";
    return detail::verdict_exit_code(verdict.verdict);
}

// ---------------------------------------------------------------------------
// fourier
// ---------------------------------------------------------------------------

struct FourierOptions {
    CommonOptions common;
    std::string antonov;        // "", printed, conventional, both
    std::string method = "coef";
    std::string theta_variant = "pointwise";
};

inline int run_fourier(const FourierOptions& fopt, std::ostream& err) {
    const CommonOptions& opt = fopt.common;
    auto corpus = builtin_corpus();
    const CorpusEntry* entry = find_corpus_entry(corpus, opt.input);
    PeriodicFunction g;
    std::string rule_name;
    SamplePopulation pop;
    if (entry != nullptr) {
        if (!entry->periodic)
            raise(Errc::ConfigInvalid,
                  "--g: corpus entry '" + opt.input + "' is not periodic; use analyze");
        g = *entry->periodic;
        PopulationRequest req;
        req.nodes = opt.nodes;
        if (!opt.rule.empty())
            req.rule = opt.rule == "gauss" ? QuadratureRule::GaussLegendre : QuadratureRule::Midpoint;
        pop = entry->make_population(req);
        rule_name = "entry-default";
    } else if (std::filesystem::exists(opt.input)) {
        g = detail::load_periodic_csv(opt.input);
        pop = uniform_population(0.0, kTwoPi, opt.nodes > 0 ? opt.nodes : 2048,
                                 QuadratureRule::Midpoint);
        rule_name = "midpoint";
    } else {
        raise(Errc::InputNotFound, "--g: '" + opt.input + "' is neither a corpus entry nor a file");
    }

    std::vector<long> n_grid =
        opt.n_grid_text.empty() ? std::vector<long>{4, 8, 16, 32, 64} : detail::parse_n_grid(opt.n_grid_text);
    auto m_cap = opt.m_cap_text.empty() ? m_cap_multiple(4) : detail::parse_m_cap_rule(opt.m_cap_text);

    long max_degree = 0;
    for (long n : n_grid) max_degree = std::max(max_degree, m_cap(n) + 1);
    auto series = std::make_shared<const FourierSeries>(g, max_degree);

    WindowGrid grid;
    grid.n_grid = n_grid;
    grid.m_cap = m_cap;
    grid.workers = opt.workers;

    CriticalWindowTable table;
    if (fopt.method == "conv") {
        auto gp = std::make_shared<const PeriodicFunction>(g);
        table = build_window_table(partial_sum_sequence_convolution(gp), pop, trial_arctan(),
                                   WindowKind::CauchyMax, AnalysisMode::Theta, grid);
    } else {
        table = build_theta_table(series, pop, grid);
    }
    auto verdict = make_verdict(table, opt.thresholds,
                                "Partial sums via " +
                                    std::string(fopt.method == "conv" ? "kernel convolution"
                                                                      : "quadrature coefficients") +
                                    ".");

    json report;
    report["schema"] = kReportSchemaVersion;
    report["tool"] = tool_header_json();
    report["command"] = "fourier";
    {
        json cfg;
        cfg["g"] = opt.input;
        cfg["n_grid"] = detail::grid_json(n_grid);
        cfg["m_cap_rule"] = opt.m_cap_text.empty() ? "4n" : opt.m_cap_text;
        cfg["method"] = fopt.method;
        cfg["antonov"] = fopt.antonov.empty() ? "off" : fopt.antonov;
        cfg["theta_variant"] = fopt.theta_variant;
        cfg["nodes"] = opt.nodes;
        cfg["thresholds"] = thresholds_json(opt.thresholds);
        report["config"] = cfg;
    }
    {
        json interp;
        interp["theta_integrand"] =
            "pointwise (arctan of the windowed max at each x, integrated over dx/(2 pi))";
        interp["theta_uniform_variant"] =
            "constant integrand: 2 pi * arctan(sup_x of the windowed max); reported on demand";
        interp["lnplus_printed"] = "max(e, ln z)";
        interp["lnplus_conventional"] = "ln(max(e, z))";
        report["interpretation"] = interp;
    }
    report["population"] = detail::population_json(pop, rule_name);
    report["m_cap"] = detail::grid_json(table.m_cap);

    if (fopt.theta_variant == "uniform" || fopt.theta_variant == "both") {
        json arr = json::array();
        for (std::size_t i = 0; i < n_grid.size(); ++i) {
            json row;
            row["n"] = n_grid[i];
            row["value"] = theta_uniform_variant(*series, pop, n_grid[i], table.m_cap[i]);
            arr.push_back(std::move(row));
        }
        report["theta_uniform"] = arr;
    }

    if (!fopt.antonov.empty()) {
        json a;
        if (fopt.antonov == "printed" || fopt.antonov == "both")
            a["printed"] = antonov_functional(g, pop, LnPlusVariant::Printed, opt.workers).value;
        if (fopt.antonov == "conventional" || fopt.antonov == "both")
            a["conventional"] =
                antonov_functional(g, pop, LnPlusVariant::Conventional, opt.workers).value;
        report["antonov"] = a;
    }

    if (fopt.method == "both") {
        // agreement diagnostic between the two partial-sum routes
        double worst = 0.0;
        std::vector<long> degrees = {n_grid.front(), n_grid.back()};
        for (long n : degrees) {
            for (int i = 0; i < 17; ++i) {
                double x = kTwoPi * (i + 0.37) / 17.0;
                double conv = partial_sum(g, n, x, PartialSumMethod::Convolution);
                double coef = series->partial_sum(n, x);
                worst = std::max(worst, std::abs(conv - coef));
            }
        }
        json agr;
        agr["max_abs_difference"] = worst;
        agr["degrees_checked"] = detail::grid_json(degrees);
        report["method_agreement"] = agr;
    }

    std::filesystem::path out_dir(opt.out_dir);
    if (!opt.dump_population.empty())
        write_file_atomic(opt.dump_population, population_to_csv(pop));
    detail::emit_report(out_dir, "table.csv", window_table_csv(table));
    detail::emit_report(out_dir, "tail_profile.csv", tail_profile_csv(verdict.tail_profile));
    report["tail_profile"] = tail_profile_json(verdict.tail_profile);
    report["warnings"] = verdict.warnings;
    report["verdict"] = verdict_name(verdict.verdict);
    report["caveat"] = verdict.caveat;
    detail::emit_report(out_dir, "verdict.json", report.dump(2) + "\n");
    for (const auto& w : verdict.warnings) err << "warning: " << w << "\n";
    return detail::verdict_exit_code(verdict.verdict);
}

// ---------------------------------------------------------------------------
// spaces
// ---------------------------------------------------------------------------

struct SpacesOptions {
    CommonOptions common;
    std::string mode = "lambda";  // lambda | lp
    double p = 2.0;
    int p_grid_count = 32;
    double R = std::numeric_limits<double>::infinity();
    long n_max = 0;  // 0: largest probed index
};

inline int run_spaces(const SpacesOptions& sopt, std::ostream& err) {
    const CommonOptions& opt = sopt.common;
    auto run = detail::prepare_sequence_run(opt, std::vector<long>{4, 8, 16, 32, 64});

    WindowGrid grid;
    grid.n_grid = run.n_grid;
    grid.m_cap = run.m_cap_rule;
    grid.workers = opt.workers;

    long n_max = sopt.n_max;
    if (n_max <= 0) {
        for (long n : run.n_grid) n_max = std::max(n_max, run.m_cap_rule(n) + 1);
    }

    json report;
    report["schema"] = kReportSchemaVersion;
    report["tool"] = tool_header_json();
    report["command"] = "spaces";
    {
        json cfg = detail::common_config_json(opt, run, sopt.mode);
        cfg["p"] = sopt.p;
        cfg["p_grid_count"] = sopt.p_grid_count;
        if (std::isinf(sopt.R))
            cfg["R"] = "inf";
        else
            cfg["R"] = sopt.R;
        cfg["N_max"] = n_max;
        report["config"] = cfg;
    }
    report["population"] = detail::population_json(run.population, run.population_rule_name);

    std::filesystem::path out_dir(opt.out_dir);
    ConvergenceVerdict verdict;

    if (sopt.mode == "lambda") {
        auto p_grid = make_p_grid(sopt.R, sopt.p_grid_count);
        auto spec = natural_function(run.sequence, run.population, p_grid, n_max, sopt.R);
        std::string psi_csv = "p,psi\n";
        for (std::size_t j = 0; j < p_grid.size(); ++j)
            psi_csv += format_double(p_grid[j]) + "," + format_double(spec.psi[j]) + "\n";
        detail::emit_report(out_dir, "psi.csv", psi_csv);

        auto table = build_lambda_table(run.sequence, run.population, spec, grid);
        verdict = make_verdict(table, opt.thresholds,
                               "Grand Lebesgue norm of the windowed max; the generating function "
                               "is the natural function truncated at N_max=" + std::to_string(n_max) + ".");
        detail::emit_report(out_dir, "table.csv", window_table_csv(table));
        detail::emit_report(out_dir, "tail_profile.csv", tail_profile_csv(verdict.tail_profile));
        report["m_cap"] = detail::grid_json(table.m_cap);

        // the a.e. statement must not contradict the windowed-max verdict
        auto kappa_table = build_window_table(run.sequence, run.population, trial_arctan(),
                                              WindowKind::AbsMax, AnalysisMode::Kappa, grid);
        auto kappa_verdict = make_verdict(kappa_table, opt.thresholds);
        json agr;
        agr["kappa_verdict"] = verdict_name(kappa_verdict.verdict);
        agr["consistent"] = !(verdict.verdict == Verdict::Converges &&
                              kappa_verdict.verdict == Verdict::Diverges) &&
                            !(verdict.verdict == Verdict::Diverges &&
                              kappa_verdict.verdict == Verdict::Converges);
        report["ae_agreement"] = agr;
    } else if (sopt.mode == "lp") {
        auto table = build_lp_table(run.sequence, run.population, sopt.p, grid);
        verdict = make_verdict(table, opt.thresholds,
                               "Lebesgue-Riesz tail |f_n - f_m|_p; the window sup is an explicit "
                               "max (not monotone in m). The verdict uses the sup form.");
        detail::emit_report(out_dir, "table.csv", window_table_csv(table));
        detail::emit_report(out_dir, "tail_profile.csv", tail_profile_csv(verdict.tail_profile));
        report["m_cap"] = detail::grid_json(table.m_cap);
        report["pairwise_profile"] =
            tail_profile_json(lp_pairwise_profile(run.sequence, run.population, sopt.p, run.n_grid));
    } else {
        raise(Errc::ConfigInvalid, "--mode: expected lambda or lp");
    }

    report["tail_profile"] = tail_profile_json(verdict.tail_profile);
    report["warnings"] = verdict.warnings;
    report["verdict"] = verdict_name(verdict.verdict);
    report["caveat"] = verdict.caveat;
    detail::emit_report(out_dir, "verdict.json", report.dump(2) + "\n");
    for (const auto& w : verdict.warnings) err << "warning: " << w << "\n";
    return detail::verdict_exit_code(verdict.verdict);
}

// ---------------------------------------------------------------------------
// corpus, validate-trial
// ---------------------------------------------------------------------------

inline int run_corpus(const std::string& action, const std::string& name, std::ostream& out) {
    auto corpus = builtin_corpus();
    if (action == "list") {
        for (const auto& e : corpus) {
            out << e.name << "\t" << (e.periodic ? "periodic" : "sequence") << "\t"
                << mode_name(e.default_mode) << "\t" << e.description << "\n";
        }
        return 0;
    }
    const CorpusEntry* entry = find_corpus_entry(corpus, name);
    if (entry == nullptr) raise(Errc::InputNotFound, "corpus entry '" + name + "' not found");
    json j;
    j["name"] = entry->name;
    j["kind"] = entry->periodic ? "periodic" : "sequence";
    j["default_mode"] = mode_name(entry->default_mode);
    j["description"] = entry->description;
    j["oracle_notes"] = entry->oracle_notes;
    json gt;
    if (entry->ground_truth.ae_converges)
        gt["ae_converges"] = *entry->ground_truth.ae_converges;
    if (entry->ground_truth.in_measure)
        gt["in_measure"] = *entry->ground_truth.in_measure;
    json lp = json::array();
    for (const auto& c : entry->ground_truth.lp_converges) {
        json row;
        row["p"] = c.p;
        row["converges"] = c.converges;
        lp.push_back(std::move(row));
    }
    gt["lp_converges"] = lp;
    j["ground_truth"] = gt;
    out << j.dump(2) << "\n";
    return 0;
}

inline int run_validate_trial(const std::string& phi_selector, double continuity_tol,
                              std::ostream& out) {
    TrialFunction phi = parse_trial_function(phi_selector);
    auto grid = default_probe_grid();
    auto rep = validate_class(phi, grid, continuity_tol);
    json j;
    j["phi"] = phi.name;
    j["declared_class"] = phi.declared_class == TrialClass::KB ? "KB" : "K";
    j["is_young_orlicz"] = phi.is_young_orlicz;
    auto cond = [](const ConditionResult& c) {
        json cj;
        cj["pass"] = c.pass;
        cj["worst_violation"] = c.worst_violation;
        if (!c.note.empty()) cj["note"] = c.note;
        return cj;
    };
    json conditions;
    conditions["A_positivity"] = cond(rep.positivity);
    conditions["B_monotonicity"] = cond(rep.monotonicity);
    conditions["C_continuity"] = cond(rep.continuity);
    conditions["D_evenness"] = cond(rep.evenness);
    conditions["E_boundedness"] = cond(rep.boundedness);
    j["conditions"] = conditions;
    j["empirical_max"] = rep.empirical_max;
    if (phi.declared_bound) j["declared_bound"] = *phi.declared_bound;
    j["grid_points"] = rep.grid.size();
    j["overall_pass"] = rep.overall_pass;
    // doubling-condition evidence on the positive part of the grid
    j["delta2_ratio"] = delta2_ratio(phi, grid);
    out << j.dump(2) << "\n";
    return rep.overall_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

inline int run(std::vector<std::string> args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"almost-everywhere convergence diagnostics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);

    auto add_common = [](CLI::App* sub, CommonOptions& c, bool with_phi = true) {
        sub->add_option("--n-grid", c.n_grid_text, "comma-separated index grid");
        sub->add_option("--m-cap", c.m_cap_text, "window cap rule: <k>n, n+<k>, full-pass, or a constant");
        if (with_phi) sub->add_option("--phi", c.phi, "trial function: arctan|ratio1|ratio2|power:p");
        sub->add_option("--eps-pass", c.thresholds.eps_pass, "pass threshold");
        sub->add_option("--eps-fail", c.thresholds.eps_fail, "fail threshold");
        sub->add_option("--plateau", c.thresholds.plateau_rel_change, "plateau relative change");
        sub->add_option("--mc-margin", c.thresholds.mc_margin_sigmas, "Monte Carlo margin in std errors");
        sub->add_option("--nodes", c.nodes, "population node count override");
        sub->add_option("--rule", c.rule, "population rule override: midpoint|gauss");
        sub->add_option("--seed", c.seed, "Monte Carlo master seed");
        sub->add_option("--paths", c.paths, "Monte Carlo path count");
        sub->add_option("--norm", c.norm, "vector norm: euclidean|sup|one");
        sub->add_option("--out", c.out_dir, "report output directory");
        sub->add_option("--workers", c.workers, "worker threads (0 = auto)");
        sub->add_option("--population-csv", c.population_csv, "load the population from CSV");
        sub->add_option("--dump-population", c.dump_population, "write the population CSV here");
        sub->add_option("--config", c.config_path,
                        "flat key=value file mirroring these flags (flags win)");
    };

    CommonOptions an_common;
    std::string an_mode;
    auto* analyze = app.add_subcommand("analyze", "window-functional convergence analysis");
    analyze->add_option("--mode", an_mode, "kappa|gamma|tau|in-prob|moment (default: input's natural mode)");
    analyze->add_option("--input", an_common.input, "corpus entry or sequence CSV")->required();
    add_common(analyze, an_common);

    FourierOptions fo;
    auto* fourier = app.add_subcommand("fourier", "partial-sum (theta) analysis and integrability");
    fourier->add_option("--g", fo.common.input, "periodic corpus entry or x,value CSV")->required();
    fourier->add_option("--antonov", fo.antonov, "integrability functional: printed|conventional|both")
        ->expected(0, 1);
    fourier->add_option("--method", fo.method, "partial-sum route: conv|coef|both");
    fourier->add_option("--theta-variant", fo.theta_variant, "pointwise|uniform|both");
    add_common(fourier, fo.common, false);

    SpacesOptions so;
    auto* spaces = app.add_subcommand("spaces", "Grand Lebesgue / Lebesgue-Riesz analysis");
    spaces->add_option("--input", so.common.input, "corpus entry or sequence CSV")->required();
    spaces->add_option("--mode", so.mode, "lambda|lp");
    spaces->add_option("--p", so.p, "exponent for lp mode");
    spaces->add_option("--p-grid", so.p_grid_count, "p-grid size");
    spaces->add_option("--R", so.R, "upper exponent bound (inf allowed)");
    spaces->add_option("--N-max", so.n_max, "natural-function truncation (0: largest probed index)");
    add_common(spaces, so.common, false);

    std::string corpus_action, corpus_name;
    auto* corpus_cmd = app.add_subcommand("corpus", "list or describe ground-truth inputs");
    corpus_cmd->add_option("action", corpus_action, "list | describe")->required();
    corpus_cmd->add_option("name", corpus_name, "entry name (describe)");

    std::string vt_phi;
    double vt_tol = 1e-3;
    auto* vt = app.add_subcommand("validate-trial", "probe trial-function class conditions");
    vt->add_option("--phi", vt_phi, "trial function selector")->required();
    vt->add_option("--continuity-tol", vt_tol, "jump bound at the fine grid step");

    try {
        args = detail::apply_flat_config(std::move(args));
    } catch (const ToolkitError& e) {
        err << "error: " << e.what() << "\n";
        return e.code() == Errc::InputNotFound ? kExitInputNotFound : kExitConfigInvalid;
    }

    std::vector<const char*> argv;
    argv.push_back("aecrit");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help() << "\n";
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kToolName << " " << kToolVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigInvalid;
    }

    try {
        if (analyze->parsed()) return run_analyze(an_common, an_mode, err);
        if (fourier->parsed()) {
            if (fourier->count("--antonov") > 0 && fo.antonov.empty()) fo.antonov = "both";
            if (!fo.antonov.empty() && fo.antonov != "printed" && fo.antonov != "conventional" &&
                fo.antonov != "both")
                raise(Errc::ConfigInvalid, "--antonov: expected printed|conventional|both");
            if (fo.method != "conv" && fo.method != "coef" && fo.method != "both")
                raise(Errc::ConfigInvalid, "--method: expected conv|coef|both");
            if (fo.theta_variant != "pointwise" && fo.theta_variant != "uniform" &&
                fo.theta_variant != "both")
                raise(Errc::ConfigInvalid, "--theta-variant: expected pointwise|uniform|both");
            return run_fourier(fo, err);
        }
        if (spaces->parsed()) return run_spaces(so, err);
        if (corpus_cmd->parsed()) {
            if (corpus_action != "list" && corpus_action != "describe")
                raise(Errc::ConfigInvalid, "corpus: expected 'list' or 'describe <name>'");
            if (corpus_action == "describe" && corpus_name.empty())
                raise(Errc::ConfigInvalid, "corpus describe: missing entry name");
            return run_corpus(corpus_action, corpus_name, out);
        }
        if (vt->parsed()) return run_validate_trial(vt_phi, vt_tol, out);
    } catch (const ToolkitError& e) {
        err << "error: " << e.what() << "\n";
        if (e.code() == Errc::ConfigInvalid) return kExitConfigInvalid;
        if (e.code() == Errc::InputNotFound) return kExitInputNotFound;
        return kExitToolkitError;
    } catch (const std::exception& e) {
        err << "unexpected error: " << e.what() << "\n";
        return kExitUnexpected;
    }
    return kExitConfigInvalid;
}

inline int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(std::move(args));
}

}  // namespace aecrit::cli
