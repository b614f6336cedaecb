#include "qde/tasks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "qde/capacity.hpp"
#include "qde/classical.hpp"
#include "qde/info.hpp"
#include "qde/verify.hpp"

#ifndef QDE_VERSION
#define QDE_VERSION "0.1.0"
#endif

namespace qde {

using json = nlohmann::json;

const char* version_string() { return QDE_VERSION; }

double ResultRecord::scalar(const std::string& key) const {
    for (const auto& [k, v] : scalars)
        if (k == key) return v;
    throw Error(ErrorKind::validation, "result record has no scalar '" + key + "'");
}

const Check& ResultRecord::check(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw Error(ErrorKind::validation, "result record has no check '" + name + "'");
}

bool ResultRecord::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void add_check(ResultRecord& r, std::string name, double residual, double tol) {
    r.checks.push_back({std::move(name), residual, tol, residual <= tol});
}

double value_of(ExtendedReal v) { return v.is_infinite() ? inf : v.to_double(); }

std::string key(const std::string& prefix, const std::string& name) { return prefix.empty() ? name : prefix + "." + name; }

std::string partition_name(const SystemSpec& s, std::size_t i) {
    return s.partitions[i].name.empty() ? "partitions[" + std::to_string(i) + "]" : s.partitions[i].name;
}

std::string function_name(const SystemSpec& s, std::size_t i) {
    const auto& n = s.classical->partitions[i].name;
    return n.empty() ? "partitions[" + std::to_string(i) + "]" : n;
}

void record_sequence(ResultRecord& r, const std::string& prefix, const EntropySequence& seq, const Settings& st) {
    r.scalars.emplace_back(key(prefix, "h_estimate"), seq.h_estimate);
    r.scalars.emplace_back(key(prefix, "upper_bound"), seq.upper_bound);
    r.scalars.emplace_back(key(prefix, "invariance_residual"), seq.invariance_residual);
    r.scalars.emplace_back(key(prefix, "converged"), seq.converged ? 1.0 : 0.0);
    r.arrays.emplace_back(key(prefix, "a_n"), seq.values);
    add_check(r, key(prefix, "an_nonincreasing"), seq.monotonicity_residual, 1e-8);
    add_check(r, key(prefix, "an_bounded_by_H"), seq.bound_residual, 1e-8);
    if (seq.invariant_state && !seq.alternate.empty()) {
        r.arrays.emplace_back(key(prefix, "alternate"), seq.alternate);
        add_check(r, key(prefix, "alternate_form"), seq.alternate_deviation, st.identity_tolerance);
    }
    for (const auto& w : seq.warnings) r.warnings.push_back(key(prefix, w));
}

Series an_series(const std::string& name, const std::vector<double>& values) {
    Series s{name, "a_n", {}};
    for (std::size_t i = 0; i < values.size(); ++i) s.points.emplace_back(static_cast<int>(i + 1), values[i]);
    return s;
}

// ---- info ---------------------------------------------------------------------

void run_info(const SystemSpec& s, ResultRecord& r) {
    const Settings& st = s.params.settings;
    const StateFunctional phi = build_state(s);
    std::vector<Partition> parts;
    for (std::size_t i = 0; i < s.partitions.size(); ++i) parts.push_back(build_partition(s, i));
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string p = partition_name(s, i);
        const auto rep = information(phi, parts[i], st);
        r.scalars.emplace_back(key(p, "H"), value_of(rep.total_H));
        r.scalars.emplace_back(key(p, "Hc"), rep.classical_Hc);
        r.scalars.emplace_back(key(p, "Hq"), value_of(rep.quantum_Hq));
        r.arrays.emplace_back(key(p, "weights"), rep.weights);
        add_check(r, key(p, "H_equals_Hc_plus_Hq"), rep.identity_residual, st.identity_tolerance);
        const ExtendedReal ds = information_via_direct_sum(phi, parts[i], st);
        const double dsr = rep.infinite_flag || ds.is_infinite()
                               ? (rep.infinite_flag == ds.is_infinite() ? 0.0 : inf)
                               : std::abs(ds.to_double() - rep.total_H.to_double());
        add_check(r, key(p, "direct_sum_agreement"), dsr, st.identity_tolerance);
        if (rep.infinite_flag) r.warnings.push_back(p + ": H is +inf (branch leaves the support of φ∘ζ)");
    }
    // Consecutive composable pairs: conditional information and subadditivity.
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        const Partition& z = parts[i];
        const Partition& e = parts[i + 1];
        if (e.out_dim() != z.in_dim()) continue;
        const std::string p = partition_name(s, i) + "|" + partition_name(s, i + 1);
        const StateFunctional after = precompose(phi, z, st);
        const auto hz = information(phi, z, st);
        const auto he = information(after, e, st);
        const auto hze = information(phi, compose(z, e, st), st);
        if (hz.infinite_flag || he.infinite_flag || hze.infinite_flag) {
            r.warnings.push_back(p + ": skipped, an information is +inf");
            continue;
        }
        r.scalars.emplace_back(key(p, "conditional"), hze.total_H.to_double() - he.total_H.to_double());
        add_check(r, key(p, "subadditivity"),
                  hze.total_H.to_double() - hz.total_H.to_double() - he.total_H.to_double(), 1e-8);
    }
}

// ---- dynent -------------------------------------------------------------------

void run_dynent(const SystemSpec& s, ResultRecord& r) {
    const Settings& st = s.params.settings;
    const int N = s.params.N;
    if (s.state && !s.partitions.empty() && s.unitary) {
        const auto seq = an_sequence(build_state(s), build_unitary(s), build_partition(s, 0), N, st);
        record_sequence(r, "quantum", seq, st);
        r.series.push_back(an_series("an", seq.values));
    }
    if (s.classical && s.classical->markov) {
        const SymbolicShift shift = build_shift(s);
        const auto& labels = s.classical->markov->labels;
        const auto cseq = markov_entropy_sequence(shift, N, labels);
        r.scalars.emplace_back("markov.entropy_rate", shift.entropy_rate());
        record_sequence(r, "markov", cseq, st);
        r.series.push_back(an_series("markov_an", cseq.values));
        const int L = s.classical->markov->window;
        if (L > 0) {
            if (!labels.empty())
                throw Error(ErrorKind::unsupported, "window embedding uses the coordinate partition; drop labels");
            const auto emb = markov_window_embedding(shift, L);
            const auto de = embed_diagonal(emb.space, emb.coordinate);
            const auto qseq = an_sequence(de.phi, permutation_automorphism(emb.perm), de.zeta, N, st);
            record_sequence(r, "embedded", qseq, st);
            r.series.push_back(an_series("embedded_an", qseq.values));
            double gap = 0.0;
            for (std::size_t i = 0; i < qseq.values.size(); ++i)
                gap = std::max(gap, std::abs(qseq.values[i] - cseq.values[i]));
            add_check(r, "embedded_matches_markov", gap, 1e-8);
        }
    }
    if (s.classical && !s.classical->permutation.empty() && !s.classical->partitions.empty()) {
        const auto seq = permutation_entropy_sequence(build_space(s), s.classical->permutation,
                                                      build_function_partition(s, 0), N, st);
        record_sequence(r, "permutation", seq, st);
        r.series.push_back(an_series("permutation_an", seq.values));
    }
}

// ---- capacity -------------------------------------------------------------------

void run_capacity(const SystemSpec& s, ResultRecord& r) {
    const Settings& st = s.params.settings;
    const ChannelSystem sys = s.ensemble ? build_ensemble(s)
                                         : ChannelSystem{"code", Channel(build_partition(s, 0)), build_state(s)};
    CapacityConfig cfg;
    cfg.optimizer = s.params.optimizer;
    cfg.allow_large_n = s.params.allow_large_n;
    const RateReport rate = capacity_rate(sys.phi, sys.channel, s.params.n, cfg, st);
    Series cs{"capacity_rate", "C_n/n", {}};
    Series ds{"capacity_rate_classical", "D_n/n", {}};
    for (const auto& b : rate.blocks) {
        const std::string p = "n" + std::to_string(b.n);
        r.scalars.emplace_back(key(p, "C_n"), b.C_n_lower);
        r.scalars.emplace_back(key(p, "D_n"), b.D_n_lower);
        r.scalars.emplace_back(key(p, "H_upper"), b.H_upper);
        r.arrays.emplace_back(key(p, "best_C_parameters"), b.best_C_parameters);
        r.arrays.emplace_back(key(p, "best_D_parameters"), b.best_D_parameters);
        add_check(r, key(p, "chain_0_le_D_le_C_le_H"), b.chain_residual, 1e-8);
        for (const auto& w : b.warnings) r.warnings.push_back(key(p, w));
        cs.points.emplace_back(b.n, b.C_n_lower / b.n);
        ds.points.emplace_back(b.n, b.D_n_lower / b.n);
    }
    if (rate.blocks.size() >= 2) {
        r.scalars.emplace_back("superadditivity_surplus", rate.superadditivity_surplus);
        add_check(r, "superadditivity", rate.superadditivity_residual, 0.0);
    }
    r.series.push_back(std::move(cs));
    r.series.push_back(std::move(ds));
    try {
        const auto h = holevo_quantity(sys.phi, sys.channel, st);
        r.scalars.emplace_back("chi", h.chi);
        add_check(r, "chi_equals_H", h.identity_residual, st.identity_tolerance);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::property_violation) throw;
        r.warnings.push_back(std::string("chi not computed: ") + e.what());
    }
}

// ---- classical ------------------------------------------------------------------

void run_classical(const SystemSpec& s, ResultRecord& r) {
    const Settings& st = s.params.settings;
    const auto& c = *s.classical;
    if (!c.measure.empty() && !c.partitions.empty()) {
        const FiniteSpace mu = build_space(s);
        std::vector<FunctionPartition> fs;
        for (std::size_t i = 0; i < c.partitions.size(); ++i) fs.push_back(build_function_partition(s, i));
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const std::string p = function_name(s, i);
            const double h = classical_information(mu, fs[i]);
            r.scalars.emplace_back(key(p, "H"), h);
            const auto de = embed_diagonal(mu, fs[i]);
            add_check(r, key(p, "quantum_embedding_agreement"),
                      std::abs(h - information(de.phi, de.zeta, st).total_H.finite_value()), 1e-8);
        }
        for (std::size_t i = 0; i + 1 < fs.size(); ++i) {
            const std::string p = function_name(s, i) + "|" + function_name(s, i + 1);
            const double cond = classical_conditional(mu, fs[i], fs[i + 1]);
            r.scalars.emplace_back(key(p, "conditional"), cond);
            add_check(r, key(p, "refinement_growth"),
                      classical_information(mu, fs[i]) - classical_information(mu, compose(fs[i], fs[i + 1])), 1e-8);
            try {
                const double viaE = classical_conditional_by_expectation(mu, fs[i], fs[i + 1]);
                add_check(r, key(p, "conditional_expectation_agreement"), std::abs(viaE - cond), 1e-8);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::validation) throw;
            }
            if (!c.permutation.empty()) {
                double worst = -inf;
                for (int n = 1; n <= s.params.N; ++n)
                    worst = std::max(worst,
                                     partition_comparison_bound(mu, c.permutation, fs[i], fs[i + 1], n, 1e-8, st).residual);
                add_check(r, key(p, "comparison_bound"), worst, 1e-8);
            }
        }
        if (!c.permutation.empty()) {
            const auto seq = permutation_entropy_sequence(mu, c.permutation, fs[0], s.params.N, st);
            record_sequence(r, "permutation", seq, st);
            r.series.push_back(an_series("permutation_an", seq.values));
        }
    }
    if (c.markov) {
        const SymbolicShift shift = build_shift(s);
        const auto seq = markov_entropy_sequence(shift, s.params.N, c.markov->labels);
        r.scalars.emplace_back("markov.entropy_rate", shift.entropy_rate());
        record_sequence(r, "markov", seq, st);
        r.series.push_back(an_series("markov_an", seq.values));
    }
}

// ---- verify ---------------------------------------------------------------------

void run_verify(const SystemSpec& s, ResultRecord& r) {
    SuiteConfig cfg;
    cfg.dims = s.params.dims;
    cfg.trials = s.params.trials;
    cfg.seed = s.params.seed;
    cfg.threads = s.params.threads;
    for (const auto& f : run_property_suite(cfg)) {
        r.checks.push_back({f.name, f.max_residual, f.tolerance, f.ok()});
        r.scalars.emplace_back(key(f.name, "trials"), f.trials);
        r.scalars.emplace_back(key(f.name, "violations"), f.violations);
        r.scalars.emplace_back(key(f.name, "skipped"), f.skipped);
    }
}

json number_json(double v) {
    if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return v;
}

std::string format(double v) {
    if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

}  // namespace

ResultRecord run_task(const SystemSpec& spec) {
    ResultRecord r;
    r.task = to_string(spec.task);
    r.settings = spec.params.settings;
    r.seed = spec.params.seed;
    r.version = version_string();
    const auto start = std::chrono::steady_clock::now();
    try {
        switch (spec.task) {
            case TaskKind::info: run_info(spec, r); break;
            case TaskKind::dynent: run_dynent(spec, r); break;
            case TaskKind::capacity: run_capacity(spec, r); break;
            case TaskKind::classical: run_classical(spec, r); break;
            case TaskKind::verify: run_verify(spec, r); break;
        }
    } catch (const SpecError&) {
        throw;
    } catch (const Error& e) {
        throw Error(e.kind(), std::string(to_string(spec.task)) + " task: " + e.what());
    }
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::string to_json(const ResultRecord& r, bool include_wall_time) {
    json j;
    j["task"] = r.task;
    json scalars = json::object();
    for (const auto& [k, v] : r.scalars) scalars[k] = number_json(v);
    j["results"] = scalars;
    json arrays = json::object();
    for (const auto& [k, v] : r.arrays) {
        json a = json::array();
        for (double x : v) a.push_back(number_json(x));
        arrays[k] = a;
    }
    j["arrays"] = arrays;
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"residual", number_json(c.residual)},
                          {"tolerance", c.tolerance},
                          {"passed", c.passed}});
    j["checks"] = checks;
    json series = json::object();
    for (const auto& s : r.series) {
        json pts = json::array();
        for (const auto& [n, v] : s.points) pts.push_back({n, number_json(v)});
        series[s.name] = {{"columns", {"n", s.value_column}}, {"points", pts}};
    }
    j["series"] = series;
    j["warnings"] = r.warnings;
    const Settings& st = r.settings;
    j["provenance"] = {{"version", r.version},
                       {"seed", r.seed},
                       {"threads", st.threads},
                       {"tolerances",
                        {{"support_cutoff", st.support_cutoff},
                         {"psd", st.psd_tolerance},
                         {"hermiticity", st.hermiticity_tolerance},
                         {"normalization", st.normalization_tolerance},
                         {"zero_weight", st.zero_weight},
                         {"unit_sum", st.unit_sum_tolerance},
                         {"subunital", st.subunital_tolerance},
                         {"projector", st.projector_tolerance},
                         {"commutation", st.commutation_tolerance},
                         {"invariance", st.invariance_tolerance},
                         {"identity", st.identity_tolerance},
                         {"convergence", st.convergence_tolerance},
                         {"admissibility", st.admissibility_tolerance}}},
                       {"caps", {{"dimension", st.dimension_cap}, {"branches", st.branch_cap}}}};
    if (include_wall_time) j["wall_time_seconds"] = r.wall_time;
    return j.dump(2) + "\n";
}

std::string to_csv(const Series& s) {
    std::ostringstream os;
    os << "n," << s.value_column << "\n" << std::setprecision(17);
    for (const auto& [n, v] : s.points) os << n << "," << format(v) << "\n";
    return os.str();
}

std::string to_table(const ResultRecord& r) {
    std::size_t w = 8;
    for (const auto& [k, v] : r.scalars) w = std::max(w, k.size());
    for (const auto& c : r.checks) w = std::max(w, c.name.size());
    std::ostringstream os;
    os << "task " << r.task << "  (seed " << r.seed << ", " << r.version << ")\n";
    if (!r.scalars.empty()) {
        os << "\n" << std::left << std::setw(static_cast<int>(w)) << "quantity" << "  value\n";
        for (const auto& [k, v] : r.scalars) os << std::setw(static_cast<int>(w)) << k << "  " << format(v) << "\n";
    }
    for (const auto& [k, v] : r.arrays) {
        if (v.empty()) continue;
        os << "\n" << k << ":";
        for (double x : v) os << " " << format(x);
        os << "\n";
    }
    if (!r.checks.empty()) {
        os << "\n" << std::setw(static_cast<int>(w)) << "check" << "  residual          tolerance  status\n";
        for (const auto& c : r.checks)
            os << std::setw(static_cast<int>(w)) << c.name << "  " << std::setw(16) << format(c.residual) << "  "
               << std::setw(9) << format(c.tolerance) << "  " << (c.passed ? "ok" : "VIOLATED") << "\n";
    }
    for (const auto& warn : r.warnings) os << "warning: " << warn << "\n";
    return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::validation, "cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error(ErrorKind::validation, "write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

}  // namespace qde
