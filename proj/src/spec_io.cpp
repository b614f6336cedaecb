#include "qde/spec_io.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

namespace qde {

using json = nlohmann::json;

const char* to_string(TaskKind kind) noexcept {
    switch (kind) {
        case TaskKind::info: return "info";
        case TaskKind::dynent: return "dynent";
        case TaskKind::capacity: return "capacity";
        case TaskKind::classical: return "classical";
        case TaskKind::verify: return "verify";
    }
    return "unknown";
}

namespace {

std::string at(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw SpecError(path.empty() ? "<root>" : path, "expected an object");
}

void expect_array(const json& j, const std::string& path) {
    if (!j.is_array()) throw SpecError(path, "expected an array");
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw SpecError(at(path, it.key()), "unknown field");
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw SpecError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw SpecError(path, "expected a finite number");
    return v;
}

long long integer(const json& j, const std::string& path, long long lo, long long hi) {
    if (!j.is_number_integer()) throw SpecError(path, "expected an integer");
    const long long v = j.is_number_unsigned() && j.get<unsigned long long>() > static_cast<unsigned long long>(hi)
                            ? hi + 1
                            : j.get<long long>();
    if (v < lo || v > hi)
        throw SpecError(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
}

std::uint64_t unsigned64(const json& j, const std::string& path) {
    if (!j.is_number_unsigned()) throw SpecError(path, "expected a nonnegative integer");
    return j.get<std::uint64_t>();
}

std::string string(const json& j, const std::string& path) {
    if (!j.is_string()) throw SpecError(path, "expected a string");
    return j.get<std::string>();
}

bool boolean(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw SpecError(path, "expected true or false");
    return j.get<bool>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
    expect_array(j, path);
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], at(path, i)));
    return v;
}

std::vector<std::size_t> indices(const json& j, const std::string& path) {
    expect_array(j, path);
    std::vector<std::size_t> v;
    for (std::size_t i = 0; i < j.size(); ++i)
        v.push_back(static_cast<std::size_t>(integer(j[i], at(path, i), 0, 1LL << 40)));
    return v;
}

std::vector<std::vector<double>> real_rows(const json& j, const std::string& path) {
    expect_array(j, path);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < j.size(); ++i) rows.push_back(numbers(j[i], at(path, i)));
    return rows;
}

// Entries are [re, im] pairs or plain reals.
Complex entry(const json& j, const std::string& path) {
    if (j.is_number()) return {number(j, path), 0.0};
    if (!j.is_array() || j.size() != 2) throw SpecError(path, "expected [re, im] or a real number");
    return {number(j[0], at(path, 0)), number(j[1], at(path, 1))};
}

ComplexMatrix matrix(const json& j, const std::string& path) {
    expect_array(j, path);
    if (j.empty()) throw SpecError(path, "matrix has no rows");
    const std::size_t rows = j.size();
    expect_array(j[0], at(path, 0));
    const std::size_t cols = j[0].size();
    if (cols == 0) throw SpecError(at(path, 0), "matrix has no columns");
    ComplexMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::string rp = at(path, r);
        expect_array(j[r], rp);
        if (j[r].size() != cols)
            throw SpecError(rp, "row has " + std::to_string(j[r].size()) + " entries, expected " +
                                    std::to_string(cols));
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = entry(j[r][c], at(rp, c));
    }
    return m;
}

json to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

TaskKind task_kind(const json& j, const std::string& path) {
    const std::string s = string(j, path);
    for (TaskKind k : {TaskKind::info, TaskKind::dynent, TaskKind::capacity, TaskKind::classical, TaskKind::verify})
        if (s == to_string(k)) return k;
    throw SpecError(path, "unknown task '" + s + "' (info, dynent, capacity, classical, verify)");
}

// ---- tolerances ------------------------------------------------------------

struct DoubleField {
    const char* key;
    double Settings::*member;
};

constexpr DoubleField tolerance_fields[] = {
    {"support_cutoff", &Settings::support_cutoff},
    {"psd", &Settings::psd_tolerance},
    {"hermiticity", &Settings::hermiticity_tolerance},
    {"normalization", &Settings::normalization_tolerance},
    {"zero_weight", &Settings::zero_weight},
    {"unit_sum", &Settings::unit_sum_tolerance},
    {"subunital", &Settings::subunital_tolerance},
    {"projector", &Settings::projector_tolerance},
    {"commutation", &Settings::commutation_tolerance},
    {"invariance", &Settings::invariance_tolerance},
    {"identity", &Settings::identity_tolerance},
    {"convergence", &Settings::convergence_tolerance},
    {"admissibility", &Settings::admissibility_tolerance},
};

void parse_tolerances(const json& j, const std::string& path, Settings& s) {
    expect_object(j, path);
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool found = false;
        for (const auto& f : tolerance_fields)
            if (it.key() == f.key) {
                const double v = number(it.value(), at(path, f.key));
                if (v < 0.0) throw SpecError(at(path, f.key), "tolerance must be nonnegative");
                s.*f.member = v;
                found = true;
            }
        if (!found) throw SpecError(at(path, it.key()), "unknown tolerance");
    }
}

json tolerances_json(const Settings& s) {
    json j = json::object();
    for (const auto& f : tolerance_fields) j[f.key] = s.*f.member;
    return j;
}

void parse_caps(const json& j, const std::string& path, Settings& s) {
    expect_object(j, path);
    reject_unknown(j, path, {"dimension", "branches"});
    if (j.contains("dimension"))
        s.dimension_cap = static_cast<std::size_t>(integer(j["dimension"], at(path, "dimension"), 1, 1LL << 20));
    if (j.contains("branches"))
        s.branch_cap = static_cast<std::size_t>(integer(j["branches"], at(path, "branches"), 1, 1LL << 24));
}

void parse_optimizer(const json& j, const std::string& path, NelderMeadConfig& o) {
    expect_object(j, path);
    reject_unknown(j, path, {"restarts", "iterations", "initial_step", "spread_tolerance", "start_range"});
    if (j.contains("restarts")) o.restarts = static_cast<int>(integer(j["restarts"], at(path, "restarts"), 1, 100000));
    if (j.contains("iterations"))
        o.iterations = static_cast<int>(integer(j["iterations"], at(path, "iterations"), 1, 10000000));
    if (j.contains("initial_step")) o.initial_step = number(j["initial_step"], at(path, "initial_step"));
    if (j.contains("spread_tolerance")) o.spread_tolerance = number(j["spread_tolerance"], at(path, "spread_tolerance"));
    if (j.contains("start_range")) o.start_range = number(j["start_range"], at(path, "start_range"));
    if (o.initial_step <= 0.0) throw SpecError(at(path, "initial_step"), "must be positive");
}

ParamsSpec parse_params(const json& j, const std::string& path) {
    ParamsSpec p;
    expect_object(j, path);
    reject_unknown(j, path,
                   {"N", "n", "seed", "threads", "dims", "trials", "tolerances", "caps", "optimizer", "allow_large_n"});
    if (j.contains("N")) p.N = static_cast<int>(integer(j["N"], at(path, "N"), 1, 64));
    if (j.contains("n")) p.n = static_cast<int>(integer(j["n"], at(path, "n"), 1, 16));
    if (j.contains("seed")) p.seed = unsigned64(j["seed"], at(path, "seed"));
    if (j.contains("threads")) p.threads = static_cast<unsigned>(integer(j["threads"], at(path, "threads"), 1, 1024));
    if (j.contains("dims")) {
        p.dims = indices(j["dims"], at(path, "dims"));
        for (std::size_t i = 0; i < p.dims.size(); ++i)
            if (p.dims[i] < 1 || p.dims[i] > 64) throw SpecError(at(at(path, "dims"), i), "must lie in [1, 64]");
        if (p.dims.empty()) throw SpecError(at(path, "dims"), "needs at least one dimension");
    }
    if (j.contains("trials")) p.trials = static_cast<int>(integer(j["trials"], at(path, "trials"), 1, 1000000));
    if (j.contains("tolerances")) parse_tolerances(j["tolerances"], at(path, "tolerances"), p.settings);
    if (j.contains("caps")) parse_caps(j["caps"], at(path, "caps"), p.settings);
    if (j.contains("optimizer")) parse_optimizer(j["optimizer"], at(path, "optimizer"), p.optimizer);
    if (j.contains("allow_large_n")) p.allow_large_n = boolean(j["allow_large_n"], at(path, "allow_large_n"));
    p.settings.threads = p.threads;
    p.optimizer.seed = p.seed;
    p.optimizer.threads = p.threads;
    return p;
}

json params_json(const ParamsSpec& p) {
    json j;
    j["N"] = p.N;
    j["n"] = p.n;
    j["seed"] = p.seed;
    j["threads"] = p.threads;
    j["dims"] = p.dims;
    j["trials"] = p.trials;
    j["tolerances"] = tolerances_json(p.settings);
    j["caps"] = {{"dimension", p.settings.dimension_cap}, {"branches", p.settings.branch_cap}};
    j["optimizer"] = {{"restarts", p.optimizer.restarts},
                      {"iterations", p.optimizer.iterations},
                      {"initial_step", p.optimizer.initial_step},
                      {"spread_tolerance", p.optimizer.spread_tolerance},
                      {"start_range", p.optimizer.start_range}};
    j["allow_large_n"] = p.allow_large_n;
    return j;
}

// ---- sections ----------------------------------------------------------------

PartitionSpec parse_partition(const json& j, const std::string& path) {
    expect_object(j, path);
    reject_unknown(j, path, {"name", "maps", "algebra"});
    PartitionSpec p;
    if (j.contains("name")) p.name = string(j["name"], at(path, "name"));
    if (!j.contains("maps")) throw SpecError(at(path, "maps"), "required");
    const std::string mp = at(path, "maps");
    expect_array(j["maps"], mp);
    if (j["maps"].empty()) throw SpecError(mp, "needs at least one map");
    for (std::size_t i = 0; i < j["maps"].size(); ++i) {
        const json& m = j["maps"][i];
        const std::string path_i = at(mp, i);
        expect_object(m, path_i);
        reject_unknown(m, path_i, {"label", "kraus"});
        MapSpec ms;
        ms.label = m.contains("label") ? string(m["label"], at(path_i, "label")) : std::to_string(i);
        if (!m.contains("kraus")) throw SpecError(at(path_i, "kraus"), "required");
        const std::string kp = at(path_i, "kraus");
        expect_array(m["kraus"], kp);
        if (m["kraus"].empty()) throw SpecError(kp, "needs at least one Kraus operator");
        for (std::size_t k = 0; k < m["kraus"].size(); ++k) ms.kraus.push_back(matrix(m["kraus"][k], at(kp, k)));
        p.maps.push_back(std::move(ms));
    }
    if (j.contains("algebra")) p.algebra = indices(j["algebra"], at(path, "algebra"));
    return p;
}

json partition_json(const PartitionSpec& p) {
    json maps = json::array();
    for (const auto& m : p.maps) {
        json kraus = json::array();
        for (const auto& k : m.kraus) kraus.push_back(to_json(k));
        maps.push_back({{"label", m.label}, {"kraus", kraus}});
    }
    json j = {{"name", p.name}, {"maps", maps}};
    if (!p.algebra.empty()) j["algebra"] = p.algebra;
    return j;
}

ClassicalSpec parse_classical(const json& j, const std::string& path) {
    expect_object(j, path);
    reject_unknown(j, path, {"measure", "partitions", "permutation", "markov"});
    ClassicalSpec c;
    if (j.contains("measure")) c.measure = numbers(j["measure"], at(path, "measure"));
    if (j.contains("partitions")) {
        const std::string pp = at(path, "partitions");
        expect_array(j["partitions"], pp);
        for (std::size_t i = 0; i < j["partitions"].size(); ++i) {
            const json& f = j["partitions"][i];
            const std::string fp = at(pp, i);
            expect_object(f, fp);
            reject_unknown(f, fp, {"name", "functions"});
            FunctionPartitionSpec s;
            if (f.contains("name")) s.name = string(f["name"], at(fp, "name"));
            if (!f.contains("functions")) throw SpecError(at(fp, "functions"), "required");
            s.functions = real_rows(f["functions"], at(fp, "functions"));
            c.partitions.push_back(std::move(s));
        }
    }
    if (j.contains("permutation")) c.permutation = indices(j["permutation"], at(path, "permutation"));
    if (j.contains("markov")) {
        const json& m = j["markov"];
        const std::string mp = at(path, "markov");
        expect_object(m, mp);
        reject_unknown(m, mp, {"P", "pi", "labels", "window"});
        MarkovSpec ms;
        if (!m.contains("P")) throw SpecError(at(mp, "P"), "required");
        ms.P = real_rows(m["P"], at(mp, "P"));
        if (m.contains("pi")) ms.pi = numbers(m["pi"], at(mp, "pi"));
        if (m.contains("labels")) ms.labels = indices(m["labels"], at(mp, "labels"));
        if (m.contains("window")) ms.window = static_cast<int>(integer(m["window"], at(mp, "window"), 0, 64));
        c.markov = std::move(ms);
    }
    return c;
}

json classical_json(const ClassicalSpec& c) {
    json j = json::object();
    if (!c.measure.empty()) j["measure"] = c.measure;
    if (!c.partitions.empty()) {
        json ps = json::array();
        for (const auto& p : c.partitions) ps.push_back({{"name", p.name}, {"functions", p.functions}});
        j["partitions"] = ps;
    }
    if (!c.permutation.empty()) j["permutation"] = c.permutation;
    if (c.markov) {
        json m = {{"P", c.markov->P}, {"window", c.markov->window}};
        if (!c.markov->pi.empty()) m["pi"] = c.markov->pi;
        if (!c.markov->labels.empty()) m["labels"] = c.markov->labels;
        j["markov"] = m;
    }
    return j;
}

EnsembleSpec parse_ensemble(const json& j, const std::string& path) {
    expect_object(j, path);
    reject_unknown(j, path, {"states", "probs", "noise"});
    EnsembleSpec e;
    if (!j.contains("states")) throw SpecError(at(path, "states"), "required");
    if (!j.contains("probs")) throw SpecError(at(path, "probs"), "required");
    const std::string sp = at(path, "states");
    expect_array(j["states"], sp);
    for (std::size_t i = 0; i < j["states"].size(); ++i) e.states.push_back(matrix(j["states"][i], at(sp, i)));
    e.probs = numbers(j["probs"], at(path, "probs"));
    if (j.contains("noise")) {
        const json& n = j["noise"];
        const std::string np = at(path, "noise");
        expect_object(n, np);
        reject_unknown(n, np, {"kind", "p"});
        NoiseSpec ns;
        if (!n.contains("kind")) throw SpecError(at(np, "kind"), "required");
        ns.kind = string(n["kind"], at(np, "kind"));
        if (ns.kind != "depolarizing" && ns.kind != "dephasing")
            throw SpecError(at(np, "kind"), "expected 'depolarizing' or 'dephasing'");
        if (!n.contains("p")) throw SpecError(at(np, "p"), "required");
        ns.p = number(n["p"], at(np, "p"));
        if (ns.p < 0.0 || ns.p > 1.0) throw SpecError(at(np, "p"), "must lie in [0, 1]");
        e.noise = ns;
    }
    return e;
}

json ensemble_json(const EnsembleSpec& e) {
    json states = json::array();
    for (const auto& s : e.states) states.push_back(to_json(s));
    json j = {{"states", states}, {"probs", e.probs}};
    if (e.noise) j["noise"] = {{"kind", e.noise->kind}, {"p", e.noise->p}};
    return j;
}

template <class F>
auto guarded(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const SpecError&) {
        throw;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::resource) throw Error(ErrorKind::resource, path + ": " + e.what());
        throw SpecError(path, e.what());
    }
}

// Builds every object the spec defines so invariants are checked at load time.
void validate(const SystemSpec& s) {
    if (s.state) (void)build_state(s);
    for (std::size_t i = 0; i < s.partitions.size(); ++i) (void)build_partition(s, i);
    if (s.unitary) (void)build_unitary(s);
    if (s.classical) {
        if (!s.classical->measure.empty()) (void)build_space(s);
        for (std::size_t i = 0; i < s.classical->partitions.size(); ++i) (void)build_function_partition(s, i);
        if (!s.classical->permutation.empty()) {
            const std::string pp = "classical.permutation";
            if (s.classical->measure.empty()) throw SpecError("classical.measure", "required with a permutation");
            if (s.classical->permutation.size() != s.classical->measure.size())
                throw SpecError(pp, "length differs from the measure");
            guarded(pp, [&] { return permutation_invariance_residual(build_space(s), s.classical->permutation); });
        }
        if (s.classical->markov) (void)build_shift(s);
    }
    if (s.ensemble) (void)build_ensemble(s);

    const bool quantum = s.state && !s.partitions.empty();
    switch (s.task) {
        case TaskKind::info:
            if (!quantum) throw SpecError("partitions", "info task needs a state and at least one partition");
            break;
        case TaskKind::dynent: {
            const bool markov = s.classical && s.classical->markov;
            const bool perm = s.classical && !s.classical->permutation.empty() && !s.classical->partitions.empty();
            if (!(quantum && s.unitary) && !markov && !perm)
                throw SpecError("unitary",
                                "dynent task needs state, partition and unitary, a Markov shift or a permutation");
            break;
        }
        case TaskKind::capacity:
            if (!s.ensemble && !quantum)
                throw SpecError("ensemble", "capacity task needs an ensemble or a state with a code partition");
            break;
        case TaskKind::classical:
            if (!s.classical) throw SpecError("classical", "classical task needs a classical section");
            break;
        case TaskKind::verify: break;
    }
}

}  // namespace

SystemSpec parse_spec(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecError("<root>", std::string("malformed JSON: ") + e.what());
    }
    expect_object(j, "");
    reject_unknown(j, "", {"schema_version", "task", "algebra", "state", "partitions", "unitary", "classical",
                           "ensemble", "params"});
    SystemSpec s;
    if (!j.contains("schema_version")) throw SpecError("schema_version", "required");
    s.schema_version = string(j["schema_version"], "schema_version");
    if (s.schema_version != schema_version)
        throw SpecError("schema_version", "unsupported version '" + s.schema_version + "', expected 1.0");
    if (!j.contains("task")) throw SpecError("task", "required");
    s.task = task_kind(j["task"], "task");
    if (j.contains("algebra")) s.algebra = indices(j["algebra"], "algebra");
    if (j.contains("state")) s.state = matrix(j["state"], "state");
    if (j.contains("partitions")) {
        expect_array(j["partitions"], "partitions");
        for (std::size_t i = 0; i < j["partitions"].size(); ++i)
            s.partitions.push_back(parse_partition(j["partitions"][i], at("partitions", i)));
    }
    if (j.contains("unitary")) s.unitary = matrix(j["unitary"], "unitary");
    if (j.contains("classical")) s.classical = parse_classical(j["classical"], "classical");
    if (j.contains("ensemble")) s.ensemble = parse_ensemble(j["ensemble"], "ensemble");
    if (j.contains("params")) s.params = parse_params(j["params"], "params");
    validate(s);
    return s;
}

std::string serialize_spec(const SystemSpec& s) {
    json j;
    j["schema_version"] = s.schema_version;
    j["task"] = to_string(s.task);
    if (!s.algebra.empty()) j["algebra"] = s.algebra;
    if (s.state) j["state"] = to_json(*s.state);
    if (!s.partitions.empty()) {
        json ps = json::array();
        for (const auto& p : s.partitions) ps.push_back(partition_json(p));
        j["partitions"] = ps;
    }
    if (s.unitary) j["unitary"] = to_json(*s.unitary);
    if (s.classical) j["classical"] = classical_json(*s.classical);
    if (s.ensemble) j["ensemble"] = ensemble_json(*s.ensemble);
    j["params"] = params_json(s.params);
    return j.dump(2) + "\n";
}

bool operator==(const SystemSpec& a, const SystemSpec& b) { return serialize_spec(a) == serialize_spec(b); }

// ---- builders ----------------------------------------------------------------

StateFunctional build_state(const SystemSpec& s) {
    if (!s.state) throw SpecError("state", "required");
    return guarded("state", [&] {
        const Settings& st = s.params.settings;
        const HermitianMatrix rho(*s.state, st.hermiticity_tolerance);
        const std::size_t d = rho.dim();
        BlockAlgebra alg = BlockAlgebra::full(d);
        if (!s.algebra.empty()) {
            std::size_t total = 0;
            for (auto b : s.algebra) total += b;
            if (total != d)
                throw SpecError("algebra", "block dimensions sum to " + std::to_string(total) + ", state has dimension " +
                                               std::to_string(d));
            alg = BlockAlgebra(s.algebra);
        }
        StateFunctional phi(alg, rho, st);
        if (std::abs(phi.weight() - 1.0) > st.normalization_tolerance)
            throw SpecError("state", "trace is " + std::to_string(phi.weight()) + ", expected 1");
        return phi;
    });
}

Partition build_partition(const SystemSpec& s, std::size_t index) {
    const std::string path = at("partitions", index);
    if (index >= s.partitions.size()) throw SpecError(path, "no such partition");
    const PartitionSpec& p = s.partitions[index];
    return guarded(path, [&] {
        std::vector<KrausMap> maps;
        for (std::size_t i = 0; i < p.maps.size(); ++i)
            maps.push_back(guarded(at(at(path, "maps"), i), [&] { return KrausMap(p.maps[i].kraus, p.maps[i].label); }));
        if (p.algebra.empty()) return Partition(std::move(maps), s.params.settings);
        const BlockAlgebra alg = guarded(at(path, "algebra"), [&] { return BlockAlgebra(p.algebra); });
        return Partition(std::move(maps), alg, s.params.settings);
    });
}

Automorphism build_unitary(const SystemSpec& s) {
    if (!s.unitary) throw SpecError("unitary", "required");
    return guarded("unitary", [&] { return Automorphism(*s.unitary, 1e-9); });
}

FiniteSpace build_space(const SystemSpec& s) {
    if (!s.classical || s.classical->measure.empty()) throw SpecError("classical.measure", "required");
    return guarded("classical.measure", [&] { return FiniteSpace(s.classical->measure); });
}

FunctionPartition build_function_partition(const SystemSpec& s, std::size_t index) {
    const std::string path = at("classical.partitions", index);
    if (!s.classical || index >= s.classical->partitions.size()) throw SpecError(path, "no such partition");
    const auto& f = s.classical->partitions[index].functions;
    return guarded(path, [&] {
        if (f.empty()) throw SpecError(at(path, "functions"), "needs at least one function");
        if (!s.classical->measure.empty())
            for (std::size_t i = 0; i < f.size(); ++i)
                if (f[i].size() != s.classical->measure.size())
                    throw SpecError(at(at(path, "functions"), i), "length differs from the measure");
        return FunctionPartition(f);
    });
}

SymbolicShift build_shift(const SystemSpec& s) {
    if (!s.classical || !s.classical->markov) throw SpecError("classical.markov", "required");
    const MarkovSpec& m = *s.classical->markov;
    return guarded("classical.markov.P", [&] {
        SymbolicShift shift = m.pi.empty() ? SymbolicShift(m.P) : SymbolicShift(m.P, m.pi);
        if (!m.labels.empty() && m.labels.size() != shift.alphabet())
            throw SpecError("classical.markov.labels", "needs one label per symbol");
        return shift;
    });
}

ChannelSystem build_ensemble(const SystemSpec& s) {
    if (!s.ensemble) throw SpecError("ensemble", "required");
    const EnsembleSpec& e = *s.ensemble;
    std::vector<HermitianMatrix> states;
    for (std::size_t i = 0; i < e.states.size(); ++i)
        states.push_back(guarded(at("ensemble.states", i), [&] { return HermitianMatrix(e.states[i]); }));
    ChannelSystem sys = guarded("ensemble", [&] { return preparation_ensemble(states, e.probs); });
    if (e.noise) {
        const KrausMap noise = e.noise->kind == "depolarizing" ? depolarizing(e.noise->p) : dephasing(e.noise->p);
        sys = guarded("ensemble.noise", [&] { return noisy_ensemble(sys, noise, e.noise->kind); });
    }
    return sys;
}

}  // namespace qde
