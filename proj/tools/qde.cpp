// Batch front end: qde run | verify | capacity

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qde/parallel.hpp"
#include "qde/spec_io.hpp"
#include "qde/tasks.hpp"

namespace {

enum Exit { ok = 0, other = 1, validation = 2, violation = 3, resource = 4 };

int exit_code(const qde::Error& e) {
    switch (e.kind()) {
        case qde::ErrorKind::validation:
        case qde::ErrorKind::dimension_mismatch:
        case qde::ErrorKind::not_positive:
        case qde::ErrorKind::not_normalized: return validation;
        case qde::ErrorKind::resource: return resource;
        case qde::ErrorKind::property_violation: return violation;
        default: return other;
    }
}

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<int> n;
    bool force_capacity = false;
};

struct Outcome {
    int code = ok;
    std::string stdout_text;
    std::string stderr_text;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qde::Error(qde::ErrorKind::validation, "cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void apply(qde::SystemSpec& s, const Overrides& o) {
    if (o.seed) s.params.seed = s.params.optimizer.seed = *o.seed;
    if (o.threads) s.params.threads = s.params.settings.threads = s.params.optimizer.threads = *o.threads;
    if (o.n) s.params.n = *o.n;
    if (o.force_capacity) s.task = qde::TaskKind::capacity;
}

// Writes <out>/<stem>.json and one <stem>.<series>.csv per series.
void emit(const qde::ResultRecord& r, const std::string& out_dir, const std::string& stem) {
    if (out_dir.empty()) return;
    namespace fs = std::filesystem;
    qde::write_file_atomic((fs::path(out_dir) / (stem + ".json")).string(), qde::to_json(r));
    for (const auto& s : r.series)
        qde::write_file_atomic((fs::path(out_dir) / (stem + "." + s.name + ".csv")).string(), qde::to_csv(s));
}

Outcome run_one(const std::string& text, const std::string& stem, const std::string& out_dir, const Overrides& o) {
    Outcome res;
    try {
        qde::SystemSpec spec = qde::parse_spec(text);
        apply(spec, o);
        const qde::ResultRecord r = qde::run_task(spec);
        emit(r, out_dir, stem);
        res.stdout_text = qde::to_table(r);
        if (!r.all_passed()) res.code = violation;
    } catch (const qde::Error& e) {
        res.code = exit_code(e);
        res.stderr_text = stem + ": " + qde::to_string(e.kind()) + " error: " + e.what() + "\n";
    } catch (const std::exception& e) {
        res.code = other;
        res.stderr_text = stem + ": error: " + e.what() + "\n";
    }
    return res;
}

int report(const std::vector<Outcome>& outcomes) {
    int code = ok;
    for (const auto& o : outcomes) {
        std::cout << o.stdout_text;
        std::cerr << o.stderr_text;
        if (code == ok) code = o.code;
    }
    return code;
}

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

std::vector<std::size_t> parse_dims(const std::string& csv) {
    std::vector<std::size_t> dims;
    std::stringstream ss(csv);
    for (std::string tok; std::getline(ss, tok, ',');) {
        std::size_t pos = 0;
        const unsigned long d = std::stoul(tok, &pos);
        if (pos != tok.size() || d < 1 || d > 64) throw CLI::ValidationError("--dims", "bad dimension '" + tok + "'");
        dims.push_back(d);
    }
    if (dims.empty()) throw CLI::ValidationError("--dims", "no dimensions given");
    return dims;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Information and dynamical entropy of generalized quantum measurements"};
    app.require_subcommand(1);

    std::vector<std::string> specs;
    std::string out_dir;
    std::uint64_t seed = 0;
    unsigned threads = 1;

    auto* run = app.add_subcommand("run", "Run the task of one or more JSON specs");
    run->add_option("spec", specs, "Spec files")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Directory for JSON and CSV output");
    auto* run_seed = run->add_option("--seed", seed, "Override params.seed");
    auto* run_threads = run->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u));

    std::string dims = "2,3,4";
    int trials = 200;
    auto* verify = app.add_subcommand("verify", "Run the randomized property suite");
    verify->add_option("--dims", dims, "Comma-separated dimensions");
    verify->add_option("--trials", trials, "Trials per family")->check(CLI::Range(1, 1000000));
    verify->add_option("--seed", seed, "Master seed");
    verify->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    verify->add_option("--out", out_dir, "Directory for JSON output");

    std::string cap_spec;
    int n = 1;
    auto* capacity = app.add_subcommand("capacity", "Capacity bounds C_n, D_n for a spec");
    capacity->add_option("spec", cap_spec, "Spec file")->required()->check(CLI::ExistingFile);
    capacity->add_option("--n", n, "Block length")->required()->check(CLI::Range(1, 16));
    capacity->add_option("--out", out_dir, "Directory for JSON and CSV output");
    auto* cap_seed = capacity->add_option("--seed", seed, "Override params.seed");
    auto* cap_threads = capacity->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : validation;
    }

    try {
        if (*run) {
            Overrides o;
            if (*run_seed) o.seed = seed;
            if (*run_threads) o.threads = threads;
            std::vector<std::string> texts;
            for (const auto& p : specs) texts.push_back(read_file(p));
            // Independent specs run side by side; each result is written atomically.
            const unsigned outer = specs.size() > 1 ? threads : 1u;
            if (outer > 1) o.threads = 1u;
            const auto outcomes = qde::parallel_map(specs.size(), outer, [&](std::size_t i) {
                return run_one(texts[i], stem_of(specs[i]), out_dir, o);
            });
            return report(outcomes);
        }
        if (*verify) {
            qde::SystemSpec spec;
            spec.task = qde::TaskKind::verify;
            spec.params.dims = parse_dims(dims);
            spec.params.trials = trials;
            spec.params.seed = seed == 0 ? 1 : seed;
            spec.params.threads = spec.params.settings.threads = threads;
            Outcome res;
            try {
                const auto r = qde::run_task(spec);
                emit(r, out_dir, "verify");
                res.stdout_text = qde::to_table(r);
                if (!r.all_passed()) res.code = violation;
            } catch (const qde::Error& e) {
                res.code = exit_code(e);
                res.stderr_text = std::string("verify: ") + e.what() + "\n";
            }
            return report({res});
        }
        if (*capacity) {
            Overrides o;
            o.n = n;
            o.force_capacity = true;
            if (*cap_seed) o.seed = seed;
            if (*cap_threads) o.threads = threads;
            return report({run_one(read_file(cap_spec), stem_of(cap_spec), out_dir, o)});
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return validation;
    } catch (const qde::Error& e) {
        std::cerr << qde::to_string(e.kind()) << " error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return other;
    }
    return other;
}
