// JSON system specifications: parsing with per-field error
// paths, validation of every matrix at load time and lossless serialization.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qde/capacity.hpp"
#include "qde/classical.hpp"
#include "qde/errors.hpp"
#include "qde/optimizer.hpp"
#include "qde/partition.hpp"
#include "qde/settings.hpp"
#include "qde/state.hpp"

namespace qde {

// Validation failure at a JSON path such as "partitions[0].maps[1].kraus".
class SpecError : public Error {
public:
    SpecError(std::string path, const std::string& message)
        : Error(ErrorKind::validation, path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

enum class TaskKind { info, dynent, capacity, classical, verify };

const char* to_string(TaskKind kind) noexcept;

struct MapSpec {
    std::string label;
    std::vector<ComplexMatrix> kraus;
};

struct PartitionSpec {
    std::string name;
    std::vector<MapSpec> maps;
    std::vector<std::size_t> algebra;  // block dims on the input side; empty = full
};

struct FunctionPartitionSpec {
    std::string name;
    std::vector<std::vector<double>> functions;
};

struct MarkovSpec {
    std::vector<std::vector<double>> P;
    std::vector<double> pi;              // empty = solved from P
    std::vector<std::size_t> labels;     // empty = identity
    int window = 0;                      // 0 = no quantum embedding
};

struct ClassicalSpec {
    std::vector<double> measure;
    std::vector<FunctionPartitionSpec> partitions;
    std::vector<std::size_t> permutation;
    std::optional<MarkovSpec> markov;
};

struct NoiseSpec {
    std::string kind;  // "depolarizing" | "dephasing"
    double p = 0;
};

struct EnsembleSpec {
    std::vector<ComplexMatrix> states;
    std::vector<double> probs;
    std::optional<NoiseSpec> noise;
};

struct ParamsSpec {
    int N = 5;
    int n = 1;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::vector<std::size_t> dims{2, 3, 4};  // verify task
    int trials = 200;                        // verify task
    Settings settings;
    NelderMeadConfig optimizer;
    bool allow_large_n = false;
};

struct SystemSpec {
    std::string schema_version = "1.0";
    TaskKind task = TaskKind::info;
    std::vector<std::size_t> algebra;      // block dims of the state's algebra
    std::optional<ComplexMatrix> state;
    std::vector<PartitionSpec> partitions;
    std::optional<ComplexMatrix> unitary;
    std::optional<ClassicalSpec> classical;
    std::optional<EnsembleSpec> ensemble;
    ParamsSpec params;
};

inline constexpr const char* schema_version = "1.0";

// Throws SpecError naming the offending path and constraint.
SystemSpec parse_spec(const std::string& text);

// Canonical JSON (sorted keys, 2-space indent). parse_spec(serialize_spec(s))
// reproduces s exactly.
std::string serialize_spec(const SystemSpec& spec);

bool operator==(const SystemSpec& a, const SystemSpec& b);

// Validated objects built from a spec. Each throws SpecError with the field path.
StateFunctional build_state(const SystemSpec& spec);
Partition build_partition(const SystemSpec& spec, std::size_t index);
Automorphism build_unitary(const SystemSpec& spec);
FiniteSpace build_space(const SystemSpec& spec);
FunctionPartition build_function_partition(const SystemSpec& spec, std::size_t index);
SymbolicShift build_shift(const SystemSpec& spec);
ChannelSystem build_ensemble(const SystemSpec& spec);

}  // namespace qde
