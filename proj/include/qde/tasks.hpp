// Task dispatch for a parsed spec and the result record it
// produces (JSON machine record, CSV series, human-readable table).

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qde/settings.hpp"
#include "qde/spec_io.hpp"

namespace qde {

// An inequality or identity with its residual; passed = residual <= tolerance.
struct Check {
    std::string name;
    double residual = 0;
    double tolerance = 0;
    bool passed = false;
};

struct Series {
    std::string name;                       // file stem, e.g. "an" or "capacity_rate"
    std::string value_column;               // e.g. "a_n"
    std::vector<std::pair<int, double>> points;
};

struct ResultRecord {
    std::string task;
    std::vector<std::pair<std::string, double>> scalars;  // +inf allowed
    std::vector<std::pair<std::string, std::vector<double>>> arrays;
    std::vector<Check> checks;
    std::vector<Series> series;
    std::vector<std::string> warnings;
    Settings settings;
    std::uint64_t seed = 0;
    std::string version;
    double wall_time = 0;

    double scalar(const std::string& key) const;  // Error(validation) if absent
    const Check& check(const std::string& name) const;
    bool all_passed() const;
};

const char* version_string();

// Deterministic for a fixed spec; module errors are rethrown with the task name.
ResultRecord run_task(const SystemSpec& spec);

// Sorted keys, 2-space indent, trailing newline. Infinite values are written
// as the string "+inf". include_wall_time = false gives byte-stable output.
std::string to_json(const ResultRecord& record, bool include_wall_time = true);
std::string to_csv(const Series& series);
std::string to_table(const ResultRecord& record);

// Writes via a temporary file in the same directory, then renames.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace qde
