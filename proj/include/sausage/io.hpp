#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sausage {

// File-system failures carry their own type so the CLI can map them to a
// dedicated exit code.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StatRow {
  std::string name;
  double value = 0.0;
  double stat_error = 0.0;
};

struct CheckRow {
  std::string name;
  bool pass = false;
  std::string tolerance;  // human-readable rule the check applied
};

struct ExperimentReport {
  std::string experiment;
  std::vector<StatRow> stats;
  std::vector<CheckRow> checks;
  std::vector<std::string> table_header;        // CSV columns
  std::vector<std::vector<double>> table_rows;  // numeric rows
  bool inconclusive = false;  // e.g. censoring too heavy to decide
  std::string note;
  double wall_seconds = 0.0;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// "%.17g": enough digits to round-trip the double exactly.
std::string format_double(double v);
// Same, but always with a decimal point or exponent ("1" -> "1.0").
std::string format_double_pretty(double v);

// Flat key=value configuration echo, sorted by key.
using ConfigMap = std::map<std::string, std::string>;

// FNV-1a 64-bit over the canonical "key=value\n" lines, as 16 hex digits.
std::string config_hash(const ConfigMap& cfg);

// CSV: the numeric table if present, otherwise the stats as
// name,value,stat_error rows.  "\n" line endings, no trailing metadata.
std::string to_csv(const ExperimentReport& r);
void write_csv(const ExperimentReport& r, const std::string& path);

// JSON lines: one object per stat ({"experiment","config_hash","seed","name",
// "value","stderr"}) and one per check (name "check:<name>", value 0/1).
std::string to_jsonl(const ExperimentReport& r, const ConfigMap& cfg,
                     std::uint64_t seed);
void write_jsonl(const ExperimentReport& r, const ConfigMap& cfg,
                 std::uint64_t seed, const std::string& path);

struct RunManifest {
  std::string tool_version;
  ConfigMap config;
  std::uint64_t seed = 0;
  std::string started_at;   // ISO-8601 UTC
  std::string finished_at;
  std::vector<std::string> outputs;
};

void write_manifest(const RunManifest& m, const std::string& path);

std::string iso8601_utc_now();

// SAUSAGE_LAB_SEED, when set, overrides the built-in default seed (but not an
// explicit --seed).  Returns false when unset; malformed values are rejected.
bool seed_from_environment(std::uint64_t& out);

}  // namespace sausage
