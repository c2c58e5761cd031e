#include "sausage/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include "json.hpp"

namespace sausage {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_double_pretty(double v) {
  std::string s = format_double(v);
  if (s.find_first_of(".eE") == std::string::npos &&
      s.find_first_of("0123456789") != std::string::npos)
    s += ".0";
  return s;
}

std::string config_hash(const ConfigMap& cfg) {
  std::uint64_t h = 14695981039346656037ull;
  auto eat = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  for (const auto& [k, v] : cfg) {
    eat(k);
    eat("=");
    eat(v);
    eat("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string to_csv(const ExperimentReport& r) {
  std::string out;
  if (!r.table_header.empty()) {
    for (std::size_t i = 0; i < r.table_header.size(); ++i) {
      if (i) out += ',';
      out += r.table_header[i];
    }
    out += '\n';
    for (const auto& row : r.table_rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += format_double(row[i]);
      }
      out += '\n';
    }
    return out;
  }
  out = "name,value,stat_error\n";
  for (const auto& s : r.stats) {
    out += s.name;
    out += ',';
    out += format_double(s.value);
    out += ',';
    out += format_double(s.stat_error);
    out += '\n';
  }
  return out;
}

namespace {

void write_text(const std::string& text, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << text;
  f.flush();
  if (!f) throw IoError("write failed: " + path);
}

}  // namespace

void write_csv(const ExperimentReport& r, const std::string& path) {
  write_text(to_csv(r), path);
}

std::string to_jsonl(const ExperimentReport& r, const ConfigMap& cfg,
                     std::uint64_t seed) {
  const std::string hash = config_hash(cfg);
  std::string out;
  auto line = [&](const std::string& name, double value, double err) {
    nlohmann::json j;
    j["experiment"] = r.experiment;
    j["config_hash"] = hash;
    j["seed"] = seed;
    j["name"] = name;
    j["value"] = value;
    j["stderr"] = err;
    out += j.dump();
    out += '\n';
  };
  for (const auto& s : r.stats) line(s.name, s.value, s.stat_error);
  for (const auto& c : r.checks) line("check:" + c.name, c.pass ? 1.0 : 0.0, 0.0);
  return out;
}

void write_jsonl(const ExperimentReport& r, const ConfigMap& cfg,
                 std::uint64_t seed, const std::string& path) {
  write_text(to_jsonl(r, cfg, seed), path);
}

void write_manifest(const RunManifest& m, const std::string& path) {
  nlohmann::json j;
  j["tool_version"] = m.tool_version;
  j["config"] = m.config;
  j["config_hash"] = config_hash(m.config);
  j["seed"] = m.seed;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["outputs"] = m.outputs;
  write_text(j.dump(2) + "\n", path);
}

std::string iso8601_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool seed_from_environment(std::uint64_t& out) {
  const char* raw = std::getenv("SAUSAGE_LAB_SEED");
  if (!raw || !*raw) return false;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 0);
  if (!end || *end != '\0')
    throw std::domain_error("SAUSAGE_LAB_SEED is not an integer");
  out = static_cast<std::uint64_t>(v);
  return true;
}

}  // namespace sausage
