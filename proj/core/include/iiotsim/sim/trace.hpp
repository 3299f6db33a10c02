#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "iiotsim/sim/time.hpp"

namespace iiotsim::sim {

// One key=value attribute of a trace record. Keys and values must not
// contain whitespace so records stay one-per-line parseable.
struct Kv {
  std::string key;
  std::string value;

  Kv(std::string k, std::string v) : key(std::move(k)), value(std::move(v)) {}
  Kv(std::string k, const char* v) : key(std::move(k)), value(v) {}
  Kv(std::string k, std::int64_t v) : key(std::move(k)), value(std::to_string(v)) {}
  Kv(std::string k, std::uint64_t v) : key(std::move(k)), value(std::to_string(v)) {}
  Kv(std::string k, int v) : key(std::move(k)), value(std::to_string(v)) {}
};

// A single observation: when, who, what, details. Records are append-only
// and ordered by `at`, ties broken by emission order.
struct TraceRecord {
  SimTime at = 0;
  std::string emitter;
  std::string fact;
  std::vector<Kv> kv;

  // First value for `key`, or empty string.
  const std::string& get(const std::string& key) const;
  bool has(const std::string& key) const;
  std::int64_t get_i64(const std::string& key, std::int64_t fallback = 0) const;
};

inline constexpr int kTraceFormatVersion = 1;

class Trace {
public:
  void append(TraceRecord rec);

  const std::vector<TraceRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const TraceRecord& operator[](std::size_t i) const { return records_[i]; }

  // Line-delimited text form: a format-version header, then one record per
  // line as `<time> <emitter> <fact> key=value ...`.
  std::string serialize() const;
  static Trace parse(const std::string& text);

private:
  std::vector<TraceRecord> records_;
};

} // namespace iiotsim::sim
