#include "iiotsim/sim/trace.hpp"

#include <cassert>
#include <sstream>

#include "iiotsim/sim/error.hpp"

namespace iiotsim::sim {

namespace {
const std::string kEmpty;

bool clean_token(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c == ' ' || c == '\n' || c == '\t' || c == '=') return false;
  }
  return true;
}
} // namespace

const std::string& TraceRecord::get(const std::string& key) const {
  for (const auto& e : kv) {
    if (e.key == key) return e.value;
  }
  return kEmpty;
}

bool TraceRecord::has(const std::string& key) const {
  for (const auto& e : kv) {
    if (e.key == key) return true;
  }
  return false;
}

std::int64_t TraceRecord::get_i64(const std::string& key, std::int64_t fallback) const {
  const std::string& v = get(key);
  if (v.empty()) return fallback;
  return std::stoll(v);
}

void Trace::append(TraceRecord rec) {
  assert(records_.empty() || rec.at >= records_.back().at);
  assert(clean_token(rec.emitter) && clean_token(rec.fact));
  records_.push_back(std::move(rec));
}

std::string Trace::serialize() const {
  std::ostringstream out;
  out << "#iiotsim-trace " << kTraceFormatVersion << "\n";
  for (const auto& r : records_) {
    out << r.at << ' ' << r.emitter << ' ' << r.fact;
    for (const auto& e : r.kv) {
      assert(clean_token(e.key) && !e.value.empty());
      out << ' ' << e.key << '=' << e.value;
    }
    out << '\n';
  }
  return out.str();
}

Trace Trace::parse(const std::string& text) {
  Trace t;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (lineno == 1 && line.rfind("#iiotsim-trace ", 0) != 0)
        throw Error(Errc::ParseError, "trace header missing at line 1");
      continue;
    }
    std::istringstream ls(line);
    TraceRecord rec;
    std::string tok;
    if (!(ls >> rec.at >> rec.emitter >> rec.fact))
      throw Error(Errc::ParseError, "bad trace record at line " + std::to_string(lineno));
    while (ls >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos || eq == 0)
        throw Error(Errc::ParseError, "bad key=value at line " + std::to_string(lineno));
      rec.kv.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    }
    t.append(std::move(rec));
  }
  return t;
}

} // namespace iiotsim::sim
