#include "iiotsim/harness/scenario_text.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "iiotsim/sim/error.hpp"

namespace iiotsim::harness {

using iiotsim::Errc;
using iiotsim::Error;

namespace {

const char* region_name(net::Region r) { return r == net::Region::Sdn ? "sdn" : "legacy"; }

std::string tclass_token(TrafficClass c) {
  switch (c) {
    case TrafficClass::TimeCritical: return "tc";
    case TrafficClass::Guaranteed: return "guaranteed";
    case TrafficClass::BestEffort: return "be";
  }
  return "?";
}

std::string join_ints(const std::vector<int>& v, char sep = ',') {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << sep;
    out << v[i];
  }
  return out.str();
}

// --- parsing helpers ------------------------------------------------------

struct LineCtx {
  int lineno = 0;
  std::string section;
  std::vector<std::string> words;           // positional tokens (no '=')
  std::map<std::string, std::string> attrs; // key=value tokens

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": " + msg);
  }
  std::int64_t to_i64(const std::string& s) const {
    try {
      return std::stoll(s);
    } catch (...) {
      fail("expected integer, got '" + s + "'");
    }
  }
  std::string attr(const std::string& key) const {
    auto it = attrs.find(key);
    if (it == attrs.end()) fail("missing attribute " + key);
    return it->second;
  }
  std::optional<std::string> opt(const std::string& key) const {
    auto it = attrs.find(key);
    if (it == attrs.end()) return std::nullopt;
    return it->second;
  }
  std::int64_t attr_i64(const std::string& key) const { return to_i64(attr(key)); }
  std::optional<std::int64_t> opt_i64(const std::string& key) const {
    auto v = opt(key);
    if (!v) return std::nullopt;
    return to_i64(*v);
  }
  std::vector<int> int_list(const std::string& raw) const {
    std::vector<int> out;
    std::string cur;
    std::istringstream in(raw);
    while (std::getline(in, cur, ','))
      if (!cur.empty()) out.push_back(static_cast<int>(to_i64(cur)));
    return out;
  }
  net::PortRef port_ref(const std::string& raw) const {
    auto colon = raw.find(':');
    if (colon == std::string::npos) fail("expected node:port, got '" + raw + "'");
    return {static_cast<int>(to_i64(raw.substr(0, colon))),
            static_cast<int>(to_i64(raw.substr(colon + 1)))};
  }
  TrafficClass tclass(const std::string& raw) const {
    auto c = traffic_class_from(raw);
    if (!c) fail("unknown traffic class '" + raw + "'");
    return *c;
  }
};

void parse_config_line(const LineCtx& c, Config& cfg) {
  if (c.words.size() != 2) c.fail("expected '<key> <value>'");
  const std::string& key = c.words[0];
  std::int64_t v = c.to_i64(c.words[1]);
  if (key == "heartbeat-us") cfg.heartbeat_us = v;
  else if (key == "link-fail-detect-beats") cfg.link_fail_detect_beats = static_cast<int>(v);
  else if (key == "ctrl-fail-detect-beats") cfg.ctrl_fail_detect_beats = static_cast<int>(v);
  else if (key == "rule-install-us") cfg.rule_install_us = v;
  else if (key == "control-delay-us") cfg.control_delay_us = v;
  else if (key == "rehome-us") cfg.rehome_us = v;
  else if (key == "max-frame-bytes") cfg.max_frame_bytes = v;
  else if (key == "vnf-boot-us") cfg.vnf_boot_us = v;
  else if (key == "vnf-migration-us") cfg.vnf_migration_us = v;
  else if (key == "miss-buffer-packets") cfg.miss_buffer_packets = static_cast<int>(v);
  else if (key == "queue-capacity-packets") cfg.queue_capacity_packets = static_cast<int>(v);
  else if (key == "retransmit-budget") cfg.retransmit_budget = static_cast<int>(v);
  else if (key == "nack-frame-bytes") cfg.nack_frame_bytes = v;
  else if (key == "deny-cache-us") cfg.deny_cache_us = v;
  else if (key == "session-ttl-us") cfg.session_ttl_us = v;
  else if (key == "max-hops") cfg.max_hops = static_cast<int>(v);
  else c.fail("unknown config key '" + key + "'");
}

void parse_node(const LineCtx& c, Scenario& scn) {
  // node <id> <kind> <region> ports=1,2,3 [name=..] [gateway-ports=..] [cpu=..] [mem=..]
  if (c.words.size() != 4 || c.words[0] != "node") c.fail("expected 'node <id> <kind> <region>'");
  net::Node n;
  n.id = static_cast<int>(c.to_i64(c.words[1]));
  const std::string& kind = c.words[2];
  if (kind == "sdn-switch") n.kind = net::NodeKind::SdnSwitch;
  else if (kind == "legacy-switch") n.kind = net::NodeKind::LegacySwitch;
  else if (kind == "host") n.kind = net::NodeKind::Host;
  else if (kind == "nfv-host") n.kind = net::NodeKind::NfvHost;
  else c.fail("unknown node kind '" + kind + "'");
  if (c.words[3] == "sdn") n.region = net::Region::Sdn;
  else if (c.words[3] == "legacy") n.region = net::Region::Legacy;
  else c.fail("unknown region '" + c.words[3] + "'");
  n.ports = c.int_list(c.attr("ports"));
  if (auto v = c.opt("name")) n.name = *v;
  if (auto v = c.opt("gateway-ports"))
    for (int p : c.int_list(*v)) n.gateway_ports.insert(p);
  if (auto v = c.opt_i64("cpu")) n.cpu_capacity = static_cast<int>(*v);
  if (auto v = c.opt_i64("mem")) n.mem_capacity = static_cast<int>(*v);
  scn.nodes.push_back(std::move(n));
}

void parse_link(const LineCtx& c, Scenario& scn) {
  // link <id> <a>:<pa> <b>:<pb> latency=10 bandwidth=100000 [jitter=0] [down]
  if (c.words.size() < 4 || c.words[0] != "link") c.fail("expected 'link <id> <a:p> <b:p>'");
  net::Link l;
  l.id = static_cast<int>(c.to_i64(c.words[1]));
  l.a = c.port_ref(c.words[2]);
  l.b = c.port_ref(c.words[3]);
  l.latency_us = c.attr_i64("latency");
  l.bandwidth_kbps = c.attr_i64("bandwidth");
  l.jitter_bound_us = c.opt_i64("jitter").value_or(0);
  for (std::size_t i = 4; i < c.words.size(); ++i)
    if (c.words[i] == "down") l.state = net::LinkState::Down;
  scn.links.push_back(l);
}

void parse_segment(const LineCtx& c, Scenario& scn) {
  // segment <vlan> name=.. level=0 ports=a:p,b:p
  if (c.words.size() != 2 || c.words[0] != "segment") c.fail("expected 'segment <vlan>'");
  net::Segment s;
  s.vlan = static_cast<int>(c.to_i64(c.words[1]));
  s.name = c.opt("name").value_or("vlan-" + c.words[1]);
  s.security_level = static_cast<int>(c.opt_i64("level").value_or(0));
  if (auto raw = c.opt("ports")) {
    std::istringstream in(*raw);
    std::string item;
    while (std::getline(in, item, ','))
      if (!item.empty()) s.members.insert(c.port_ref(item));
  }
  scn.segments.push_back(std::move(s));
}

void parse_controller(const LineCtx& c, Scenario& scn) {
  // controller <id> <level> scope=1,2 [parent=..] [standby=..] [name=..]
  if (c.words.size() != 3 || c.words[0] != "controller")
    c.fail("expected 'controller <id> <level>'");
  ctrl::ControllerCfg cc;
  cc.id = static_cast<int>(c.to_i64(c.words[1]));
  auto lvl = ctrl::ctrl_level_from(c.words[2]);
  if (!lvl) c.fail("unknown controller level '" + c.words[2] + "'");
  cc.level = *lvl;
  for (int sw : c.int_list(c.attr("scope"))) cc.scope.insert(sw);
  if (auto v = c.opt_i64("parent")) cc.parent = static_cast<int>(*v);
  if (auto v = c.opt_i64("standby")) cc.standby = static_cast<int>(*v);
  if (auto v = c.opt("name")) cc.name = *v;
  scn.controllers.push_back(std::move(cc));
}

std::vector<nfv::Transition> parse_transitions(const LineCtx& c, const std::string& raw) {
  std::vector<nfv::Transition> out;
  std::istringstream in(raw);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto gt = item.find('>');
    if (gt == std::string::npos) c.fail("expected from>to transition, got '" + item + "'");
    out.push_back({static_cast<int>(c.to_i64(item.substr(0, gt))),
                   static_cast<int>(c.to_i64(item.substr(gt + 1)))});
  }
  return out;
}

void parse_nfv(const LineCtx& c, Scenario& scn) {
  if (c.words.empty()) c.fail("empty nfv record");
  if (c.words[0] == "descriptor") {
    // descriptor <name> <kind> [cpu=1] [mem=1] [delay=0]
    if (c.words.size() != 3) c.fail("expected 'descriptor <name> <kind>'");
    nfv::VnfDescriptor d;
    d.name = c.words[1];
    auto kind = nfv::vnf_kind_from(c.words[2]);
    if (!kind) c.fail("unknown vnf kind '" + c.words[2] + "'");
    d.kind = *kind;
    d.cpu_demand = static_cast<int>(c.opt_i64("cpu").value_or(1));
    d.mem_demand = static_cast<int>(c.opt_i64("mem").value_or(1));
    d.processing_delay_us = c.opt_i64("delay").value_or(0);
    scn.descriptors[d.name] = std::move(d);
  } else if (c.words[0] == "instance") {
    // instance <name> <descriptor> [host=..] [transitions=10>20,..] [tags=a,b] [deferred]
    if (c.words.size() < 3) c.fail("expected 'instance <name> <descriptor>'");
    VnfInstanceSpec spec;
    spec.name = c.words[1];
    spec.descriptor = c.words[2];
    if (auto v = c.opt_i64("host")) spec.host = static_cast<int>(*v);
    if (auto v = c.opt("transitions")) spec.transitions = parse_transitions(c, *v);
    if (auto v = c.opt("tags")) {
      std::istringstream in(*v);
      std::string item;
      while (std::getline(in, item, ','))
        if (!item.empty()) spec.tags.push_back(item);
    }
    for (std::size_t i = 3; i < c.words.size(); ++i)
      if (c.words[i] == "deferred") spec.deferred = true;
    scn.instances.push_back(std::move(spec));
  } else {
    c.fail("unknown nfv record '" + c.words[0] + "'");
  }
}

void parse_policy(const LineCtx& c, Scenario& scn) {
  if (c.words.empty()) c.fail("empty policy record");
  if (c.words[0] == "role") {
    // role <name> [segments=..] [hosts=..]
    if (c.words.size() != 2) c.fail("expected 'role <name>'");
    policy::RolePermission perm;
    if (auto v = c.opt("segments"))
      for (int s : c.int_list(*v)) perm.segments.insert(s);
    if (auto v = c.opt("hosts"))
      for (int h : c.int_list(*v)) perm.hosts.insert(h);
    scn.roles[c.words[1]] = std::move(perm);
  } else if (c.words[0] == "principal") {
    // principal <id> <kind> credential=.. [name=..] [roles=a,b]
    //           [profile-segment=..] [profile-class=..]
    if (c.words.size() != 3) c.fail("expected 'principal <id> <kind>'");
    policy::Principal p;
    p.id = static_cast<int>(c.to_i64(c.words[1]));
    if (c.words[2] == "human") p.kind = policy::PrincipalKind::HumanUser;
    else if (c.words[2] == "service") p.kind = policy::PrincipalKind::Service;
    else if (c.words[2] == "device") p.kind = policy::PrincipalKind::Device;
    else c.fail("unknown principal kind '" + c.words[2] + "'");
    p.credential = c.attr("credential");
    if (auto v = c.opt("name")) p.name = *v;
    if (auto v = c.opt("roles")) {
      std::istringstream in(*v);
      std::string item;
      while (std::getline(in, item, ','))
        if (!item.empty()) p.roles.insert(item);
    }
    if (auto v = c.opt_i64("profile-segment")) {
      policy::DeviceProfile prof;
      prof.expected_segment = static_cast<int>(*v);
      if (auto cls = c.opt("profile-class")) prof.default_class = c.tclass(*cls);
      p.profile = prof;
    }
    scn.principals.push_back(std::move(p));
  } else if (c.words[0] == "rule") {
    // rule <from> <to> <class|any> <allow|deny> [firewall]
    if (c.words.size() < 5) c.fail("expected 'rule <from> <to> <class|any> <allow|deny>'");
    policy::SegmentRule r;
    r.from = static_cast<int>(c.to_i64(c.words[1]));
    r.to = static_cast<int>(c.to_i64(c.words[2]));
    if (c.words[3] != "any") r.tclass = c.tclass(c.words[3]);
    if (c.words[4] == "allow") r.allow = true;
    else if (c.words[4] == "deny") r.allow = false;
    else c.fail("expected allow|deny");
    for (std::size_t i = 5; i < c.words.size(); ++i)
      if (c.words[i] == "firewall") r.require_firewall = true;
    scn.segment_rules.push_back(r);
  } else {
    c.fail("unknown policy record '" + c.words[0] + "'");
  }
}

void parse_flow(const LineCtx& c, Scenario& scn) {
  // flow <id> src=.. dst=.. class=.. demand=.. size=.. period=.. start=..
  //      [stop=..] principal=.. [proactive] [request-at=..] [latency-bound=..]
  //      [jitter-bound=..] [tag=..] [check-latency=..] [check-jitter=..]
  //      [check-loss=..] [check-throughput=..] [name=..]
  if (c.words.size() < 2 || c.words[0] != "flow") c.fail("expected 'flow <id>'");
  FlowSpec f;
  f.id = c.to_i64(c.words[1]);
  f.name = c.opt("name").value_or("flow-" + c.words[1]);
  f.src = static_cast<int>(c.attr_i64("src"));
  f.dst = static_cast<int>(c.attr_i64("dst"));
  f.tclass = c.tclass(c.attr("class"));
  f.demand_kbps = c.opt_i64("demand").value_or(0);
  f.size_bytes = c.opt_i64("size").value_or(125);
  f.period_us = c.opt_i64("period").value_or(1000);
  f.start_us = c.opt_i64("start").value_or(0);
  f.stop_us = c.opt_i64("stop").value_or(0);
  f.principal = static_cast<int>(c.attr_i64("principal"));
  f.latency_bound_us = c.opt_i64("latency-bound");
  f.jitter_bound_us = c.opt_i64("jitter-bound");
  f.request_at_us = c.opt_i64("request-at");
  if (auto v = c.opt("tag")) f.access_tag = *v;
  f.check_latency_us = c.opt_i64("check-latency");
  f.check_jitter_us = c.opt_i64("check-jitter");
  f.check_min_throughput_kbps = c.opt_i64("check-throughput");
  if (auto v = c.opt("check-loss")) f.check_max_loss = std::stod(*v);
  for (std::size_t i = 2; i < c.words.size(); ++i)
    if (c.words[i] == "proactive") f.proactive = true;
  scn.flows.push_back(std::move(f));
}

void parse_event(const LineCtx& c, Scenario& scn) {
  if (c.words.empty()) c.fail("empty event record");
  if (c.words[0] == "tamper-rate") {
    TamperRateSpec tr;
    tr.flow = c.attr_i64("flow");
    tr.probability = std::stod(c.attr("p"));
    scn.tamper_rates.push_back(tr);
    return;
  }
  if (c.words.size() < 3 || c.words[0] != "at") c.fail("expected 'at <time> <kind> ...'");
  EventSpec ev;
  ev.at = c.to_i64(c.words[1]);
  const std::string& kind = c.words[2];
  auto arg = [&](std::size_t i) -> std::string {
    if (c.words.size() <= i) c.fail("missing argument");
    return c.words[i];
  };
  using K = EventSpec::Kind;
  if (kind == "link-down") {
    ev.kind = K::LinkDown;
    ev.link = static_cast<int>(c.to_i64(arg(3)));
  } else if (kind == "link-up") {
    ev.kind = K::LinkUp;
    ev.link = static_cast<int>(c.to_i64(arg(3)));
  } else if (kind == "plug-in") {
    ev.kind = K::PlugIn;
    ev.host = static_cast<int>(c.attr_i64("host"));
    ev.switch_id = static_cast<int>(c.attr_i64("switch"));
    ev.port = static_cast<int>(c.attr_i64("port"));
    ev.principal = static_cast<int>(c.attr_i64("principal"));
    if (auto v = c.opt("credential")) ev.credential = *v;
  } else if (kind == "unplug") {
    ev.kind = K::Unplug;
    ev.host = static_cast<int>(c.attr_i64("host"));
  } else if (kind == "authenticate") {
    ev.kind = K::Authenticate;
    ev.principal = static_cast<int>(c.attr_i64("principal"));
    ev.entry = c.attr("entry");
    if (auto v = c.opt("credential")) ev.credential = *v;
  } else if (kind == "kill-controller") {
    ev.kind = K::KillController;
    ev.controller = static_cast<int>(c.to_i64(arg(3)));
  } else if (kind == "fail-nfv-host") {
    ev.kind = K::FailNfvHost;
    ev.host = static_cast<int>(c.to_i64(arg(3)));
  } else if (kind == "tamper") {
    ev.kind = K::Tamper;
    ev.flow = c.attr_i64("flow");
    ev.seq = c.attr_i64("seq");
    ev.tamper_all_attempts = c.opt("attempts").value_or("first") == "all";
  } else if (kind == "request-flow") {
    ev.kind = K::RequestFlow;
    ev.flow = c.to_i64(arg(3));
  } else if (kind == "teardown-flow") {
    ev.kind = K::TeardownFlow;
    ev.flow = c.to_i64(arg(3));
  } else if (kind == "rebind-flow") {
    ev.kind = K::RebindFlow;
    ev.flow = c.attr_i64("flow");
    ev.new_dst = static_cast<int>(c.attr_i64("dst"));
  } else if (kind == "register-app") {
    ev.kind = K::RegisterApp;
    ev.controller = static_cast<int>(c.attr_i64("ctrl"));
    ev.app = c.attr("app");
  } else if (kind == "deregister-app") {
    ev.kind = K::DeregisterApp;
    ev.controller = static_cast<int>(c.attr_i64("ctrl"));
    ev.app = c.attr("app");
  } else if (kind == "instantiate") {
    ev.kind = K::Instantiate;
    ev.instance = arg(3);
  } else {
    c.fail("unknown event kind '" + kind + "'");
  }
  scn.events.push_back(std::move(ev));
}

void parse_check(const LineCtx& c, Scenario& scn) {
  if (c.words.empty()) c.fail("empty checks record");
  if (c.words[0] == "dr2") {
    Dr2Spec d;
    d.flow = c.attr_i64("flow");
    auto span = [&](const std::string& raw, SimTime& lo, SimTime& hi) {
      auto colon = raw.find(':');
      if (colon == std::string::npos) c.fail("expected lo:hi window");
      lo = c.to_i64(raw.substr(0, colon));
      hi = c.to_i64(raw.substr(colon + 1));
    };
    span(c.attr("baseline"), d.baseline_lo, d.baseline_hi);
    span(c.attr("loaded"), d.loaded_lo, d.loaded_hi);
    scn.checks.dr2 = d;
  } else if (c.words[0] == "dr7-availability") {
    scn.checks.dr7_availability = std::stod(c.words.at(1));
  } else if (c.words[0] == "dr9-onboarding-us") {
    scn.checks.dr9_onboarding_bound_us = c.to_i64(c.words.at(1));
  } else if (c.words[0] == "redundant") {
    if (c.words.size() != 3) c.fail("expected 'redundant <a> <b>'");
    scn.checks.redundant_pairs.emplace_back(static_cast<int>(c.to_i64(c.words[1])),
                                            static_cast<int>(c.to_i64(c.words[2])));
  } else {
    c.fail("unknown checks record '" + c.words[0] + "'");
  }
}

} // namespace

Scenario parse_scenario(const std::string& text) {
  Scenario scn;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::string section;
  bool header_seen = false;

  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
    if (tokens.empty()) continue;

    if (!header_seen) {
      if (tokens.size() != 2 || tokens[0] != "iiotsim-scenario")
        throw Error(Errc::ParseError, "line " + std::to_string(lineno) +
                                          ": expected 'iiotsim-scenario <version>' header");
      if (std::stoi(tokens[1]) != kScenarioFormatVersion)
        throw Error(Errc::ParseError, "unsupported scenario format version " + tokens[1]);
      header_seen = true;
      continue;
    }
    if (tokens[0].front() == '[') {
      if (tokens[0].back() != ']')
        throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": bad section header");
      section = tokens[0].substr(1, tokens[0].size() - 2);
      continue;
    }

    LineCtx c;
    c.lineno = lineno;
    c.section = section;
    for (const auto& t : tokens) {
      auto eq = t.find('=');
      if (eq != std::string::npos && eq > 0)
        c.attrs[t.substr(0, eq)] = t.substr(eq + 1);
      else
        c.words.push_back(t);
    }

    if (section.empty()) {
      if (c.words.size() >= 2 && c.words[0] == "name") scn.name = c.words[1];
      else if (c.words.size() >= 2 && c.words[0] == "seed")
        scn.seed = static_cast<std::uint64_t>(c.to_i64(c.words[1]));
      else if (c.words.size() >= 2 && c.words[0] == "duration")
        scn.duration_us = c.to_i64(c.words[1]);
      else c.fail("unknown top-level record");
    } else if (section == "config") parse_config_line(c, scn.config);
    else if (section == "nodes") parse_node(c, scn);
    else if (section == "links") parse_link(c, scn);
    else if (section == "segments") parse_segment(c, scn);
    else if (section == "controllers") parse_controller(c, scn);
    else if (section == "nfv") parse_nfv(c, scn);
    else if (section == "policy") parse_policy(c, scn);
    else if (section == "flows") parse_flow(c, scn);
    else if (section == "events") parse_event(c, scn);
    else if (section == "checks") parse_check(c, scn);
    else c.fail("unknown section [" + section + "]");
  }
  if (!header_seen) throw Error(Errc::ParseError, "empty scenario file");
  return scn;
}

std::string serialize_scenario(const Scenario& scn) {
  std::ostringstream out;
  out << "iiotsim-scenario " << kScenarioFormatVersion << "\n";
  out << "name " << scn.name << "\n";
  out << "seed " << scn.seed << "\n";
  out << "duration " << scn.duration_us << "\n";

  const Config def;
  std::ostringstream cfg;
  auto cfg_line = [&](const char* key, auto value, auto defval) {
    if (value != defval) cfg << key << ' ' << value << "\n";
  };
  cfg_line("heartbeat-us", scn.config.heartbeat_us, def.heartbeat_us);
  cfg_line("link-fail-detect-beats", scn.config.link_fail_detect_beats,
           def.link_fail_detect_beats);
  cfg_line("ctrl-fail-detect-beats", scn.config.ctrl_fail_detect_beats,
           def.ctrl_fail_detect_beats);
  cfg_line("rule-install-us", scn.config.rule_install_us, def.rule_install_us);
  cfg_line("control-delay-us", scn.config.control_delay_us, def.control_delay_us);
  cfg_line("rehome-us", scn.config.rehome_us, def.rehome_us);
  cfg_line("max-frame-bytes", scn.config.max_frame_bytes, def.max_frame_bytes);
  cfg_line("vnf-boot-us", scn.config.vnf_boot_us, def.vnf_boot_us);
  cfg_line("vnf-migration-us", scn.config.vnf_migration_us, def.vnf_migration_us);
  cfg_line("miss-buffer-packets", scn.config.miss_buffer_packets, def.miss_buffer_packets);
  cfg_line("queue-capacity-packets", scn.config.queue_capacity_packets,
           def.queue_capacity_packets);
  cfg_line("retransmit-budget", scn.config.retransmit_budget, def.retransmit_budget);
  cfg_line("nack-frame-bytes", scn.config.nack_frame_bytes, def.nack_frame_bytes);
  cfg_line("deny-cache-us", scn.config.deny_cache_us, def.deny_cache_us);
  cfg_line("session-ttl-us", scn.config.session_ttl_us, def.session_ttl_us);
  cfg_line("max-hops", scn.config.max_hops, def.max_hops);
  if (!cfg.str().empty()) out << "\n[config]\n" << cfg.str();

  out << "\n[nodes]\n";
  for (const auto& n : scn.nodes) {
    out << "node " << n.id << ' ' << node_kind_name(n.kind) << ' ' << region_name(n.region)
        << " ports=" << join_ints(n.ports);
    if (!n.name.empty()) out << " name=" << n.name;
    if (!n.gateway_ports.empty())
      out << " gateway-ports="
          << join_ints(std::vector<int>(n.gateway_ports.begin(), n.gateway_ports.end()));
    if (n.cpu_capacity) out << " cpu=" << n.cpu_capacity;
    if (n.mem_capacity) out << " mem=" << n.mem_capacity;
    out << "\n";
  }
  out << "\n[links]\n";
  for (const auto& l : scn.links) {
    out << "link " << l.id << ' ' << l.a.node << ':' << l.a.port << ' ' << l.b.node << ':'
        << l.b.port << " latency=" << l.latency_us << " bandwidth=" << l.bandwidth_kbps;
    if (l.jitter_bound_us) out << " jitter=" << l.jitter_bound_us;
    if (l.state == net::LinkState::Down) out << " down";
    out << "\n";
  }
  if (!scn.segments.empty()) {
    out << "\n[segments]\n";
    for (const auto& s : scn.segments) {
      out << "segment " << s.vlan << " name=" << s.name << " level=" << s.security_level;
      if (!s.members.empty()) {
        out << " ports=";
        bool first = true;
        for (const auto& p : s.members) {
          if (!first) out << ',';
          out << p.node << ':' << p.port;
          first = false;
        }
      }
      out << "\n";
    }
  }
  out << "\n[controllers]\n";
  for (const auto& cc : scn.controllers) {
    out << "controller " << cc.id << ' ' << ctrl_level_name(cc.level) << " scope="
        << join_ints(std::vector<int>(cc.scope.begin(), cc.scope.end()));
    if (cc.parent) out << " parent=" << *cc.parent;
    if (cc.standby) out << " standby=" << *cc.standby;
    if (!cc.name.empty()) out << " name=" << cc.name;
    out << "\n";
  }
  if (!scn.descriptors.empty() || !scn.instances.empty()) {
    out << "\n[nfv]\n";
    for (const auto& [name, d] : scn.descriptors) {
      out << "descriptor " << name << ' ' << nfv::vnf_kind_name(d.kind) << " cpu=" << d.cpu_demand
          << " mem=" << d.mem_demand;
      if (d.processing_delay_us) out << " delay=" << d.processing_delay_us;
      out << "\n";
    }
    for (const auto& i : scn.instances) {
      out << "instance " << i.name << ' ' << i.descriptor;
      if (i.host) out << " host=" << *i.host;
      if (!i.transitions.empty()) {
        out << " transitions=";
        for (std::size_t k = 0; k < i.transitions.size(); ++k) {
          if (k) out << ',';
          out << i.transitions[k].from << '>' << i.transitions[k].to;
        }
      }
      if (!i.tags.empty()) {
        out << " tags=";
        for (std::size_t k = 0; k < i.tags.size(); ++k) {
          if (k) out << ',';
          out << i.tags[k];
        }
      }
      if (i.deferred) out << " deferred";
      out << "\n";
    }
  }
  out << "\n[policy]\n";
  for (const auto& [name, perm] : scn.roles) {
    out << "role " << name;
    if (!perm.segments.empty())
      out << " segments=" << join_ints(std::vector<int>(perm.segments.begin(), perm.segments.end()));
    if (!perm.hosts.empty())
      out << " hosts=" << join_ints(std::vector<int>(perm.hosts.begin(), perm.hosts.end()));
    out << "\n";
  }
  for (const auto& p : scn.principals) {
    out << "principal " << p.id << ' ' << policy::principal_kind_name(p.kind)
        << " credential=" << p.credential;
    if (!p.name.empty()) out << " name=" << p.name;
    if (!p.roles.empty()) {
      out << " roles=";
      bool first = true;
      for (const auto& r : p.roles) {
        if (!first) out << ',';
        out << r;
        first = false;
      }
    }
    if (p.profile) {
      out << " profile-segment=" << p.profile->expected_segment
          << " profile-class=" << tclass_token(p.profile->default_class);
    }
    out << "\n";
  }
  for (const auto& r : scn.segment_rules) {
    out << "rule " << r.from << ' ' << r.to << ' '
        << (r.tclass ? tclass_token(*r.tclass) : std::string("any")) << ' '
        << (r.allow ? "allow" : "deny");
    if (r.require_firewall) out << " firewall";
    out << "\n";
  }
  out << "\n[flows]\n";
  for (const auto& f : scn.flows) {
    out << "flow " << f.id << " src=" << f.src << " dst=" << f.dst
        << " class=" << tclass_token(f.tclass) << " demand=" << f.demand_kbps
        << " size=" << f.size_bytes << " period=" << f.period_us << " start=" << f.start_us;
    if (f.stop_us) out << " stop=" << f.stop_us;
    out << " principal=" << f.principal;
    if (f.proactive) out << " proactive";
    if (f.request_at_us) out << " request-at=" << *f.request_at_us;
    if (f.latency_bound_us) out << " latency-bound=" << *f.latency_bound_us;
    if (f.jitter_bound_us) out << " jitter-bound=" << *f.jitter_bound_us;
    if (f.access_tag) out << " tag=" << *f.access_tag;
    if (f.check_latency_us) out << " check-latency=" << *f.check_latency_us;
    if (f.check_jitter_us) out << " check-jitter=" << *f.check_jitter_us;
    if (f.check_min_throughput_kbps) out << " check-throughput=" << *f.check_min_throughput_kbps;
    if (f.check_max_loss) out << " check-loss=" << *f.check_max_loss;
    if (f.name != "flow-" + std::to_string(f.id)) out << " name=" << f.name;
    out << "\n";
  }
  if (!scn.events.empty() || !scn.tamper_rates.empty()) {
    out << "\n[events]\n";
    for (const auto& ev : scn.events) {
      using K = EventSpec::Kind;
      out << "at " << ev.at << ' ';
      switch (ev.kind) {
        case K::LinkDown: out << "link-down " << ev.link; break;
        case K::LinkUp: out << "link-up " << ev.link; break;
        case K::PlugIn:
          out << "plug-in host=" << ev.host << " switch=" << ev.switch_id << " port=" << ev.port
              << " principal=" << ev.principal;
          if (!ev.credential.empty()) out << " credential=" << ev.credential;
          break;
        case K::Unplug: out << "unplug host=" << ev.host; break;
        case K::Authenticate:
          out << "authenticate principal=" << ev.principal << " entry=" << ev.entry;
          if (!ev.credential.empty()) out << " credential=" << ev.credential;
          break;
        case K::KillController: out << "kill-controller " << ev.controller; break;
        case K::FailNfvHost: out << "fail-nfv-host " << ev.host; break;
        case K::Tamper:
          out << "tamper flow=" << ev.flow << " seq=" << ev.seq;
          if (ev.tamper_all_attempts) out << " attempts=all";
          break;
        case K::RequestFlow: out << "request-flow " << ev.flow; break;
        case K::TeardownFlow: out << "teardown-flow " << ev.flow; break;
        case K::RebindFlow: out << "rebind-flow flow=" << ev.flow << " dst=" << ev.new_dst; break;
        case K::RegisterApp: out << "register-app ctrl=" << ev.controller << " app=" << ev.app; break;
        case K::DeregisterApp:
          out << "deregister-app ctrl=" << ev.controller << " app=" << ev.app;
          break;
        case K::Instantiate: out << "instantiate " << ev.instance; break;
      }
      out << "\n";
    }
    for (const auto& tr : scn.tamper_rates)
      out << "tamper-rate flow=" << tr.flow << " p=" << tr.probability << "\n";
  }
  {
    std::ostringstream checks;
    if (scn.checks.dr2)
      checks << "dr2 flow=" << scn.checks.dr2->flow << " baseline=" << scn.checks.dr2->baseline_lo
             << ':' << scn.checks.dr2->baseline_hi << " loaded=" << scn.checks.dr2->loaded_lo
             << ':' << scn.checks.dr2->loaded_hi << "\n";
    if (scn.checks.dr7_availability != 0.99)
      checks << "dr7-availability " << scn.checks.dr7_availability << "\n";
    if (scn.checks.dr9_onboarding_bound_us)
      checks << "dr9-onboarding-us " << *scn.checks.dr9_onboarding_bound_us << "\n";
    for (auto [a, b] : scn.checks.redundant_pairs) checks << "redundant " << a << ' ' << b << "\n";
    if (!checks.str().empty()) out << "\n[checks]\n" << checks.str();
  }
  return out.str();
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::ParseError, "cannot write " + path);
  out << content;
}

} // namespace iiotsim::harness
