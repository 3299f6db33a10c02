#include "iiotsim/harness/verify.hpp"

#include <algorithm>
#include <sstream>

#include "iiotsim/qos/admission.hpp"
#include "iiotsim/sim/error.hpp"

namespace iiotsim::harness {

using sim::SimTime;
using sim::Trace;
using sim::TraceRecord;

const char* verdict_status_name(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Pass: return "pass";
    case VerdictStatus::Fail: return "fail";
    case VerdictStatus::NotApplicable: return "not-applicable";
  }
  return "?";
}

namespace {

// A packet with no terminal record is excused only near the end of the run:
// worst-case residence is a full egress queue draining behind it plus the
// path transit, comfortably under this at desk scale.
constexpr sim::SimTime kInFlightGraceUs = 25'000;

struct PacketKey {
  std::int64_t flow;
  std::int64_t seq;
  int attempt;
  auto operator<=>(const PacketKey&) const = default;
};

struct Delivered {
  std::size_t idx;
  SimTime at;
  std::int64_t seq;
  int attempt;
  std::uint64_t txi;
  std::int64_t latency;
  int vlan;
  int dst_segment;
};

struct Dropped {
  std::size_t idx;
  SimTime at;
  std::int64_t seq;
  int attempt;
  std::string reason;
};

struct Injected {
  std::size_t idx;
  SimTime at;
  std::int64_t seq;
  int attempt;
  std::int64_t size;
};

struct RerouteEvent {
  std::size_t started_idx = 0;
  SimTime started_at = 0;
  std::string reason;
  bool completed = false;
  std::size_t completed_idx = 0;
  SimTime completed_at = 0;
  std::string path;
};

// Everything the checks need, indexed in one pass.
struct TraceIndex {
  std::map<std::int64_t, std::vector<Injected>> injected;
  std::map<std::int64_t, std::vector<Delivered>> delivered;
  std::map<std::int64_t, std::vector<Dropped>> dropped;
  std::set<PacketKey> tampered;
  std::map<PacketKey, std::size_t> tamper_idx;
  std::set<PacketKey> nacked;
  std::map<std::int64_t, std::set<std::int64_t>> integrity_failed; // flow -> seqs
  std::map<PacketKey, std::size_t> firewall_allow;                 // earliest allow
  std::set<std::int64_t> admitted_flows;
  std::map<std::int64_t, SimTime> first_admitted_at;
  std::map<std::int64_t, std::string> admitted_path;
  std::set<std::int64_t> denied_flows;
  std::map<std::int64_t, std::vector<RerouteEvent>> reroutes;
  std::map<std::int64_t, std::vector<std::pair<SimTime, SimTime>>> suspensions;
  std::map<std::int64_t, SimTime> open_suspension;
  std::vector<std::pair<SimTime, std::size_t>> link_downs;
  std::vector<SimTime> controller_kills;
  std::vector<SimTime> failovers;
  struct PlugIn {
    SimTime at;
    int host;
    int principal;
  };
  std::vector<PlugIn> plug_ins;
  std::vector<std::pair<SimTime, int>> auth_grants; // (at, principal)
  std::set<std::int64_t> gateway_flows;
  bool any_app_registered = false;
  std::vector<std::size_t> app_steered;
  std::set<int> vpn_principals; // principals with vpn-entry sessions
  std::map<std::int64_t, std::vector<std::size_t>> flow_boundary_idx; // reroute/resume marks
};

TraceIndex build_index(const Trace& trace) {
  TraceIndex ix;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TraceRecord& r = trace[i];
    const std::string& f = r.fact;
    if (f == "packet-injected") {
      ix.injected[r.get_i64("flow")].push_back(
          {i, r.at, r.get_i64("seq"), static_cast<int>(r.get_i64("attempt")),
           r.get_i64("size")});
    } else if (f == "packet-delivered") {
      ix.delivered[r.get_i64("flow")].push_back(
          {i, r.at, r.get_i64("seq"), static_cast<int>(r.get_i64("attempt")),
           static_cast<std::uint64_t>(r.get_i64("txi")), r.get_i64("latency"),
           static_cast<int>(r.get_i64("vlan")), static_cast<int>(r.get_i64("dst_segment"))});
    } else if (f == "packet-dropped") {
      ix.dropped[r.get_i64("flow")].push_back(
          {i, r.at, r.get_i64("seq"), static_cast<int>(r.get_i64("attempt")), r.get("reason")});
    } else if (f == "tamper-injected") {
      PacketKey k{r.get_i64("flow"), r.get_i64("seq"), static_cast<int>(r.get_i64("attempt"))};
      ix.tampered.insert(k);
      ix.tamper_idx[k] = i;
    } else if (f == "integrity-nack") {
      ix.nacked.insert(
          {r.get_i64("flow"), r.get_i64("seq"), static_cast<int>(r.get_i64("attempt"))});
    } else if (f == "integrity-failure") {
      ix.integrity_failed[r.get_i64("flow")].insert(r.get_i64("seq"));
    } else if (f == "vnf-traversed") {
      if (r.get("kind") == "firewall" && r.get("verdict") == "allow") {
        PacketKey k{r.get_i64("flow"), r.get_i64("seq"),
                    static_cast<int>(r.get_i64("attempt"))};
        ix.firewall_allow.emplace(k, i);
      }
    } else if (f == "flow-admitted") {
      std::int64_t flow = r.get_i64("flow");
      ix.admitted_flows.insert(flow);
      ix.first_admitted_at.emplace(flow, r.at);
      ix.admitted_path[flow] = r.get("path");
    } else if (f == "flow-resumed") {
      std::int64_t flow = r.get_i64("flow");
      ix.admitted_flows.insert(flow);
      ix.flow_boundary_idx[flow].push_back(i);
      if (ix.open_suspension.count(flow)) {
        ix.suspensions[flow].emplace_back(ix.open_suspension[flow], r.at);
        ix.open_suspension.erase(flow);
      }
      ix.admitted_path[flow] = r.get("path");
    } else if (f == "auth-denied" || f == "flow-rejected") {
      if (r.has("flow")) ix.denied_flows.insert(r.get_i64("flow"));
    } else if (f == "reroute-started") {
      RerouteEvent ev;
      ev.started_idx = i;
      ev.started_at = r.at;
      ev.reason = r.get("reason");
      ix.reroutes[r.get_i64("flow")].push_back(ev);
    } else if (f == "reroute-completed") {
      std::int64_t flow = r.get_i64("flow");
      auto& v = ix.reroutes[flow];
      for (auto it = v.rbegin(); it != v.rend(); ++it) {
        if (!it->completed) {
          it->completed = true;
          it->completed_idx = i;
          it->completed_at = r.at;
          it->path = r.get("path");
          break;
        }
      }
      ix.flow_boundary_idx[flow].push_back(i);
      ix.admitted_path[flow] = r.get("path");
    } else if (f == "flow-suspended") {
      ix.open_suspension[r.get_i64("flow")] = r.at;
    } else if (f == "link-down") {
      ix.link_downs.emplace_back(r.at, i);
    } else if (f == "controller-killed") {
      ix.controller_kills.push_back(r.at);
    } else if (f == "failover-activated" || f == "degraded-mode") {
      ix.failovers.push_back(r.at);
    } else if (f == "device-plug-in") {
      ix.plug_ins.push_back({r.at, static_cast<int>(r.get_i64("host")),
                             static_cast<int>(r.get_i64("principal"))});
    } else if (f == "gateway-crossed") {
      ix.gateway_flows.insert(r.get_i64("flow"));
    } else if (f == "app-registered") {
      ix.any_app_registered = true;
    } else if (f == "app-steered") {
      if (r.get("default") != r.get("chosen")) ix.app_steered.push_back(i);
    } else if (f == "auth-granted") {
      ix.auth_grants.emplace_back(r.at, static_cast<int>(r.get_i64("principal")));
      if (r.get("entry") == "vpn")
        ix.vpn_principals.insert(static_cast<int>(r.get_i64("principal")));
    }
  }
  return ix;
}

net::Topology scenario_topology(const Scenario& scn) {
  net::Topology topo;
  for (const auto& n : scn.nodes) topo.add_node(n);
  for (auto l : scn.links) {
    l.state = net::LinkState::Up; // attributes matter here, not live state
    topo.add_link(l);
  }
  return topo;
}

std::vector<int> parse_path_nodes(const std::string& s) {
  std::vector<int> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, '-'))
    if (!item.empty()) out.push_back(std::stoi(item));
  return out;
}

std::int64_t percentile99(std::vector<std::int64_t> values) {
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  std::size_t idx = (99 * n + 99) / 100; // ceil(0.99 n)
  if (idx == 0) idx = 1;
  if (idx > n) idx = n;
  return values[idx - 1];
}

// Switch-install count and per-hop blocking along a recorded path.
struct PathFigures {
  int switch_count = 0;
  std::int64_t blocking_sum_us = 0;
};

PathFigures path_figures(const net::Topology& topo, const std::vector<int>& nodes,
                         std::int64_t max_frame_bytes) {
  PathFigures out;
  auto p = topo.path_from_nodes(nodes, 0, {});
  if (!p) return out;
  for (std::size_t i = 1; i + 1 < p->nodes.size(); ++i)
    if (topo.node(p->nodes[i]).kind == net::NodeKind::SdnSwitch) ++out.switch_count;
  for (const auto& h : p->hops) {
    const net::Link& l = topo.link(h.link);
    out.blocking_sum_us +=
        qos::AdmissionController::serialization_us(max_frame_bytes, l.bandwidth_kbps);
  }
  return out;
}

} // namespace

std::vector<RequirementVerdict> verify(const Trace& trace, const Scenario& scn) {
  // A complete trace reaches the scenario duration (records never exceed it).
  for (std::size_t i = 0; i < trace.size(); ++i)
    if (trace[i].at > scn.duration_us)
      throw Error(Errc::IncompleteTrace, "record beyond scenario duration");

  TraceIndex ix = build_index(trace);
  net::Topology topo = scenario_topology(scn);

  std::vector<RequirementVerdict> out;
  auto verdict = [&](int dr) -> RequirementVerdict& {
    out.push_back(RequirementVerdict{dr, VerdictStatus::Pass, {}, {}, {}});
    return out.back();
  };

  // ---- DR1: declared QoS bounds of admitted flows hold -------------------
  {
    RequirementVerdict& v = verdict(1);
    bool any = false;
    std::int64_t worst_latency = 0, worst_jitter = 0;
    double worst_loss = 0.0;
    for (const auto& f : scn.flows) {
      if (!ix.admitted_flows.count(f.id)) continue;
      bool has_bound = f.check_latency_us || f.check_jitter_us || f.check_max_loss ||
                       f.check_min_throughput_kbps;
      if (!has_bound) continue;
      any = true;
      const auto& dels = ix.delivered[f.id];
      std::int64_t lat_min = 0, lat_max = 0;
      std::set<std::int64_t> delivered_seqs;
      std::int64_t delivered_bits = 0;
      for (const auto& d : dels) {
        if (delivered_seqs.insert(d.seq).second) delivered_bits += 0; // bits counted below
        lat_max = std::max(lat_max, d.latency);
        lat_min = lat_min == 0 ? d.latency : std::min(lat_min, d.latency);
        if (f.check_latency_us && d.latency > *f.check_latency_us) {
          v.status = VerdictStatus::Fail;
          v.evidence.push_back(d.idx);
          v.notes.push_back("flow " + std::to_string(f.id) + " latency " +
                            std::to_string(d.latency) + " > bound " +
                            std::to_string(*f.check_latency_us));
        }
      }
      delivered_bits = static_cast<std::int64_t>(delivered_seqs.size()) * f.size_bytes * 8;
      worst_latency = std::max(worst_latency, lat_max);
      if (f.check_jitter_us && !dels.empty()) {
        std::int64_t jitter = lat_max - lat_min;
        worst_jitter = std::max(worst_jitter, jitter);
        if (jitter > *f.check_jitter_us) {
          v.status = VerdictStatus::Fail;
          v.notes.push_back("flow " + std::to_string(f.id) + " jitter " +
                            std::to_string(jitter) + " > bound " +
                            std::to_string(*f.check_jitter_us));
        }
      }
      std::set<std::int64_t> injected_seqs;
      for (const auto& inj : ix.injected[f.id]) injected_seqs.insert(inj.seq);
      if (f.check_max_loss && !injected_seqs.empty()) {
        double loss = 1.0 - static_cast<double>(delivered_seqs.size()) /
                                static_cast<double>(injected_seqs.size());
        worst_loss = std::max(worst_loss, loss);
        if (loss > *f.check_max_loss) {
          v.status = VerdictStatus::Fail;
          v.notes.push_back("flow " + std::to_string(f.id) + " loss " + std::to_string(loss) +
                            " > bound " + std::to_string(*f.check_max_loss));
        }
      }
      if (f.check_min_throughput_kbps) {
        SimTime window = (f.stop_us > 0 ? f.stop_us : scn.duration_us) - f.start_us;
        if (window > 0) {
          std::int64_t kbps = delivered_bits * 1000 / window;
          if (kbps < *f.check_min_throughput_kbps) {
            v.status = VerdictStatus::Fail;
            v.notes.push_back("flow " + std::to_string(f.id) + " throughput " +
                              std::to_string(kbps) + " kbit/s < bound " +
                              std::to_string(*f.check_min_throughput_kbps));
          }
        }
      }
    }
    if (!any) v.status = VerdictStatus::NotApplicable;
    v.metrics["max_latency_us"] = static_cast<double>(worst_latency);
    v.metrics["max_jitter_us"] = static_cast<double>(worst_jitter);
    v.metrics["max_loss"] = worst_loss;
  }

  // ---- DR2: non-interference, quantified ----------------------------------
  {
    RequirementVerdict& v = verdict(2);
    if (!scn.checks.dr2) {
      v.status = VerdictStatus::NotApplicable;
    } else {
      const Dr2Spec& d = *scn.checks.dr2;
      std::vector<std::int64_t> base, loaded;
      for (const auto& del : ix.delivered[d.flow]) {
        if (del.at >= d.baseline_lo && del.at < d.baseline_hi) base.push_back(del.latency);
        if (del.at >= d.loaded_lo && del.at < d.loaded_hi) loaded.push_back(del.latency);
      }
      if (base.empty() || loaded.empty()) {
        v.status = VerdictStatus::Fail;
        v.notes.push_back("dr2 windows contain no deliveries");
      } else {
        std::int64_t p99b = percentile99(base);
        std::int64_t p99l = percentile99(loaded);
        auto nodes = parse_path_nodes(ix.admitted_path[d.flow]);
        PathFigures fig = path_figures(topo, nodes, scn.config.max_frame_bytes);
        std::int64_t allowance = fig.blocking_sum_us;
        v.metrics["p99_baseline_us"] = static_cast<double>(p99b);
        v.metrics["p99_loaded_us"] = static_cast<double>(p99l);
        v.metrics["allowance_us"] = static_cast<double>(allowance);
        if (p99l > p99b + allowance) {
          v.status = VerdictStatus::Fail;
          v.notes.push_back("p99 " + std::to_string(p99l) + " exceeds baseline " +
                            std::to_string(p99b) + " + " + std::to_string(allowance));
        }
      }
    }
  }

  // ---- DR3: segment confinement -------------------------------------------
  {
    RequirementVerdict& v = verdict(3);
    if (scn.segments.size() < 2) {
      v.status = VerdictStatus::NotApplicable;
    } else {
      for (const auto& [flow, dels] : ix.delivered) {
        for (const auto& d : dels) {
          if (d.vlan == 0 || d.dst_segment == 0 || d.vlan == d.dst_segment) continue;
          PacketKey k{flow, d.seq, d.attempt};
          auto it = ix.firewall_allow.find(k);
          if (it == ix.firewall_allow.end() || it->second > d.idx) {
            v.status = VerdictStatus::Fail;
            v.evidence.push_back(d.idx);
            v.notes.push_back("cross-segment delivery without firewall allow: flow " +
                              std::to_string(flow) + " seq " + std::to_string(d.seq));
          }
        }
      }
    }
  }

  // ---- DR4: ordered, complete delivery; bounded reroute gaps --------------
  {
    RequirementVerdict& v = verdict(4);
    if (ix.admitted_flows.empty()) {
      v.status = VerdictStatus::NotApplicable;
    } else {
      for (std::int64_t flow : ix.admitted_flows) {
        const auto& dels = ix.delivered[flow];
        const auto& bounds = ix.flow_boundary_idx[flow];
        std::uint64_t last_txi = 0;
        bool have_last = false;
        std::size_t last_idx = 0;
        for (const auto& d : dels) {
          if (have_last && d.txi <= last_txi) {
            bool excused = false;
            for (std::size_t b : bounds)
              if (b > last_idx && b < d.idx) excused = true;
            if (!excused) {
              v.status = VerdictStatus::Fail;
              v.evidence.push_back(d.idx);
              v.notes.push_back("out-of-order delivery on flow " + std::to_string(flow) +
                                " txi " + std::to_string(d.txi));
            }
          }
          last_txi = d.txi;
          have_last = true;
          last_idx = d.idx;
        }
      }
      // Completeness for reserving classes.
      for (const auto& f : scn.flows) {
        if (f.tclass == TrafficClass::BestEffort) continue;
        if (!ix.admitted_flows.count(f.id)) continue;
        std::set<std::int64_t> delivered_seqs;
        for (const auto& d : ix.delivered[f.id]) delivered_seqs.insert(d.seq);
        std::map<std::int64_t, SimTime> injected_at;
        for (const auto& inj : ix.injected[f.id])
          if (!injected_at.count(inj.seq)) injected_at[inj.seq] = inj.at;
        std::map<std::int64_t, std::string> drop_reason;
        for (const auto& dr : ix.dropped[f.id])
          if (!drop_reason.count(dr.seq)) drop_reason[dr.seq] = dr.reason;
        for (const auto& [seq, at] : injected_at) {
          if (delivered_seqs.count(seq)) continue;
          if (ix.integrity_failed[f.id].count(seq)) continue; // reported per DR6
          auto rit = drop_reason.find(seq);
          bool excused = false;
          if (rit != drop_reason.end()) {
            // Losses with an injected-failure or lifecycle cause are the
            // reroute/suspension windows DR4 exempts.
            static const std::set<std::string> ok = {
                "link-down", "suspended",  "no-firewall", "host-failed",
                "integrity-reject", "no-link", "denied", "no-route",
                "rebind",    "scenario",   "session-expired", "torn-down"};
            excused = ok.count(rit->second) != 0;
          } else if (at + kInFlightGraceUs > scn.duration_us) {
            excused = true; // still in flight at scenario end
          }
          if (!excused) {
            v.status = VerdictStatus::Fail;
            v.notes.push_back("flow " + std::to_string(f.id) + " seq " + std::to_string(seq) +
                              " lost without excuse" +
                              (rit != drop_reason.end() ? " (" + rit->second + ")" : ""));
          }
        }
      }
      // Reroute gap budget.
      std::int64_t worst_gap = 0;
      for (const auto& [flow, events] : ix.reroutes) {
        for (const auto& ev : events) {
          if (!ev.completed) continue;
          SimTime start = ev.started_at;
          if (ev.reason != "vnf-migration") {
            for (const auto& [at, idx] : ix.link_downs)
              if (at <= ev.started_at) start = at;
          }
          std::int64_t gap = ev.completed_at - start;
          worst_gap = std::max(worst_gap, gap);
          PathFigures fig =
              path_figures(topo, parse_path_nodes(ev.path), scn.config.max_frame_bytes);
          std::int64_t budget = 3 * scn.config.heartbeat_us +
                                scn.config.rule_install_us * (fig.switch_count + 2);
          if (ev.reason == "vnf-migration") budget += scn.config.vnf_migration_us;
          if (gap > budget) {
            v.status = VerdictStatus::Fail;
            v.evidence.push_back(ev.completed_idx);
            v.notes.push_back("flow " + std::to_string(flow) + " reroute gap " +
                              std::to_string(gap) + " > budget " + std::to_string(budget));
          }
        }
      }
      v.metrics["max_reroute_gap_us"] = static_cast<double>(worst_gap);
    }
  }

  // ---- DR5: no deliveries for unauthorized principals ---------------------
  {
    RequirementVerdict& v = verdict(5);
    for (const auto& [flow, dels] : ix.delivered) {
      if (dels.empty()) continue;
      if (!ix.admitted_flows.count(flow)) {
        v.status = VerdictStatus::Fail;
        v.evidence.push_back(dels.front().idx);
        v.notes.push_back("delivery for unadmitted flow " + std::to_string(flow));
      }
    }
  }

  // ---- DR6: tampered packets detected; retransmission accounting ----------
  {
    RequirementVerdict& v = verdict(6);
    bool any_tamper = !ix.tampered.empty() || !scn.tamper_rates.empty();
    if (!any_tamper) {
      v.status = VerdictStatus::NotApplicable;
    } else {
      int detected = 0;
      for (const PacketKey& k : ix.tampered) {
        if (ix.nacked.count(k)) {
          ++detected;
          // Recovered or reported?
          bool recovered = false;
          for (const auto& d : ix.delivered[k.flow])
            if (d.seq == k.seq && d.attempt > k.attempt) recovered = true;
          if (!recovered && !ix.integrity_failed[k.flow].count(k.seq)) {
            bool at_tail = false;
            for (const auto& inj : ix.injected[k.flow])
              if (inj.seq == k.seq && inj.at + kInFlightGraceUs > scn.duration_us) at_tail = true;
            if (!at_tail) {
              v.status = VerdictStatus::Fail;
              v.evidence.push_back(ix.tamper_idx[k]);
              v.notes.push_back("tampered flow " + std::to_string(k.flow) + " seq " +
                                std::to_string(k.seq) + " neither recovered nor reported");
            }
          }
          continue;
        }
        // Undetected is acceptable only if the frame never reached its sink.
        bool lost_en_route = false;
        for (const auto& dr : ix.dropped[k.flow])
          if (dr.seq == k.seq && dr.attempt == k.attempt && dr.reason != "integrity-reject")
            lost_en_route = true;
        bool at_tail = false;
        for (const auto& inj : ix.injected[k.flow])
          if (inj.seq == k.seq && inj.attempt == k.attempt &&
              inj.at + kInFlightGraceUs > scn.duration_us)
            at_tail = true;
        if (!lost_en_route && !at_tail) {
          v.status = VerdictStatus::Fail;
          v.evidence.push_back(ix.tamper_idx[k]);
          v.notes.push_back("tampered packet not detected: flow " + std::to_string(k.flow) +
                            " seq " + std::to_string(k.seq));
        }
      }
      // Conservation: every injected packet is delivered or dropped.
      std::int64_t injected_n = 0, delivered_n = 0, dropped_n = 0;
      for (const auto& [flow, injs] : ix.injected) {
        std::set<PacketKey> delivered_keys, dropped_keys;
        for (const auto& d : ix.delivered[flow]) delivered_keys.insert({flow, d.seq, d.attempt});
        for (const auto& d : ix.dropped[flow]) dropped_keys.insert({flow, d.seq, d.attempt});
        for (const auto& inj : injs) {
          ++injected_n;
          PacketKey k{flow, inj.seq, inj.attempt};
          if (delivered_keys.count(k)) {
            ++delivered_n;
          } else if (dropped_keys.count(k)) {
            ++dropped_n;
          } else if (inj.at + kInFlightGraceUs <= scn.duration_us) {
            v.status = VerdictStatus::Fail;
            v.evidence.push_back(inj.idx);
            v.notes.push_back("unaccounted packet: flow " + std::to_string(flow) + " seq " +
                              std::to_string(inj.seq) + " attempt " +
                              std::to_string(inj.attempt));
          }
        }
      }
      v.metrics["tampered"] = static_cast<double>(ix.tampered.size());
      v.metrics["detected"] = static_cast<double>(detected);
      v.metrics["injected"] = static_cast<double>(injected_n);
      v.metrics["delivered"] = static_cast<double>(delivered_n);
      v.metrics["dropped"] = static_cast<double>(dropped_n);
    }
  }

  // ---- DR7: availability ratio; controller failover leaves data plane -----
  {
    RequirementVerdict& v = verdict(7);
    if (ix.admitted_flows.empty()) {
      v.status = VerdictStatus::NotApplicable;
    } else {
      double min_avail = 1.0;
      for (const auto& f : scn.flows) {
        if (!ix.admitted_flows.count(f.id)) continue;
        SimTime span = (f.stop_us > 0 ? f.stop_us : scn.duration_us) - f.start_us;
        if (span <= 0) continue;
        std::int64_t outage = 0;
        for (const auto& ev : ix.reroutes[f.id]) {
          if (!ev.completed) continue;
          SimTime start = ev.started_at;
          if (ev.reason != "vnf-migration")
            for (const auto& [at, idx] : ix.link_downs)
              if (at <= ev.started_at) start = at;
          outage += ev.completed_at - start;
        }
        for (const auto& [lo, hi] : ix.suspensions[f.id]) outage += hi - lo;
        if (ix.open_suspension.count(f.id))
          outage += scn.duration_us - ix.open_suspension[f.id];
        double avail = 1.0 - static_cast<double>(outage) / static_cast<double>(span);
        min_avail = std::min(min_avail, avail);
        if (avail < scn.checks.dr7_availability) {
          v.status = VerdictStatus::Fail;
          v.notes.push_back("flow " + std::to_string(f.id) + " availability " +
                            std::to_string(avail) + " < " +
                            std::to_string(scn.checks.dr7_availability));
        }
      }
      v.metrics["min_availability"] = min_avail;
      // Established flows keep forwarding across a controller kill.
      for (SimTime kill_at : ix.controller_kills) {
        SimTime failover_at = scn.duration_us;
        for (SimTime f_at : ix.failovers)
          if (f_at >= kill_at) {
            failover_at = f_at;
            break;
          }
        static const std::set<std::string> control_reasons = {
            "miss-buffer-full", "denied", "quarantine", "no-chain", "rule-drop"};
        for (const auto& [flow, drops] : ix.dropped) {
          auto adm = ix.first_admitted_at.find(flow);
          if (adm == ix.first_admitted_at.end() || adm->second >= kill_at) continue;
          for (const auto& d : drops) {
            if (d.at < kill_at || d.at > failover_at) continue;
            if (!control_reasons.count(d.reason)) continue;
            v.status = VerdictStatus::Fail;
            v.evidence.push_back(d.idx);
            v.notes.push_back("established flow " + std::to_string(flow) +
                              " dropped during controller failover: " + d.reason);
          }
        }
      }
    }
  }

  // ---- DR8: legacy-region flows cross the gateway -------------------------
  {
    RequirementVerdict& v = verdict(8);
    bool any_legacy = false;
    for (const auto& n : scn.nodes)
      if (n.kind == net::NodeKind::LegacySwitch) any_legacy = true;
    if (!any_legacy) {
      v.status = VerdictStatus::NotApplicable;
    } else {
      bool any_ok = false;
      for (const auto& f : scn.flows) {
        const net::Node* src = scn.find_node(f.src);
        const net::Node* dst = scn.find_node(f.dst);
        bool legacy_flow = (src && src->region == net::Region::Legacy) ||
                           (dst && dst->region == net::Region::Legacy);
        if (!legacy_flow) continue;
        bool delivered = !ix.delivered[f.id].empty();
        bool crossed = ix.gateway_flows.count(f.id) != 0;
        if (delivered && crossed) any_ok = true;
        if (!delivered || !crossed) {
          v.status = VerdictStatus::Fail;
          v.notes.push_back("legacy flow " + std::to_string(f.id) +
                            (delivered ? " never crossed the gateway" : " never delivered"));
        }
      }
      if (!any_ok && v.status == VerdictStatus::Pass) v.status = VerdictStatus::NotApplicable;
    }
  }

  // ---- DR9: plug-and-produce onboarding time -------------------------------
  {
    RequirementVerdict& v = verdict(9);
    if (ix.plug_ins.empty()) {
      v.status = VerdictStatus::NotApplicable;
    } else {
      SimTime bound = scn.checks.dr9_onboarding_bound_us.value_or(10'000);
      double worst = 0.0;
      bool any_measured = false;
      for (const auto& plug : ix.plug_ins) {
        // Devices whose authentication was denied never onboard; their
        // evidence belongs to DR5.
        bool granted = false;
        for (const auto& [at, principal] : ix.auth_grants)
          if (principal == plug.principal && at >= plug.at) granted = true;
        if (!granted) continue;
        any_measured = true;
        SimTime first_delivery = -1;
        for (const auto& f : scn.flows) {
          if (f.src != plug.host) continue;
          for (const auto& d : ix.delivered[f.id]) {
            if (d.at < plug.at) continue;
            if (first_delivery < 0 || d.at < first_delivery) first_delivery = d.at;
          }
        }
        if (first_delivery < 0) {
          v.status = VerdictStatus::Fail;
          v.notes.push_back("no authorized delivery after plug-in of host " +
                            std::to_string(plug.host));
          continue;
        }
        std::int64_t onboarding = first_delivery - plug.at;
        worst = std::max(worst, static_cast<double>(onboarding));
        if (onboarding > bound) {
          v.status = VerdictStatus::Fail;
          v.notes.push_back("onboarding " + std::to_string(onboarding) + " > bound " +
                            std::to_string(bound));
        }
      }
      if (!any_measured && v.status == VerdictStatus::Pass)
        v.status = VerdictStatus::NotApplicable;
      // Plug-and-produce means no human steps in the trace.
      for (std::size_t i = 0; i < trace.size(); ++i)
        if (trace[i].fact == "manual-action") {
          v.status = VerdictStatus::Fail;
          v.evidence.push_back(i);
          v.notes.push_back("manual intervention recorded");
        }
      v.metrics["max_onboarding_us"] = worst;
    }
  }

  // ---- DR10: VPN sessions reach their authorized targets only -------------
  {
    RequirementVerdict& v = verdict(10);
    if (ix.vpn_principals.empty()) {
      v.status = VerdictStatus::NotApplicable;
    } else {
      bool any_delivery = false;
      for (const auto& f : scn.flows) {
        if (!ix.vpn_principals.count(f.principal)) continue;
        bool delivered = !ix.delivered[f.id].empty();
        if (delivered) {
          any_delivery = true;
          if (!ix.admitted_flows.count(f.id)) {
            v.status = VerdictStatus::Fail;
            v.evidence.push_back(ix.delivered[f.id].front().idx);
            v.notes.push_back("vpn flow " + std::to_string(f.id) + " delivered unadmitted");
          }
        }
      }
      if (!any_delivery) {
        v.status = VerdictStatus::Fail;
        v.notes.push_back("no vpn flow reached its target");
      }
    }
  }

  // ---- DR11: a runtime-registered app demonstrably alters routing ---------
  {
    RequirementVerdict& v = verdict(11);
    if (!ix.any_app_registered) {
      v.status = VerdictStatus::NotApplicable;
    } else if (ix.app_steered.empty()) {
      v.status = VerdictStatus::Fail;
      v.notes.push_back("registered app never altered a routing decision");
    } else {
      v.evidence.push_back(ix.app_steered.front());
    }
  }

  return out;
}

bool all_applicable_pass(const std::vector<RequirementVerdict>& verdicts) {
  for (const auto& v : verdicts)
    if (v.status == VerdictStatus::Fail) return false;
  return true;
}

const std::string& dr_check_name(int dr) {
  static const std::vector<std::string> names = {
      "",
      "flow-qos-bounds",
      "noninterference-p99",
      "segment-confinement",
      "ordered-complete-delivery",
      "authorization-isolation",
      "integrity-detect-retransmit",
      "availability-and-failover",
      "legacy-gateway-delivery",
      "plug-and-produce-onboarding",
      "vpn-scoped-access",
      "runtime-app-steering",
  };
  if (dr < 1 || dr > 11) throw Error(Errc::InvalidRange, "DR index " + std::to_string(dr));
  return names[static_cast<std::size_t>(dr)];
}

std::vector<CoverageItem> coverage_report() {
  static const std::map<int, std::string> notes = {
      {3, "breach detection is evidenced only for the two modeled breach kinds "
          "(bad credential, tampered frame); general anomaly detection is out of scope"},
      {17, "no OT time resolution is standardized here; the microsecond base and "
           "per-scenario latency bounds stand in for 'real time'"},
      {18, "verified at desk scale only; large-scale scalability is not simulated"},
      {23, "edge computing is out of scope; edge devices are modeled as plain hosts"},
      {26, "protocol diversity is out of scope; adaptability is evidenced by versioned "
           "interfaces and runtime app registration"},
  };
  std::vector<CoverageItem> out;
  for (const RequirementEntry& e : catalog()) {
    CoverageItem item;
    item.number = e.number;
    item.text = e.text;
    item.source = e.source;
    item.design_requirements = e.design_requirements;
    for (int dr : e.design_requirements) item.checks.push_back(dr_check_name(dr));
    auto it = notes.find(e.number);
    if (it != notes.end()) item.note = it->second;
    out.push_back(std::move(item));
  }
  return out;
}

} // namespace iiotsim::harness
