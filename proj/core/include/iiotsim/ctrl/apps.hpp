#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "iiotsim/flow.hpp"
#include "iiotsim/net/topology.hpp"
#include "iiotsim/sim/time.hpp"

namespace iiotsim::ctrl {

// Northbound contract version; bumped on incompatible changes to
// NetworkView or NorthboundApp.
inline constexpr int kNorthboundApiVersion = 1;

struct LinkView {
  int id = 0;
  int a_node = 0;
  int b_node = 0;
  net::LinkState state = net::LinkState::Up;
  std::int64_t latency_us = 0;
  std::int64_t bandwidth_kbps = 0;
  std::int64_t jitter_bound_us = 0;
  std::int64_t residual_ab_kbps = 0; // available when traversing a -> b
  std::int64_t residual_ba_kbps = 0;
};

// Read-only scoped snapshot handed to northbound applications.
struct NetworkView {
  sim::SimTime at = 0;
  std::uint64_t revision = 0;
  std::map<int, net::NodeKind> nodes;
  std::vector<LinkView> links;
  std::map<int, int> host_segments; // host node -> vlan
};

class NorthboundApp {
public:
  virtual ~NorthboundApp() = default;
  virtual const std::string& name() const = 0;
  // A node sequence src..dst, or nothing to leave routing to the default
  // pipeline. Must return before the triggering event completes.
  virtual std::optional<std::vector<int>> propose_path(const NetworkView& view,
                                                       const FlowIntent& intent) = 0;
};

// Spreads reservations: proposes the feasible path whose most-utilized link
// is least utilized, preferring shorter latency then smaller node sequence
// on ties.
class AltPathBalancer : public NorthboundApp {
public:
  const std::string& name() const override;
  std::optional<std::vector<int>> propose_path(const NetworkView& view,
                                               const FlowIntent& intent) override;
};

// Built-in app catalog for scenario files; unknown names yield nullptr.
std::unique_ptr<NorthboundApp> make_builtin_app(const std::string& name);

} // namespace iiotsim::ctrl
