#include "rrrt/sim/topology.hpp"

#include <cmath>
#include <deque>
#include <string>

#include "rrrt/error.hpp"

namespace rrrt::sim {

std::string_view to_string(NodeRole role) noexcept {
  switch (role) {
    case NodeRole::Sensor: return "sensor";
    case NodeRole::SubSink: return "subsink";
    case NodeRole::Relay: return "relay";
  }
  return "?";
}

double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

NodeId Topology::add_node(NodeRole role, Position pos) {
  NodeId id{static_cast<std::uint32_t>(nodes_.size())};
  nodes_.push_back({id, role, pos});
  adjacency_.emplace_back();
  link_params_.emplace_back();
  routed_ = false;
  return id;
}

void Topology::add_link(NodeId a, NodeId b, double bit_rate, double loss) {
  if (!contains(a) || !contains(b)) throw Error(Errc::UnknownTarget, "link endpoint not in topology");
  if (a == b) throw Error(Errc::UnknownLink, "self-links are not allowed");
  if (!(bit_rate > 0.0)) throw Error(Errc::Validation, "link bit rate must be positive");
  if (has_link({a, b})) return;
  const double d = distance(nodes_[a.index()].pos, nodes_[b.index()].pos);
  if (!(d > 0.0)) throw Error(Errc::UnknownLink, "co-located nodes cannot be linked");
  const LinkParams params{d, bit_rate, d / kSignalSpeed, loss};
  adjacency_[a.index()].push_back(b);
  link_params_[a.index()].push_back(params);
  adjacency_[b.index()].push_back(a);
  link_params_[b.index()].push_back(params);
  routed_ = false;
}

void Topology::connect_within(double range, double bit_rate, double loss) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes_.size(); ++j) {
      if (distance(nodes_[i].pos, nodes_[j].pos) <= range) {
        add_link(NodeId{static_cast<std::uint32_t>(i)}, NodeId{static_cast<std::uint32_t>(j)}, bit_rate, loss);
      }
    }
  }
}

const NodeInfo& Topology::node(NodeId id) const {
  if (!contains(id)) throw Error(Errc::UnknownTarget, "unknown node " + std::to_string(id.value));
  return nodes_[id.index()];
}

bool Topology::has_link(LinkRef ref) const {
  if (!contains(ref.from) || !contains(ref.to)) return false;
  for (const NodeId& n : adjacency_[ref.from.index()]) {
    if (n == ref.to) return true;
  }
  return false;
}

const LinkParams& Topology::link(LinkRef ref) const {
  if (contains(ref.from) && contains(ref.to)) {
    const auto& adj = adjacency_[ref.from.index()];
    for (std::size_t k = 0; k < adj.size(); ++k) {
      if (adj[k] == ref.to) return link_params_[ref.from.index()][k];
    }
  }
  throw Error(Errc::UnknownLink,
              "no link " + std::to_string(ref.from.value) + "->" + std::to_string(ref.to.value));
}

const std::vector<NodeId>& Topology::neighbours(NodeId id) const {
  if (!contains(id)) throw Error(Errc::UnknownTarget, "unknown node " + std::to_string(id.value));
  return adjacency_[id.index()];
}

void Topology::compute_routes(bool with_alternates) {
  const std::size_t n = nodes_.size();
  primary_.assign(n * n, kNone);
  alternate_.assign(n * n, kNone);
  hops_.assign(n * n, kNone);

  for (std::size_t d = 0; d < n; ++d) {
    // BFS from the destination gives every node's hop distance to it.
    std::vector<std::uint32_t> dist(n, kNone);
    std::deque<std::size_t> frontier{d};
    dist[d] = 0;
    while (!frontier.empty()) {
      const std::size_t u = frontier.front();
      frontier.pop_front();
      for (const NodeId& v : adjacency_[u]) {
        if (dist[v.index()] == kNone) {
          dist[v.index()] = dist[u] + 1;
          frontier.push_back(v.index());
        }
      }
    }
    const Position& dpos = nodes_[d].pos;
    for (std::size_t u = 0; u < n; ++u) {
      hops_[u * n + d] = dist[u];
      if (u == d || dist[u] == kNone) continue;
      // Candidates: neighbours one hop closer. Prefer the geographically
      // closest to the destination, then the one best aligned with the
      // bearing toward it, then the lowest id.
      const Position& upos = nodes_[u].pos;
      const double bx = dpos.x - upos.x;
      const double by = dpos.y - upos.y;
      const double blen = std::hypot(bx, by);
      auto rank = [&](std::uint32_t v) {
        const Position& p = nodes_[v].pos;
        const double dx = p.x - upos.x;
        const double dy = p.y - upos.y;
        const double align = blen > 0.0 ? (dx * bx + dy * by) / (std::hypot(dx, dy) * blen) : 0.0;
        return std::pair{distance(p, dpos), align};
      };
      auto better = [&](std::uint32_t v, std::uint32_t w) {
        const auto [dv, av] = rank(v);
        const auto [dw, aw] = rank(w);
        const double tol = 1e-9 * std::max(1.0, std::max(dv, dw));
        if (std::abs(dv - dw) > tol) return dv < dw;
        if (std::abs(av - aw) > 1e-12) return av > aw;
        return v < w;
      };
      std::uint32_t best = kNone;
      std::uint32_t second = kNone;
      for (const NodeId& v : adjacency_[u]) {
        if (dist[v.index()] == kNone || dist[v.index()] + 1 != dist[u]) continue;
        if (best == kNone || better(v.value, best)) {
          second = best;
          best = v.value;
        } else if (second == kNone || better(v.value, second)) {
          second = v.value;
        }
      }
      primary_[u * n + d] = best;
      if (with_alternates) alternate_[u * n + d] = second;
    }
  }
  routed_ = true;
}

std::optional<NodeId> Topology::primary_hop(NodeId node, NodeId dest) const {
  if (!routed_ || !contains(node) || !contains(dest)) return std::nullopt;
  const std::uint32_t v = primary_[slot(node, dest)];
  if (v == kNone) return std::nullopt;
  return NodeId{v};
}

std::optional<NodeId> Topology::alternate_hop(NodeId node, NodeId dest) const {
  if (!routed_ || !contains(node) || !contains(dest)) return std::nullopt;
  const std::uint32_t v = alternate_[slot(node, dest)];
  if (v == kNone) return std::nullopt;
  return NodeId{v};
}

std::optional<std::uint32_t> Topology::hop_count(NodeId node, NodeId dest) const {
  if (!routed_ || !contains(node) || !contains(dest)) return std::nullopt;
  const std::uint32_t h = hops_[slot(node, dest)];
  if (h == kNone) return std::nullopt;
  return h;
}

std::vector<NodeId> Topology::path(NodeId from, NodeId to) const {
  std::vector<NodeId> out{from};
  NodeId cur = from;
  while (cur != to) {
    auto next = primary_hop(cur, to);
    if (!next) throw Error(Errc::NoRoute, "no route " + std::to_string(from.value) + "->" + std::to_string(to.value));
    cur = *next;
    out.push_back(cur);
  }
  return out;
}

}  // namespace rrrt::sim
