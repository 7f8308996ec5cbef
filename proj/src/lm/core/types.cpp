#include "lm/core/types.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace lm {

int InstanceScript::vertex_count() const {
  int count = 0;
  for (const Event& event : events) {
    if (event.kind == EventKind::Arrival) ++count;
  }
  return count;
}

std::string to_string(Model model) {
  return model == Model::FullyOnline ? "fully_online" : "general_arrival";
}

std::string to_string(EventKind kind) {
  return kind == EventKind::Arrival ? "arrival" : "deadline";
}

namespace {

std::string describe(const char* what, VertexId vertex) {
  std::ostringstream out;
  out << what << " (vertex " << vertex << ")";
  return out.str();
}

}  // namespace

std::vector<ScriptViolation> validate_script(const InstanceScript& script) {
  std::vector<ScriptViolation> violations;
  auto flag = [&](int index, const std::string& message) {
    violations.push_back({index, message});
  };

  int arrived = 0;                       // vertices 0..arrived-1 have arrived
  std::vector<char> done;                // deadline already seen
  std::vector<std::vector<VertexId>> adjacency;
  std::set<std::pair<VertexId, VertexId>> seen_edges;

  for (int i = 0; i < static_cast<int>(script.events.size()); ++i) {
    const Event& event = script.events[i];
    if (event.kind == EventKind::Arrival) {
      if (event.vertex != arrived) {
        std::ostringstream out;
        out << "arrival of vertex " << event.vertex << " out of order, expected " << arrived;
        flag(i, out.str());
        // Recovery for further checks: treat the id as arrived anyway.
      }
      const VertexId v = event.vertex;
      while (static_cast<int>(adjacency.size()) <= v) {
        adjacency.emplace_back();
        done.push_back(0);
      }
      arrived = std::max(arrived, v + 1);
      std::unordered_set<VertexId> in_this_list;
      for (VertexId u : event.neighbors) {
        if (u == v) {
          flag(i, describe("self loop", v));
          continue;
        }
        if (u < 0 || u >= arrived || u >= v) {
          std::ostringstream out;
          out << "neighbor " << u << " of vertex " << v << " has not arrived yet";
          flag(i, out.str());
          continue;
        }
        if (!in_this_list.insert(u).second) {
          flag(i, describe("duplicate neighbor in arrival list", u));
          continue;
        }
        auto key = std::minmax(u, v);
        if (!seen_edges.insert(key).second) {
          std::ostringstream out;
          out << "edge (" << key.first << "," << key.second << ") revealed twice";
          flag(i, out.str());
          continue;
        }
        adjacency[u].push_back(v);
        adjacency[v].push_back(u);
      }
    } else {
      if (script.model == Model::GeneralArrival) {
        flag(i, describe("deadline event in a general-arrival script", event.vertex));
        continue;
      }
      const VertexId v = event.vertex;
      if (v < 0 || v >= arrived) {
        flag(i, describe("deadline before arrival", v));
        continue;
      }
      if (done[v]) {
        flag(i, describe("second deadline", v));
        continue;
      }
      done[v] = 1;
      if (!event.neighbors.empty()) {
        flag(i, describe("deadline event carries a neighbor list", v));
      }
    }
  }

  if (script.model == Model::FullyOnline) {
    for (VertexId v = 0; v < arrived; ++v) {
      if (!done[v]) flag(-1, describe("missing deadline", v));
    }
    // Every neighbor of v must arrive before v's deadline. Arrivals only add
    // edges backwards in time, so it suffices that no edge is revealed after
    // either endpoint's deadline.
    std::vector<char> passed(arrived, 0);
    for (int i = 0; i < static_cast<int>(script.events.size()); ++i) {
      const Event& event = script.events[i];
      if (event.kind == EventKind::Deadline) {
        if (event.vertex >= 0 && event.vertex < arrived) passed[event.vertex] = 1;
        continue;
      }
      for (VertexId u : event.neighbors) {
        if (u >= 0 && u < arrived && passed[u]) {
          std::ostringstream out;
          out << "edge (" << u << "," << event.vertex << ") revealed after the deadline of " << u;
          flag(i, out.str());
        }
      }
    }
  }

  return violations;
}

void require_valid(const InstanceScript& script) {
  const auto violations = validate_script(script);
  if (violations.empty()) return;
  std::ostringstream out;
  out << "invalid instance script: " << violations.front().message;
  if (violations.front().event_index >= 0) {
    out << " (event " << violations.front().event_index << ")";
  }
  if (violations.size() > 1) {
    out << " and " << violations.size() - 1 << " more violation(s)";
  }
  throw std::invalid_argument(out.str());
}

std::vector<std::pair<VertexId, VertexId>> script_edges(const InstanceScript& script) {
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (const Event& event : script.events) {
    if (event.kind != EventKind::Arrival) continue;
    for (VertexId u : event.neighbors) {
      edges.push_back(std::minmax(u, event.vertex));
    }
  }
  return edges;
}

}  // namespace lm
