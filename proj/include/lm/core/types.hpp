#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lm {

// Vertices are dense integers 0..V-1, numbered in arrival order.
using VertexId = int;

// Which online model a script drives. Fully online scripts interleave
// arrivals and deadlines; general arrival scripts contain arrivals only.
enum class Model { FullyOnline, GeneralArrival };

enum class EventKind { Arrival, Deadline };

struct Event {
  EventKind kind = EventKind::Arrival;
  VertexId vertex = 0;
  // Arrival events list the edges revealed now: neighbors that arrived
  // earlier. Deadline events carry no neighbor list.
  std::vector<VertexId> neighbors;
};

// A fully specified, replayable input sequence.
struct InstanceScript {
  Model model = Model::FullyOnline;
  std::vector<Event> events;
  // Set by generators that know the graph is bipartite; lets offline
  // optimum computations pick cheaper routes. Purely advisory.
  bool bipartite_hint = false;

  int vertex_count() const;
};

struct ScriptViolation {
  int event_index = -1;  // -1 when the problem is not tied to one event
  std::string message;
};

// Checks every structural invariant of a script:
//  - arrivals are 0,1,2,... in order, one per vertex,
//  - neighbor lists reference earlier arrivals, no self loops, no duplicate
//    edge (an edge is listed once, at its later endpoint's arrival),
//  - fully online: exactly one deadline per vertex, after its arrival and
//    after the arrival of every neighbor of that vertex,
//  - general arrival: no deadline events.
// Violations are data, not errors: an empty result means the script is valid.
std::vector<ScriptViolation> validate_script(const InstanceScript& script);

// Throws std::invalid_argument with the first violation's message; used by
// entry points that require a valid script.
void require_valid(const InstanceScript& script);

// Convenience: all edges of the static graph as canonical (min,max) pairs,
// in reveal order.
std::vector<std::pair<VertexId, VertexId>> script_edges(const InstanceScript& script);

std::string to_string(Model model);
std::string to_string(EventKind kind);

}  // namespace lm
