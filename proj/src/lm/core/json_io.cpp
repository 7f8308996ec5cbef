#include "lm/core/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace lm {

using nlohmann::ordered_json;

std::string script_to_json(const InstanceScript& script) {
  ordered_json doc;
  doc["model"] = to_string(script.model);
  doc["events"] = ordered_json::array();
  for (const Event& event : script.events) {
    ordered_json entry;
    entry["kind"] = to_string(event.kind);
    entry["vertex"] = event.vertex;
    if (event.kind == EventKind::Arrival) {
      entry["neighbors"] = event.neighbors;
    }
    doc["events"].push_back(std::move(entry));
  }
  if (script.bipartite_hint) doc["bipartite_hint"] = true;
  return doc.dump(2) + "\n";
}

InstanceScript script_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& err) {
    throw std::invalid_argument(std::string("instance JSON parse error: ") + err.what());
  }

  InstanceScript script;
  const std::string model = doc.value("model", "");
  if (model == "fully_online") {
    script.model = Model::FullyOnline;
  } else if (model == "general_arrival") {
    script.model = Model::GeneralArrival;
  } else {
    throw std::invalid_argument("instance JSON: model must be fully_online or general_arrival");
  }
  if (!doc.contains("events") || !doc["events"].is_array()) {
    throw std::invalid_argument("instance JSON: missing events array");
  }
  for (const auto& entry : doc["events"]) {
    Event event;
    const std::string kind = entry.value("kind", "");
    if (kind == "arrival") {
      event.kind = EventKind::Arrival;
    } else if (kind == "deadline") {
      event.kind = EventKind::Deadline;
    } else {
      throw std::invalid_argument("instance JSON: event kind must be arrival or deadline");
    }
    if (!entry.contains("vertex") || !entry["vertex"].is_number_integer()) {
      throw std::invalid_argument("instance JSON: event needs an integer vertex");
    }
    event.vertex = entry["vertex"].get<VertexId>();
    if (entry.contains("neighbors")) {
      if (event.kind == EventKind::Deadline) {
        throw std::invalid_argument("instance JSON: deadline events take no neighbors");
      }
      event.neighbors = entry["neighbors"].get<std::vector<VertexId>>();
    }
    script.events.push_back(std::move(event));
  }
  script.bipartite_hint = doc.value("bipartite_hint", false);

  require_valid(script);
  return script;
}

InstanceScript load_script(const std::string& path) {
  return script_from_json(read_text_file(path));
}

void save_script(const InstanceScript& script, const std::string& path) {
  write_text_file(path, script_to_json(script));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file for reading: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace lm
