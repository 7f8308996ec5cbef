#pragma once

#include <string>

#include "lm/core/types.hpp"

namespace lm {

// Canonical instance encoding:
//   {"model": "fully_online" | "general_arrival",
//    "events": [{"kind": "arrival", "vertex": 0, "neighbors": [...]},
//               {"kind": "deadline", "vertex": 0}, ...],
//    "bipartite_hint": true}            (hint emitted only when set)
// Serialization of a parsed document reproduces it byte for byte, so scripts
// can be diffed and stored as fixtures.
std::string script_to_json(const InstanceScript& script);

// Parses and structurally validates a script; throws std::invalid_argument
// with a descriptive message on malformed JSON or invariant violations.
InstanceScript script_from_json(const std::string& text);

InstanceScript load_script(const std::string& path);
void save_script(const InstanceScript& script, const std::string& path);

// Small file helpers shared by the CLI and tests.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace lm
