#pragma once

#include <string>

#include <json.hpp>

#include "rigid/digraph.hpp"

namespace rigid::io {

inline constexpr int kFormatVersion = 1;

/// One line per vertex ("v id tag payload") then one per arrow ("a u v"),
/// vertices by id and arrows lexicographic.
std::string canonical_text(const Digraph& g);

/// FNV-1a 64 of canonical_text, as 16 hex digits.
std::string content_hash(const Digraph& g);

nlohmann::json graph_to_json(const Digraph& g);

/// Throws GraphError on malformed documents (bad ids, unknown tags, duplicate roles).
Digraph graph_from_json(const nlohmann::json& j);

std::string to_dot(const Digraph& g, const std::string& name = "G");

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace rigid::io
