#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "mindkit/tree.hpp"

namespace mindkit {

// Reversible flat encoding of a mind-map tree. A node at hierarchical path p
// (root "1", k-th child p + "_" + k) becomes
//   <s_np><s_text>escaped text</s_text>children...</s_np>
// Text escaping: & -> &amp;, < -> &lt;, > -> &gt;.

std::string escape_text(std::string_view text);
std::string unescape_text(std::string_view text);

std::string serialize_tokens(const MindNode& tree);

/// Exact inverse of serialize_tokens. Hierarchical numbers in the tags are
/// validated against the actual nesting position. Throws MalformedSequence.
MindNode parse_tokens(std::string_view seq);

/// Repair-mode parse: structure is rebuilt from nesting; open/close tag names
/// must match but sequence-number mismatches against position are tolerated,
/// and elements left open at end-of-string are auto-closed. nullopt when the
/// input is still not interpretable as a tree.
std::optional<MindNode> parse_tokens_lenient(std::string_view seq);

/// Deterministic token count: each markup tag counts as one token; text spans
/// count whitespace-separated words (EN) or non-space code points (CN).
int count_tokens(std::string_view seq, Language lang);

} // namespace mindkit
