#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>

#include "mindkit/tree.hpp"

namespace mindkit {

/// One flattened field per node: key = texts of strict ancestors joined by
/// "/" (empty for the root), value = the node's own text.
using Field = std::pair<std::string, std::string>;

/// Multiset of fields, stored as field -> multiplicity.
using FieldMultiset = std::map<Field, int>;

FieldMultiset flatten_fields(const MindNode& tree);

std::size_t field_count(const FieldMultiset& fields);

/// Size of the multiset intersection.
std::size_t field_overlap(const FieldMultiset& a, const FieldMultiset& b);

} // namespace mindkit
