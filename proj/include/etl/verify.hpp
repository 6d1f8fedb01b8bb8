#pragma once

#include <string>
#include <vector>

#include "etl/config.hpp"
#include "etl/store.hpp"

namespace etl {

// Walks every table and checks the storage invariants: history interval
// non-overlap and at most one open version per surrogate key, history keys
// present in the static table, no dangling resolved foreign keys, augment
// rows all-blank, unique surrogate/business keys, sequence heads beyond all
// used keys. Returns one entry per violation; empty means a healthy store.
std::vector<Violation> verify_store(Store& store, const MappingConfig& cfg);

}  // namespace etl
