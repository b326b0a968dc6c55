#pragma once

#include <string>

#include "hagcl/params.hpp"

namespace hagcl {

// Versioned binary parameter checkpoints.  Every entry is stored with its
// name, trainable flag, shape, and row-major 64-bit values; a save/load
// round trip is bit-exact.

void save_checkpoint(const ParamStore& store, const std::string& path);

// Loads into an existing store.  Entry names must match exactly and shapes
// must agree; mismatches raise ShapeError naming expected and found dims.
void load_checkpoint_into(const std::string& path, ParamStore& store);

}  // namespace hagcl
