#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "hagcl/value.hpp"

namespace hagcl {

// Named collection of leaf values, in insertion order.  Trainable entries
// are optimizer targets; non-trainable entries (batch-norm running
// statistics) are still part of checkpoints.
class ParamStore {
public:
  struct Entry {
    std::string name;
    Value value;
    bool trainable = true;
  };

  Value add(const std::string& name, Array init, bool trainable = true);
  Value get(const std::string& name) const;
  bool contains(const std::string& name) const;

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  // Trainable values whose names start with `prefix` (empty = all).
  std::vector<Value> trainable_values(const std::string& prefix = "") const;

  // FNV-1a over names, flags, shapes and raw data bytes.  Bit-identical
  // stores hash identically.
  std::uint64_t checksum() const;

private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace hagcl
