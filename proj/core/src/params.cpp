#include "hagcl/params.hpp"

#include <cstring>

#include "hagcl/error.hpp"

namespace hagcl {

Value ParamStore::add(const std::string& name, Array init, bool trainable) {
  if (index_.count(name)) throw ContractError("ParamStore: duplicate parameter '" + name + "'");
  Value v = trainable ? Value::param(std::move(init)) : Value::constant(std::move(init));
  index_[name] = entries_.size();
  entries_.push_back({name, v, trainable});
  return v;
}

Value ParamStore::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ContractError("ParamStore: unknown parameter '" + name + "'");
  return entries_[it->second].value;
}

bool ParamStore::contains(const std::string& name) const { return index_.count(name) > 0; }

std::vector<Value> ParamStore::trainable_values(const std::string& prefix) const {
  std::vector<Value> out;
  for (const Entry& e : entries_)
    if (e.trainable && e.name.rfind(prefix, 0) == 0) out.push_back(e.value);
  return out;
}

std::uint64_t ParamStore::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&h](const void* p, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ull;
    }
  };
  for (const Entry& e : entries_) {
    feed(e.name.data(), e.name.size());
    const unsigned char t = e.trainable ? 1 : 0;
    feed(&t, 1);
    const auto& shape = e.value.data().shape();
    for (std::size_t d : shape) feed(&d, sizeof(d));
    feed(e.value.data().data(), e.value.data().size() * sizeof(double));
  }
  return h;
}

}  // namespace hagcl
