#include "psa/params.hpp"

#include <cstring>
#include <stdexcept>

namespace psa::nets {
namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
}

void fnv_array(std::uint64_t& h, const ParamArray& a) {
    fnv_bytes(h, a.name.data(), a.name.size());
    fnv_bytes(h, a.group.data(), a.group.size());
    const std::int64_t shape[3] = {a.ch, a.h, a.w};
    fnv_bytes(h, shape, sizeof(shape));
    fnv_bytes(h, a.v.data(), a.v.size() * sizeof(double));
}

}  // namespace

Tensor ParamArray::tensor() const {
    Tensor t(ch, h, w);
    t.v = v;
    return t;
}

ParamArray& ParamStore::add(const std::string& name, const std::string& group, int ch, int h,
                            int w) {
    if (index_.count(name)) throw std::invalid_argument("param store: duplicate array " + name);
    if (ch <= 0 || h <= 0 || w <= 0)
        throw std::invalid_argument("param store: non-positive shape for " + name);
    ParamArray a;
    a.name = name;
    a.group = group;
    a.ch = ch;
    a.h = h;
    a.w = w;
    a.v.assign(std::size_t(ch) * h * w, 0.0);
    index_[name] = arrays_.size();
    arrays_.push_back(std::move(a));
    return arrays_.back();
}

bool ParamStore::has(const std::string& name) const { return index_.count(name) > 0; }

ParamArray& ParamStore::at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("param store: no array " + name);
    return arrays_[it->second];
}

const ParamArray& ParamStore::at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("param store: no array " + name);
    return arrays_[it->second];
}

std::vector<std::string> ParamStore::groups() const {
    std::set<std::string> g;
    for (const auto& a : arrays_) g.insert(a.group);
    return {g.begin(), g.end()};
}

std::vector<std::string> ParamStore::group_members(const std::string& group) const {
    std::vector<std::string> out;
    for (const auto& a : arrays_)
        if (a.group == group) out.push_back(a.name);
    return out;
}

bool ParamStore::has_group(const std::string& group) const {
    for (const auto& a : arrays_)
        if (a.group == group) return true;
    return false;
}

void ParamStore::freeze_group(const std::string& group) {
    if (!has_group(group)) throw std::invalid_argument("param store: no group " + group);
    frozen_.insert(group);
}

void ParamStore::unfreeze_group(const std::string& group) { frozen_.erase(group); }

bool ParamStore::frozen(const std::string& group) const { return frozen_.count(group) > 0; }

std::size_t ParamStore::total_values() const {
    std::size_t n = 0;
    for (const auto& a : arrays_) n += a.v.size();
    return n;
}

std::uint64_t ParamStore::group_hash(const std::string& group) const {
    std::uint64_t h = kFnvOffset;
    bool found = false;
    for (const auto& a : arrays_)
        if (a.group == group) {
            fnv_array(h, a);
            found = true;
        }
    if (!found) throw std::invalid_argument("param store: no group " + group);
    return h;
}

std::uint64_t ParamStore::content_hash() const {
    std::uint64_t h = kFnvOffset;
    for (const auto& a : arrays_) fnv_array(h, a);
    return h;
}

ParamLeaves::ParamLeaves(Tape& tape, const ParamStore& store) : tape_(&tape) {
    for (const auto& a : store.arrays()) {
        Tensor t = a.tensor();
        ids_[a.name] = tape.leaf(std::move(t), !store.frozen(a.group));
    }
}

int ParamLeaves::id(const std::string& name) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) throw std::out_of_range("param leaves: no array " + name);
    return it->second;
}

const std::vector<double>& ParamLeaves::grad(const std::string& name) const {
    return tape_->grad(id(name));
}

}  // namespace psa::nets
