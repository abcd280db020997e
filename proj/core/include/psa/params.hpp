#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "psa/tape.hpp"
#include "psa/tensor.hpp"

namespace psa::nets {

/// One named parameter array. `group` ties arrays to an update unit
/// ("encoder", "decoder_2", "attention_2", ...) so training can route
/// gradients and freeze whole subnetworks at once.
struct ParamArray {
    std::string name;
    std::string group;
    int ch = 0, h = 0, w = 0;
    std::vector<double> v;

    Tensor tensor() const;
};

/// Flat registry of parameter arrays keyed by unique name. Iteration order is
/// the registration order, which keeps checkpoints and hashes reproducible.
class ParamStore {
  public:
    /// Registers a new array filled with zeros. Throws on duplicate names.
    ParamArray& add(const std::string& name, const std::string& group, int ch, int h, int w);

    bool has(const std::string& name) const;
    ParamArray& at(const std::string& name);
    const ParamArray& at(const std::string& name) const;

    const std::vector<ParamArray>& arrays() const { return arrays_; }
    std::vector<ParamArray>& arrays() { return arrays_; }

    /// All distinct group labels, sorted.
    std::vector<std::string> groups() const;
    /// Names of arrays in a group, in registration order.
    std::vector<std::string> group_members(const std::string& group) const;
    bool has_group(const std::string& group) const;

    void freeze_group(const std::string& group);
    void unfreeze_group(const std::string& group);
    bool frozen(const std::string& group) const;
    const std::set<std::string>& frozen_groups() const { return frozen_; }

    std::size_t total_values() const;

    /// FNV-1a over the exact parameter bytes of one group (name, shape and
    /// payload). Equal hashes == bitwise-identical group contents.
    std::uint64_t group_hash(const std::string& group) const;
    /// FNV-1a over every array in registration order.
    std::uint64_t content_hash() const;

  private:
    std::vector<ParamArray> arrays_;
    std::map<std::string, std::size_t> index_;
    std::set<std::string> frozen_;
};

/// Bridges a ParamStore onto a Tape: every array becomes one leaf whose
/// requires_grad mirrors the group freeze state. After backward(), pull()
/// exposes per-array gradients (empty vector = exact zero).
class ParamLeaves {
  public:
    ParamLeaves(Tape& tape, const ParamStore& store);

    bool has(const std::string& name) const { return ids_.count(name) > 0; }
    int id(const std::string& name) const;
    const std::vector<double>& grad(const std::string& name) const;

  private:
    Tape* tape_;
    std::map<std::string, int> ids_;
};

}  // namespace psa::nets
