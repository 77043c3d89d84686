// lattice_oracle.hpp - brute-force partial-order reference, independent of
// the library implementation. Operates directly on name-level declarations.
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "tfs/signature.hpp"

namespace tfs_oracle {

// Name-level reachability and glb computed the slow, obvious way.
class LatticeOracle {
 public:
  explicit LatticeOracle(const std::vector<tfs::TypeDecl>& decls) {
    all_.insert("top");
    for (const auto& d : decls) {
      all_.insert(d.name);
      for (const auto& s : d.subtypes) {
        all_.insert(s);
        up_[s].insert(d.name);
      }
    }
    for (const auto& t : all_) {
      if (t != "top" && up_[t].empty()) up_[t].insert("top");
    }
  }

  // a at or below b, by exhaustive upward closure
  bool below(const std::string& a, const std::string& b) const {
    std::set<std::string> seen;
    std::vector<std::string> work{a};
    while (!work.empty()) {
      std::string t = work.back();
      work.pop_back();
      if (t == b) return true;
      if (!seen.insert(t).second) continue;
      auto it = up_.find(t);
      if (it == up_.end()) continue;
      for (const auto& p : it->second) work.push_back(p);
    }
    return false;
  }

  std::set<std::string> common_subtypes(const std::string& a,
                                        const std::string& b) const {
    std::set<std::string> out;
    for (const auto& t : all_) {
      if (below(t, a) && below(t, b)) out.insert(t);
    }
    return out;
  }

  // most general common subtypes (the would-be glb candidates)
  std::set<std::string> maximal_common(const std::string& a,
                                       const std::string& b) const {
    auto common = common_subtypes(a, b);
    std::set<std::string> out;
    for (const auto& m : common) {
      bool has_upper = false;
      for (const auto& u : common) {
        if (u != m && below(m, u)) {
          has_upper = true;
          break;
        }
      }
      if (!has_upper) out.insert(m);
    }
    return out;
  }

  // "" when inconsistent; throws logic nothing — callers check size first
  bool glb(const std::string& a, const std::string& b,
           std::string* out) const {
    auto mx = maximal_common(a, b);
    if (mx.size() != 1) return false;
    *out = *mx.begin();
    return true;
  }

  bool bcpo_ok() const {
    for (const auto& a : all_) {
      for (const auto& b : all_) {
        if (!common_subtypes(a, b).empty() && maximal_common(a, b).size() != 1)
          return false;
      }
    }
    return true;
  }

  std::set<std::string> species_below(const std::string& t) const {
    std::set<std::string> out;
    for (const auto& s : all_) {
      bool leaf = true;
      for (const auto& o : all_) {
        if (o != s && below(o, s)) {
          leaf = false;
          break;
        }
      }
      if (leaf && below(s, t)) out.insert(s);
    }
    return out;
  }

  const std::set<std::string>& all() const { return all_; }

 private:
  std::set<std::string> all_;
  std::map<std::string, std::set<std::string>> up_;  // type -> parents
};

}  // namespace tfs_oracle
