// signature.cpp - hierarchy validation, glb memoization, appropriateness
#include "tfs/signature.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

namespace tfs {

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += "'" + names[i] + "'";
  }
  return out;
}

}  // namespace

TypeId Signature::type_id(const std::string& name) const {
  auto it = ids_.find(name);
  return it == ids_.end() ? kNoType : it->second;
}

FeatId Signature::feature_id(const std::string& name) const {
  auto it = feat_ids_.find(lower(name));
  return it == feat_ids_.end() ? -1 : it->second;
}

std::optional<TypeId> Signature::approp(TypeId t, FeatId f) const {
  const auto& m = approp_[t];
  auto it = m.find(f);
  if (it == m.end()) return std::nullopt;
  return it->second;
}

std::vector<TypeId> Signature::minimal_subtypes(TypeId t) const {
  std::vector<TypeId> out;
  const int n = type_count();
  for (TypeId s = 0; s < n; ++s) {
    if (children_[s].empty() && subsumed_[s * n + t]) out.push_back(s);
  }
  return out;
}

Signature Signature::build(const std::vector<TypeDecl>& decls, WorldMode mode) {
  Signature sig;
  sig.mode_ = mode;

  // ---- intern types; universal type first ----
  auto intern = [&sig](const std::string& name) -> TypeId {
    auto it = sig.ids_.find(name);
    if (it != sig.ids_.end()) return it->second;
    TypeId id = static_cast<TypeId>(sig.names_.size());
    sig.names_.push_back(name);
    sig.ids_[name] = id;
    return id;
  };
  intern("top");

  std::set<std::string> declared;
  for (const auto& d : decls) {
    if (d.name == "top") {
      throw GrammarError(
          "the type name 'top' is reserved for the universal type and "
          "cannot be declared");
    }
    if (!declared.insert(d.name).second) {
      throw GrammarError("type '" + d.name + "' is declared more than once");
    }
    intern(d.name);
  }
  for (const auto& d : decls) {
    for (const auto& s : d.subtypes) {
      if (!declared.count(s)) {
        throw GrammarError("type '" + s + "' is listed as a subtype of '" +
                           d.name + "' but never declared");
      }
    }
  }

  const int n = sig.type_count();
  sig.parents_.assign(n, {});
  sig.children_.assign(n, {});
  for (const auto& d : decls) {
    TypeId t = sig.ids_[d.name];
    for (const auto& s : d.subtypes) {
      TypeId c = sig.ids_[s];
      // tolerate a repeated listing of the same child under one parent
      if (std::find(sig.children_[t].begin(), sig.children_[t].end(), c) !=
          sig.children_[t].end()) {
        continue;
      }
      sig.children_[t].push_back(c);
      sig.parents_[c].push_back(t);
    }
  }
  // orphan roots become immediate subtypes of the universal type
  for (TypeId t = 1; t < n; ++t) {
    if (sig.parents_[t].empty()) {
      sig.children_[0].push_back(t);
      sig.parents_[t].push_back(0);
    }
  }

  // ---- cycle check + topological order (parents before children) ----
  std::vector<int> state(n, 0);  // 0 unvisited, 1 on stack, 2 done
  std::vector<TypeId> topo;
  std::function<void(TypeId)> visit = [&](TypeId t) {
    if (state[t] == 2) return;
    if (state[t] == 1) {
      throw GrammarError("subtype cycle involving type '" + sig.names_[t] +
                         "'");
    }
    state[t] = 1;
    for (TypeId c : sig.children_[t]) visit(c);
    state[t] = 2;
    topo.push_back(t);
  };
  visit(0);
  for (TypeId t = 1; t < n; ++t) {
    if (state[t] == 0) {
      // unreachable from top is impossible (orphans were attached), but a
      // node inside a cycle detached from top would be
      visit(t);
    }
  }
  std::reverse(topo.begin(), topo.end());

  // ---- transitive closure: subsumed_[a*n+b] iff a at/below b ----
  sig.subsumed_.assign(static_cast<size_t>(n) * n, 0);
  // process children-before-parents (reverse topo)
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    TypeId t = *it;
    sig.subsumed_[static_cast<size_t>(t) * n + t] = 1;
    for (TypeId c : sig.children_[t]) {
      for (TypeId b = 0; b < n; ++b) {
        if (sig.subsumed_[static_cast<size_t>(b) * n + c]) {
          sig.subsumed_[static_cast<size_t>(b) * n + t] = 1;
        }
      }
    }
  }

  // ---- glb table; bounded completeness check ----
  sig.glb_.assign(static_cast<size_t>(n) * n, kNoType);
  std::vector<TypeId> common;
  for (TypeId a = 0; a < n; ++a) {
    for (TypeId b = a; b < n; ++b) {
      common.clear();
      for (TypeId t = 0; t < n; ++t) {
        if (sig.subsumed_[static_cast<size_t>(t) * n + a] &&
            sig.subsumed_[static_cast<size_t>(t) * n + b]) {
          common.push_back(t);
        }
      }
      if (common.empty()) continue;
      std::vector<TypeId> maximal;
      for (TypeId m : common) {
        bool has_upper = false;
        for (TypeId u : common) {
          if (u != m && sig.subsumed_[static_cast<size_t>(m) * n + u]) {
            has_upper = true;
            break;
          }
        }
        if (!has_upper) maximal.push_back(m);
      }
      if (maximal.size() != 1) {
        std::vector<std::string> mnames;
        for (TypeId m : maximal) mnames.push_back(sig.names_[m]);
        std::sort(mnames.begin(), mnames.end());
        throw GrammarError("no unique greatest lower bound for types '" +
                           sig.names_[a] + "' and '" + sig.names_[b] +
                           "': maximal common subtypes are " +
                           join_names(mnames));
      }
      sig.glb_[static_cast<size_t>(a) * n + b] = maximal[0];
      sig.glb_[static_cast<size_t>(b) * n + a] = maximal[0];
    }
  }

  // ---- appropriateness: inherit, merge, narrow ----
  auto feat_intern = [&sig](const std::string& name) -> FeatId {
    std::string key = lower(name);
    auto it = sig.feat_ids_.find(key);
    if (it != sig.feat_ids_.end()) return it->second;
    FeatId id = static_cast<FeatId>(sig.feat_names_.size());
    sig.feat_names_.push_back(key);
    sig.feat_ids_[key] = id;
    return id;
  };

  std::map<std::string, const TypeDecl*> decl_by_name;
  for (const auto& d : decls) decl_by_name[d.name] = &d;

  sig.approp_.assign(n, {});
  sig.feat_order_.assign(n, {});
  for (TypeId t : topo) {
    auto& eff = sig.approp_[t];
    auto& order = sig.feat_order_[t];
    auto put = [&](FeatId f, TypeId v) {
      if (!eff.count(f)) order.push_back(f);
      eff[f] = v;
    };
    for (TypeId p : sig.parents_[t]) {
      for (FeatId f : sig.feat_order_[p]) {
        TypeId v = sig.approp_[p].at(f);
        auto it = eff.find(f);
        if (it == eff.end()) {
          put(f, v);
        } else {
          TypeId g = sig.glb_[static_cast<size_t>(it->second) * n + v];
          if (g == kNoType) {
            throw GrammarError(
                "type '" + sig.names_[t] + "' inherits incompatible value "
                "types for feature '" + sig.feat_names_[f] + "': '" +
                sig.names_[it->second] + "' and '" + sig.names_[v] + "'");
          }
          it->second = g;
        }
      }
    }
    auto dit = decl_by_name.find(sig.names_[t]);
    if (dit != decl_by_name.end()) {
      for (const auto& [fname, vname] : dit->second->approps) {
        FeatId f = feat_intern(fname);
        TypeId v = sig.type_id(vname);
        if (v == kNoType) {
          throw GrammarError("feature '" + fname + "' on type '" +
                             sig.names_[t] + "' has undeclared value type '" +
                             vname + "'");
        }
        auto it = eff.find(f);
        if (it == eff.end()) {
          put(f, v);
        } else if (sig.subsumed_[static_cast<size_t>(v) * n + it->second]) {
          it->second = v;  // narrowing (or restating) the inherited value
        } else {
          throw GrammarError(
              "feature '" + fname + "' on type '" + sig.names_[t] +
              "' redeclares value type '" + vname +
              "', which does not narrow the inherited '" +
              sig.names_[it->second] + "'");
        }
      }
    }
  }

  // ---- closed world: infer specs shared by all species of a type ----
  if (mode == WorldMode::kClosed) {
    const int fcount = sig.feature_count();
    for (TypeId t = 0; t < n; ++t) {
      if (sig.children_[t].empty()) continue;
      std::vector<TypeId> species = sig.minimal_subtypes(t);
      if (species.empty()) continue;
      for (FeatId f = 0; f < fcount; ++f) {
        if (sig.approp_[t].count(f)) continue;
        bool all = true;
        std::vector<TypeId> values;
        for (TypeId s : species) {
          auto it = sig.approp_[s].find(f);
          if (it == sig.approp_[s].end()) {
            all = false;
            break;
          }
          values.push_back(it->second);
        }
        if (!all) continue;
        // unique minimal common supertype of the species' value types
        std::vector<TypeId> cands;
        for (TypeId u = 0; u < n; ++u) {
          bool above_all = true;
          for (TypeId v : values) {
            if (!sig.subsumed_[static_cast<size_t>(v) * n + u]) {
              above_all = false;
              break;
            }
          }
          if (above_all) cands.push_back(u);
        }
        std::vector<TypeId> minimal;
        for (TypeId m : cands) {
          bool has_lower = false;
          for (TypeId u : cands) {
            if (u != m && sig.subsumed_[static_cast<size_t>(u) * n + m]) {
              has_lower = true;
              break;
            }
          }
          if (!has_lower) minimal.push_back(m);
        }
        if (minimal.size() == 1) {
          sig.approp_[t][f] = minimal[0];
          sig.feat_order_[t].push_back(f);
        }
      }
    }
  }

  // ---- feature introduction condition ----
  const int fcount = sig.feature_count();
  sig.introducer_.assign(fcount, kNoType);
  for (FeatId f = 0; f < fcount; ++f) {
    std::vector<TypeId> carriers;
    for (TypeId t = 0; t < n; ++t) {
      if (sig.approp_[t].count(f)) carriers.push_back(t);
    }
    std::vector<TypeId> maximal;
    for (TypeId m : carriers) {
      bool has_upper = false;
      for (TypeId u : carriers) {
        if (u != m && sig.subsumed_[static_cast<size_t>(m) * n + u]) {
          has_upper = true;
          break;
        }
      }
      if (!has_upper) maximal.push_back(m);
    }
    if (maximal.size() == 1) {
      sig.introducer_[f] = maximal[0];
    } else {
      std::vector<std::string> names;
      for (TypeId m : maximal) names.push_back(sig.names_[m]);
      std::sort(names.begin(), names.end());
      sig.fic_violations_[sig.feat_names_[f]] = names;
    }
  }

  // ---- appropriateness expansion must terminate ----
  {
    std::vector<int> st(n, 0);
    std::vector<TypeId> path;
    std::function<void(TypeId)> expand = [&](TypeId t) {
      if (st[t] == 2) return;
      if (st[t] == 1) {
        std::ostringstream os;
        os << "appropriateness expansion cycle: ";
        bool in_cycle = false;
        for (TypeId p : path) {
          if (p == t) in_cycle = true;
          if (in_cycle) os << "'" << sig.names_[p] << "' -> ";
        }
        os << "'" << sig.names_[t] << "'";
        throw GrammarError(os.str());
      }
      st[t] = 1;
      path.push_back(t);
      for (FeatId f : sig.feat_order_[t]) expand(sig.approp_[t].at(f));
      path.pop_back();
      st[t] = 2;
    };
    for (TypeId t = 0; t < n; ++t) expand(t);
  }

  return sig;
}

}  // namespace tfs
