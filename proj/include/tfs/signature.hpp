// signature.hpp - type hierarchy: bounded-complete partial order with
// appropriateness conditions (feature introduction, inheritance, narrowing)
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tfs/common.hpp"

namespace tfs {

// One `T sub [S1,...] intro [f1:V1,...]` declaration.
struct TypeDecl {
  std::string name;
  std::vector<std::string> subtypes;
  // feature name -> value type name, in declaration order
  std::vector<std::pair<std::string, std::string>> approps;
};

enum class WorldMode { kOpen, kClosed };

// A validated type hierarchy with memoized greatest lower bounds and
// fully inherited appropriateness specifications.
//
// The universal most-general type is always present under the reserved
// name "top" (id 0); user declarations may reference it in descriptions
// but must not declare it. Declared types that appear in nobody's
// subtype list become immediate subtypes of top.
class Signature {
 public:
  // Validates and builds. Throws GrammarError on: duplicate or missing
  // declarations, subtype cycles, non-unique greatest lower bounds
  // (message names the offending pair and its maximal common subtypes),
  // appropriateness widening or value-type conflicts, and
  // appropriateness expansion cycles (which would make most-general
  // satisfiers infinite). Feature-introduction violations do not throw;
  // query them with fic_violations().
  static Signature build(const std::vector<TypeDecl>& decls,
                         WorldMode mode = WorldMode::kOpen);

  WorldMode mode() const { return mode_; }

  // ---- types ----
  TypeId top() const { return 0; }
  int type_count() const { return static_cast<int>(names_.size()); }
  const std::string& type_name(TypeId t) const { return names_[t]; }
  // kNoType when unknown.
  TypeId type_id(const std::string& name) const;
  bool is_species(TypeId t) const { return children_[t].empty(); }
  const std::vector<TypeId>& subtypes_of(TypeId t) const {
    return children_[t];
  }
  const std::vector<TypeId>& supertypes_of(TypeId t) const {
    return parents_[t];
  }

  // a is at or below b.
  bool is_subtype(TypeId a, TypeId b) const {
    return subsumed_[a * type_count() + b];
  }
  // Most general common subtype; kNoType when the two are inconsistent.
  TypeId glb(TypeId a, TypeId b) const { return glb_[a * type_count() + b]; }
  // All species at or below t, in id order.
  std::vector<TypeId> minimal_subtypes(TypeId t) const;

  // ---- features ----
  int feature_count() const { return static_cast<int>(feat_names_.size()); }
  const std::string& feature_name(FeatId f) const { return feat_names_[f]; }
  // Case-insensitive; kNoType (-1) when unknown.
  FeatId feature_id(const std::string& name) const;

  // Appropriate value type of f at t, fully inherited; nullopt when f is
  // not appropriate to t. In closed world this includes specs inferred
  // from species.
  std::optional<TypeId> approp(TypeId t, FeatId f) const;
  // Features appropriate to t in introduction order (stable across runs).
  const std::vector<FeatId>& features_of(TypeId t) const {
    return feat_order_[t];
  }
  // The unique most general type carrying f; kNoType if f violates the
  // feature-introduction condition.
  TypeId introducer(FeatId f) const { return introducer_[f]; }

  // Feature-introduction condition violations: for each offending
  // feature, the set of incomparable most-general carriers.
  const std::map<std::string, std::vector<std::string>>& fic_violations()
      const {
    return fic_violations_;
  }

 private:
  Signature() = default;

  WorldMode mode_ = WorldMode::kOpen;
  std::vector<std::string> names_;
  std::map<std::string, TypeId> ids_;
  std::vector<std::vector<TypeId>> parents_;
  std::vector<std::vector<TypeId>> children_;
  std::vector<char> subsumed_;  // subsumed_[a*n+b]: a is at/below b
  std::vector<TypeId> glb_;

  std::vector<std::string> feat_names_;
  std::map<std::string, FeatId> feat_ids_;
  // approp_[t]: feature -> value type (effective, inherited)
  std::vector<std::map<FeatId, TypeId>> approp_;
  std::vector<std::vector<FeatId>> feat_order_;
  std::vector<TypeId> introducer_;
  std::map<std::string, std::vector<std::string>> fic_violations_;
};

}  // namespace tfs
