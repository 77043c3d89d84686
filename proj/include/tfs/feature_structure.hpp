// feature_structure.hpp - typed feature graphs: union-find unification
// without occurs check, total well-typing, subsumption, copying, printing
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tfs/common.hpp"
#include "tfs/signature.hpp"

namespace tfs {

struct Arc {
  FeatId feat;
  NodeId value;
};

// An arena of graph nodes over one signature. Mutation is destructive and
// trailed: callers take a mark, attempt work, and undo on failure or
// backtracking. Nodes are never removed; undone nodes simply become
// unreferenced.
class Graph {
 public:
  explicit Graph(const Signature& sig) : sig_(&sig) {}

  const Signature& sig() const { return *sig_; }

  // Most general satisfier: a fresh node of type t with every appropriate
  // feature materialized recursively (finite by the signature's
  // expansion-acyclicity check).
  NodeId new_node(TypeId t);

  NodeId deref(NodeId n) const;
  TypeId type_of(NodeId n) const { return nodes_[deref(n)].type; }
  // Value of feature f at n; kNoNode when absent.
  NodeId arc_value(NodeId n, FeatId f) const;
  // Arcs of the dereferenced node, sorted by feature name.
  std::vector<Arc> sorted_arcs(NodeId n) const;

  size_t node_count() const { return nodes_.size(); }

  // ---- trail ----
  size_t mark() const { return trail_.size(); }
  void undo(size_t mark);

  // ---- destructive operations (trailed; on failure the graph is left
  // partially modified and the caller must undo to its mark) ----

  // Unifies in place. In closed world additionally drives species
  // promotion to a fixpoint over the touched nodes.
  bool unify(NodeId a, NodeId b);

  // Narrows n's type to glb(type(n), t) and re-well-types.
  bool promote(NodeId n, TypeId t);

  // Makes feature f present on n, promoting n to the feature's introducer
  // first when necessary. Returns the value node, kNoNode on failure
  // (unknown feature or inconsistent promotion is a failure, not a throw).
  NodeId ensure_feature(NodeId n, FeatId f);

  // ---- copying (results are quiescent: no forwarded nodes) ----
  NodeId copy(NodeId root) { return copy_from(*this, root); }
  NodeId copy_from(const Graph& src, NodeId root);
  // Joint copy preserving sharing between the roots.
  std::vector<NodeId> copy_from_many(const Graph& src,
                                     const std::vector<NodeId>& roots);

 private:
  struct Node {
    TypeId type;
    NodeId forward = kNoNode;
    std::vector<Arc> arcs;
  };
  struct TrailEntry {
    enum Kind { kForward, kType, kArcPush } kind;
    NodeId node;
    TypeId old_type;  // kType only
  };

  bool well_type(NodeId n);
  bool closed_world_fixpoint(size_t from_mark);
  bool species_consistent(NodeId n, TypeId s) const;

  const Signature* sig_;
  std::vector<Node> nodes_;
  std::vector<TrailEntry> trail_;
};

// Functional unification: copies a and b jointly (inputs not observably
// modified), unifies the copies, returns the result root or nullopt.
std::optional<NodeId> unify_copy(Graph& g, NodeId a, NodeId b);

// a is at least as general as b (every arc and sharing of a is matched in
// b, with types at or below a's).
bool subsumes(const Graph& ga, NodeId a, const Graph& gb, NodeId b);

// Structural isomorphism (type-equal bijection).
bool iso(const Graph& ga, NodeId a, const Graph& gb, NodeId b);

// Follows a feature path; kNoNode when some feature is absent/unknown.
NodeId path_value(const Graph& g, NodeId root,
                  const std::vector<std::string>& path);

// Deterministic description-syntax rendering: features sorted by name,
// shared/cyclic nodes introduced as (Xn, ...) at first occurrence and
// referenced by tag afterwards. Compiling the output reproduces the
// structure up to isomorphism. pretty=true adds newlines and indentation.
std::string print_avm(const Graph& g, NodeId root, bool pretty = false);

}  // namespace tfs
