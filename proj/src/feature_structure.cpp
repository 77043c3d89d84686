// feature_structure.cpp - graph unification engine
#include "tfs/feature_structure.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace tfs {

NodeId Graph::new_node(TypeId t) {
  NodeId id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{t, kNoNode, {}});
  // materialize the full skeleton eagerly; expansion-acyclicity of the
  // signature bounds the recursion
  for (FeatId f : sig_->features_of(t)) {
    NodeId v = new_node(*sig_->approp(t, f));
    nodes_[id].arcs.push_back(Arc{f, v});
  }
  return id;
}

NodeId Graph::deref(NodeId n) const {
  while (nodes_[n].forward != kNoNode) n = nodes_[n].forward;
  return n;
}

NodeId Graph::arc_value(NodeId n, FeatId f) const {
  const Node& node = nodes_[deref(n)];
  for (const Arc& a : node.arcs) {
    if (a.feat == f) return deref(a.value);
  }
  return kNoNode;
}

std::vector<Arc> Graph::sorted_arcs(NodeId n) const {
  std::vector<Arc> out = nodes_[deref(n)].arcs;
  for (Arc& a : out) a.value = deref(a.value);
  std::sort(out.begin(), out.end(), [this](const Arc& x, const Arc& y) {
    return sig_->feature_name(x.feat) < sig_->feature_name(y.feat);
  });
  return out;
}

void Graph::undo(size_t mark) {
  while (trail_.size() > mark) {
    const TrailEntry& e = trail_.back();
    Node& node = nodes_[e.node];
    switch (e.kind) {
      case TrailEntry::kForward:
        node.forward = kNoNode;
        break;
      case TrailEntry::kType:
        node.type = e.old_type;
        break;
      case TrailEntry::kArcPush:
        node.arcs.pop_back();
        break;
    }
    trail_.pop_back();
  }
}

bool Graph::unify(NodeId a, NodeId b) {
  size_t start = trail_.size();
  // inner worklist-free recursive unification
  struct Rec {
    Graph& g;
    bool run(NodeId a, NodeId b) {
      a = g.deref(a);
      b = g.deref(b);
      if (a == b) return true;
      TypeId glb = g.sig_->glb(g.nodes_[a].type, g.nodes_[b].type);
      if (glb == kNoType) return false;
      g.trail_.push_back({TrailEntry::kForward, b, kNoType});
      g.nodes_[b].forward = a;
      if (g.nodes_[a].type != glb) {
        g.trail_.push_back({TrailEntry::kType, a, g.nodes_[a].type});
        g.nodes_[a].type = glb;
      }
      // merge b's arcs into a (b is already forwarded, so re-entrant
      // unifications of the same pair terminate immediately)
      const size_t b_arc_count = g.nodes_[b].arcs.size();
      for (size_t i = 0; i < b_arc_count; ++i) {
        Arc barc = g.nodes_[b].arcs[i];
        NodeId ra = g.deref(a);
        NodeId existing = kNoNode;
        for (const Arc& aarc : g.nodes_[ra].arcs) {
          if (aarc.feat == barc.feat) {
            existing = aarc.value;
            break;
          }
        }
        if (existing == kNoNode) {
          g.trail_.push_back({TrailEntry::kArcPush, ra, kNoType});
          g.nodes_[ra].arcs.push_back(barc);
        } else if (!run(existing, barc.value)) {
          return false;
        }
      }
      return g.well_type(a);
    }
  } rec{*this};
  if (!rec.run(a, b)) return false;
  if (sig_->mode() == WorldMode::kClosed) {
    return closed_world_fixpoint(start);
  }
  return true;
}

// Re-establishes total well-typing at n after its type narrowed: adds
// newly appropriate features and promotes misfitting values.
bool Graph::well_type(NodeId n) {
  n = deref(n);
  TypeId t = nodes_[n].type;
  for (FeatId f : sig_->features_of(t)) {
    TypeId target = *sig_->approp(t, f);
    NodeId ra = deref(n);
    NodeId v = kNoNode;
    for (const Arc& a : nodes_[ra].arcs) {
      if (a.feat == f) {
        v = deref(a.value);
        break;
      }
    }
    if (v == kNoNode) {
      NodeId fresh = new_node(target);
      ra = deref(n);
      trail_.push_back({TrailEntry::kArcPush, ra, kNoType});
      nodes_[ra].arcs.push_back(Arc{f, fresh});
    } else if (!sig_->is_subtype(type_of(v), target)) {
      if (!promote(v, target)) return false;
    }
  }
  return true;
}

bool Graph::promote(NodeId n, TypeId t) {
  n = deref(n);
  TypeId glb = sig_->glb(nodes_[n].type, t);
  if (glb == kNoType) return false;
  if (glb == nodes_[n].type) return true;
  size_t start = trail_.size();
  trail_.push_back({TrailEntry::kType, n, nodes_[n].type});
  nodes_[n].type = glb;
  if (!well_type(n)) return false;
  if (sig_->mode() == WorldMode::kClosed) {
    return closed_world_fixpoint(start);
  }
  return true;
}

NodeId Graph::ensure_feature(NodeId n, FeatId f) {
  if (f < 0) return kNoNode;
  n = deref(n);
  if (!sig_->approp(nodes_[n].type, f)) {
    TypeId intro = sig_->introducer(f);
    if (intro == kNoType) return kNoNode;
    if (!promote(n, intro)) return kNoNode;
  }
  return arc_value(n, f);
}

// Species s is (shallowly) compatible with n's current feature values.
bool Graph::species_consistent(NodeId n, TypeId s) const {
  n = deref(n);
  for (const Arc& a : nodes_[n].arcs) {
    auto target = sig_->approp(s, a.feat);
    if (!target) return false;
    if (sig_->glb(type_of(a.value), *target) == kNoType) return false;
  }
  return true;
}

// Closed world: a node whose feature values rule out all but one species
// is promoted to it; a node compatible with no species fails. Changes
// re-enter the worklist until quiescent.
bool Graph::closed_world_fixpoint(size_t from_mark) {
  while (true) {
    std::set<NodeId> touched;
    for (size_t i = from_mark; i < trail_.size(); ++i) {
      touched.insert(deref(trail_[i].node));
    }
    from_mark = trail_.size();
    bool changed = false;
    for (NodeId n : touched) {
      n = deref(n);
      TypeId t = nodes_[n].type;
      if (sig_->is_species(t)) continue;
      std::vector<TypeId> species = sig_->minimal_subtypes(t);
      TypeId sole = kNoType;
      int consistent = 0;
      for (TypeId s : species) {
        if (species_consistent(n, s)) {
          ++consistent;
          sole = s;
          if (consistent > 1) break;
        }
      }
      if (consistent == 0) return false;
      if (consistent == 1 && sole != t) {
        size_t before = trail_.size();
        trail_.push_back({TrailEntry::kType, n, nodes_[n].type});
        nodes_[n].type = sole;
        if (!well_type(n)) return false;
        (void)before;
        changed = true;
      }
    }
    if (!changed) return true;
  }
}

NodeId Graph::copy_from(const Graph& src, NodeId root) {
  return copy_from_many(src, {root})[0];
}

std::vector<NodeId> Graph::copy_from_many(const Graph& src,
                                          const std::vector<NodeId>& roots) {
  std::map<NodeId, NodeId> map;
  // iterative DFS: create node on first visit, fill arcs afterwards
  struct Frame {
    NodeId src_node;
  };
  std::function<NodeId(NodeId)> go = [&](NodeId s) -> NodeId {
    s = src.deref(s);
    auto it = map.find(s);
    if (it != map.end()) return it->second;
    NodeId d = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(Node{src.nodes_[s].type, kNoNode, {}});
    map[s] = d;
    for (const Arc& a : src.nodes_[s].arcs) {
      NodeId dv = go(a.value);
      nodes_[d].arcs.push_back(Arc{a.feat, dv});
    }
    return d;
  };
  std::vector<NodeId> out;
  out.reserve(roots.size());
  for (NodeId r : roots) out.push_back(go(r));
  return out;
}

std::optional<NodeId> unify_copy(Graph& g, NodeId a, NodeId b) {
  auto copies = g.copy_from_many(g, {a, b});
  size_t mark = g.mark();
  if (g.unify(copies[0], copies[1])) return g.deref(copies[0]);
  g.undo(mark);
  return std::nullopt;
}

bool subsumes(const Graph& ga, NodeId a, const Graph& gb, NodeId b) {
  std::map<NodeId, NodeId> map;  // a-node -> b-node
  std::function<bool(NodeId, NodeId)> go = [&](NodeId x, NodeId y) -> bool {
    x = ga.deref(x);
    y = gb.deref(y);
    auto it = map.find(x);
    if (it != map.end()) return it->second == y;
    map[x] = y;
    if (!ga.sig().is_subtype(gb.type_of(y), ga.type_of(x))) return false;
    for (const Arc& arc : ga.sorted_arcs(x)) {
      NodeId yv = gb.arc_value(y, arc.feat);
      if (yv == kNoNode) return false;
      if (!go(arc.value, yv)) return false;
    }
    return true;
  };
  return go(a, b);
}

bool iso(const Graph& ga, NodeId a, const Graph& gb, NodeId b) {
  std::map<NodeId, NodeId> fwd, bwd;
  std::function<bool(NodeId, NodeId)> go = [&](NodeId x, NodeId y) -> bool {
    x = ga.deref(x);
    y = gb.deref(y);
    auto it = fwd.find(x);
    if (it != fwd.end()) return it->second == y;
    auto jt = bwd.find(y);
    if (jt != bwd.end()) return false;  // y already matched to another node
    fwd[x] = y;
    bwd[y] = x;
    if (ga.type_of(x) != gb.type_of(y)) return false;
    auto xa = ga.sorted_arcs(x);
    auto ya = gb.sorted_arcs(y);
    if (xa.size() != ya.size()) return false;
    for (size_t i = 0; i < xa.size(); ++i) {
      if (xa[i].feat != ya[i].feat) return false;
      if (!go(xa[i].value, ya[i].value)) return false;
    }
    return true;
  };
  return go(a, b);
}

NodeId path_value(const Graph& g, NodeId root,
                  const std::vector<std::string>& path) {
  NodeId n = g.deref(root);
  for (const std::string& fname : path) {
    FeatId f = g.sig().feature_id(fname);
    if (f < 0) return kNoNode;
    n = g.arc_value(n, f);
    if (n == kNoNode) return kNoNode;
  }
  return n;
}

// ---------------------------------------------------------------------------
// printing
// ---------------------------------------------------------------------------

namespace {

struct AvmPrinter {
  const Graph& g;
  bool pretty;
  std::map<NodeId, int> shared;   // node -> tag number (assigned pre-pass)
  std::set<NodeId> emitted;
  std::ostringstream out;
  int next_tag = 1;

  void find_shared(NodeId root) {
    std::map<NodeId, int> visits;
    std::set<NodeId> on_path;
    std::function<void(NodeId)> go = [&](NodeId n) {
      n = g.deref(n);
      ++visits[n];
      if (visits[n] > 1) return;
      on_path.insert(n);
      for (const Arc& a : g.sorted_arcs(n)) go(a.value);
      on_path.erase(n);
    };
    go(root);
    // assign tags in first-encounter order of a second deterministic pass
    std::set<NodeId> seen;
    std::function<void(NodeId)> assign = [&](NodeId n) {
      n = g.deref(n);
      if (!seen.insert(n).second) return;
      if (visits[n] > 1) shared[n] = next_tag++;
      for (const Arc& a : g.sorted_arcs(n)) assign(a.value);
    };
    assign(root);
  }

  void indent(int depth) {
    if (pretty) {
      out << "\n";
      for (int i = 0; i < depth; ++i) out << "  ";
    }
  }

  void emit(NodeId n, int depth) {
    n = g.deref(n);
    auto sh = shared.find(n);
    if (sh != shared.end() && emitted.count(n)) {
      out << "X" << sh->second;
      return;
    }
    if (sh != shared.end()) emitted.insert(n);
    auto arcs = g.sorted_arcs(n);
    const std::string& tname = g.sig().type_name(g.type_of(n));
    bool tagged = sh != shared.end();
    if (arcs.empty() && !tagged) {
      out << tname;
      return;
    }
    out << "(";
    if (tagged) out << "X" << sh->second << ", ";
    out << tname;
    for (const Arc& a : arcs) {
      out << ",";
      indent(depth + 1);
      out << " " << g.sig().feature_name(a.feat) << ":";
      emit(a.value, depth + 1);
    }
    out << ")";
  }
};

}  // namespace

std::string print_avm(const Graph& g, NodeId root, bool pretty) {
  AvmPrinter p{g, pretty};
  p.find_shared(root);
  p.emit(root, 0);
  return p.out.str();
}

}  // namespace tfs
