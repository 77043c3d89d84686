// description.hpp - constraint-language tokenizer, description AST, macro
// expansion, disjunction lifting, and compilation onto feature graphs
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tfs/common.hpp"
#include "tfs/feature_structure.hpp"
#include "tfs/signature.hpp"

namespace tfs {

// ---------------------------------------------------------------------------
// tokens
// ---------------------------------------------------------------------------

enum class TokKind {
  kIdent,    // lower-case identifier: type, feature, macro or predicate name
  kVar,      // capitalized identifier, or _ / _Name (anonymous)
  kInt,      // unsigned integer literal
  kPunct,    // one of ( ) [ ] , ; : | @ . > plus multi-char operators
  kEnd,      // end of input
};

struct Token {
  TokKind kind = TokKind::kEnd;
  std::string text;
  int line = 0;
};

// Tokenizes a whole source; '%' starts a comment running to end of line.
// Multi-char operators produced as single tokens: ---> ===> **> :- .
std::vector<Token> tokenize(const std::string& src, const std::string& what);

// ---------------------------------------------------------------------------
// description AST
// ---------------------------------------------------------------------------

struct Desc;
using DescPtr = std::shared_ptr<Desc>;

struct Desc {
  enum Kind {
    kType,   // name
    kVar,    // name (capitalized); anonymous variables get fresh names "_#n"
    kFeat,   // name = feature, kids[0] = value description
    kConj,   // kids, left to right
    kDisj,   // kids[0] ; kids[1]
    kMacro,  // name, kids = arguments
  };
  Kind kind;
  std::string name;
  std::vector<DescPtr> kids;
  int line = 0;
};

DescPtr make_type(std::string name, int line = 0);
DescPtr make_var(std::string name, int line = 0);
DescPtr make_feat(std::string feat, DescPtr value, int line = 0);
DescPtr make_conj(std::vector<DescPtr> kids, int line = 0);
DescPtr make_disj(DescPtr a, DescPtr b, int line = 0);
DescPtr make_macro(std::string name, std::vector<DescPtr> args, int line = 0);

// Renders an AST back to description syntax (diagnostics, round-trips).
std::string desc_to_string(const Desc& d);

// Parses one description from token range [pos, end); advances pos.
// List sugar [A,B|T] is desugared during parsing. Anonymous variables are
// given fresh names. Throws GrammarError with line info on syntax errors.
class DescParser {
 public:
  DescParser(const std::vector<Token>& toks, size_t pos, size_t end);
  DescPtr parse();        // full description (disjunction level)
  DescPtr parse_prim();   // one primary (macro-argument / list-element level)
  size_t pos() const { return pos_; }

 private:
  DescPtr parse_disj();
  DescPtr parse_conj();
  DescPtr parse_primary();
  DescPtr parse_list();
  const Token& cur() const;
  const Token& next();
  bool at_punct(const std::string& p) const;
  void expect_punct(const std::string& p, const std::string& where);
  [[noreturn]] void fail(const std::string& msg) const;

  const std::vector<Token>& toks_;
  size_t pos_;
  size_t end_;
  int anon_counter_ = 0;
};

// Convenience: parse a complete description from text (for tests/tools).
DescPtr parse_description(const std::string& text);

// ---------------------------------------------------------------------------
// macros
// ---------------------------------------------------------------------------

struct MacroDef {
  std::string name;
  std::vector<std::string> params;  // capitalized parameter names
  DescPtr body;
  int line = 0;
};

// Keyed by name/arity; same name with different arities may coexist.
class MacroTable {
 public:
  // Throws on duplicate name/arity.
  void add(MacroDef def);
  const MacroDef* find(const std::string& name, size_t arity) const;
  size_t size() const { return defs_.size(); }

 private:
  std::map<std::pair<std::string, size_t>, MacroDef> defs_;
};

// Replaces every macro call by its body with parameters substituted
// syntactically and body-local variables renamed apart per call site.
// Throws on unknown macro or on runaway expansion (depth guard).
DescPtr expand_macros(const DescPtr& d, const MacroTable& macros);

// ---------------------------------------------------------------------------
// disjunction lifting and compilation
// ---------------------------------------------------------------------------

// Distributes all disjunctions to the top, left-to-right: the result is a
// list of disjunction-free descriptions in distribution order.
std::vector<DescPtr> lift_disjunction(const DescPtr& d);

// Variable environment shared across the parts of one statement.
using VarEnv = std::map<std::string, NodeId>;

// Compiles a disjunction-free, macro-free description onto graph node
// `at` (promoting types, adding features via their introducers, binding
// variables). Returns false on inconsistency (graph then needs trail
// undo by the caller). Throws GrammarError for unknown types/features.
bool compile_desc(Graph& g, NodeId at, const Desc& d, VarEnv& env);

// Compiles one description into a fresh node of graph g. Returns the new
// root, or kNoNode on inconsistency (failed side effects undone).
NodeId compile_one(Graph& g, const DescPtr& d, VarEnv& env);

// Full pipeline on a fresh root per alternative: expand macros, lift
// disjunctions, compile each alternative in order; inconsistent
// alternatives are dropped. Each surviving alternative gets its own copy
// of the environment.
struct CompiledAlt {
  NodeId root;
  VarEnv env;
};
std::vector<CompiledAlt> compile_all(Graph& g, const DescPtr& d,
                                     const MacroTable& macros,
                                     const VarEnv& env = {});

}  // namespace tfs
