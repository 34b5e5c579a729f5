#pragma once

// Scenario files (.hsc): a line-oriented declarative description of a Hilbert
// space, its kets, unitaries, projectors, sample spaces, history families and
// the queries to run against them.
//
//   space dim = 2
//   ket z = (1, 0)
//   ket x = (0.7071067811865476, 0.7071067811865476)
//   unitary U = identity
//   unitary H = rows [ (0.7071067811865476, 0.7071067811865476);
//                      (0.7071067811865476, -0.7071067811865476) ]
//   projector zp = ket z
//   projector zm = not zp
//   projector I2 = identity
//   projector P = diag(1, 0)
//   projector S = sum zp zm
//   pdi Z = zp, zm
//   family F { initial = x; times = t0 t1; step t0->t1 = U; slot t1 = Z; }
//   query probs F
//
// Names start with a letter or '_' and may contain letters, digits, '_', '.',
// '\'', '+', and '-' (a '-' is not taken when it begins "->").

#include <complex>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "hlab/errors.hpp"

namespace hlab::scenario {

using Complex = std::complex<double>;

struct SourcePos {
  int line = 0;
  int column = 0;
};

/// Parse failure carrying the location of the offending text.
class ParseFailure : public Error {
 public:
  ParseFailure(ErrorCode code, SourcePos pos, const std::string& message)
      : Error(code, "line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column) +
                        ": " + message),
        pos_(pos) {}

  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

struct SpaceDecl {
  long dim = 0;
  SourcePos pos;
};

struct KetDecl {
  std::string name;
  std::vector<Complex> amplitudes;
  SourcePos pos;
};

struct UnitaryDecl {
  std::string name;
  bool identity = false;
  std::vector<std::vector<Complex>> rows;
  SourcePos pos;
};

struct ProjectorDecl {
  enum class Kind { FromKet, Sum, Diag, Not, Identity };
  std::string name;
  Kind kind = Kind::FromKet;
  std::vector<std::string> operands;  // ket name, summands, or negated projector
  std::vector<int> diagonal;
  SourcePos pos;
};

struct PdiDecl {
  std::string name;
  std::vector<std::string> elements;
  SourcePos pos;
};

struct StepDecl {
  std::string from;
  std::string to;
  std::string unitary;
  SourcePos pos;
};

struct SlotDecl {
  std::string time;
  std::string pdi;
  SourcePos pos;
};

struct FamilyDecl {
  std::string name;
  std::string initial;
  std::vector<std::string> times;
  std::vector<StepDecl> steps;  // ordered by time after parsing
  std::vector<SlotDecl> slots;  // ordered by time after parsing
  SourcePos pos;
};

/// Event written as `<time>=<label>[|<label>...]`. Each label is a slot
/// element, or a single declared projector that lies in the slot's algebra.
struct EventSpec {
  std::string time;
  std::vector<std::string> labels;
};

enum class QueryKind {
  Validate,     // validate
  Consistency,  // consistency <family>
  Probs,        // probs <family>
  Joint,        // joint <family> <ta> <tb>
  Marginal,     // marginal <family> <t>
  Condition,    // condition <family> <events> [given <events>]
  Compatible,   // compatible <pdi> <pdi>
  Refine,       // refine <pdi> <pdi>
  Classify,     // classify <family> <family>
  And,          // and <projector> <projector>
  Or,           // or <projector> <projector>
  Not,          // not <projector>
  Algebra,      // algebra <pdi>
  PreProb,      // preprob <ket> <projector>
};

std::string to_string(QueryKind kind);

struct QueryDecl {
  QueryKind kind = QueryKind::Validate;
  std::vector<std::string> names;  // referenced declarations, then times
  std::vector<EventSpec> targets;
  std::vector<EventSpec> givens;
  SourcePos pos;

  /// Canonical one-line rendering (without the leading "query").
  std::string text() const;
};

using Declaration =
    std::variant<SpaceDecl, KetDecl, UnitaryDecl, ProjectorDecl, PdiDecl, FamilyDecl, QueryDecl>;

struct ScenarioDocument {
  std::vector<Declaration> declarations;

  long dim() const;
  std::vector<const QueryDecl*> queries() const;
  template <typename T>
  const T* find(const std::string& name) const {
    for (const auto& d : declarations) {
      if (const auto* t = std::get_if<T>(&d); t && t->name == name) return t;
    }
    return nullptr;
  }
};

/// Parses scenario text. Throws ParseFailure (ParseError, UndefinedName,
/// DuplicateName) on the first problem found.
ScenarioDocument parse_scenario(const std::string& text);

/// Writes a document back as scenario text; amplitudes use 17 significant
/// digits so that parsing the output reproduces every double exactly.
void write_scenario(const ScenarioDocument& doc, std::ostream& out);
std::string write_scenario(const ScenarioDocument& doc);

}  // namespace hlab::scenario
