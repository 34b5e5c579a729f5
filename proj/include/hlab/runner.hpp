#pragma once

// Turning a parsed scenario into validated values and running its queries.

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hlab/histories.hpp"
#include "hlab/numerics.hpp"
#include "hlab/qlogic.hpp"
#include "hlab/scenario.hpp"

namespace hlab::scenario {

struct RunOptions {
  Tolerance tol;   // algebraic checks
  Tolerance ctol;  // consistency checks
};

/// Build error annotated with the declaration that caused it.
class BuildFailure : public Error {
 public:
  BuildFailure(ErrorCode code, SourcePos pos, const std::string& message)
      : Error(code, "line " + std::to_string(pos.line) + ": " + message), pos_(pos) {}
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

/// Every declaration converted to a checked value. Kets are normalized,
/// unitaries unitary, projectors idempotent and Hermitian, sample spaces
/// complete and orthogonal.
struct Model {
  Index dim = 0;
  std::map<std::string, Ket<double>> kets;
  std::map<std::string, Operator<double>> unitaries;
  std::map<std::string, Projector<double>> projectors;
  std::map<std::string, DecompositionOfIdentity<double>> pdis;
  std::map<std::string, HistoryFamily<double>> families;
};

Model build_model(const ScenarioDocument& doc, const Tolerance& tol = {});

enum class Status { Ok, Violation, Failed };

struct ResultRow {
  std::vector<std::string> key;
  double value = 0.0;
};

struct QueryOutcome {
  std::string query;  // canonical text
  SourcePos pos;
  Status status = Status::Ok;
  std::optional<ErrorCode> error;
  std::string message;
  std::string condition;             // e.g. "given [psi0] at t0"
  std::vector<std::string> columns;  // key column headers, then the value header
  std::vector<ResultRow> rows;
  std::vector<std::string> notes;

  const ResultRow* find(const std::vector<std::string>& key) const;
  /// True when the outcome breaks a rule of reasoning rather than the input:
  /// inconsistency, Meaningless, or a single-framework violation.
  bool is_violation() const;
};

struct RunReport {
  std::vector<QueryOutcome> outcomes;

  bool any_violation() const;
  bool any_query_error() const;
  /// 0 success, 1 violation under strict, 4 query error.
  int exit_code(bool strict) const;
};

QueryOutcome run_query(const Model& model, const QueryDecl& query, const RunOptions& options = {});
RunReport run_queries(const Model& model, const ScenarioDocument& doc, const RunOptions& options = {});
/// Builds the model and runs every query; build errors propagate.
RunReport run_document(const ScenarioDocument& doc, const RunOptions& options = {});

/// %.15g, the precision of the tab-separated output.
std::string format_tsv_value(double v);

void render_text(const RunReport& report, std::ostream& out);
/// One line per result row: index, query, key (comma-joined), value.
/// Notes and errors appear as '#' comment lines.
void render_tsv(const RunReport& report, std::ostream& out);

}  // namespace hlab::scenario
