#pragma once

// Built-in scenarios reproducing the standard worked examples, each with the
// values its queries must produce.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hlab/runner.hpp"
#include "hlab/scenario.hpp"

namespace hlab::gallery {

using scenario::RunOptions;
using scenario::ScenarioDocument;

/// One checked value: row `key` of query number `query` (0-based, document
/// order) must equal `value` within `tolerance`. With `error` set the query
/// must instead fail or be flagged with that code.
struct Expectation {
  std::size_t query = 0;
  std::vector<std::string> key;
  double value = 0.0;
  double tolerance = 1e-12;
  std::optional<ErrorCode> error;
  std::string note;
};

struct Scenario {
  std::string name;
  std::string summary;
  ScenarioDocument document;
  std::vector<Expectation> expected;
};

struct Options {
  /// Measurement-model amplitudes c_j; defaults to (0.6, 0.8).
  std::optional<std::vector<double>> c;
};

std::vector<std::string> names();

/// Throws UnknownScenario for names outside `names()`, InvalidArgument for
/// unusable options.
Scenario build_scenario(const std::string& name, const Options& options = {});

struct ExpectationResult {
  Expectation expectation;
  bool passed = false;
  std::optional<double> actual;
  double delta = 0.0;
  std::string message;
};

struct ExpectedReport {
  std::string scenario;
  std::optional<ErrorCode> build_error;  // the document did not build
  std::string build_message;
  scenario::RunReport run;
  std::vector<ExpectationResult> entries;

  std::size_t failures() const;
  bool passed() const { return !build_error && failures() == 0; }
};

/// Evaluates every expectation. Never throws for scenario problems; they
/// become report entries.
ExpectedReport run_expected(const Scenario& s, const RunOptions& options = {});

void render_expected(const ExpectedReport& report, std::ostream& out);

}  // namespace hlab::gallery
