#include "hlab/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <sstream>

#include "hlab/gallery.hpp"
#include "hlab/runner.hpp"
#include "hlab/scenario.hpp"

namespace hlab::cli {

namespace {

using namespace hlab::scenario;

void diagnostic(std::ostream& err, std::string_view code, const std::string& message) {
  err << "error[" << code << "]: " << message << '\n';
}

void render(const RunReport& report, const std::string& format, std::ostream& out) {
  if (format == "tsv") {
    render_tsv(report, out);
  } else {
    render_text(report, out);
  }
}

std::string outcome_code(const QueryOutcome& o) {
  if (o.error) return std::string(to_string(*o.error));
  return "Meaningless";
}

int command_run(const std::string& path, bool strict, double tol, double ctol,
                const std::string& format, std::ostream& out, std::ostream& err) {
  RunOptions options;
  try {
    options.tol = Tolerance(tol);
    options.ctol = Tolerance(ctol);
  } catch (const Error& e) {
    diagnostic(err, to_string(e.code()), e.what());
    return kExitParse;
  }

  std::ifstream in(path, std::ios::binary);
  if (!in) {
    diagnostic(err, to_string(ErrorCode::IoError), path + ": cannot open file");
    return kExitParse;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();

  ScenarioDocument doc;
  try {
    doc = parse_scenario(buffer.str());
  } catch (const Error& e) {
    diagnostic(err, to_string(e.code()), path + ": " + e.what());
    return kExitParse;
  }

  Model model;
  try {
    model = build_model(doc, options.tol);
  } catch (const Error& e) {
    diagnostic(err, to_string(e.code()), path + ": " + e.what());
    return kExitValidation;
  }

  const RunReport report = run_queries(model, doc, options);
  render(report, format, out);
  for (const auto& o : report.outcomes) {
    const std::string where = path + ": line " + std::to_string(o.pos.line) + ": query '" + o.query + "': ";
    if (o.status == Status::Failed || (strict && o.is_violation())) {
      diagnostic(err, outcome_code(o), where + o.message);
    }
  }
  return report.exit_code(strict);
}

int command_gallery(const std::string& name, const gallery::Options& opts, const std::string& format,
                    std::ostream& out, std::ostream& err) {
  gallery::Scenario s;
  try {
    s = gallery::build_scenario(name, opts);
  } catch (const Error& e) {
    diagnostic(err, to_string(e.code()), e.what());
    return kExitParse;
  }
  const auto report = gallery::run_expected(s);
  if (report.build_error) {
    diagnostic(err, to_string(*report.build_error), s.name + ": " + report.build_message);
    return kExitValidation;
  }
  out << "# " << s.name << ": " << s.summary << "\n\n";
  render(report.run, format, out);
  out << '\n';
  gallery::render_expected(report, out);
  if (report.failures() > 0) {
    diagnostic(err, "ExpectationFailed",
               s.name + ": " + std::to_string(report.failures()) + " of " +
                   std::to_string(report.entries.size()) + " expectations not met");
    return kExitViolation;
  }
  return kExitOk;
}

int command_export(const std::string& name, const gallery::Options& opts, std::ostream& out,
                   std::ostream& err) {
  gallery::Scenario s;
  try {
    s = gallery::build_scenario(name, opts);
  } catch (const Error& e) {
    diagnostic(err, to_string(e.code()), e.what());
    return kExitParse;
  }
  out << "# " << s.name << ": " << s.summary << '\n';
  out << "# expected results (query number, row, value):\n";
  for (const auto& x : s.expected) {
    out << "#   [" << (x.query + 1) << "] ";
    if (x.error) {
      out << "error " << to_string(*x.error);
    } else {
      std::string key;
      for (const auto& k : x.key) key += (key.empty() ? "" : ",") + k;
      out << key << " = " << format_tsv_value(x.value);
    }
    out << "  (" << x.note << ")\n";
  }
  write_scenario(s.document, out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Consistent-histories scenarios: sample spaces, families, consistency and probabilities",
               "histories-lab"};
  app.require_subcommand(1);

  std::string file, name, format = "text";
  bool strict = false;
  double tol = 1e-10, ctol = 1e-10;
  std::vector<double> c;

  auto* run = app.add_subcommand("run", "Run the queries of a scenario file");
  run->add_option("file", file, "Scenario file (.hsc)")->required();
  run->add_flag("--strict", strict, "Exit 1 on inconsistency, Meaningless or single-framework violations");
  run->add_option("--tol", tol, "Algebraic tolerance")->capture_default_str();
  run->add_option("--ctol", ctol, "Consistency tolerance")->capture_default_str();
  run->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "tsv"}));

  auto* gal = app.add_subcommand("gallery", "Run a built-in scenario and check its expected values");
  gal->add_option("name", name, "Scenario name (see 'list')")->required();
  gal->add_option("--c", c, "Measurement-model amplitudes, comma separated")->delimiter(',');
  gal->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "tsv"}));

  auto* exp = app.add_subcommand("export", "Print a built-in scenario as a .hsc file");
  exp->add_option("name", name, "Scenario name (see 'list')")->required();
  exp->add_option("--c", c, "Measurement-model amplitudes, comma separated")->delimiter(',');

  auto* list = app.add_subcommand("list", "List the built-in scenarios");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    diagnostic(err, "Usage", e.what());
    return kExitParse;
  }

  gallery::Options opts;
  if (!c.empty()) opts.c = c;

  if (*run) return command_run(file, strict, tol, ctol, format, out, err);
  if (*gal) return command_gallery(name, opts, format, out, err);
  if (*exp) return command_export(name, opts, out, err);
  if (*list) {
    for (const auto& n : gallery::names()) out << n << '\n';
    return kExitOk;
  }
  return kExitParse;
}

}  // namespace hlab::cli
