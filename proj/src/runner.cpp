#include "hlab/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "hlab/inference.hpp"

namespace hlab::scenario {

namespace {

using Real = double;
using Op = Operator<Real>;
using Vec = Ket<Real>;

template <typename F>
auto located(SourcePos pos, const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const BuildFailure&) {
    throw;
  } catch (const Error& e) {
    throw BuildFailure(e.code(), pos, what + ": " + e.what());
  }
}

struct Builder {
  const Tolerance& tol;
  Model& m;

  void check_dim(std::size_t n, SourcePos pos, const std::string& what) {
    if (static_cast<Index>(n) != m.dim) {
      throw BuildFailure(ErrorCode::DimensionMismatch, pos,
                         what + " has " + std::to_string(n) + " entries, space dim is " +
                             std::to_string(m.dim));
    }
  }

  void operator()(const SpaceDecl& s) { m.dim = s.dim; }

  void operator()(const KetDecl& k) {
    check_dim(k.amplitudes.size(), k.pos, "ket '" + k.name + "'");
    Vec v(m.dim);
    for (Index i = 0; i < m.dim; ++i) v(i) = k.amplitudes[static_cast<std::size_t>(i)];
    located(k.pos, "ket '" + k.name + "'", [&] {
      require_normalized(v, tol, "ket '" + k.name + "'");
      return 0;
    });
    m.kets.emplace(k.name, std::move(v));
  }

  void operator()(const UnitaryDecl& u) {
    Op op = identity<Real>(m.dim);
    if (!u.identity) {
      check_dim(u.rows.size(), u.pos, "unitary '" + u.name + "'");
      for (std::size_t r = 0; r < u.rows.size(); ++r) {
        check_dim(u.rows[r].size(), u.pos, "row " + std::to_string(r + 1) + " of unitary '" + u.name + "'");
        for (std::size_t c = 0; c < u.rows[r].size(); ++c) {
          op(static_cast<Index>(r), static_cast<Index>(c)) = u.rows[r][c];
        }
      }
      located(u.pos, "unitary '" + u.name + "'", [&] {
        require_unitary(op, tol, "unitary '" + u.name + "'");
        return 0;
      });
    }
    m.unitaries.emplace(u.name, std::move(op));
  }

  void operator()(const ProjectorDecl& p) {
    using Kind = ProjectorDecl::Kind;
    const std::string what = "projector '" + p.name + "'";
    auto value = located(p.pos, what, [&]() -> Projector<Real> {
      switch (p.kind) {
        case Kind::FromKet:
          return projector_from_ket(m.kets.at(p.operands.at(0)), tol, p.name);
        case Kind::Identity:
          return identity_projector<Real>(m.dim, p.name);
        case Kind::Not:
          return m.projectors.at(p.operands.at(0)).negated().relabeled(p.name);
        case Kind::Sum: {
          Op sum = Op::Zero(m.dim, m.dim);
          for (const auto& name : p.operands) sum += m.projectors.at(name).matrix();
          return Projector<Real>(sum, p.name, tol);
        }
        case Kind::Diag: {
          check_dim(p.diagonal.size(), p.pos, what);
          Op d = Op::Zero(m.dim, m.dim);
          for (Index i = 0; i < m.dim; ++i) d(i, i) = p.diagonal[static_cast<std::size_t>(i)];
          return Projector<Real>(d, p.name, tol);
        }
      }
      throw Error(ErrorCode::InvalidArgument, "unknown projector form");
    });
    m.projectors.emplace(p.name, std::move(value));
  }

  void operator()(const PdiDecl& d) {
    std::vector<Projector<Real>> elems;
    for (const auto& name : d.elements) elems.push_back(m.projectors.at(name));
    auto pdi = located(d.pos, "pdi '" + d.name + "'", [&] { return validate_pdi(std::move(elems), tol); });
    m.pdis.emplace(d.name, std::move(pdi));
  }

  void operator()(const FamilyDecl& f) {
    auto family = located(f.pos, "family '" + f.name + "'", [&] {
      std::vector<Op> steps;
      for (const auto& s : f.steps) steps.push_back(m.unitaries.at(s.unitary));
      std::vector<DecompositionOfIdentity<Real>> slots;
      for (const auto& s : f.slots) slots.push_back(m.pdis.at(s.pdi));
      return make_family<Real>(m.kets.at(f.initial), TimeGrid(f.times),
                               StepUnitaries<Real>(std::move(steps), tol), std::move(slots), tol);
    });
    m.families.emplace(f.name, std::move(family));
  }

  void operator()(const QueryDecl&) {}
};

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

void add_table(QueryOutcome& out, const ProbabilityTable<Real>& table,
               std::vector<std::string> columns) {
  out.condition = table.condition;
  columns.push_back("probability");
  out.columns = std::move(columns);
  for (const auto& e : table.entries) out.rows.push_back({e.key, e.probability});
}

void add_scalar(QueryOutcome& out, const std::string& name, double value) {
  if (out.columns.empty()) out.columns = {"quantity", "value"};
  out.rows.push_back({{name}, value});
}

void add_consistency(QueryOutcome& out, const ConsistencyReport<Real>& r) {
  add_scalar(out, "consistent", r.consistent ? 1.0 : 0.0);
  add_scalar(out, "max_overlap", r.max_overlap);
  add_scalar(out, "tol_used", r.tol_used);
  out.notes.push_back("worst pair: " + r.worst_labels.first + " vs " + r.worst_labels.second);
}

Event<Real> make_event(const Model& model, const HistoryFamily<Real>& family, const EventSpec& spec) {
  const auto m = family.grid().find(spec.time);
  if (spec.labels.size() == 1) {
    const auto& label = spec.labels.front();
    const bool in_slot = m && *m > 0 && family.slots()[*m - 1].find(label).has_value();
    const auto p = model.projectors.find(label);
    if (!in_slot && p != model.projectors.end()) {
      return Event<Real>::with_projector(spec.time, p->second.matrix());
    }
  }
  return Event<Real>::with_labels(spec.time, spec.labels);
}

std::string events_text(const std::vector<EventSpec>& events) {
  std::vector<std::string> parts;
  for (const auto& e : events) parts.push_back(join(e.labels, "|") + " at " + e.time);
  return join(parts, " and ");
}

void execute(const Model& model, const QueryDecl& q, const RunOptions& opt, QueryOutcome& out) {
  const auto& tol = opt.tol;
  const auto& ctol = opt.ctol;
  const auto family = [&](std::size_t i) -> const HistoryFamily<Real>& { return model.families.at(q.names.at(i)); };
  const auto pdi = [&](std::size_t i) -> const DecompositionOfIdentity<Real>& { return model.pdis.at(q.names.at(i)); };
  const auto proj = [&](std::size_t i) -> const Projector<Real>& { return model.projectors.at(q.names.at(i)); };

  switch (q.kind) {
    case QueryKind::Validate: {
      add_scalar(out, "kets", static_cast<double>(model.kets.size()));
      add_scalar(out, "unitaries", static_cast<double>(model.unitaries.size()));
      add_scalar(out, "projectors", static_cast<double>(model.projectors.size()));
      add_scalar(out, "pdis", static_cast<double>(model.pdis.size()));
      add_scalar(out, "families", static_cast<double>(model.families.size()));
      for (const auto& [name, f] : model.families) {
        out.notes.push_back("family " + name + ": " + std::to_string(f.histories().size()) +
                            " histories over " + join(f.grid().labels(), " "));
      }
      out.notes.push_back("all declarations valid");
      return;
    }
    case QueryKind::Consistency: {
      const auto r = consistency_check(family(0), ctol);
      add_consistency(out, r);
      if (!r.consistent) {
        out.status = Status::Violation;
        out.error = ErrorCode::Inconsistent;
        out.message = "family '" + q.names[0] + "' violates the consistency conditions";
      }
      return;
    }
    case QueryKind::Probs: {
      const auto& f = family(0);
      std::vector<std::string> cols(f.grid().labels().begin() + 1, f.grid().labels().end());
      add_table(out, history_probabilities(f, ctol), cols);
      return;
    }
    case QueryKind::Joint:
      add_table(out, joint_distribution(family(0), q.names.at(1), q.names.at(2), ctol),
                {q.names[1], q.names[2]});
      return;
    case QueryKind::Marginal:
      add_table(out, marginal(family(0), q.names.at(1), ctol), {q.names[1]});
      return;
    case QueryKind::Condition: {
      const auto& f = family(0);
      std::vector<Event<Real>> targets, givens;
      for (const auto& e : q.targets) targets.push_back(make_event(model, f, e));
      for (const auto& e : q.givens) givens.push_back(make_event(model, f, e));
      const double p = givens.empty() ? probability(f, targets, tol, ctol)
                                      : conditional(f, targets, givens, tol, ctol);
      out.columns = {"event", "probability"};
      std::string key = "Pr(" + events_text(q.targets);
      if (!q.givens.empty()) key += " | " + events_text(q.givens);
      out.rows.push_back({{key + ")"}, p});
      out.condition = "given [psi0] at " + f.grid().initial();
      return;
    }
    case QueryKind::Compatible:
      add_scalar(out, "compatible", frameworks_compatible(pdi(0), pdi(1), tol) ? 1.0 : 0.0);
      return;
    case QueryKind::Refine: {
      if (!frameworks_compatible(pdi(0), pdi(1), tol)) {
        add_scalar(out, "compatible", 0.0);
        out.status = Status::Violation;
        out.error = ErrorCode::Incompatible;
        out.message = "'" + q.names[0] + "' and '" + q.names[1] + "' do not commute; no common refinement";
        return;
      }
      const auto r = common_refinement(pdi(0), pdi(1), tol);
      out.columns = {"element", "rank"};
      for (const auto& p : r.elements()) out.rows.push_back({{p.label()}, p.trace()});
      return;
    }
    case QueryKind::Classify: {
      const auto c = classify_family_pair(family(0), family(1), tol, ctol);
      add_scalar(out, "kind", static_cast<double>(static_cast<int>(c.kind)));
      std::string note = std::string("kind: ") + to_string(c.kind);
      if (c.kind == PairKind::Incompatible) note += " at " + c.incompatible_at;
      out.notes.push_back(note);
      if (c.report) add_scalar(out, "max_overlap", c.report->max_overlap);
      return;
    }
    case QueryKind::And:
    case QueryKind::Or: {
      const auto& p = proj(0);
      const auto& r = proj(1);
      const auto result = q.kind == QueryKind::And ? conjunction(p, r, tol) : disjunction(p, r, tol);
      if (const auto* mless = std::get_if<Meaningless<Real>>(&result)) {
        add_scalar(out, "meaningless", 1.0);
        add_scalar(out, "commutator_norm", mless->commutator_norm);
        out.status = Status::Violation;
        out.message = "'" + mless->lhs + "' and '" + mless->rhs + "' do not commute; the combination is meaningless";
        return;
      }
      const auto& value = std::get<Projector<Real>>(result);
      add_scalar(out, "meaningless", 0.0);
      add_scalar(out, "rank", value.trace());
      out.notes.push_back("result: " + value.label());
      return;
    }
    case QueryKind::Not: {
      const auto n = negation(proj(0));
      add_scalar(out, "rank", n.trace());
      out.notes.push_back("result: " + n.label());
      return;
    }
    case QueryKind::Algebra: {
      const auto a = event_algebra(pdi(0));
      add_scalar(out, "size", static_cast<double>(a.size()));
      return;
    }
    case QueryKind::PreProb: {
      const auto& psi = model.kets.at(q.names.at(0));
      add_scalar(out, "probability", probability_via_preprobability(psi, proj(1), tol));
      return;
    }
  }
}

}  // namespace

Model build_model(const ScenarioDocument& doc, const Tolerance& tol) {
  Model m;
  Builder b{tol, m};
  for (const auto& d : doc.declarations) std::visit(b, d);
  return m;
}

const ResultRow* QueryOutcome::find(const std::vector<std::string>& key) const {
  for (const auto& r : rows) {
    if (r.key == key) return &r;
  }
  return nullptr;
}

bool QueryOutcome::is_violation() const {
  if (status == Status::Violation) return true;
  return status == Status::Failed && error &&
         (*error == ErrorCode::Inconsistent || *error == ErrorCode::SingleFrameworkViolation);
}

bool RunReport::any_violation() const {
  return std::any_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.is_violation(); });
}

bool RunReport::any_query_error() const {
  return std::any_of(outcomes.begin(), outcomes.end(),
                     [](const auto& o) { return o.status == Status::Failed; });
}

int RunReport::exit_code(bool strict) const {
  if (strict && any_violation()) return 1;
  if (any_query_error()) return 4;
  return 0;
}

QueryOutcome run_query(const Model& model, const QueryDecl& query, const RunOptions& options) {
  QueryOutcome out;
  out.query = query.text();
  out.pos = query.pos;
  try {
    execute(model, query, options, out);
  } catch (const InconsistentFamily<Real>& e) {
    out = QueryOutcome{out.query, out.pos};
    out.status = Status::Failed;
    out.error = e.code();
    out.message = e.what();
    add_consistency(out, e.report());
  } catch (const Error& e) {
    out = QueryOutcome{out.query, out.pos};
    out.status = Status::Failed;
    out.error = e.code();
    out.message = e.what();
  }
  return out;
}

RunReport run_queries(const Model& model, const ScenarioDocument& doc, const RunOptions& options) {
  RunReport report;
  for (const auto* q : doc.queries()) report.outcomes.push_back(run_query(model, *q, options));
  return report;
}

RunReport run_document(const ScenarioDocument& doc, const RunOptions& options) {
  return run_queries(build_model(doc, options.tol), doc, options);
}

std::string format_tsv_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

namespace {

std::string format_text_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

void render_text(const RunReport& report, std::ostream& out) {
  for (std::size_t i = 0; i < report.outcomes.size(); ++i) {
    const auto& o = report.outcomes[i];
    if (i) out << '\n';
    out << "[" << (i + 1) << "] " << o.query << "   (line " << o.pos.line << ")\n";
    if (!o.condition.empty()) out << "    " << o.condition << '\n';
    if (o.status == Status::Failed && o.error) {
      out << "    error[" << to_string(*o.error) << "]: " << o.message << '\n';
    } else if (o.status == Status::Violation) {
      out << "    violation" << (o.error ? "[" + std::string(to_string(*o.error)) + "]" : "")
          << ": " << o.message << '\n';
    }
    if (!o.rows.empty()) {
      std::vector<std::vector<std::string>> cells;
      cells.push_back(o.columns);
      for (const auto& r : o.rows) {
        auto line = r.key;
        line.push_back(format_text_value(r.value));
        cells.push_back(std::move(line));
      }
      std::size_t ncol = 0;
      for (const auto& c : cells) ncol = std::max(ncol, c.size());
      std::vector<std::size_t> width(ncol, 0);
      for (const auto& c : cells) {
        for (std::size_t k = 0; k < c.size(); ++k) width[k] = std::max(width[k], c[k].size());
      }
      for (const auto& c : cells) {
        out << "   ";
        for (std::size_t k = 0; k < c.size(); ++k) {
          out << ' ' << c[k];
          if (k + 1 < c.size()) out << std::string(width[k] - c[k].size() + 1, ' ');
        }
        out << '\n';
      }
    }
    for (const auto& n : o.notes) out << "    " << n << '\n';
  }
}

void render_tsv(const RunReport& report, std::ostream& out) {
  out << "index\tquery\tkey\tvalue\n";
  for (std::size_t i = 0; i < report.outcomes.size(); ++i) {
    const auto& o = report.outcomes[i];
    const std::string idx = std::to_string(i + 1);
    if (o.error) {
      out << "# " << idx << "\terror[" << to_string(*o.error) << "]: " << o.message << '\n';
    }
    for (const auto& n : o.notes) out << "# " << idx << '\t' << n << '\n';
    for (const auto& r : o.rows) {
      out << idx << '\t' << o.query << '\t' << join(r.key, ",") << '\t' << format_tsv_value(r.value) << '\n';
    }
  }
}

}  // namespace hlab::scenario
