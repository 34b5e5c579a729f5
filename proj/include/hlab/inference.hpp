#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hlab/histories.hpp"
#include "hlab/qlogic.hpp"

namespace hlab {

/// Pr(given) must exceed this before a conditional probability is formed.
inline constexpr double kConditioningFloor = 1e-12;

/// A single-time event: either a set of slot labels (their projector sum) or
/// an explicit projector that must lie in the slot's event algebra.
template <typename Real>
struct Event {
  std::string time;
  std::vector<std::string> labels;
  std::optional<Operator<Real>> projector;

  static Event with_labels(std::string time, std::vector<std::string> labels) {
    return Event{std::move(time), std::move(labels), std::nullopt};
  }

  static Event with_projector(std::string time, Operator<Real> op) {
    return Event{std::move(time), {}, std::move(op)};
  }

  std::string describe() const {
    if (projector) return "<projector>@" + time;
    std::string out;
    for (const auto& l : labels) out += (out.empty() ? "" : "+") + l;
    return out + "@" + time;
  }
};

namespace detail {

/// Which slot indices make up `event`; nullopt at t0 means "always true".
/// Anything outside the family's event algebra is a single-framework
/// violation.
template <typename Real>
std::pair<std::size_t, std::vector<std::size_t>> resolve_event(const HistoryFamily<Real>& family,
                                                               const Event<Real>& event,
                                                               const Tolerance& tol) {
  const std::size_t m = family.grid().index_of(event.time);
  if (m == 0) {
    bool holds = false;
    if (event.projector) {
      const Ket<Real> image = (*event.projector) * family.initial();
      holds = (image - family.initial()).norm() <= tol.scaled<Real>(family.dim());
    } else {
      holds = event.labels == std::vector<std::string>{"psi0"};
    }
    if (!holds) {
      throw Error(ErrorCode::SingleFrameworkViolation,
                  "event " + event.describe() + " is not implied by the initial state");
    }
    return {0, {}};
  }
  const auto& slot = family.slots()[m - 1];
  if (event.projector) {
    auto members = decompose_in(slot, *event.projector, tol);
    if (!members || members->empty()) {
      throw Error(ErrorCode::SingleFrameworkViolation,
                  "event " + event.describe() + " is not in the event algebra at " + event.time);
    }
    return {m, *members};
  }
  if (event.labels.empty()) {
    throw Error(ErrorCode::SingleFrameworkViolation, "event at " + event.time + " has no labels");
  }
  std::vector<std::size_t> members;
  for (const auto& label : event.labels) {
    auto j = slot.find(label);
    if (!j) {
      throw Error(ErrorCode::SingleFrameworkViolation,
                  "'" + label + "' is not in the sample space at " + event.time);
    }
    members.push_back(*j);
  }
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return {m, members};
}

template <typename Real>
Real probability_of(const HistoryFamily<Real>& family,
                    const std::vector<std::pair<std::size_t, std::vector<std::size_t>>>& resolved) {
  Real total = 0;
  for (const auto& h : family.histories()) {
    if (h.special) continue;
    bool matches = true;
    for (const auto& [m, members] : resolved) {
      if (m == 0) continue;
      if (!std::binary_search(members.begin(), members.end(), h.indices[m - 1])) {
        matches = false;
        break;
      }
    }
    if (matches) total += chain_ket(family, h).squaredNorm();
  }
  return total;
}

template <typename Real>
void require_consistent(const HistoryFamily<Real>& family, const Tolerance& ctol) {
  const auto report = consistency_check(family, ctol);
  if (!report.consistent) throw InconsistentFamily<Real>(report);
}

template <typename Real>
std::size_t slot_index(const HistoryFamily<Real>& family, const std::string& t) {
  const std::size_t m = family.grid().index_of(t);
  if (m == 0) throw Error(ErrorCode::BadLabel, "no sample space at the initial time " + t);
  return m;
}

}  // namespace detail

/// Pr of the conjunction of `events` (distinct times combine by AND; events at
/// the same time intersect).
template <typename Real>
Real probability(const HistoryFamily<Real>& family, const std::vector<Event<Real>>& events,
                 const Tolerance& tol = {}, const Tolerance& ctol = {}) {
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> resolved;
  for (const auto& e : events) resolved.push_back(detail::resolve_event(family, e, tol));
  detail::require_consistent(family, ctol);
  return detail::probability_of(family, resolved);
}

/// Joint distribution of the sample spaces at times `a` and `b`. For a == b the
/// table is diagonal.
template <typename Real>
ProbabilityTable<Real> joint_distribution(const HistoryFamily<Real>& family,
                                          const std::string& a, const std::string& b,
                                          const Tolerance& ctol = {}) {
  const std::size_t ma = detail::slot_index(family, a);
  const std::size_t mb = detail::slot_index(family, b);
  detail::require_consistent(family, ctol);
  const auto& sa = family.slots()[ma - 1];
  const auto& sb = family.slots()[mb - 1];
  std::vector<Real> grid(sa.size() * sb.size(), Real(0));
  for (const auto& h : family.histories()) {
    if (h.special) continue;
    const std::size_t j = h.indices[ma - 1];
    const std::size_t k = h.indices[mb - 1];
    grid[j * sb.size() + k] += chain_ket(family, h).squaredNorm();
  }
  ProbabilityTable<Real> table;
  table.condition = "given [psi0] at " + family.grid().initial();
  for (std::size_t j = 0; j < sa.size(); ++j) {
    for (std::size_t k = 0; k < sb.size(); ++k) {
      table.entries.push_back({{sa[j].label(), sb[k].label()}, grid[j * sb.size() + k]});
    }
  }
  return table;
}

template <typename Real>
ProbabilityTable<Real> marginal(const HistoryFamily<Real>& family, const std::string& a,
                                const Tolerance& ctol = {}) {
  const std::size_t ma = detail::slot_index(family, a);
  detail::require_consistent(family, ctol);
  const auto& sa = family.slots()[ma - 1];
  std::vector<Real> p(sa.size(), Real(0));
  for (const auto& h : family.histories()) {
    if (!h.special) p[h.indices[ma - 1]] += chain_ket(family, h).squaredNorm();
  }
  ProbabilityTable<Real> table;
  table.condition = "given [psi0] at " + family.grid().initial();
  for (std::size_t j = 0; j < sa.size(); ++j) table.entries.push_back({{sa[j].label()}, p[j]});
  return table;
}

/// Pr(target | given) = Pr(target ∧ given) / Pr(given).
template <typename Real>
Real conditional(const HistoryFamily<Real>& family, const std::vector<Event<Real>>& target,
                 const std::vector<Event<Real>>& given, const Tolerance& tol = {},
                 const Tolerance& ctol = {}) {
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> cond;
  for (const auto& e : given) cond.push_back(detail::resolve_event(family, e, tol));
  auto both = cond;
  for (const auto& e : target) both.push_back(detail::resolve_event(family, e, tol));
  detail::require_consistent(family, ctol);
  const Real denom = detail::probability_of(family, cond);
  if (!(denom > Real(kConditioningFloor))) {
    throw Error(ErrorCode::ZeroProbabilityCondition,
                "conditioning event has probability " + std::to_string(static_cast<double>(denom)));
  }
  return detail::probability_of(family, both) / denom;
}

template <typename Real>
Real conditional(const HistoryFamily<Real>& family, const Event<Real>& target,
                 const Event<Real>& given, const Tolerance& tol = {}, const Tolerance& ctol = {}) {
  return conditional(family, std::vector<Event<Real>>{target}, std::vector<Event<Real>>{given},
                     tol, ctol);
}

// ---------------------------------------------------------------------------
// Comparing families

enum class PairKind { Incompatible, Incommensurate, Commensurate };

inline const char* to_string(PairKind kind) {
  switch (kind) {
    case PairKind::Incompatible: return "incompatible";
    case PairKind::Incommensurate: return "incommensurate";
    case PairKind::Commensurate: return "commensurate";
  }
  return "?";
}

template <typename Real>
struct FamilyPairClass {
  PairKind kind = PairKind::Incompatible;
  std::optional<HistoryFamily<Real>> refinement;   // set unless incompatible
  std::optional<ConsistencyReport<Real>> report;   // consistency of the refinement
  std::string incompatible_at;                     // first offending time
};

/// Families must share initial state, time grid and dynamics; only slots may
/// differ.
template <typename Real>
FamilyPairClass<Real> classify_family_pair(const HistoryFamily<Real>& f,
                                           const HistoryFamily<Real>& g,
                                           const Tolerance& tol = {},
                                           const Tolerance& ctol = {}) {
  if (!(f.grid() == g.grid()) || f.dim() != g.dim()) {
    throw Error(ErrorCode::StructureMismatch, "families use different time grids or spaces");
  }
  const Real bound = tol.scaled<Real>(f.dim());
  const Operator<Real> rho_f = f.initial() * f.initial().adjoint();
  const Operator<Real> rho_g = g.initial() * g.initial().adjoint();
  if ((rho_f - rho_g).norm() > bound) {
    throw Error(ErrorCode::StructureMismatch, "families have different initial states");
  }
  for (std::size_t m = 0; m < f.depth(); ++m) {
    if ((f.steps()[m] - g.steps()[m]).norm() > bound) {
      throw Error(ErrorCode::StructureMismatch,
                  "families have different dynamics into " + f.grid()[m + 1]);
    }
  }

  FamilyPairClass<Real> out;
  std::vector<DecompositionOfIdentity<Real>> refined;
  for (std::size_t m = 0; m < f.depth(); ++m) {
    if (!frameworks_compatible(f.slots()[m], g.slots()[m], tol)) {
      out.kind = PairKind::Incompatible;
      out.incompatible_at = f.grid()[m + 1];
      return out;
    }
    refined.push_back(common_refinement(f.slots()[m], g.slots()[m], tol));
  }
  out.refinement = f.with_slots(std::move(refined), tol);
  out.report = consistency_check(*out.refinement, ctol);
  out.kind = out.report->consistent ? PairKind::Commensurate : PairKind::Incommensurate;
  return out;
}

template <typename Real>
struct AgreementReport {
  bool equal = false;
  Real first = 0;
  Real second = 0;
};

namespace detail {

template <typename Real>
Event<Real> as_projector_event(const HistoryFamily<Real>& family, const Event<Real>& e,
                               const Tolerance& tol) {
  if (e.projector) return e;
  const auto [m, members] = resolve_event(family, e, tol);
  if (m == 0) return Event<Real>::with_projector(e.time, family.initial() * family.initial().adjoint());
  Operator<Real> sum = Operator<Real>::Zero(family.dim(), family.dim());
  for (auto j : members) sum += family.slots()[m - 1][j].matrix();
  return Event<Real>::with_projector(e.time, sum);
}

}  // namespace detail

/// Pr(conclusion | data) computed separately in two frameworks. Label events
/// are read in `f` and carried to `g` as projectors.
template <typename Real>
AgreementReport<Real> cross_framework_agreement(const HistoryFamily<Real>& f,
                                                const HistoryFamily<Real>& g,
                                                const std::vector<Event<Real>>& data,
                                                const Event<Real>& conclusion,
                                                const Tolerance& tol = {},
                                                const Tolerance& ctol = {}) {
  std::vector<Event<Real>> data_ops;
  Event<Real> conclusion_op;
  try {
    for (const auto& e : data) data_ops.push_back(detail::as_projector_event(f, e, tol));
    conclusion_op = detail::as_projector_event(f, conclusion, tol);
    for (const auto& e : data_ops) detail::resolve_event(g, e, tol);
    detail::resolve_event(g, conclusion_op, tol);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingleFrameworkViolation && e.code() != ErrorCode::BadLabel) throw;
    throw Error(ErrorCode::InapplicableFramework, e.what());
  }
  AgreementReport<Real> out;
  out.first = conditional(f, {conclusion_op}, data_ops, tol, ctol);
  out.second = conditional(g, {conclusion_op}, data_ops, tol, ctol);
  out.equal = std::abs(out.first - out.second) <= static_cast<Real>(tol.eps);
  return out;
}

}  // namespace hlab
