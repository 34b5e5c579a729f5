#pragma once

#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hlab/numerics.hpp"
#include "hlab/qlogic.hpp"

namespace hlab {

/// Symbolic, ordered time labels t0 < t1 < ... < tf.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2) {
      throw Error(ErrorCode::InvalidArgument, "a time grid needs at least two times");
    }
    std::set<std::string> seen;
    for (const auto& l : labels_) {
      if (!seen.insert(l).second) {
        throw Error(ErrorCode::BadLabel, "time label '" + l + "' repeated");
      }
    }
  }

  std::size_t size() const { return labels_.size(); }
  const std::string& operator[](std::size_t m) const { return labels_[m]; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& initial() const { return labels_.front(); }

  std::optional<std::size_t> find(const std::string& label) const {
    for (std::size_t m = 0; m < labels_.size(); ++m) {
      if (labels_[m] == label) return m;
    }
    return std::nullopt;
  }

  std::size_t index_of(const std::string& label) const {
    if (auto m = find(label)) return *m;
    throw Error(ErrorCode::BadLabel, "unknown time label '" + label + "'");
  }

  bool operator==(const TimeGrid& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
};

/// One unitary per consecutive pair of times; entry m-1 carries t_{m-1} -> t_m.
template <typename Real>
class StepUnitaries {
 public:
  StepUnitaries() = default;

  StepUnitaries(std::vector<Operator<Real>> steps, const Tolerance& tol = {})
      : steps_(std::move(steps)) {
    for (std::size_t m = 0; m < steps_.size(); ++m) {
      require_unitary(steps_[m], tol, "step " + std::to_string(m + 1));
    }
  }

  std::size_t size() const { return steps_.size(); }
  const Operator<Real>& operator[](std::size_t m) const { return steps_[m]; }
  const std::vector<Operator<Real>>& operators() const { return steps_; }

  /// T(t_to, t_from) as the ordered product of the intervening steps.
  Operator<Real> composed(std::size_t from, std::size_t to) const {
    const Index dim = steps_.front().rows();
    Operator<Real> t = identity<Real>(dim);
    for (std::size_t m = from; m < to; ++m) t = steps_[m] * t;
    return t;
  }

 private:
  std::vector<Operator<Real>> steps_;
};

/// Label tuple of one elementary history; `special` marks Y0.
struct History {
  std::vector<std::size_t> indices;
  bool special = false;

  bool operator==(const History& other) const {
    return special == other.special && indices == other.indices;
  }
};

/// Family of histories with a pure initial state at t0 and one sample space
/// per later time. With `include_y0`, the history (I - [psi0]) ⊙ I ⊙ ... ⊙ I
/// completes the sample space.
template <typename Real>
class HistoryFamily {
 public:
  HistoryFamily(Ket<Real> initial, TimeGrid grid, StepUnitaries<Real> steps,
                std::vector<DecompositionOfIdentity<Real>> slots, const Tolerance& tol = {},
                bool include_y0 = true)
      : initial_(std::move(initial)),
        grid_(std::move(grid)),
        steps_(std::move(steps)),
        slots_(std::move(slots)),
        include_y0_(include_y0) {
    const std::size_t f = grid_.size() - 1;
    if (steps_.size() != f) {
      throw Error(ErrorCode::InvalidSlot, "expected " + std::to_string(f) + " steps, got " +
                                              std::to_string(steps_.size()));
    }
    if (slots_.size() != f) {
      throw Error(ErrorCode::InvalidSlot, "expected " + std::to_string(f) + " slots, got " +
                                              std::to_string(slots_.size()));
    }
    const Index dim = initial_.size();
    require_normalized(initial_, tol, "initial state");
    for (std::size_t m = 0; m < f; ++m) {
      if (steps_[m].rows() != dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "step into " + grid_[m + 1] + " has dimension " +
                        std::to_string(steps_[m].rows()) + ", expected " + std::to_string(dim));
      }
      if (slots_[m].dim() != dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "slot at " + grid_[m + 1] + " has dimension " +
                        std::to_string(slots_[m].dim()) + ", expected " + std::to_string(dim));
      }
    }
  }

  const Ket<Real>& initial() const { return initial_; }
  const TimeGrid& grid() const { return grid_; }
  const StepUnitaries<Real>& steps() const { return steps_; }
  const std::vector<DecompositionOfIdentity<Real>>& slots() const { return slots_; }
  bool include_y0() const { return include_y0_; }
  Index dim() const { return initial_.size(); }
  std::size_t depth() const { return slots_.size(); }

  /// Sample space at time label `t` (any time after t0).
  const DecompositionOfIdentity<Real>& slot(const std::string& t) const {
    const std::size_t m = grid_.index_of(t);
    if (m == 0) throw Error(ErrorCode::BadLabel, "t0 carries the initial state, not a slot");
    return slots_[m - 1];
  }

  std::size_t elementary_count() const {
    std::size_t n = 1;
    for (const auto& s : slots_) n *= s.size();
    return n;
  }

  /// Elementary histories in lexicographic order (last time varies fastest),
  /// followed by Y0 when included.
  std::vector<History> histories() const {
    std::vector<History> out;
    out.reserve(elementary_count() + 1);
    History h{std::vector<std::size_t>(depth(), 0), false};
    for (std::size_t n = 0; n < elementary_count(); ++n) {
      out.push_back(h);
      for (std::size_t m = depth(); m-- > 0;) {
        if (++h.indices[m] < slots_[m].size()) break;
        h.indices[m] = 0;
      }
    }
    if (include_y0_) out.push_back(History{{}, true});
    return out;
  }

  std::vector<std::string> key_of(const History& h) const {
    if (h.special) return {"Y0"};
    std::vector<std::string> key;
    for (std::size_t m = 0; m < depth(); ++m) key.push_back(slots_[m][h.indices.at(m)].label());
    return key;
  }

  std::string label_of(const History& h) const {
    if (h.special) return "Y0";
    std::string out = "(";
    const auto key = key_of(h);
    for (std::size_t m = 0; m < key.size(); ++m) out += (m ? ", " : "") + key[m];
    return out + ")";
  }

  History history_from_labels(const std::vector<std::string>& labels) const {
    if (labels.size() == 1 && labels.front() == "Y0" && include_y0_) return History{{}, true};
    if (labels.size() != depth()) {
      throw Error(ErrorCode::BadLabel, "history needs " + std::to_string(depth()) + " labels");
    }
    History h;
    for (std::size_t m = 0; m < depth(); ++m) {
      auto j = slots_[m].find(labels[m]);
      if (!j) {
        throw Error(ErrorCode::BadLabel,
                    "'" + labels[m] + "' is not in the sample space at " + grid_[m + 1]);
      }
      h.indices.push_back(*j);
    }
    return h;
  }

  HistoryFamily with_slots(std::vector<DecompositionOfIdentity<Real>> slots,
                           const Tolerance& tol = {}) const {
    return HistoryFamily(initial_, grid_, steps_, std::move(slots), tol, include_y0_);
  }

 private:
  Ket<Real> initial_;
  TimeGrid grid_;
  StepUnitaries<Real> steps_;
  std::vector<DecompositionOfIdentity<Real>> slots_;
  bool include_y0_;
};

template <typename Real>
HistoryFamily<Real> make_family(Ket<Real> initial, TimeGrid grid, StepUnitaries<Real> steps,
                                std::vector<DecompositionOfIdentity<Real>> slots,
                                const Tolerance& tol = {}, bool include_y0 = true) {
  return HistoryFamily<Real>(std::move(initial), std::move(grid), std::move(steps),
                             std::move(slots), tol, include_y0);
}

/// |α> = P_f U_f ... P_1 U_1 |psi0>. For Y0 the first projector is
/// I - [psi0], applied at t0 before U_1, and the later ones are identities.
template <typename Real>
Ket<Real> chain_ket(const HistoryFamily<Real>& family, const History& h) {
  const auto& psi0 = family.initial();
  if (h.special) {
    if (!family.include_y0()) throw Error(ErrorCode::BadLabel, "family has no Y0 history");
    Ket<Real> v = psi0 - psi0 * psi0.dot(psi0);
    for (std::size_t m = 0; m < family.depth(); ++m) v = family.steps()[m] * v;
    return v;
  }
  if (h.indices.size() != family.depth()) {
    throw Error(ErrorCode::BadLabel, "history has wrong number of labels");
  }
  Ket<Real> v = psi0;
  for (std::size_t m = 0; m < family.depth(); ++m) {
    if (h.indices[m] >= family.slots()[m].size()) {
      throw Error(ErrorCode::BadLabel, "label index out of range at " + family.grid()[m + 1]);
    }
    v = family.slots()[m][h.indices[m]].matrix() * (family.steps()[m] * v);
  }
  return v;
}

template <typename Real>
struct ConsistencyReport {
  bool consistent = true;
  Real max_overlap = 0;
  std::pair<History, History> worst_pair;
  std::pair<std::string, std::string> worst_labels;
  Real tol_used = 0;
};

template <typename Real>
class InconsistentFamily : public Error {
 public:
  explicit InconsistentFamily(ConsistencyReport<Real> report)
      : Error(ErrorCode::Inconsistent, describe(report)), report_(std::move(report)) {}

  const ConsistencyReport<Real>& report() const { return report_; }

 private:
  static std::string describe(const ConsistencyReport<Real>& r) {
    std::ostringstream msg;
    msg << "family is inconsistent: max |<a|a'>| = " << r.max_overlap << " between "
        << r.worst_labels.first << " and " << r.worst_labels.second << " (tol "
        << r.tol_used << ")";
    return msg.str();
  }

  ConsistencyReport<Real> report_;
};

/// Checks <α|α'> = 0 for all distinct histories (Y0 included). The bound is
/// ctol.eps·dim.
template <typename Real>
ConsistencyReport<Real> consistency_check(const HistoryFamily<Real>& family,
                                          const Tolerance& ctol = {}) {
  const auto hs = family.histories();
  std::vector<Ket<Real>> kets;
  kets.reserve(hs.size());
  for (const auto& h : hs) kets.push_back(chain_ket(family, h));

  ConsistencyReport<Real> report;
  report.tol_used = ctol.scaled<Real>(family.dim());
  report.worst_pair = {hs.front(), hs.back()};
  report.max_overlap = Real(-1);
  for (std::size_t a = 0; a < hs.size(); ++a) {
    for (std::size_t b = a + 1; b < hs.size(); ++b) {
      const Real overlap = std::abs(kets[a].dot(kets[b]));
      if (overlap > report.max_overlap) {
        report.max_overlap = overlap;
        report.worst_pair = {hs[a], hs[b]};
      }
    }
  }
  report.max_overlap = std::max(report.max_overlap, Real(0));
  report.worst_labels = {family.label_of(report.worst_pair.first),
                         family.label_of(report.worst_pair.second)};
  report.consistent = report.max_overlap <= report.tol_used;
  return report;
}

/// Real-valued table keyed by label tuples, with the conditioning it assumes.
template <typename Real>
struct ProbabilityTable {
  struct Entry {
    std::vector<std::string> key;
    Real probability = 0;
  };

  std::string condition;
  std::vector<Entry> entries;

  const Entry* find(const std::vector<std::string>& key) const {
    for (const auto& e : entries) {
      if (e.key == key) return &e;
    }
    return nullptr;
  }

  Real at(const std::vector<std::string>& key) const {
    if (const auto* e = find(key)) return e->probability;
    std::string joined;
    for (const auto& k : key) joined += (joined.empty() ? "" : ",") + k;
    throw Error(ErrorCode::BadLabel, "no table entry for (" + joined + ")");
  }

  Real total() const {
    Real sum = 0;
    for (const auto& e : entries) sum += e.probability;
    return sum;
  }
};

/// Extended Born rule: Pr(α | [psi0]) = <α|α>. Throws InconsistentFamily when
/// the consistency conditions fail.
template <typename Real>
ProbabilityTable<Real> history_probabilities(const HistoryFamily<Real>& family,
                                             const Tolerance& ctol = {}) {
  const auto report = consistency_check(family, ctol);
  if (!report.consistent) throw InconsistentFamily<Real>(report);
  ProbabilityTable<Real> table;
  table.condition = "given [psi0] at " + family.grid().initial();
  for (const auto& h : family.histories()) {
    table.entries.push_back({family.key_of(h), chain_ket(family, h).squaredNorm()});
  }
  return table;
}

/// |<phi|T|psi0>|^2.
template <typename Real>
Real born_probability(const Ket<Real>& psi0, const Operator<Real>& t, const Ket<Real>& phi,
                      const Tolerance& tol = {}) {
  require_normalized(psi0, tol, "initial ket");
  require_normalized(phi, tol, "final ket");
  require_unitary(t, tol, "time development operator");
  require_same_shape(psi0, phi);
  return std::norm(phi.dot(t * psi0));
}

/// Same probability obtained by carrying phi backwards: |<psi0|T^dagger phi>|^2.
template <typename Real>
Real backward_pre_probability(const Ket<Real>& psi0, const Operator<Real>& t,
                              const Ket<Real>& phi, const Tolerance& tol = {}) {
  require_normalized(psi0, tol, "initial ket");
  require_normalized(phi, tol, "final ket");
  require_unitary(t, tol, "time development operator");
  require_same_shape(psi0, phi);
  const Ket<Real> phi_back = t.adjoint() * phi;
  return std::norm(psi0.dot(phi_back));
}

template <typename Real>
Ket<Real> evolve(const Ket<Real>& psi0, const StepUnitaries<Real>& steps, const TimeGrid& grid,
                 const std::string& upto) {
  const std::size_t m = grid.index_of(upto);
  if (m == 0) return psi0;
  return steps.composed(0, m) * psi0;
}

/// <Psi|P|Psi> for a pre-probability Psi.
template <typename Real>
Real probability_via_preprobability(const Ket<Real>& psi, const Projector<Real>& p,
                                    const Tolerance& tol = {}) {
  require_normalized(psi, tol, "pre-probability");
  require_same_shape(psi, p.matrix().col(0));
  return psi.dot(p.matrix() * psi).real();
}

}  // namespace hlab
