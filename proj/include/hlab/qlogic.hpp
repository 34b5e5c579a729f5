#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hlab/numerics.hpp"

namespace hlab {

/// A Hermitian idempotent operator together with a display label. The
/// orthogonal complement is carried alongside so that negation is an exact
/// involution rather than a floating-point round trip through I - (I - P).
template <typename Real>
class Projector {
 public:
  /// Validating constructor: throws NotProjector if `op` is not Hermitian and
  /// idempotent within eps·dim.
  Projector(Operator<Real> op, std::string label, const Tolerance& tol = {})
      : label_(std::move(label)) {
    if (op.rows() != op.cols() || op.rows() < 1) {
      throw Error(ErrorCode::DimensionMismatch, "projector '" + label_ + "' is not square");
    }
    const Real herm = hermiticity_defect(op);
    const Real idem = (op * op - op).norm();
    const Real bound = tol.scaled<Real>(op.rows());
    if (herm > bound || idem > bound) {
      std::ostringstream msg;
      msg << "'" << label_ << "' is not a projector (|P - P^dagger|_F = " << herm
          << ", |P^2 - P|_F = " << idem << ")";
      throw Error(ErrorCode::NotProjector, msg.str());
    }
    op_ = (op + op.adjoint()) / Real(2);
    complement_ = identity<Real>(op_.rows()) - op_;
  }

  /// Builds a projector from an operator already known to be one (results of
  /// the algebra below). Only symmetrizes.
  static Projector trusted(const Operator<Real>& op, std::string label) {
    Operator<Real> sym = (op + op.adjoint()) / Real(2);
    Operator<Real> comp = identity<Real>(sym.rows()) - sym;
    return Projector(std::move(sym), std::move(comp), std::move(label));
  }

  const Operator<Real>& matrix() const { return op_; }
  const Operator<Real>& complement_matrix() const { return complement_; }
  const std::string& label() const { return label_; }
  Index dim() const { return op_.rows(); }
  Real trace() const { return op_.trace().real(); }

  bool is_zero(const Tolerance& tol = {}) const {
    return op_.norm() <= tol.scaled<Real>(dim());
  }

  Projector relabeled(std::string label) const {
    return Projector(op_, complement_, std::move(label));
  }

  Projector negated() const {
    std::string label = label_.rfind('~', 0) == 0 ? label_.substr(1) : "~" + label_;
    return Projector(complement_, op_, std::move(label));
  }

 private:
  Projector(Operator<Real> op, Operator<Real> complement, std::string label)
      : op_(std::move(op)), complement_(std::move(complement)), label_(std::move(label)) {}

  Operator<Real> op_;
  Operator<Real> complement_;
  std::string label_;
};

template <typename Real>
Projector<Real> zero_projector(Index dim, std::string label = "0") {
  return Projector<Real>::trusted(Operator<Real>::Zero(dim, dim), std::move(label));
}

template <typename Real>
Projector<Real> identity_projector(Index dim, std::string label = "I") {
  return Projector<Real>::trusted(identity<Real>(dim), std::move(label));
}

/// Sum of |q_k><q_k| over the columns of `basis`, assumed orthonormal.
template <typename Real>
Projector<Real> projector_onto(const Operator<Real>& basis, Index dim, std::string label) {
  if (basis.cols() == 0) return zero_projector<Real>(dim, std::move(label));
  return Projector<Real>::trusted(basis * basis.adjoint(), std::move(label));
}

/// [psi] = |psi><psi| for a normalized ket.
template <typename Real>
Projector<Real> projector_from_ket(const Ket<Real>& psi, const Tolerance& tol = {},
                                   std::string label = "") {
  require_normalized(psi, tol, label.empty() ? std::string("ket") : "ket '" + label + "'");
  return Projector<Real>::trusted(psi * psi.adjoint(), std::move(label));
}

// ---------------------------------------------------------------------------
// Meaning-aware connectives

/// Outcome of combining noncommuting projectors. It is not a truth value and
/// absorbs every connective it meets.
template <typename Real>
struct Meaningless {
  Real commutator_norm = 0;
  std::string lhs;
  std::string rhs;
};

template <typename Real>
using Proposition = std::variant<Projector<Real>, Meaningless<Real>>;

template <typename Real>
bool is_meaningless(const Proposition<Real>& p) {
  return std::holds_alternative<Meaningless<Real>>(p);
}

template <typename Real>
Real commutator_norm(const Projector<Real>& p, const Projector<Real>& q) {
  require_same_shape(p.matrix(), q.matrix());
  return (p.matrix() * q.matrix() - q.matrix() * p.matrix()).norm();
}

template <typename Real>
bool commute(const Projector<Real>& p, const Projector<Real>& q, const Tolerance& tol = {}) {
  return commutator_norm(p, q) <= tol.scaled<Real>(p.dim());
}

template <typename Real>
Projector<Real> negation(const Projector<Real>& p) {
  return p.negated();
}

template <typename Real>
Proposition<Real> negation(const Proposition<Real>& p) {
  if (const auto* proj = std::get_if<Projector<Real>>(&p)) return proj->negated();
  return p;
}

/// P AND Q: the product PQ when the projectors commute, Meaningless otherwise.
template <typename Real>
Proposition<Real> conjunction(const Projector<Real>& p, const Projector<Real>& q,
                              const Tolerance& tol = {}) {
  const Real norm = commutator_norm(p, q);
  if (norm > tol.scaled<Real>(p.dim())) return Meaningless<Real>{norm, p.label(), q.label()};
  return Projector<Real>::trusted(p.matrix() * q.matrix(),
                                  "(" + p.label() + " & " + q.label() + ")");
}

/// P OR Q: P + Q - PQ when the projectors commute, Meaningless otherwise.
template <typename Real>
Proposition<Real> disjunction(const Projector<Real>& p, const Projector<Real>& q,
                              const Tolerance& tol = {}) {
  const Real norm = commutator_norm(p, q);
  if (norm > tol.scaled<Real>(p.dim())) return Meaningless<Real>{norm, p.label(), q.label()};
  return Projector<Real>::trusted(p.matrix() + q.matrix() - p.matrix() * q.matrix(),
                                  "(" + p.label() + " | " + q.label() + ")");
}

template <typename Real>
Proposition<Real> conjunction(const Proposition<Real>& p, const Proposition<Real>& q,
                              const Tolerance& tol = {}) {
  if (is_meaningless(p)) return p;
  if (is_meaningless(q)) return q;
  return conjunction(std::get<Projector<Real>>(p), std::get<Projector<Real>>(q), tol);
}

template <typename Real>
Proposition<Real> disjunction(const Proposition<Real>& p, const Proposition<Real>& q,
                              const Tolerance& tol = {}) {
  if (is_meaningless(p)) return p;
  if (is_meaningless(q)) return q;
  return disjunction(std::get<Projector<Real>>(p), std::get<Projector<Real>>(q), tol);
}

/// Projector onto range(P) ∩ range(Q), found as the eigenvalue-2 eigenspace of
/// P + Q. Defined for any pair; used as an independent check on conjunction.
template <typename Real>
Projector<Real> intersection_projector(const Projector<Real>& p, const Projector<Real>& q,
                                       const Tolerance& tol = {}) {
  require_same_shape(p.matrix(), q.matrix());
  const Index dim = p.dim();
  const auto eig = hermitian_eigensystem<Real>(p.matrix() + q.matrix(), tol);
  // Vectors nearly inside both ranges have eigenvalue 2 - O(angle^2).
  const Real window = std::sqrt(static_cast<Real>(tol.eps)) * static_cast<Real>(dim);
  Index first = dim;
  while (first > 0 && std::abs(eig.values(first - 1) - Real(2)) <= window) --first;
  return projector_onto<Real>(eig.vectors.rightCols(dim - first), dim,
                              "(" + p.label() + " ^ " + q.label() + ")");
}

// ---------------------------------------------------------------------------
// Projective decompositions of the identity

struct PdiViolation {
  ErrorCode kind;
  std::size_t first = 0;
  std::size_t second = 0;
  double norm = 0;
};

class PdiError : public Error {
 public:
  PdiError(std::vector<PdiViolation> violations, const std::string& message)
      : Error(violations.front().kind, message), violations_(std::move(violations)) {}

  const std::vector<PdiViolation>& violations() const { return violations_; }

  bool has(ErrorCode kind) const {
    return std::any_of(violations_.begin(), violations_.end(),
                       [kind](const PdiViolation& v) { return v.kind == kind; });
  }

 private:
  std::vector<PdiViolation> violations_;
};

template <typename Real>
class DecompositionOfIdentity;

template <typename Real>
DecompositionOfIdentity<Real> validate_pdi(std::vector<Projector<Real>> projectors,
                                           const Tolerance& tol);

/// Ordered, labeled sample space: mutually orthogonal nonzero projectors that
/// sum to the identity. Only obtainable through validate_pdi.
template <typename Real>
class DecompositionOfIdentity {
 public:
  Index dim() const { return elements_.front().dim(); }
  std::size_t size() const { return elements_.size(); }
  const std::vector<Projector<Real>>& elements() const { return elements_; }
  const Projector<Real>& operator[](std::size_t j) const { return elements_[j]; }

  std::optional<std::size_t> find(const std::string& label) const {
    for (std::size_t j = 0; j < elements_.size(); ++j) {
      if (elements_[j].label() == label) return j;
    }
    return std::nullopt;
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& e : elements_) out.push_back(e.label());
    return out;
  }

 private:
  explicit DecompositionOfIdentity(std::vector<Projector<Real>> elements)
      : elements_(std::move(elements)) {}

  friend DecompositionOfIdentity validate_pdi<Real>(std::vector<Projector<Real>>,
                                                    const Tolerance&);

  std::vector<Projector<Real>> elements_;
};

/// Checks every PDI invariant and reports all violations; the thrown error's
/// code is that of the first one found (projector, zero, label, orthogonality,
/// completeness, in that order).
template <typename Real>
DecompositionOfIdentity<Real> validate_pdi(std::vector<Projector<Real>> projectors,
                                           const Tolerance& tol) {
  if (projectors.empty()) {
    throw PdiError({{ErrorCode::Incomplete, 0, 0, 0.0}}, "empty decomposition of identity");
  }
  const Index dim = projectors.front().dim();
  for (const auto& p : projectors) {
    if (p.dim() != dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  "projector '" + p.label() + "' has a different dimension");
    }
  }
  const Real bound = tol.scaled<Real>(dim);
  std::vector<PdiViolation> found;
  std::ostringstream msg;
  for (std::size_t j = 0; j < projectors.size(); ++j) {
    if (projectors[j].is_zero(tol)) {
      found.push_back({ErrorCode::ZeroElement, j, j, 0.0});
      msg << "element " << j << " ('" << projectors[j].label() << "') is zero; ";
    }
    for (std::size_t k = 0; k < j; ++k) {
      if (projectors[j].label() == projectors[k].label()) {
        found.push_back({ErrorCode::DuplicateLabel, k, j, 0.0});
        msg << "label '" << projectors[j].label() << "' repeated; ";
      }
    }
  }
  for (std::size_t j = 0; j < projectors.size(); ++j) {
    for (std::size_t k = j + 1; k < projectors.size(); ++k) {
      const Real overlap = (projectors[j].matrix() * projectors[k].matrix()).norm();
      if (overlap > bound) {
        found.push_back({ErrorCode::NotOrthogonal, j, k, static_cast<double>(overlap)});
        msg << "'" << projectors[j].label() << "' and '" << projectors[k].label()
            << "' not orthogonal (|PQ|_F = " << overlap << "); ";
      }
    }
  }
  Operator<Real> sum = Operator<Real>::Zero(dim, dim);
  for (const auto& p : projectors) sum += p.matrix();
  const Real deficit = (sum - identity<Real>(dim)).norm();
  if (deficit > bound) {
    found.push_back({ErrorCode::Incomplete, 0, 0, static_cast<double>(deficit)});
    msg << "projectors do not sum to identity (|sum - I|_F = " << deficit << "); ";
  }
  if (!found.empty()) {
    std::string text = msg.str();
    text.resize(text.size() - 2);
    throw PdiError(std::move(found), text);
  }
  return DecompositionOfIdentity<Real>(std::move(projectors));
}

/// Variant taking raw labeled operators; NotProjector(j) is reported for any
/// entry that is not Hermitian and idempotent.
template <typename Real>
DecompositionOfIdentity<Real> validate_pdi(
    const std::vector<std::pair<std::string, Operator<Real>>>& labeled, const Tolerance& tol) {
  std::vector<Projector<Real>> projectors;
  for (std::size_t j = 0; j < labeled.size(); ++j) {
    try {
      projectors.emplace_back(labeled[j].second, labeled[j].first, tol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotProjector) throw;
      throw PdiError({{ErrorCode::NotProjector, j, j, 0.0}},
                     "element " + std::to_string(j) + ": " + e.what());
    }
  }
  return validate_pdi(std::move(projectors), tol);
}

/// Indices of the elements of `pdi` whose sum equals `target`, if any.
template <typename Real>
std::optional<std::vector<std::size_t>> decompose_in(const DecompositionOfIdentity<Real>& pdi,
                                                     const Operator<Real>& target,
                                                     const Tolerance& tol = {}) {
  require_same_shape(target, pdi[0].matrix());
  const Real bound = tol.scaled<Real>(pdi.dim());
  std::vector<std::size_t> members;
  Operator<Real> sum = Operator<Real>::Zero(pdi.dim(), pdi.dim());
  for (std::size_t j = 0; j < pdi.size(); ++j) {
    // An element belongs to the event iff it lies inside it: target·P_j = P_j.
    if ((target * pdi[j].matrix() - pdi[j].matrix()).norm() <= bound) {
      members.push_back(j);
      sum += pdi[j].matrix();
    }
  }
  if ((sum - target).norm() > bound) return std::nullopt;
  return members;
}

// ---------------------------------------------------------------------------
// Event algebra

template <typename Real>
class EventAlgebra {
 public:
  struct Element {
    std::vector<std::size_t> members;  // indices into the base PDI
    Projector<Real> projector;
  };

  static constexpr std::size_t kMaxBase = 16;

  explicit EventAlgebra(DecompositionOfIdentity<Real> base) : base_(std::move(base)) {
    const std::size_t n = base_.size();
    if (n > kMaxBase) {
      throw Error(ErrorCode::TooLarge, "event algebra of " + std::to_string(n) +
                                           " elements exceeds the 2^16 limit");
    }
    const Index dim = base_.dim();
    elements_.reserve(std::size_t{1} << n);
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      Element e{{}, zero_projector<Real>(dim)};
      Operator<Real> sum = Operator<Real>::Zero(dim, dim);
      std::string label;
      for (std::size_t j = 0; j < n; ++j) {
        if (mask & (std::size_t{1} << j)) {
          e.members.push_back(j);
          sum += base_[j].matrix();
          label += (label.empty() ? "" : "+") + base_[j].label();
        }
      }
      if (label.empty()) label = "0";
      e.projector = Projector<Real>::trusted(sum, label);
      elements_.push_back(std::move(e));
    }
  }

  const DecompositionOfIdentity<Real>& base() const { return base_; }
  const std::vector<Element>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }

  const Element* find(const Operator<Real>& op, const Tolerance& tol = {}) const {
    for (const auto& e : elements_) {
      if (approx_equal<Real>(e.projector.matrix(), op, tol)) return &e;
    }
    return nullptr;
  }

  bool contains(const Projector<Real>& p, const Tolerance& tol = {}) const {
    return find(p.matrix(), tol) != nullptr;
  }

 private:
  DecompositionOfIdentity<Real> base_;
  std::vector<Element> elements_;
};

template <typename Real>
EventAlgebra<Real> event_algebra(const DecompositionOfIdentity<Real>& pdi) {
  return EventAlgebra<Real>(pdi);
}

// ---------------------------------------------------------------------------
// Observables

template <typename Real>
struct Observable {
  std::vector<std::pair<Real, Projector<Real>>> pairs;  // ascending eigenvalues

  Operator<Real> reconstruct() const {
    const Index dim = pairs.front().second.dim();
    Operator<Real> out = Operator<Real>::Zero(dim, dim);
    for (const auto& [value, p] : pairs) out += value * p.matrix();
    return out;
  }

  DecompositionOfIdentity<Real> decomposition(const Tolerance& tol = {}) const {
    std::vector<Projector<Real>> ps;
    for (const auto& pair : pairs) ps.push_back(pair.second);
    return validate_pdi(std::move(ps), tol);
  }
};

/// Spectral decomposition A = Σ a_j P_j with distinct a_j. Eigenvalues closer
/// than `degeneracy_gap` to their predecessor join its cluster; the default gap
/// is 1e-8 times the spectral range.
template <typename Real>
Observable<Real> observable_decomposition(const Operator<Real>& a, const Tolerance& tol = {},
                                          std::optional<Real> degeneracy_gap = std::nullopt) {
  const auto eig = hermitian_eigensystem<Real>(a, tol);
  const Index dim = a.rows();
  const Real range = eig.values(dim - 1) - eig.values(0);
  const Real gap = degeneracy_gap.value_or(Real(1e-8) * range);

  Observable<Real> out;
  Index start = 0;
  while (start < dim) {
    Index stop = start + 1;
    while (stop < dim && eig.values(stop) - eig.values(stop - 1) <= gap) ++stop;
    const Real value = eig.values.segment(start, stop - start).mean();
    std::ostringstream label;
    label << "A=" << value;
    out.pairs.emplace_back(
        value, projector_onto<Real>(eig.vectors.middleCols(start, stop - start), dim, label.str()));
    start = stop;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Frameworks

template <typename Real>
bool frameworks_compatible(const DecompositionOfIdentity<Real>& s1,
                           const DecompositionOfIdentity<Real>& s2, const Tolerance& tol = {}) {
  if (s1.dim() != s2.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "frameworks act on different spaces");
  }
  for (const auto& p : s1.elements()) {
    for (const auto& q : s2.elements()) {
      if (!commute(p, q, tol)) return false;
    }
  }
  return true;
}

/// Coarsest PDI refining both inputs: the nonzero products P_j Q_k. A product
/// equal to P_j or Q_k keeps that label; otherwise it is named "P_j·Q_k".
template <typename Real>
DecompositionOfIdentity<Real> common_refinement(const DecompositionOfIdentity<Real>& s1,
                                                const DecompositionOfIdentity<Real>& s2,
                                                const Tolerance& tol = {}) {
  if (!frameworks_compatible(s1, s2, tol)) {
    throw Error(ErrorCode::Incompatible, "frameworks do not commute; no common refinement");
  }
  const Real bound = tol.scaled<Real>(s1.dim());
  std::vector<Projector<Real>> out;
  for (const auto& p : s1.elements()) {
    for (const auto& q : s2.elements()) {
      const Operator<Real> prod = p.matrix() * q.matrix();
      if (prod.norm() <= bound) continue;
      const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Projector<Real>& r) {
        return (r.matrix() - prod).norm() <= bound;
      });
      if (duplicate) continue;
      std::string label;
      if ((prod - p.matrix()).norm() <= bound) {
        label = p.label();
      } else if ((prod - q.matrix()).norm() <= bound) {
        label = q.label();
      } else {
        label = p.label() + "·" + q.label();
      }
      if (std::any_of(out.begin(), out.end(),
                      [&](const Projector<Real>& r) { return r.label() == label; })) {
        label = p.label() + "·" + q.label();
      }
      out.push_back(Projector<Real>::trusted(prod, std::move(label)));
    }
  }
  return validate_pdi(std::move(out), tol);
}

}  // namespace hlab
