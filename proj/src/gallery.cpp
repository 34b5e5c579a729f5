#include "hlab/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

namespace hlab::gallery {

namespace {

using scenario::Complex;
using scenario::EventSpec;
using scenario::QueryKind;

const double kRootHalf = std::sqrt(0.5);

class DocBuilder {
 public:
  DocBuilder(std::string name, std::string summary, long dim) {
    s_.name = std::move(name);
    s_.summary = std::move(summary);
    s_.document.declarations.emplace_back(scenario::SpaceDecl{dim, {}});
  }

  void ket(const std::string& name, std::vector<Complex> amps) {
    add(scenario::KetDecl{name, std::move(amps), {}});
  }

  void identity_unitary(const std::string& name) { add(scenario::UnitaryDecl{name, true, {}, {}}); }

  void unitary(const std::string& name, std::vector<std::vector<Complex>> rows) {
    add(scenario::UnitaryDecl{name, false, std::move(rows), {}});
  }

  void projector(const std::string& name, scenario::ProjectorDecl::Kind kind,
                 std::vector<std::string> operands = {}, std::vector<int> diagonal = {}) {
    add(scenario::ProjectorDecl{name, kind, std::move(operands), std::move(diagonal), {}});
  }

  void ket_projector(const std::string& name, const std::string& ket) {
    projector(name, scenario::ProjectorDecl::Kind::FromKet, {ket});
  }

  void diag_projector(const std::string& name, std::vector<int> diagonal) {
    projector(name, scenario::ProjectorDecl::Kind::Diag, {}, std::move(diagonal));
  }

  void pdi(const std::string& name, std::vector<std::string> elements) {
    add(scenario::PdiDecl{name, std::move(elements), {}});
  }

  void family(const std::string& name, const std::string& initial, std::vector<std::string> times,
              const std::vector<std::string>& steps, const std::vector<std::string>& slots) {
    scenario::FamilyDecl f;
    f.name = name;
    f.initial = initial;
    f.times = std::move(times);
    for (std::size_t m = 0; m < steps.size(); ++m) {
      f.steps.push_back({f.times[m], f.times[m + 1], steps[m], {}});
      f.slots.push_back({f.times[m + 1], slots[m], {}});
    }
    add(std::move(f));
  }

  std::size_t query(QueryKind kind, std::vector<std::string> names = {},
                    std::vector<EventSpec> targets = {}, std::vector<EventSpec> givens = {}) {
    add(scenario::QueryDecl{kind, std::move(names), std::move(targets), std::move(givens), {}});
    return queries_++;
  }

  void expect(std::size_t q, std::vector<std::string> key, double value, std::string note) {
    s_.expected.push_back({q, std::move(key), value, 1e-12, std::nullopt, std::move(note)});
  }

  void expect_error(std::size_t q, ErrorCode code, std::string note) {
    s_.expected.push_back({q, {}, 0.0, 0.0, code, std::move(note)});
  }

  /// Passes the document through the file format so that the gallery only
  /// ever holds what a scenario file can say, with real source positions.
  Scenario finish() {
    s_.document = scenario::parse_scenario(scenario::write_scenario(s_.document));
    return std::move(s_);
  }

 private:
  template <typename D>
  void add(D decl) {
    s_.document.declarations.emplace_back(std::move(decl));
  }

  Scenario s_;
  std::size_t queries_ = 0;
};

EventSpec ev(std::string time, std::vector<std::string> labels) { return {std::move(time), std::move(labels)}; }

const std::vector<std::string> kThreeTimes = {"t0", "t1", "t2"};

Scenario spin_half_xz() {
  DocBuilder b("spin-half-xz",
               "spin-1/2 S_z and S_x: meaningless conjunctions and an inconsistent three-time family",
               2);
  const double r = kRootHalf;
  b.ket("z+", {1, 0});
  b.ket("z-", {0, 1});
  b.ket("x+", {r, r});
  b.ket("x-", {r, -r});
  b.identity_unitary("I");
  b.ket_projector("Pz+", "z+");
  b.ket_projector("Pz-", "z-");
  b.ket_projector("Px+", "x+");
  b.ket_projector("Px-", "x-");
  b.pdi("Z", {"Pz+", "Pz-"});
  b.pdi("X", {"Px+", "Px-"});
  b.family("ZX", "x+", kThreeTimes, {"I", "I"}, {"Z", "X"});
  b.family("Zonly", "x+", {"t0", "t1"}, {"I"}, {"Z"});

  b.query(QueryKind::Validate);
  auto q = b.query(QueryKind::And, {"Pz+", "Px+"});
  b.expect(q, {"meaningless"}, 1, "[z+] and [x+] do not commute");
  b.expect(q, {"commutator_norm"}, r, "|[P,Q]|_F = 1/sqrt(2)");
  q = b.query(QueryKind::Or, {"Pz+", "Px+"});
  b.expect(q, {"meaningless"}, 1, "[z+] or [x+] is meaningless too");
  q = b.query(QueryKind::And, {"Pz+", "Pz-"});
  b.expect(q, {"meaningless"}, 0, "orthogonal projectors commute");
  b.expect(q, {"rank"}, 0, "[z+] and [z-] is the zero projector");
  q = b.query(QueryKind::Or, {"Pz+", "Pz-"});
  b.expect(q, {"rank"}, 2, "[z+] or [z-] is the identity");
  q = b.query(QueryKind::Not, {"Pz+"});
  b.expect(q, {"rank"}, 1, "not [z+] has rank 1");
  q = b.query(QueryKind::Compatible, {"Z", "X"});
  b.expect(q, {"compatible"}, 0, "S_z and S_x frameworks are incompatible");
  q = b.query(QueryKind::Consistency, {"ZX"});
  b.expect(q, {"consistent"}, 0, "z then x after x+ is inconsistent");
  b.expect(q, {"max_overlap"}, 0.25, "chain kets (z+, x+) and (z-, x+) overlap by 1/4");
  b.expect_error(q, ErrorCode::Inconsistent, "consistency violation flagged");
  q = b.query(QueryKind::Probs, {"ZX"});
  b.expect_error(q, ErrorCode::Inconsistent, "probabilities refused for an inconsistent family");
  q = b.query(QueryKind::Probs, {"Zonly"});
  b.expect(q, {"Pz+"}, 0.5, "Born rule |<z+|x+>|^2");
  b.expect(q, {"Pz-"}, 0.5, "Born rule |<z-|x+>|^2");
  b.expect(q, {"Y0"}, 0, "Y0 carries no weight");
  return b.finish();
}

Scenario oscillator_frameworks() {
  DocBuilder b("oscillator-frameworks",
               "truncated oscillator: frameworks {P, I-P}, {[0], [1], I-P}, {[+], [-], I-P}", 4);
  const double r = kRootHalf;
  b.ket("n0", {1, 0, 0, 0});
  b.ket("n1", {0, 1, 0, 0});
  b.ket("n+", {r, r, 0, 0});
  b.ket("n-", {r, -r, 0, 0});
  b.diag_projector("P", {1, 1, 0, 0});
  b.projector("I-P", scenario::ProjectorDecl::Kind::Not, {"P"});
  b.ket_projector("P0", "n0");
  b.ket_projector("P1", "n1");
  b.ket_projector("P+", "n+");
  b.ket_projector("P-", "n-");
  b.projector("P0+P1", scenario::ProjectorDecl::Kind::Sum, {"P0", "P1"});
  b.pdi("F1", {"P", "I-P"});
  b.pdi("F2", {"P0", "P1", "I-P"});
  b.pdi("F3", {"P+", "P-", "I-P"});

  b.query(QueryKind::Validate);
  auto q = b.query(QueryKind::Compatible, {"F1", "F2"});
  b.expect(q, {"compatible"}, 1, "F1 and F2 are compatible");
  q = b.query(QueryKind::Compatible, {"F1", "F3"});
  b.expect(q, {"compatible"}, 1, "F1 and F3 are compatible");
  q = b.query(QueryKind::Compatible, {"F2", "F3"});
  b.expect(q, {"compatible"}, 0, "F2 and F3 are incompatible");
  q = b.query(QueryKind::Refine, {"F1", "F2"});
  b.expect(q, {"P0"}, 1, "refinement of F1 by F2 is F2");
  b.expect(q, {"P1"}, 1, "refinement of F1 by F2 is F2");
  b.expect(q, {"I-P"}, 2, "refinement of F1 by F2 is F2");
  q = b.query(QueryKind::Refine, {"F1", "F3"});
  b.expect(q, {"P+"}, 1, "refinement of F1 by F3 is F3");
  b.expect(q, {"P-"}, 1, "refinement of F1 by F3 is F3");
  b.expect(q, {"I-P"}, 2, "refinement of F1 by F3 is F3");
  q = b.query(QueryKind::Refine, {"F2", "F3"});
  b.expect(q, {"compatible"}, 0, "no common refinement of F2 and F3");
  q = b.query(QueryKind::Algebra, {"F1"});
  b.expect(q, {"size"}, 4, "2^2 events");
  q = b.query(QueryKind::Algebra, {"F2"});
  b.expect(q, {"size"}, 8, "2^3 events");
  q = b.query(QueryKind::Algebra, {"F3"});
  b.expect(q, {"size"}, 8, "2^3 events");
  q = b.query(QueryKind::Not, {"P"});
  b.expect(q, {"rank"}, 2, "I - P has rank 2");
  q = b.query(QueryKind::And, {"P", "P0"});
  b.expect(q, {"rank"}, 1, "P and [0] is [0]");
  q = b.query(QueryKind::And, {"P0", "P+"});
  b.expect(q, {"meaningless"}, 1, "[0] and [+] do not commute");
  return b.finish();
}

std::string idx(std::size_t j) { return std::to_string(j + 1); }

Scenario measurement_model(const std::vector<double>& c) {
  const std::size_t n = c.size();
  const std::size_t a = n + 1;  // ready state plus one pointer state per outcome
  const long dim = static_cast<long>(n * a);
  DocBuilder b("measurement-model",
               "particle with " + std::to_string(n) +
                   " states measured by an apparatus with a ready state and pointer states",
               dim);
  const auto index = [a](std::size_t s, std::size_t m) { return s * a + m; };

  std::vector<Complex> psi0(dim, 0.0), psi2(dim, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    psi0[index(j, 0)] = c[j];
    psi2[index(j, j + 1)] = c[j];
  }
  b.ket("psi0", psi0);
  b.ket("psi1", psi0);
  b.ket("psi2", psi2);

  // |s^j, m0> -> |s^j, m^j>; the other basis vectors fill the unused images
  // in lexicographic order.
  std::vector<std::size_t> image(dim);
  std::set<std::size_t> used;
  for (std::size_t j = 0; j < n; ++j) {
    image[index(j, 0)] = index(j, j + 1);
    used.insert(index(j, j + 1));
  }
  std::vector<std::size_t> free_targets;
  for (std::size_t t = 0; t < static_cast<std::size_t>(dim); ++t) {
    if (!used.count(t)) free_targets.push_back(t);
  }
  std::size_t next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t m = 1; m < a; ++m) image[index(s, m)] = free_targets[next++];
  }
  std::vector<std::vector<Complex>> rows(dim, std::vector<Complex>(dim, 0.0));
  for (std::size_t i = 0; i < static_cast<std::size_t>(dim); ++i) rows[image[i]][i] = 1.0;
  b.identity_unitary("I");
  b.unitary("U", rows);

  using Kind = scenario::ProjectorDecl::Kind;
  b.ket_projector("Psi1", "psi1");
  b.projector("notPsi1", Kind::Not, {"Psi1"});
  b.ket_projector("Psi2", "psi2");
  b.projector("notPsi2", Kind::Not, {"Psi2"});
  std::vector<std::string> particle, pointer, joint;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<int> d(dim, 0);
    for (std::size_t m = 0; m < a; ++m) d[index(j, m)] = 1;
    b.diag_projector("s" + idx(j), d);
    particle.push_back("s" + idx(j));
  }
  for (std::size_t k = 0; k <= n; ++k) {
    std::vector<int> d(dim, 0);
    for (std::size_t s = 0; s < n; ++s) d[index(s, k)] = 1;
    const std::string name = k == 0 ? "R'" : "m" + std::to_string(k);
    b.diag_projector(name, d);
  }
  for (std::size_t k = 1; k <= n; ++k) pointer.push_back("m" + std::to_string(k));
  pointer.push_back("R'");
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k <= n; ++k) {
      std::vector<int> d(dim, 0);
      d[index(j, k)] = 1;
      const std::string name = "s" + idx(j) + ".m" + std::to_string(k);
      b.diag_projector(name, d);
      joint.push_back(name);
    }
  }
  b.pdi("Unitary1", {"Psi1", "notPsi1"});
  b.pdi("Unitary2", {"Psi2", "notPsi2"});
  b.pdi("Particle", particle);
  b.pdi("Pointer", pointer);
  b.pdi("Joint", joint);
  b.family("Fu", "psi0", kThreeTimes, {"I", "U"}, {"Unitary1", "Unitary2"});
  b.family("F1", "psi0", kThreeTimes, {"I", "U"}, {"Unitary1", "Pointer"});
  b.family("F2", "psi0", kThreeTimes, {"I", "U"}, {"Particle", "Pointer"});
  b.family("F3", "psi0", kThreeTimes, {"I", "U"}, {"Unitary1", "Joint"});

  std::vector<double> w(n);
  std::size_t nonzero = 0;
  for (std::size_t j = 0; j < n; ++j) {
    w[j] = c[j] * c[j];
    if (w[j] > 1e-12) ++nonzero;
  }

  b.query(QueryKind::Validate);
  for (const char* f : {"Fu", "F1", "F2", "F3"}) {
    const auto q = b.query(QueryKind::Consistency, {f});
    b.expect(q, {"consistent"}, 1, std::string(f) + " is consistent");
  }
  auto q = b.query(QueryKind::Probs, {"Fu"});
  b.expect(q, {"Psi1", "Psi2"}, 1, "unitary history has probability 1");
  b.expect(q, {"Psi1", "notPsi2"}, 0, "other unitary-family histories vanish");
  b.expect(q, {"notPsi1", "Psi2"}, 0, "other unitary-family histories vanish");
  b.expect(q, {"notPsi1", "notPsi2"}, 0, "other unitary-family histories vanish");
  b.expect(q, {"Y0"}, 0, "Y0 carries no weight");

  q = b.query(QueryKind::Joint, {"F2", "t1", "t2"});
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      b.expect(q, {"s" + idx(j), "m" + idx(k)}, j == k ? w[j] : 0.0,
               "joint Pr(s_j at t1, m_k at t2) = |c_j|^2 delta_jk");
    }
    b.expect(q, {"s" + idx(j), "R'"}, 0, "pointer never left in the ready state");
  }
  const auto m1 = b.query(QueryKind::Marginal, {"F2", "t1"});
  const auto m2 = b.query(QueryKind::Marginal, {"F2", "t2"});
  const auto m3 = b.query(QueryKind::Marginal, {"F1", "t2"});
  for (std::size_t j = 0; j < n; ++j) {
    b.expect(m1, {"s" + idx(j)}, w[j], "particle marginal at t1 is |c_j|^2");
    b.expect(m2, {"m" + idx(j)}, w[j], "pointer marginal at t2 equals the particle marginal");
    b.expect(m3, {"m" + idx(j)}, w[j], "pointer probabilities in F1");
    const auto p = b.query(QueryKind::PreProb, {"psi2", "m" + idx(j)});
    b.expect(p, {"probability"}, w[j], "pre-probability route <psi2|m_j|psi2>");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (w[k] <= 1e-12) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const auto cq = b.query(QueryKind::Condition, {"F2"}, {ev("t1", {"s" + idx(j)})},
                              {ev("t2", {"m" + idx(k)})});
      b.expect(cq, {"Pr(s" + idx(j) + " at t1 | m" + idx(k) + " at t2)"}, j == k ? 1.0 : 0.0,
               "retrodiction: pointer m_k implies particle s_k at t1");
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (w[k] <= 1e-12) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const auto cq = b.query(QueryKind::Condition, {"F3"}, {ev("t2", {"s" + idx(j)})},
                              {ev("t2", {"m" + idx(k)})});
      b.expect(cq, {"Pr(s" + idx(j) + " at t2 | m" + idx(k) + " at t2)"}, j == k ? 1.0 : 0.0,
               "after the measurement the particle is in s_k");
    }
  }
  q = b.query(QueryKind::Refine, {"Unitary2", "Pointer"});
  if (nonzero >= 2) {
    b.expect(q, {"compatible"}, 0, "the unitary family cannot be refined by pointer positions");
    b.expect_error(q, ErrorCode::Incompatible, "refinement rejected");
  }
  q = b.query(QueryKind::Classify, {"F1", "F2"});
  if (nonzero >= 2) b.expect(q, {"kind"}, 0, "F1 and F2 are incompatible at t1");
  return b.finish();
}

Scenario singlet_epr() {
  DocBuilder b("singlet-epr", "two spin-1/2 particles in the singlet state, S_z basis at t1", 4);
  const double r = kRootHalf;
  // Basis |a b> with index 2a + b, 0 = up and 1 = down.
  b.ket("singlet", {0, r, -r, 0});
  b.identity_unitary("I");
  b.diag_projector("a+b+", {1, 0, 0, 0});
  b.diag_projector("a+b-", {0, 1, 0, 0});
  b.diag_projector("a-b+", {0, 0, 1, 0});
  b.diag_projector("a-b-", {0, 0, 0, 1});
  b.diag_projector("Sa+", {1, 1, 0, 0});
  b.diag_projector("Sa-", {0, 0, 1, 1});
  b.diag_projector("Sb+", {1, 0, 1, 0});
  b.diag_projector("Sb-", {0, 1, 0, 1});
  b.pdi("Basis", {"a+b+", "a+b-", "a-b+", "a-b-"});
  b.pdi("SA", {"Sa+", "Sa-"});
  b.pdi("SB", {"Sb+", "Sb-"});
  b.family("EPR", "singlet", {"t0", "t1"}, {"I"}, {"Basis"});
  b.family("EPR2", "singlet", kThreeTimes, {"I", "I"}, {"SA", "SB"});

  b.query(QueryKind::Validate);
  auto q = b.query(QueryKind::Consistency, {"EPR"});
  b.expect(q, {"consistent"}, 1, "single-time family is consistent");
  q = b.query(QueryKind::Marginal, {"EPR", "t1"});
  b.expect(q, {"a+b+"}, 0, "Pr(S_az=+, S_bz=+) = 0");
  b.expect(q, {"a+b-"}, 0.5, "Pr(S_az=+, S_bz=-) = 1/2");
  b.expect(q, {"a-b+"}, 0.5, "Pr(S_az=-, S_bz=+) = 1/2");
  b.expect(q, {"a-b-"}, 0, "Pr(S_az=-, S_bz=-) = 0");
  q = b.query(QueryKind::Condition, {"EPR"}, {ev("t1", {"Sb-"})}, {ev("t1", {"Sa+"})});
  b.expect(q, {"Pr(Sb- at t1 | Sa+ at t1)"}, 1, "S_az = + implies S_bz = -");
  q = b.query(QueryKind::Condition, {"EPR"}, {ev("t1", {"Sb+"})}, {ev("t1", {"Sa-"})});
  b.expect(q, {"Pr(Sb+ at t1 | Sa- at t1)"}, 1, "S_az = - implies S_bz = +");
  for (const char* e : {"Sa+", "Sa-", "Sb+", "Sb-"}) {
    q = b.query(QueryKind::Condition, {"EPR"}, {ev("t1", {e})});
    b.expect(q, {std::string("Pr(") + e + " at t1)"}, 0.5, "single-particle marginal is 1/2");
  }
  q = b.query(QueryKind::Joint, {"EPR2", "t1", "t2"});
  b.expect(q, {"Sa+", "Sb+"}, 0, "joint table read through S_az then S_bz");
  b.expect(q, {"Sa+", "Sb-"}, 0.5, "joint table read through S_az then S_bz");
  b.expect(q, {"Sa-", "Sb+"}, 0.5, "joint table read through S_az then S_bz");
  b.expect(q, {"Sa-", "Sb-"}, 0, "joint table read through S_az then S_bz");
  return b.finish();
}

Scenario mach_zehnder_toy() {
  DocBuilder b("mach-zehnder-toy",
               "path qubit through two beam splitters: which-path versus output-port families", 2);
  const double r = kRootHalf;
  b.ket("in0", {1, 0});
  b.unitary("BS", {{r, r}, {r, -r}});
  b.diag_projector("path0", {1, 0});
  b.diag_projector("path1", {0, 1});
  b.diag_projector("out0", {1, 0});
  b.diag_projector("out1", {0, 1});
  b.projector("Ipath", scenario::ProjectorDecl::Kind::Identity);
  b.pdi("Paths", {"path0", "path1"});
  b.pdi("Ports", {"out0", "out1"});
  b.pdi("Trivial", {"Ipath"});
  b.family("WhichPath", "in0", kThreeTimes, {"BS", "BS"}, {"Paths", "Ports"});
  b.family("Open", "in0", kThreeTimes, {"BS", "BS"}, {"Trivial", "Ports"});

  b.query(QueryKind::Validate);
  auto q = b.query(QueryKind::Consistency, {"WhichPath"});
  b.expect(q, {"consistent"}, 0, "which-path family fails the consistency conditions");
  b.expect(q, {"max_overlap"}, 0.25, "paths recombine into the same port with overlap 1/4");
  q = b.query(QueryKind::Probs, {"WhichPath"});
  b.expect_error(q, ErrorCode::Inconsistent, "no probabilities for the which-path family");
  q = b.query(QueryKind::Consistency, {"Open"});
  b.expect(q, {"consistent"}, 1, "trivial intermediate slot is consistent");
  q = b.query(QueryKind::Probs, {"Open"});
  b.expect(q, {"Ipath", "out0"}, 1, "everything leaves through port 0");
  b.expect(q, {"Ipath", "out1"}, 0, "port 1 is dark");
  return b.finish();
}

}  // namespace

std::vector<std::string> names() {
  return {"spin-half-xz", "oscillator-frameworks", "measurement-model", "singlet-epr",
          "mach-zehnder-toy"};
}

Scenario build_scenario(const std::string& name, const Options& options) {
  if (options.c && name != "measurement-model") {
    throw Error(ErrorCode::InvalidArgument, "only measurement-model takes amplitudes c");
  }
  if (name == "spin-half-xz") return spin_half_xz();
  if (name == "oscillator-frameworks") return oscillator_frameworks();
  if (name == "singlet-epr") return singlet_epr();
  if (name == "mach-zehnder-toy") return mach_zehnder_toy();
  if (name == "measurement-model") {
    const std::vector<double> c = options.c.value_or(std::vector<double>{0.6, 0.8});
    if (c.empty() || c.size() > 4) {
      throw Error(ErrorCode::InvalidArgument, "measurement-model takes between 1 and 4 amplitudes");
    }
    for (double v : c) {
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "amplitudes must be finite");
    }
    return measurement_model(c);
  }
  std::string known;
  for (const auto& n : names()) known += (known.empty() ? "" : ", ") + n;
  throw Error(ErrorCode::UnknownScenario, "no gallery scenario named '" + name + "' (known: " + known + ")");
}

std::size_t ExpectedReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const auto& e) { return !e.passed; }));
}

ExpectedReport run_expected(const Scenario& s, const RunOptions& options) {
  ExpectedReport report;
  report.scenario = s.name;
  try {
    const auto model = scenario::build_model(s.document, options.tol);
    report.run = scenario::run_queries(model, s.document, options);
  } catch (const Error& e) {
    report.build_error = e.code();
    report.build_message = e.what();
    return report;
  }
  for (const auto& exp : s.expected) {
    ExpectationResult r;
    r.expectation = exp;
    if (exp.query >= report.run.outcomes.size()) {
      r.message = "no query number " + std::to_string(exp.query + 1);
      report.entries.push_back(std::move(r));
      continue;
    }
    const auto& o = report.run.outcomes[exp.query];
    if (exp.error) {
      r.passed = o.error == exp.error;
      r.message = r.passed ? "flagged " + std::string(to_string(*exp.error))
                           : "expected " + std::string(to_string(*exp.error)) + ", got " +
                                 (o.error ? std::string(to_string(*o.error)) : std::string("no error"));
    } else if (o.status == scenario::Status::Failed) {
      r.message = "query failed: " + o.message;
    } else if (const auto* row = o.find(exp.key)) {
      r.actual = row->value;
      r.delta = std::abs(row->value - exp.value);
      r.passed = r.delta <= exp.tolerance;
    } else {
      std::string key;
      for (const auto& k : exp.key) key += (key.empty() ? "" : ",") + k;
      r.message = "no result row '" + key + "'";
    }
    report.entries.push_back(std::move(r));
  }
  return report;
}

void render_expected(const ExpectedReport& report, std::ostream& out) {
  out << "expectations for " << report.scenario << '\n';
  if (report.build_error) {
    out << "  FAIL build: error[" << to_string(*report.build_error) << "]: " << report.build_message << '\n';
    return;
  }
  for (const auto& e : report.entries) {
    const auto& x = e.expectation;
    out << "  " << (e.passed ? "pass" : "FAIL") << "  [" << (x.query + 1) << "] ";
    if (x.error) {
      out << "error " << to_string(*x.error);
    } else {
      std::string key;
      for (const auto& k : x.key) key += (key.empty() ? "" : ",") + k;
      out << key << " = " << scenario::format_tsv_value(x.value);
      if (e.actual) out << " (got " << scenario::format_tsv_value(*e.actual) << ", delta " << e.delta << ")";
    }
    if (!e.message.empty()) out << "  " << e.message;
    out << "  -- " << x.note << '\n';
  }
  out << "  " << (report.entries.size() - report.failures()) << "/" << report.entries.size()
      << " expectations met\n";
}

}  // namespace hlab::gallery
