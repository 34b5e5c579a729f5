#include "hlab/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

namespace hlab::scenario {

std::string to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::Validate: return "validate";
    case QueryKind::Consistency: return "consistency";
    case QueryKind::Probs: return "probs";
    case QueryKind::Joint: return "joint";
    case QueryKind::Marginal: return "marginal";
    case QueryKind::Condition: return "condition";
    case QueryKind::Compatible: return "compatible";
    case QueryKind::Refine: return "refine";
    case QueryKind::Classify: return "classify";
    case QueryKind::And: return "and";
    case QueryKind::Or: return "or";
    case QueryKind::Not: return "not";
    case QueryKind::Algebra: return "algebra";
    case QueryKind::PreProb: return "preprob";
  }
  return "?";
}

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string event_text(const std::vector<EventSpec>& events) {
  std::vector<std::string> parts;
  for (const auto& e : events) parts.push_back(e.time + "=" + join(e.labels, "|"));
  return join(parts, ", ");
}

}  // namespace

std::string QueryDecl::text() const {
  std::string out = to_string(kind);
  if (!names.empty()) out += " " + join(names, " ");
  if (!targets.empty()) out += " " + event_text(targets);
  if (!givens.empty()) out += " given " + event_text(givens);
  return out;
}

long ScenarioDocument::dim() const {
  for (const auto& d : declarations) {
    if (const auto* s = std::get_if<SpaceDecl>(&d)) return s->dim;
  }
  return 0;
}

std::vector<const QueryDecl*> ScenarioDocument::queries() const {
  std::vector<const QueryDecl*> out;
  for (const auto& d : declarations) {
    if (const auto* q = std::get_if<QueryDecl>(&d)) out.push_back(q);
  }
  return out;
}

namespace {

enum class NameKind { Ket, Unitary, Projector, Pdi, Family };

const char* kind_name(NameKind k) {
  switch (k) {
    case NameKind::Ket: return "ket";
    case NameKind::Unitary: return "unitary";
    case NameKind::Projector: return "projector";
    case NameKind::Pdi: return "pdi";
    case NameKind::Family: return "family";
  }
  return "?";
}

bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }

bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '\'' ||
         c == '+' || c == '-';
}

class Parser {
 public:
  explicit Parser(std::string text) : text_(std::move(text)) {
    // CRLF input: drop carriage returns that end a line.
    std::string clean;
    clean.reserve(text_.size());
    for (std::size_t i = 0; i < text_.size(); ++i) {
      if (text_[i] == '\r' && (i + 1 == text_.size() || text_[i + 1] == '\n')) continue;
      clean += text_[i];
    }
    text_ = std::move(clean);
  }

  ScenarioDocument parse() {
    for (;;) {
      skip_blank(true);
      if (at_end()) break;
      const SourcePos pos = here();
      const std::string kw = read_name("declaration keyword");
      if (kw == "space") {
        parse_space(pos);
      } else {
        if (!have_space_) fail(pos, "'space dim = <int>' must come before other declarations");
        if (kw == "ket") parse_ket(pos);
        else if (kw == "unitary") parse_unitary(pos);
        else if (kw == "projector") parse_projector(pos);
        else if (kw == "pdi") parse_pdi(pos);
        else if (kw == "family") parse_family(pos);
        else if (kw == "query") parse_query(pos);
        else fail(pos, "unknown declaration '" + kw + "'");
      }
      end_statement();
    }
    if (!have_space_) fail(here(), "missing 'space dim = <int>' declaration");
    return std::move(doc_);
  }

 private:
  std::string text_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
  bool have_space_ = false;
  std::map<std::string, NameKind> names_;
  ScenarioDocument doc_;

  [[noreturn]] void fail(SourcePos pos, const std::string& msg, ErrorCode code = ErrorCode::ParseError) {
    throw ParseFailure(code, pos, msg);
  }

  SourcePos here() const { return {line_, col_}; }
  bool at_end() const { return i_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return i_ + ahead < text_.size() ? text_[i_ + ahead] : '\0';
  }

  void advance() {
    if (text_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip_blank(bool newlines) {
    while (!at_end()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || (newlines && c == '\n')) {
        advance();
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  bool at_line_end() {
    skip_blank(false);
    return at_end() || peek() == '\n';
  }

  void end_statement() {
    if (!at_line_end()) fail(here(), std::string("unexpected '") + peek() + "' after declaration");
  }

  std::string describe_here() {
    if (at_end()) return "end of input";
    if (peek() == '\n') return "end of line";
    return std::string("'") + peek() + "'";
  }

  void expect(char c) {
    skip_blank(false);
    if (peek() != c) fail(here(), std::string("expected '") + c + "', found " + describe_here());
    advance();
  }

  void expect_word(const std::string& word) {
    skip_blank(false);
    const SourcePos pos = here();
    const std::string w = read_name("'" + word + "'");
    if (w != word) fail(pos, "expected '" + word + "', found '" + w + "'");
  }

  std::string read_name(const std::string& what) {
    skip_blank(false);
    if (!name_start(peek())) fail(here(), "expected " + what + ", found " + describe_here());
    std::string out;
    while (!at_end() && name_char(peek())) {
      if (peek() == '-' && peek(1) == '>') break;
      out += peek();
      advance();
    }
    return out;
  }

  long read_int(const std::string& what) {
    skip_blank(false);
    const SourcePos pos = here();
    std::string digits;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      digits += peek();
      advance();
    }
    if (digits.empty()) fail(pos, "expected " + what + ", found " + describe_here());
    if (digits.size() > 9) fail(pos, what + " is too large");
    return std::stol(digits);
  }

  // Reads a real number at the cursor without consuming a trailing 'i'.
  bool try_real(double& out) {
    const char c = peek();
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '+' || c == '-')) return false;
    const char* begin = text_.c_str() + i_;
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin || !std::isfinite(out)) return false;
    for (const char* p = begin; p < end; ++p) advance();
    return true;
  }

  Complex read_complex() {
    skip_blank(false);
    const SourcePos pos = here();
    double re = 0.0;
    if (!try_real(re)) fail(pos, "expected a complex literal, found " + describe_here());
    if (peek() == 'i') {
      advance();
      return {0.0, re};
    }
    skip_blank(false);
    if (peek() == '+' || peek() == '-') {
      const double sign = peek() == '-' ? -1.0 : 1.0;
      advance();
      skip_blank(false);
      double im = 0.0;
      if (peek() == '+' || peek() == '-' || !try_real(im)) {
        fail(here(), "expected the imaginary part of a complex literal");
      }
      if (peek() != 'i') fail(here(), "imaginary part must end with 'i'");
      advance();
      return {re, sign * im};
    }
    return {re, 0.0};
  }

  std::vector<Complex> read_complex_list() {
    expect('(');
    std::vector<Complex> out;
    skip_blank(false);
    if (peek() == ')') fail(here(), "empty amplitude list");
    for (;;) {
      out.push_back(read_complex());
      skip_blank(false);
      if (peek() == ',') {
        advance();
        continue;
      }
      if (peek() == ')') {
        advance();
        return out;
      }
      fail(here(), "expected ',' or ')', found " + describe_here());
    }
  }

  void declare(const std::string& name, NameKind kind, SourcePos pos) {
    if (const auto it = names_.find(name); it != names_.end()) {
      fail(pos, "'" + name + "' is already declared as a " + kind_name(it->second),
           ErrorCode::DuplicateName);
    }
    names_.emplace(name, kind);
  }

  void require(const std::string& name, NameKind kind, SourcePos pos) {
    const auto it = names_.find(name);
    if (it == names_.end()) {
      fail(pos, std::string("no ") + kind_name(kind) + " named '" + name + "' declared before this line",
           ErrorCode::UndefinedName);
    }
    if (it->second != kind) {
      fail(pos, "'" + name + "' is a " + kind_name(it->second) + ", expected a " + kind_name(kind),
           ErrorCode::UndefinedName);
    }
  }

  std::string read_reference(NameKind kind) {
    skip_blank(false);
    const SourcePos pos = here();
    std::string name = read_name(std::string(kind_name(kind)) + " name");
    require(name, kind, pos);
    return name;
  }

  std::string read_new_name(NameKind kind) {
    skip_blank(false);
    const SourcePos pos = here();
    std::string name = read_name(std::string(kind_name(kind)) + " name");
    declare(name, kind, pos);
    return name;
  }

  void parse_space(SourcePos pos) {
    if (have_space_) fail(pos, "duplicate space declaration");
    expect_word("dim");
    expect('=');
    SpaceDecl s;
    s.pos = pos;
    s.dim = read_int("dimension");
    if (s.dim < 1) fail(pos, "dimension must be positive");
    have_space_ = true;
    doc_.declarations.emplace_back(s);
  }

  void parse_ket(SourcePos pos) {
    KetDecl k;
    k.pos = pos;
    k.name = read_new_name(NameKind::Ket);
    expect('=');
    k.amplitudes = read_complex_list();
    doc_.declarations.emplace_back(std::move(k));
  }

  void parse_unitary(SourcePos pos) {
    UnitaryDecl u;
    u.pos = pos;
    u.name = read_new_name(NameKind::Unitary);
    expect('=');
    const SourcePos wpos = here();
    const std::string form = read_name("'rows' or 'identity'");
    if (form == "identity") {
      u.identity = true;
    } else if (form == "rows") {
      expect('[');
      for (;;) {
        skip_blank(true);
        u.rows.push_back(read_complex_list());
        skip_blank(true);
        if (peek() == ';') {
          advance();
          skip_blank(true);
          if (peek() == ']') {
            advance();
            break;
          }
          continue;
        }
        if (peek() == ']') {
          advance();
          break;
        }
        fail(here(), "expected ';' or ']', found " + describe_here());
      }
    } else {
      fail(wpos, "expected 'rows' or 'identity', found '" + form + "'");
    }
    doc_.declarations.emplace_back(std::move(u));
  }

  void parse_projector(SourcePos pos) {
    ProjectorDecl p;
    p.pos = pos;
    p.name = read_new_name(NameKind::Projector);
    expect('=');
    const SourcePos wpos = here();
    const std::string form = read_name("projector form");
    using Kind = ProjectorDecl::Kind;
    if (form == "ket") {
      p.kind = Kind::FromKet;
      p.operands.push_back(read_reference(NameKind::Ket));
    } else if (form == "sum") {
      p.kind = Kind::Sum;
      while (!at_line_end()) p.operands.push_back(read_reference(NameKind::Projector));
      if (p.operands.empty()) fail(here(), "'sum' needs at least one projector");
    } else if (form == "diag") {
      p.kind = Kind::Diag;
      expect('(');
      for (;;) {
        skip_blank(false);
        const SourcePos dpos = here();
        const long v = read_int("0 or 1");
        if (v != 0 && v != 1) fail(dpos, "diag entries must be 0 or 1");
        p.diagonal.push_back(static_cast<int>(v));
        skip_blank(false);
        if (peek() == ',') {
          advance();
          continue;
        }
        expect(')');
        break;
      }
    } else if (form == "not") {
      p.kind = Kind::Not;
      p.operands.push_back(read_reference(NameKind::Projector));
    } else if (form == "identity") {
      p.kind = Kind::Identity;
    } else {
      fail(wpos, "expected 'ket', 'sum', 'diag', 'not' or 'identity', found '" + form + "'");
    }
    doc_.declarations.emplace_back(std::move(p));
  }

  void parse_pdi(SourcePos pos) {
    PdiDecl d;
    d.pos = pos;
    d.name = read_new_name(NameKind::Pdi);
    expect('=');
    for (;;) {
      d.elements.push_back(read_reference(NameKind::Projector));
      skip_blank(false);
      if (peek() != ',') break;
      advance();
    }
    doc_.declarations.emplace_back(std::move(d));
  }

  void family_item_end() {
    skip_blank(false);
    if (peek() == ';' || peek() == '\n' || peek() == '}') return;
    fail(here(), "expected ';', newline or '}', found " + describe_here());
  }

  void parse_family(SourcePos pos) {
    FamilyDecl f;
    f.pos = pos;
    f.name = read_new_name(NameKind::Family);
    expect('{');
    bool have_initial = false;
    for (;;) {
      skip_blank(true);
      if (peek() == ';') {
        advance();
        continue;
      }
      if (peek() == '}') {
        advance();
        break;
      }
      if (at_end()) fail(here(), "unterminated family block (missing '}')");
      const SourcePos ipos = here();
      const std::string item = read_name("'initial', 'times', 'step' or 'slot'");
      if (item == "initial") {
        if (have_initial) fail(ipos, "duplicate 'initial'");
        expect('=');
        f.initial = read_reference(NameKind::Ket);
        have_initial = true;
      } else if (item == "times") {
        if (!f.times.empty()) fail(ipos, "duplicate 'times'");
        expect('=');
        skip_blank(false);
        while (peek() != ';' && peek() != '\n' && peek() != '}' && !at_end()) {
          const SourcePos tpos = here();
          std::string t = read_name("time label");
          if (std::find(f.times.begin(), f.times.end(), t) != f.times.end()) {
            fail(tpos, "duplicate time '" + t + "'", ErrorCode::DuplicateName);
          }
          f.times.push_back(std::move(t));
          skip_blank(false);
        }
        if (f.times.size() < 2) fail(ipos, "a family needs at least two times");
      } else if (item == "step") {
        if (f.times.empty()) fail(ipos, "'times' must be declared before steps");
        StepDecl s;
        s.pos = ipos;
        skip_blank(false);
        const SourcePos fpos = here();
        s.from = read_name("time label");
        skip_blank(false);
        if (!(peek() == '-' && peek(1) == '>')) fail(here(), "expected '->'");
        advance();
        advance();
        const SourcePos tpos = here();
        s.to = read_name("time label");
        const auto a = std::find(f.times.begin(), f.times.end(), s.from);
        const auto b = std::find(f.times.begin(), f.times.end(), s.to);
        if (a == f.times.end()) fail(fpos, "time '" + s.from + "' is not among the declared times");
        if (b == f.times.end()) fail(tpos, "time '" + s.to + "' is not among the declared times");
        if (b - a != 1) fail(fpos, "steps must connect consecutive declared times");
        for (const auto& prior : f.steps) {
          if (prior.from == s.from) fail(ipos, "duplicate step " + s.from + "->" + s.to);
        }
        expect('=');
        s.unitary = read_reference(NameKind::Unitary);
        f.steps.push_back(std::move(s));
      } else if (item == "slot") {
        if (f.times.empty()) fail(ipos, "'times' must be declared before slots");
        SlotDecl s;
        s.pos = ipos;
        skip_blank(false);
        const SourcePos tpos = here();
        s.time = read_name("time label");
        const auto a = std::find(f.times.begin(), f.times.end(), s.time);
        if (a == f.times.end()) fail(tpos, "time '" + s.time + "' is not among the declared times");
        if (a == f.times.begin()) fail(tpos, "the initial time carries the initial state, not a slot");
        for (const auto& prior : f.slots) {
          if (prior.time == s.time) fail(ipos, "duplicate slot for time '" + s.time + "'");
        }
        expect('=');
        s.pdi = read_reference(NameKind::Pdi);
        f.slots.push_back(std::move(s));
      } else {
        fail(ipos, "expected 'initial', 'times', 'step' or 'slot', found '" + item + "'");
      }
      family_item_end();
    }
    if (!have_initial) fail(pos, "family '" + f.name + "' has no 'initial'");
    if (f.times.empty()) fail(pos, "family '" + f.name + "' has no 'times'");
    const auto order = [&](const std::string& t) {
      return std::find(f.times.begin(), f.times.end(), t) - f.times.begin();
    };
    std::sort(f.steps.begin(), f.steps.end(),
              [&](const StepDecl& a, const StepDecl& b) { return order(a.from) < order(b.from); });
    std::sort(f.slots.begin(), f.slots.end(),
              [&](const SlotDecl& a, const SlotDecl& b) { return order(a.time) < order(b.time); });
    for (std::size_t k = 1; k < f.times.size(); ++k) {
      if (k > f.steps.size() || f.steps[k - 1].from != f.times[k - 1]) {
        fail(pos, "family '" + f.name + "' is missing step " + f.times[k - 1] + "->" + f.times[k]);
      }
      if (k > f.slots.size() || f.slots[k - 1].time != f.times[k]) {
        fail(pos, "family '" + f.name + "' is missing a slot for time '" + f.times[k] + "'");
      }
    }
    doc_.declarations.emplace_back(std::move(f));
  }

  std::vector<EventSpec> read_events() {
    std::vector<EventSpec> out;
    for (;;) {
      EventSpec e;
      e.time = read_name("time label");
      expect('=');
      e.labels.push_back(read_name("event label"));
      while (peek() == '|') {
        advance();
        e.labels.push_back(read_name("event label"));
      }
      out.push_back(std::move(e));
      skip_blank(false);
      if (peek() != ',') break;
      advance();
    }
    return out;
  }

  void parse_query(SourcePos pos) {
    QueryDecl q;
    q.pos = pos;
    skip_blank(false);
    const SourcePos kpos = here();
    const std::string kind = read_name("query kind");
    const auto refs = [&](std::initializer_list<NameKind> kinds) {
      for (const auto k : kinds) q.names.push_back(read_reference(k));
    };
    if (kind == "validate") {
      q.kind = QueryKind::Validate;
    } else if (kind == "consistency") {
      q.kind = QueryKind::Consistency;
      refs({NameKind::Family});
    } else if (kind == "probs") {
      q.kind = QueryKind::Probs;
      refs({NameKind::Family});
    } else if (kind == "joint") {
      q.kind = QueryKind::Joint;
      refs({NameKind::Family});
      q.names.push_back(read_name("time label"));
      q.names.push_back(read_name("time label"));
    } else if (kind == "marginal") {
      q.kind = QueryKind::Marginal;
      refs({NameKind::Family});
      q.names.push_back(read_name("time label"));
    } else if (kind == "condition") {
      q.kind = QueryKind::Condition;
      refs({NameKind::Family});
      q.targets = read_events();
      if (!at_line_end()) {
        expect_word("given");
        q.givens = read_events();
      }
    } else if (kind == "compatible" || kind == "refine") {
      q.kind = kind == "compatible" ? QueryKind::Compatible : QueryKind::Refine;
      refs({NameKind::Pdi, NameKind::Pdi});
    } else if (kind == "classify") {
      q.kind = QueryKind::Classify;
      refs({NameKind::Family, NameKind::Family});
    } else if (kind == "and" || kind == "or") {
      q.kind = kind == "and" ? QueryKind::And : QueryKind::Or;
      refs({NameKind::Projector, NameKind::Projector});
    } else if (kind == "not") {
      q.kind = QueryKind::Not;
      refs({NameKind::Projector});
    } else if (kind == "algebra") {
      q.kind = QueryKind::Algebra;
      refs({NameKind::Pdi});
    } else if (kind == "preprob") {
      q.kind = QueryKind::PreProb;
      refs({NameKind::Ket, NameKind::Projector});
    } else {
      fail(kpos, "unknown query kind '" + kind + "'");
    }
    doc_.declarations.emplace_back(std::move(q));
  }
};

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_complex(Complex z) {
  const double re = z.real() == 0.0 ? 0.0 : z.real();
  const double im = z.imag() == 0.0 ? 0.0 : z.imag();
  if (im == 0.0) return format_real(re);
  if (re == 0.0) return format_real(im) + "i";
  return format_real(re) + (im < 0 ? "-" : "+") + format_real(std::abs(im)) + "i";
}

std::string format_list(const std::vector<Complex>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_complex(v[i]);
  }
  return out + ")";
}

struct Writer {
  std::ostream& out;

  void operator()(const SpaceDecl& s) { out << "space dim = " << s.dim << '\n'; }
  void operator()(const KetDecl& k) { out << "ket " << k.name << " = " << format_list(k.amplitudes) << '\n'; }
  void operator()(const UnitaryDecl& u) {
    out << "unitary " << u.name << " = ";
    if (u.identity) {
      out << "identity\n";
      return;
    }
    out << "rows [";
    for (std::size_t r = 0; r < u.rows.size(); ++r) {
      out << (r ? ";\n    " : " ") << format_list(u.rows[r]);
    }
    out << " ]\n";
  }
  void operator()(const ProjectorDecl& p) {
    out << "projector " << p.name << " = ";
    using Kind = ProjectorDecl::Kind;
    switch (p.kind) {
      case Kind::FromKet: out << "ket " << p.operands.at(0); break;
      case Kind::Sum: out << "sum " << join(p.operands, " "); break;
      case Kind::Not: out << "not " << p.operands.at(0); break;
      case Kind::Identity: out << "identity"; break;
      case Kind::Diag: {
        out << "diag(";
        for (std::size_t i = 0; i < p.diagonal.size(); ++i) out << (i ? ", " : "") << p.diagonal[i];
        out << ")";
        break;
      }
    }
    out << '\n';
  }
  void operator()(const PdiDecl& d) { out << "pdi " << d.name << " = " << join(d.elements, ", ") << '\n'; }
  void operator()(const FamilyDecl& f) {
    out << "family " << f.name << " {\n";
    out << "  initial = " << f.initial << "\n";
    out << "  times = " << join(f.times, " ") << "\n";
    for (const auto& s : f.steps) out << "  step " << s.from << "->" << s.to << " = " << s.unitary << "\n";
    for (const auto& s : f.slots) out << "  slot " << s.time << " = " << s.pdi << "\n";
    out << "}\n";
  }
  void operator()(const QueryDecl& q) { out << "query " << q.text() << '\n'; }
};

}  // namespace

ScenarioDocument parse_scenario(const std::string& text) { return Parser(text).parse(); }

void write_scenario(const ScenarioDocument& doc, std::ostream& out) {
  Writer w{out};
  for (const auto& d : doc.declarations) std::visit(w, d);
}

std::string write_scenario(const ScenarioDocument& doc) {
  std::ostringstream os;
  write_scenario(doc, os);
  return os.str();
}

}  // namespace hlab::scenario
