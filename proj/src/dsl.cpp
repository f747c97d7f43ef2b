#include "rfeas/dsl.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <set>

#include "rfeas/error.hpp"
#include "rfeas/format.hpp"

namespace rfeas {

const char* role_keyword(Role role) noexcept {
  switch (role) {
    case Role::Uncertain: return "param";
    case Role::Control: return "control";
    case Role::Design: return "design";
  }
  return "?";
}

const VariableSpec* Problem::find(std::string_view n) const {
  for (const auto& v : variables) {
    if (v.name == n) return &v;
  }
  return nullptr;
}

std::vector<const VariableSpec*> Problem::with_role(Role role) const {
  std::vector<const VariableSpec*> out;
  for (const auto& v : variables) {
    if (v.role == role) out.push_back(&v);
  }
  return out;
}

bool Problem::has_controls() const { return !with_role(Role::Control).empty(); }

Env Problem::design_values() const {
  Env env;
  for (const auto& v : variables) {
    if (v.role == Role::Design) env[v.name] = v.fixed_value;
  }
  return env;
}

namespace {

constexpr std::array<std::string_view, 4> kFunctions{"abs", "sqrt", "min", "max"};

bool is_function_name(std::string_view s) {
  return std::find(kFunctions.begin(), kFunctions.end(), s) != kFunctions.end();
}

enum class Tok {
  End,
  Ident,
  Number,
  Plus,
  Minus,
  Star,
  Slash,
  Caret,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Colon,
  Equals,
  LessEq,
  GreaterEq,
};

struct Token {
  Tok kind = Tok::End;
  std::string_view text;
  double number = 0.0;
  int column = 1;
};

std::vector<Token> tokenize(std::string_view line, int line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    const int col = static_cast<int>(i) + 1;
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') break;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i + 1;
      while (j < line.size() &&
             (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_')) {
        ++j;
      }
      out.push_back({Tok::Ident, line.substr(i, j - i), 0.0, col});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      auto digits = [&] {
        std::size_t start = j;
        while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
        return j > start;
      };
      digits();
      if (j < line.size() && line[j] == '.') {
        ++j;
        if (!digits()) throw SyntaxError(line_no, static_cast<int>(j), "expected digits after '.'");
      }
      if (j < line.size() && (line[j] == 'e' || line[j] == 'E')) {
        ++j;
        if (j < line.size() && (line[j] == '+' || line[j] == '-')) ++j;
        if (!digits()) throw SyntaxError(line_no, static_cast<int>(j), "malformed exponent");
      }
      Token t{Tok::Number, line.substr(i, j - i), 0.0, col};
      auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
      if (res.ec != std::errc{} || !std::isfinite(t.number)) {
        throw SyntaxError(line_no, col, "number out of range");
      }
      out.push_back(t);
      i = j;
      continue;
    }
    Tok kind = Tok::End;
    std::size_t len = 1;
    switch (c) {
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      case '/': kind = Tok::Slash; break;
      case '^': kind = Tok::Caret; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case '[': kind = Tok::LBracket; break;
      case ']': kind = Tok::RBracket; break;
      case ',': kind = Tok::Comma; break;
      case ':': kind = Tok::Colon; break;
      case '=': kind = Tok::Equals; break;
      case '<':
      case '>':
        if (i + 1 < line.size() && line[i + 1] == '=') {
          kind = c == '<' ? Tok::LessEq : Tok::GreaterEq;
          len = 2;
          break;
        }
        [[fallthrough]];
      default:
        throw SyntaxError(line_no, col, std::string("unexpected character '") + c + "'");
    }
    out.push_back({kind, line.substr(i, len), 0.0, col});
    i += len;
  }
  out.push_back({Tok::End, {}, 0.0, static_cast<int>(line.size()) + 1});
  return out;
}

class LineParser {
 public:
  LineParser(std::vector<Token> tokens, int line_no)
      : toks_(std::move(tokens)), line_(line_no) {}

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw SyntaxError(line_, t.column, msg);
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) fail(peek(), std::string("expected ") + what);
    return next();
  }
  void expect_end() {
    if (peek().kind != Tok::End) fail(peek(), "unexpected trailing input");
  }

  std::string_view identifier(const char* what) {
    const Token& t = expect(Tok::Ident, what);
    return t.text;
  }

  double signed_number() {
    const bool negative = accept(Tok::Minus);
    const double v = expect(Tok::Number, "number").number;
    return negative ? -v : v;
  }

  Expr expression() { return climb(unary(), 1); }

 private:
  static int precedence(Tok k) {
    switch (k) {
      case Tok::Plus:
      case Tok::Minus: return 1;
      case Tok::Star:
      case Tok::Slash: return 2;
      case Tok::Caret: return 4;
      default: return 0;
    }
  }
  static constexpr int kUnaryPrecedence = 3;

  // Precedence climbing over the binary operators; '^' is right associative.
  Expr climb(Expr lhs, int min_prec) {
    while (true) {
      const Token& op = peek();
      const int prec = precedence(op.kind);
      if (prec == 0 || prec < min_prec) return lhs;
      next();
      if (op.kind == Tok::Caret) {
        const Token& start = peek();
        Expr exponent = climb(unary(), prec);
        Expr folded = substitute(exponent, Env{});
        if (!folded.is_constant()) fail(start, "exponent must be a constant");
        lhs = Expr::pow(std::move(lhs), folded.value());
        continue;
      }
      Expr rhs = unary();
      while (precedence(peek().kind) > prec) {
        rhs = climb(std::move(rhs), prec + 1);
      }
      switch (op.kind) {
        case Tok::Plus: lhs = std::move(lhs) + std::move(rhs); break;
        case Tok::Minus: lhs = std::move(lhs) - std::move(rhs); break;
        case Tok::Star: lhs = std::move(lhs) * std::move(rhs); break;
        default: lhs = std::move(lhs) / std::move(rhs); break;
      }
    }
  }

  Expr unary() {
    if (accept(Tok::Minus)) return Expr::negate(climb(unary(), kUnaryPrecedence));
    return primary();
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: next(); return Expr::constant(t.number);
      case Tok::LParen: {
        next();
        Expr e = expression();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: {
        next();
        if (peek().kind != Tok::LParen) {
          if (is_function_name(t.text)) fail(t, "function '" + std::string(t.text) + "' needs arguments");
          return Expr::variable(std::string(t.text));
        }
        if (!is_function_name(t.text)) fail(t, "unknown function '" + std::string(t.text) + "'");
        next();
        std::vector<Expr> args{expression()};
        while (accept(Tok::Comma)) args.push_back(expression());
        expect(Tok::RParen, "')'");
        if (t.text == "abs" || t.text == "sqrt") {
          if (args.size() != 1) fail(t, std::string(t.text) + " takes exactly one argument");
          return t.text == "abs" ? Expr::abs(std::move(args[0])) : Expr::sqrt(std::move(args[0]));
        }
        if (args.size() < 2) fail(t, std::string(t.text) + " takes at least two arguments");
        return t.text == "min" ? Expr::min(std::move(args)) : Expr::max(std::move(args));
      }
      default: fail(t, t.kind == Tok::End ? "unexpected end of expression" : "expected an operand");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int line_;
};

struct Declared {
  VariableSpec spec;
  int line = 0;
};

bool is_zero_literal(const Expr& e) { return e.is_constant() && e.value() == 0.0 && !std::signbit(e.value()); }

void check_identifier(LineParser& lp, const Token& t) {
  if (is_function_name(t.text)) lp.fail(t, "'" + std::string(t.text) + "' is reserved");
}

}  // namespace

Expr parse_expr(std::string_view text) {
  if (text.find('\n') != std::string_view::npos) {
    auto nl = text.find('\n');
    if (text.find_first_not_of(" \t\r\n", nl) != std::string_view::npos) {
      throw SyntaxError(1, static_cast<int>(nl) + 1, "expression must be a single line");
    }
    text = text.substr(0, nl);
  }
  LineParser lp(tokenize(text, 1), 1);
  Expr e = lp.expression();
  lp.expect_end();
  return e;
}

Problem parse_problem(std::string_view text) {
  Problem p;
  bool have_header = false;
  bool have_alpha = false;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;

    LineParser lp(tokenize(line, line_no), line_no);
    if (lp.peek().kind == Tok::End) {
      if (end == text.size()) break;
      continue;
    }
    const Token kw = lp.expect(Tok::Ident, "a directive");
    if (kw.text == "problem") {
      if (have_header) lp.fail(kw, "duplicate problem header");
      have_header = true;
      p.name = std::string(lp.identifier("problem name"));
      lp.expect_end();
    } else if (kw.text == "param" || kw.text == "control" || kw.text == "design") {
      const Token name_tok = lp.expect(Tok::Ident, "variable name");
      check_identifier(lp, name_tok);
      VariableSpec spec;
      spec.name = std::string(name_tok.text);
      spec.role = kw.text == "param" ? Role::Uncertain : kw.text == "control" ? Role::Control : Role::Design;
      if (p.find(spec.name)) {
        throw Error(ErrorCode::DuplicateVariable,
                    "line " + std::to_string(line_no) + ": duplicate variable '" + spec.name + "'");
      }
      if (spec.role == Role::Design) {
        if (lp.peek().kind != Tok::Equals) {
          throw Error(ErrorCode::MissingBounds, "line " + std::to_string(line_no) + ": design variable '" +
                                                    spec.name + "' needs a fixed value (design NAME = VALUE)");
        }
        lp.next();
        spec.fixed_value = lp.signed_number();
      } else {
        if (!(lp.peek().kind == Tok::Ident && lp.peek().text == "in")) {
          throw Error(ErrorCode::MissingBounds, "line " + std::to_string(line_no) + ": variable '" + spec.name +
                                                    "' needs bounds (" + std::string(kw.text) +
                                                    " NAME in [LO, HI])");
        }
        lp.next();
        lp.expect(Tok::LBracket, "'['");
        spec.lo = lp.signed_number();
        lp.expect(Tok::Comma, "','");
        spec.hi = lp.signed_number();
        lp.expect(Tok::RBracket, "']'");
        if (!(spec.lo < spec.hi)) {
          throw Error(ErrorCode::InvalidBounds,
                      "line " + std::to_string(line_no) + ": bounds of '" + spec.name + "' need lo < hi");
        }
      }
      lp.expect_end();
      p.variables.push_back(std::move(spec));
    } else if (kw.text == "alpha") {
      if (have_alpha) lp.fail(kw, "duplicate alpha directive");
      have_alpha = true;
      p.alpha = lp.signed_number();
      lp.expect_end();
      if (!(p.alpha > -1.0 && p.alpha <= 1.0)) {
        throw Error(ErrorCode::AlphaOutOfRange,
                    "line " + std::to_string(line_no) + ": alpha must satisfy -1 < alpha <= 1");
      }
    } else if (kw.text == "constraint") {
      const std::string label(lp.identifier("constraint label"));
      lp.expect(Tok::Colon, "':'");
      Expr lhs = lp.expression();
      const Token rel = lp.next();
      if (rel.kind != Tok::LessEq && rel.kind != Tok::GreaterEq) lp.fail(rel, "expected '<=' or '>='");
      Expr rhs = lp.expression();
      lp.expect_end();
      Expr g;
      if (rel.kind == Tok::LessEq) {
        g = is_zero_literal(rhs) ? lhs : lhs - rhs;
      } else {
        g = is_zero_literal(rhs) ? Expr::negate(lhs) : rhs - lhs;
      }
      p.constraints.push_back({label, std::move(g)});
    } else {
      lp.fail(kw, "unknown directive '" + std::string(kw.text) + "'");
    }
  }
  validate(p);
  return p;
}

void validate(Problem& p) {
  p.warnings.clear();
  if (!(p.alpha > -1.0 && p.alpha <= 1.0)) {
    throw Error(ErrorCode::AlphaOutOfRange, "alpha must satisfy -1 < alpha <= 1");
  }
  std::set<std::string, std::less<>> names;
  for (const auto& v : p.variables) {
    if (!names.insert(v.name).second) {
      throw Error(ErrorCode::DuplicateVariable, "duplicate variable '" + v.name + "'");
    }
    if (v.role != Role::Design && !(v.lo < v.hi)) {
      throw Error(ErrorCode::InvalidBounds, "bounds of '" + v.name + "' need lo < hi");
    }
  }
  if (p.constraints.empty()) throw Error(ErrorCode::InvalidProblem, "problem has no constraints");
  std::set<std::string, std::less<>> labels;
  std::set<std::string, std::less<>> used;
  for (const auto& c : p.constraints) {
    if (!labels.insert(c.label).second) {
      throw Error(ErrorCode::InvalidProblem, "duplicate constraint label '" + c.label + "'");
    }
    for (const auto& n : referenced_variables(c.g)) {
      if (!names.count(n)) {
        throw Error(ErrorCode::UnknownVariable,
                    "constraint '" + c.label + "' references undeclared variable '" + n + "'");
      }
      used.insert(n);
    }
  }
  for (const auto& v : p.variables) {
    if (!used.count(v.name)) p.warnings.push_back("variable '" + v.name + "' is declared but never used");
  }
}

std::string emit_problem(const Problem& p) {
  std::string out = "problem " + p.name + "\n";
  for (const auto& v : p.variables) {
    out += role_keyword(v.role);
    out += ' ' + v.name;
    if (v.role == Role::Design) {
      out += " = " + format_double(v.fixed_value) + "\n";
    } else {
      out += " in [" + format_double(v.lo) + ", " + format_double(v.hi) + "]\n";
    }
  }
  out += "alpha " + format_double(p.alpha) + "\n";
  for (const auto& c : p.constraints) {
    out += "constraint " + c.label + ": " + to_text(c.g) + " <= 0\n";
  }
  return out;
}

bool same_problem(const Problem& a, const Problem& b) {
  auto bits = [](double v) { return std::bit_cast<std::uint64_t>(v); };
  if (a.name != b.name || bits(a.alpha) != bits(b.alpha)) return false;
  if (a.variables.size() != b.variables.size() || a.constraints.size() != b.constraints.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.variables.size(); ++i) {
    const auto& x = a.variables[i];
    const auto& y = b.variables[i];
    if (x.name != y.name || x.role != y.role || bits(x.lo) != bits(y.lo) || bits(x.hi) != bits(y.hi) ||
        bits(x.fixed_value) != bits(y.fixed_value)) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.constraints.size(); ++i) {
    if (a.constraints[i].label != b.constraints[i].label ||
        !structurally_equal(a.constraints[i].g, b.constraints[i].g)) {
      return false;
    }
  }
  return true;
}

}  // namespace rfeas
