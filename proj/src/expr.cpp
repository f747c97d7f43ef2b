#include "rfeas/expr.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <unordered_map>
#include <utility>

#include "kernels.hpp"
#include "rfeas/error.hpp"
#include "rfeas/format.hpp"

namespace rfeas {

struct Expr::Node {
  Kind kind = Kind::Constant;
  double value = 0.0;
  std::string name;
  std::vector<Expr> children;
};

namespace {

using detail::checked;

double checked_input(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "variable value is not finite");
  return v;
}

bool is_binary(Expr::Kind k) {
  return k == Expr::Kind::Add || k == Expr::Kind::Sub || k == Expr::Kind::Mul ||
         k == Expr::Kind::Div;
}

double apply_unary(Expr::Kind kind, double v) {
  switch (kind) {
    case Expr::Kind::Negate: return -v;
    case Expr::Kind::Abs: return std::fabs(v);
    case Expr::Kind::Sqrt: return detail::k_sqrt(v);
    default: break;
  }
  throw Error(ErrorCode::Internal, "not a unary node");
}

double apply_binary(Expr::Kind kind, double a, double b) {
  switch (kind) {
    case Expr::Kind::Add: return checked(a + b);
    case Expr::Kind::Sub: return checked(a - b);
    case Expr::Kind::Mul: return checked(a * b);
    case Expr::Kind::Div: return detail::k_div(a, b);
    default: break;
  }
  throw Error(ErrorCode::Internal, "not a binary node");
}

// n-ary min/max fold left to right; operands are finite so std::min/max are exact.
double fold_extremum(Expr::Kind kind, double acc, double v) {
  return kind == Expr::Kind::Min ? std::min(acc, v) : std::max(acc, v);
}

const char* binary_symbol(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::Add: return " + ";
    case Expr::Kind::Sub: return " - ";
    case Expr::Kind::Mul: return " * ";
    case Expr::Kind::Div: return " / ";
    default: return " ? ";
  }
}

double eval_node(const Expr& e, const Env& env) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return e.value();
    case Expr::Kind::Variable: {
      auto it = env.find(e.name());
      if (it == env.end()) {
        throw Error(ErrorCode::UnboundVariable, "unbound variable '" + e.name() + "'");
      }
      return checked_input(it->second);
    }
    case Expr::Kind::Negate:
    case Expr::Kind::Abs:
    case Expr::Kind::Sqrt: return apply_unary(e.kind(), eval_node(e.children()[0], env));
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
    case Expr::Kind::Mul:
    case Expr::Kind::Div: {
      const double a = eval_node(e.children()[0], env);
      const double b = eval_node(e.children()[1], env);
      return apply_binary(e.kind(), a, b);
    }
    case Expr::Kind::Pow: return detail::k_pow(eval_node(e.children()[0], env), e.value());
    case Expr::Kind::Min:
    case Expr::Kind::Max: {
      auto args = e.children();
      double acc = eval_node(args[0], env);
      for (std::size_t i = 1; i < args.size(); ++i) {
        acc = fold_extremum(e.kind(), acc, eval_node(args[i], env));
      }
      return acc;
    }
  }
  throw Error(ErrorCode::Internal, "corrupt expression node");
}

bool is_atomic_text(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return !std::signbit(e.value());
    case Expr::Kind::Variable:
    case Expr::Kind::Abs:
    case Expr::Kind::Sqrt:
    case Expr::Kind::Min:
    case Expr::Kind::Max: return true;
    default: return false;
  }
}

void render(const Expr& e, std::string& out);

void render_operand(const Expr& e, std::string& out) {
  if (is_atomic_text(e)) {
    render(e, out);
  } else {
    out += '(';
    render(e, out);
    out += ')';
  }
}

void render(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      if (std::signbit(e.value())) {
        out += '-';
        out += format_double(-e.value());
      } else {
        out += format_double(e.value());
      }
      return;
    case Expr::Kind::Variable: out += e.name(); return;
    case Expr::Kind::Negate:
      out += '-';
      render_operand(e.children()[0], out);
      return;
    case Expr::Kind::Abs:
    case Expr::Kind::Sqrt:
    case Expr::Kind::Min:
    case Expr::Kind::Max: {
      out += e.kind() == Expr::Kind::Abs    ? "abs("
             : e.kind() == Expr::Kind::Sqrt ? "sqrt("
             : e.kind() == Expr::Kind::Min  ? "min("
                                            : "max(";
      bool first = true;
      for (const Expr& c : e.children()) {
        if (!first) out += ", ";
        first = false;
        render(c, out);
      }
      out += ')';
      return;
    }
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
    case Expr::Kind::Mul:
    case Expr::Kind::Div:
      render_operand(e.children()[0], out);
      out += binary_symbol(e.kind());
      render_operand(e.children()[1], out);
      return;
    case Expr::Kind::Pow:
      render_operand(e.children()[0], out);
      out += " ^ ";
      if (std::signbit(e.value())) {
        out += "(-" + format_double(-e.value()) + ")";
      } else {
        out += format_double(e.value());
      }
      return;
  }
}

}  // namespace

Expr::Expr() : node_(std::make_shared<const Node>()) {}

Expr Expr::constant(double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::NonFiniteInput, "constant must be finite");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->name = std::move(name);
  return Expr(std::move(n));
}

namespace {
template <class NodeT>
std::shared_ptr<NodeT> make_node(Expr::Kind kind, std::vector<Expr> children, double value = 0.0) {
  auto n = std::make_shared<NodeT>();
  n->kind = kind;
  n->value = value;
  n->children = std::move(children);
  return n;
}
}  // namespace

Expr Expr::negate(Expr child) { return Expr(make_node<Node>(Kind::Negate, {std::move(child)})); }
Expr Expr::abs(Expr child) { return Expr(make_node<Node>(Kind::Abs, {std::move(child)})); }
Expr Expr::sqrt(Expr child) { return Expr(make_node<Node>(Kind::Sqrt, {std::move(child)})); }

Expr Expr::binary(Kind kind, Expr left, Expr right) {
  if (!is_binary(kind)) throw Error(ErrorCode::InvalidArgument, "not a binary operator");
  return Expr(make_node<Node>(kind, {std::move(left), std::move(right)}));
}

Expr Expr::pow(Expr base, double exponent) {
  if (!std::isfinite(exponent)) {
    throw Error(ErrorCode::NonFiniteInput, "exponent must be finite");
  }
  return Expr(make_node<Node>(Kind::Pow, {std::move(base)}, exponent));
}

Expr Expr::min(std::vector<Expr> args) {
  if (args.size() < 2) throw Error(ErrorCode::InvalidArgument, "min needs at least two arguments");
  return Expr(make_node<Node>(Kind::Min, std::move(args)));
}

Expr Expr::max(std::vector<Expr> args) {
  if (args.size() < 2) throw Error(ErrorCode::InvalidArgument, "max needs at least two arguments");
  return Expr(make_node<Node>(Kind::Max, std::move(args)));
}

Expr::Kind Expr::kind() const noexcept { return node_->kind; }
double Expr::value() const noexcept { return node_->value; }
const std::string& Expr::name() const noexcept { return node_->name; }
std::span<const Expr> Expr::children() const noexcept { return node_->children; }

Expr operator+(Expr a, Expr b) { return Expr::binary(Expr::Kind::Add, std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return Expr::binary(Expr::Kind::Sub, std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return Expr::binary(Expr::Kind::Mul, std::move(a), std::move(b)); }
Expr operator/(Expr a, Expr b) { return Expr::binary(Expr::Kind::Div, std::move(a), std::move(b)); }
Expr operator-(Expr a) { return Expr::negate(std::move(a)); }

double eval(const Expr& e, const Env& env) { return eval_node(e, env); }

namespace {
Expr rebuild(const Expr& x, std::vector<Expr> kids) {
  switch (x.kind()) {
    case Expr::Kind::Negate: return Expr::negate(kids[0]);
    case Expr::Kind::Abs: return Expr::abs(kids[0]);
    case Expr::Kind::Sqrt: return Expr::sqrt(kids[0]);
    case Expr::Kind::Pow: return Expr::pow(kids[0], x.value());
    case Expr::Kind::Min: return Expr::min(std::move(kids));
    case Expr::Kind::Max: return Expr::max(std::move(kids));
    default: return Expr::binary(x.kind(), kids[0], kids[1]);
  }
}
}  // namespace

Expr substitute(const Expr& e, const Env& bindings) {
  std::unordered_map<const void*, Expr> memo;
  std::function<Expr(const Expr&)> go = [&](const Expr& x) -> Expr {
    if (auto it = memo.find(x.id()); it != memo.end()) return it->second;
    Expr result = x;
    switch (x.kind()) {
      case Expr::Kind::Constant: break;
      case Expr::Kind::Variable:
        if (auto b = bindings.find(x.name()); b != bindings.end()) {
          result = Expr::constant(b->second);
        }
        break;
      default: {
        std::vector<Expr> kids;
        kids.reserve(x.children().size());
        bool changed = false;
        bool all_constant = true;
        for (const Expr& c : x.children()) {
          kids.push_back(go(c));
          changed = changed || kids.back().id() != c.id();
          all_constant = all_constant && kids.back().is_constant();
        }
        if (changed) result = rebuild(x, std::move(kids));
        if (all_constant) {
          // Folding reuses the evaluation kernels; a node that would raise
          // (e.g. division by a zero constant) is left in place.
          try {
            result = Expr::constant(eval_node(result, Env{}));
          } catch (const Error&) {
          }
        }
        break;
      }
    }
    memo.emplace(x.id(), result);
    return result;
  };
  return go(e);
}

std::string to_text(const Expr& e) {
  std::string out;
  render(e, out);
  return out;
}

std::set<std::string, std::less<>> referenced_variables(const Expr& e) {
  std::set<std::string, std::less<>> names;
  std::set<const void*> seen;
  std::vector<Expr> stack{e};
  while (!stack.empty()) {
    Expr x = stack.back();
    stack.pop_back();
    if (!seen.insert(x.id()).second) continue;
    if (x.kind() == Expr::Kind::Variable) names.insert(x.name());
    for (const Expr& c : x.children()) stack.push_back(c);
  }
  return names;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.id() == b.id()) return true;
  if (a.kind() != b.kind()) return false;
  if (std::bit_cast<std::uint64_t>(a.value()) != std::bit_cast<std::uint64_t>(b.value())) {
    return false;
  }
  if (a.name() != b.name()) return false;
  auto ca = a.children();
  auto cb = b.children();
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (!structurally_equal(ca[i], cb[i])) return false;
  }
  return true;
}

std::size_t distinct_node_count(const Expr& e) {
  std::set<const void*> seen;
  std::vector<Expr> stack{e};
  while (!stack.empty()) {
    Expr x = stack.back();
    stack.pop_back();
    if (!seen.insert(x.id()).second) continue;
    for (const Expr& c : x.children()) stack.push_back(c);
  }
  return seen.size();
}

CompiledExpr::CompiledExpr(const Expr& e, const std::vector<std::string>& slots)
    : slot_names_(slots) {
  std::unordered_map<const void*, std::uint32_t> reg;
  // Iterative post-order so deep trees cannot overflow the call stack.
  std::vector<std::pair<Expr, bool>> stack{{e, false}};
  while (!stack.empty()) {
    auto [x, expanded] = stack.back();
    stack.pop_back();
    if (reg.count(x.id())) continue;
    if (!expanded) {
      stack.emplace_back(x, true);
      auto kids = x.children();
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
        if (!reg.count(it->id())) stack.emplace_back(*it, false);
      }
      continue;
    }
    Instr ins{x.kind()};
    switch (x.kind()) {
      case Expr::Kind::Constant: ins.c = x.value(); break;
      case Expr::Kind::Variable: {
        auto it = std::find(slots.begin(), slots.end(), x.name());
        if (it == slots.end()) {
          throw Error(ErrorCode::UnboundVariable, "unbound variable '" + x.name() + "'");
        }
        ins.a = static_cast<std::uint32_t>(it - slots.begin());
        break;
      }
      case Expr::Kind::Min:
      case Expr::Kind::Max:
        ins.b = static_cast<std::uint32_t>(nary_args_.size());
        ins.n = static_cast<std::uint32_t>(x.children().size());
        for (const Expr& c : x.children()) nary_args_.push_back(reg.at(c.id()));
        break;
      case Expr::Kind::Pow:
        ins.a = reg.at(x.children()[0].id());
        ins.c = x.value();
        break;
      default:
        ins.a = reg.at(x.children()[0].id());
        if (x.children().size() > 1) ins.b = reg.at(x.children()[1].id());
        break;
    }
    reg.emplace(x.id(), static_cast<std::uint32_t>(code_.size()));
    code_.push_back(ins);
  }
}

double CompiledExpr::operator()(std::span<const double> values) const {
  if (values.size() < slot_names_.size()) {
    throw Error(ErrorCode::UnboundVariable, "too few values for compiled expression");
  }
  constexpr std::size_t kInline = 256;
  std::array<double, kInline> inline_regs;
  std::vector<double> heap_regs;
  double* r = inline_regs.data();
  if (code_.size() > kInline) {
    heap_regs.resize(code_.size());
    r = heap_regs.data();
  }
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& ins = code_[i];
    switch (ins.kind) {
      case Expr::Kind::Constant: r[i] = ins.c; break;
      case Expr::Kind::Variable: r[i] = checked_input(values[ins.a]); break;
      case Expr::Kind::Negate: r[i] = -r[ins.a]; break;
      case Expr::Kind::Abs: r[i] = std::fabs(r[ins.a]); break;
      case Expr::Kind::Sqrt: r[i] = detail::k_sqrt(r[ins.a]); break;
      case Expr::Kind::Add: r[i] = checked(r[ins.a] + r[ins.b]); break;
      case Expr::Kind::Sub: r[i] = checked(r[ins.a] - r[ins.b]); break;
      case Expr::Kind::Mul: r[i] = checked(r[ins.a] * r[ins.b]); break;
      case Expr::Kind::Div: r[i] = detail::k_div(r[ins.a], r[ins.b]); break;
      case Expr::Kind::Pow: r[i] = detail::k_pow(r[ins.a], ins.c); break;
      case Expr::Kind::Min:
      case Expr::Kind::Max: {
        double acc = r[nary_args_[ins.b]];
        for (std::uint32_t k = 1; k < ins.n; ++k) {
          acc = fold_extremum(ins.kind, acc, r[nary_args_[ins.b + k]]);
        }
        r[i] = acc;
        break;
      }
    }
  }
  return r[code_.size() - 1];
}

}  // namespace rfeas
