#include "arith.hpp"

#include <cmath>
#include <limits>

#include "prologian/syntax/writer.hpp"

namespace prologian::detail {

namespace {

using Kind = RuntimeError::Kind;

[[noreturn]] void fail_with(Kind kind, std::string message) { throw ArithError{kind, std::move(message)}; }

[[noreturn]] void overflow() { fail_with(Kind::TypeError, "Arithmetic: evaluation error: integer overflow"); }

double as_double(const Number& n) {
  return std::holds_alternative<std::int64_t>(n) ? static_cast<double>(std::get<std::int64_t>(n))
                                                 : std::get<double>(n);
}

bool is_int(const Number& n) { return std::holds_alternative<std::int64_t>(n); }

Number checked_float(double d) {
  if (std::isnan(d)) fail_with(Kind::TypeError, "Arithmetic: evaluation error: undefined");
  if (std::isinf(d)) fail_with(Kind::TypeError, "Arithmetic: evaluation error: float_overflow");
  return d;
}

std::int64_t require_int(const Store& store, const Number& n, Idx culprit) {
  if (is_int(n)) return std::get<std::int64_t>(n);
  fail_with(Kind::TypeError, "Type error: `integer' expected, found `" + format_term(store.to_term(culprit)) +
                                 "' (a float)");
}

std::int64_t add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) overflow();
  return r;
}
std::int64_t sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) overflow();
  return r;
}
std::int64_t mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) overflow();
  return r;
}

[[noreturn]] void zero_divisor() { fail_with(Kind::ZeroDivisor, "Arithmetic: evaluation error: zero_divisor"); }

std::int64_t int_pow(std::int64_t base, std::int64_t exp) {
  std::int64_t result = 1;
  while (exp > 0) {
    if (exp & 1) result = mul(result, base);
    exp >>= 1;
    if (exp > 0) base = mul(base, base);
  }
  return result;
}

Number eval(const Store& store, Idx at);

Number binary(const Store& store, const std::string& op, Idx lhs, Idx rhs) {
  Number a = eval(store, lhs);
  Number b = eval(store, rhs);
  bool ints = is_int(a) && is_int(b);
  if (op == "+") return ints ? Number(add(std::get<std::int64_t>(a), std::get<std::int64_t>(b)))
                             : checked_float(as_double(a) + as_double(b));
  if (op == "-") return ints ? Number(sub(std::get<std::int64_t>(a), std::get<std::int64_t>(b)))
                             : checked_float(as_double(a) - as_double(b));
  if (op == "*") return ints ? Number(mul(std::get<std::int64_t>(a), std::get<std::int64_t>(b)))
                             : checked_float(as_double(a) * as_double(b));
  if (op == "/") {
    if (ints) {
      auto x = std::get<std::int64_t>(a), y = std::get<std::int64_t>(b);
      if (y == 0) zero_divisor();
      if (y == -1) return sub(0, x);
      if (x % y == 0) return x / y;
      return static_cast<double>(x) / static_cast<double>(y);
    }
    if (as_double(b) == 0.0) zero_divisor();
    return checked_float(as_double(a) / as_double(b));
  }
  if (op == "//" || op == "mod" || op == "rem") {
    auto x = require_int(store, a, lhs);
    auto y = require_int(store, b, rhs);
    if (y == 0) zero_divisor();
    if (y == -1) return op == "//" ? sub(0, x) : 0;
    if (op == "//") return x / y;
    std::int64_t r = x % y;
    if (op == "mod" && r != 0 && ((r < 0) != (y < 0))) r += y;
    return r;
  }
  if (op == "min" || op == "max") {
    int c = compare_numbers(a, b);
    if (op == "min") return c <= 0 ? a : b;
    return c >= 0 ? a : b;
  }
  if (op == "**") {
    if (ints && std::get<std::int64_t>(b) >= 0) return int_pow(std::get<std::int64_t>(a), std::get<std::int64_t>(b));
    return checked_float(std::pow(as_double(a), as_double(b)));
  }
  if (op == "^") {
    if (ints) {
      auto e = std::get<std::int64_t>(b);
      if (e < 0) fail_with(Kind::TypeError, "Arithmetic: evaluation error: undefined");
      return int_pow(std::get<std::int64_t>(a), e);
    }
    return checked_float(std::pow(as_double(a), as_double(b)));
  }
  fail_with(Kind::TypeError, "Arithmetic: evaluable `" + op + "/2' does not exist");
}

Number unary(const Store& store, const std::string& op, Idx arg) {
  Number a = eval(store, arg);
  if (op == "-") return is_int(a) ? Number(sub(0, std::get<std::int64_t>(a))) : Number(-std::get<double>(a));
  if (op == "+") return a;
  if (op == "abs") {
    if (!is_int(a)) return std::fabs(std::get<double>(a));
    auto v = std::get<std::int64_t>(a);
    return v < 0 ? sub(0, v) : v;
  }
  if (op == "sign") {
    if (is_int(a)) {
      auto v = std::get<std::int64_t>(a);
      return static_cast<std::int64_t>((v > 0) - (v < 0));
    }
    double d = std::get<double>(a);
    return d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
  }
  if (op == "float") return as_double(a);
  if (op == "sqrt") {
    double d = as_double(a);
    if (d < 0) fail_with(Kind::TypeError, "Arithmetic: evaluation error: undefined");
    return std::sqrt(d);
  }
  if (op == "truncate" || op == "integer") {
    if (is_int(a)) return a;
    double d = op == "integer" ? std::round(std::get<double>(a)) : std::trunc(std::get<double>(a));
    if (!(d >= -9.2233720368547758e18 && d < 9.2233720368547758e18)) overflow();
    return static_cast<std::int64_t>(d);
  }
  fail_with(Kind::TypeError, "Arithmetic: evaluable `" + op + "/1' does not exist");
}

Number eval(const Store& store, Idx at) {
  Idx i = store.deref(at);
  const Cell& c = store.heap[i];
  switch (c.tag) {
    case Tag::Int:
      return c.i;
    case Tag::Float:
      return c.f;
    case Tag::Ref:
      fail_with(Kind::Instantiation, "Arguments are not sufficiently instantiated");
    case Tag::Atom: {
      const std::string& name = store.atoms().name(c.functor);
      if (name == "pi") return M_PI;
      if (name == "e") return M_E;
      fail_with(Kind::TypeError, "Arithmetic: evaluable `" + name + "/0' does not exist");
    }
    case Tag::Struct: {
      const std::string& name = store.atoms().name(c.functor);
      if (c.arity == 2) return binary(store, name, c.ref, c.ref + 1);
      if (c.arity == 1) return unary(store, name, c.ref);
      fail_with(Kind::TypeError,
                "Arithmetic: evaluable `" + name + "/" + std::to_string(c.arity) + "' does not exist");
    }
  }
  fail_with(Kind::TypeError, "Arithmetic: bad expression");
}

}  // namespace

Number evaluate(const Store& store, Idx expr) { return eval(store, expr); }

int compare_numbers(const Number& a, const Number& b) {
  if (is_int(a) && is_int(b)) {
    auto x = std::get<std::int64_t>(a), y = std::get<std::int64_t>(b);
    return (x > y) - (x < y);
  }
  double x = as_double(a), y = as_double(b);
  return (x > y) - (x < y);
}

Cell number_cell(const Number& n) {
  return is_int(n) ? Cell::make_int(std::get<std::int64_t>(n)) : Cell::make_float(std::get<double>(n));
}

}  // namespace prologian::detail
