#include "prologian/syntax/writer.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>

#include "prologian/syntax/parser.hpp"

namespace prologian {
namespace {

bool symbol_char(char c) {
  switch (c) {
    case '+': case '-': case '*': case '/': case '\\': case '^': case '<': case '>':
    case '=': case '~': case ':': case '.': case '?': case '@': case '#': case '&': case '$':
      return true;
    default:
      return false;
  }
}

bool alnum_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         static_cast<unsigned char>(c) >= 0x80;
}

bool alpha_operator(std::string_view name) { return !name.empty() && alnum_char(name[0]); }

class Writer {
 public:
  explicit Writer(WriteOptions opts) : opts_(opts) {}

  std::string write(const Term& t, int max_prec) {
    switch (t.kind) {
      case Term::Kind::Var:
        return t.name.empty() ? "_G" + std::to_string(t.var_id) : t.name;
      case Term::Kind::Integer:
        return std::to_string(t.int_value);
      case Term::Kind::Float:
        return format_float(t.float_value);
      case Term::Kind::Atom: {
        std::string s = atom(t.name);
        if (!opts_.ignore_ops && max_prec < 999 && is_operator(t.name)) return "(" + s + ")";
        return s;
      }
      case Term::Kind::Compound:
        return compound(t, max_prec);
    }
    return {};
  }

 private:
  std::string atom(const std::string& name) const {
    return opts_.quoted ? quote_atom(name) : name;
  }

  std::string list(const Term& t) {
    std::string out = "[";
    const Term* cur = &t;
    bool first = true;
    while (cur->is_cons()) {
      if (!first) out += ",";
      out += write(cur->args[0], 999);
      first = false;
      cur = &cur->args[1];
    }
    if (!cur->is_nil()) out += "|" + write(*cur, 999);
    return out + "]";
  }

  static std::string join(const std::string& left, const std::string& op, const std::string& right) {
    std::string out = left;
    bool spaced = op == "," ? false : (alpha_operator(op) || op == ":-" || op == "->" || op == ";");
    if (op == ",") return left + ", " + right;
    if (spaced) return left + " " + op + " " + right;
    bool gap_after = !right.empty() && symbol_char(op.back()) && symbol_char(right.front());
    // A '.' followed by layout ends the clause; callers fall back to functional notation.
    if (gap_after && op.back() == '.') return {};
    if (!out.empty() && symbol_char(out.back()) && symbol_char(op.front())) out += ' ';
    out += op;
    if (gap_after) out += ' ';
    return out + right;
  }

  std::string compound(const Term& t, int max_prec) {
    if (t.is_cons()) return list(t);
    if (t.is_compound("{}", 1) && !opts_.ignore_ops) return "{" + write(t.args[0], 1200) + "}";
    if (!opts_.ignore_ops) {
      if (t.args.size() == 2) {
        if (auto op = infix_op(t.name)) {
          int p = op->priority;
          int lp = op->type == OpType::YFX ? p : p - 1;
          int rp = op->type == OpType::XFY ? p : p - 1;
          std::string s = join(write(t.args[0], lp), t.name, write(t.args[1], rp));
          if (!s.empty()) return p > max_prec ? "(" + s + ")" : s;
        }
      }
      if (t.args.size() == 1) {
        if (auto op = prefix_op(t.name)) {
          int p = op->priority;
          int ap = op->type == OpType::FY ? p : p - 1;
          const Term& arg = t.args[0];
          std::string s;
          if (arg.is_number() || (arg.is_atom() && is_operator(arg.name))) {
            s = atom(t.name) + "(" + write(arg, 999) + ")";
          } else {
            std::string a = write(arg, ap);
            s = t.name;
            if (alpha_operator(t.name) || symbol_char(a.front()) || a.front() == '(') s += ' ';
            s += a;
          }
          return p > max_prec ? "(" + s + ")" : s;
        }
      }
    }
    std::string out = atom(t.name) + "(";
    for (std::size_t i = 0; i < t.args.size(); ++i) {
      if (i) out += ",";
      out += write(t.args[i], 999);
    }
    return out + ")";
  }

  WriteOptions opts_;
};

std::string var_letter_name(std::size_t n) {
  std::string s(1, static_cast<char>('A' + n % 26));
  if (n >= 26) s += std::to_string(n / 26);
  return s;
}

void rename_vars(Term& t, std::map<int, std::string>& names) {
  if (t.is_var()) {
    auto it = names.find(t.var_id);
    if (it == names.end()) it = names.emplace(t.var_id, var_letter_name(names.size())).first;
    t.name = it->second;
    return;
  }
  for (auto& a : t.args) rename_vars(a, names);
}

}  // namespace

std::string format_float(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  std::string s = buf;
  if (s.find_first_of(".e") == std::string::npos) {
    s += ".0";
  } else if (s.find('.') == std::string::npos) {
    s.insert(s.find('e'), ".0");
  }
  return s;
}

bool atom_needs_quotes(std::string_view name) {
  if (name.empty()) return true;
  if (name == "[]" || name == "!" || name == ";" || name == "{}") return false;
  if (name[0] >= 'a' && name[0] <= 'z') {
    for (char c : name)
      if (!alnum_char(c)) return true;
    return false;
  }
  if (name == ".") return true;
  bool all_symbol = true;
  for (char c : name)
    if (!symbol_char(c)) all_symbol = false;
  return !all_symbol;
}

std::string quote_atom(std::string_view name) {
  if (!atom_needs_quotes(name)) return std::string(name);
  std::string out = "'";
  for (char c : name) {
    switch (c) {
      case '\'': out += "\\'"; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "'";
}

std::string format_term(const Term& t, WriteOptions opts) { return Writer(opts).write(t, 1200); }

std::string format_clause(const Clause& c) {
  Writer w({});
  std::string out = w.write(c.head, 1199);
  if (!c.body.empty()) {
    out += " :- ";
    for (std::size_t i = 0; i < c.body.size(); ++i) {
      if (i) out += ", ";
      out += w.write(c.body[i], 999);
    }
  }
  return out + ".";
}

Term number_vars(const Term& t) {
  Term out = t;
  std::map<int, std::string> names;
  rename_vars(out, names);
  return out;
}

}  // namespace prologian
