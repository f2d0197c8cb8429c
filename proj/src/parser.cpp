#include "migo/parser.hpp"

#include <cctype>
#include <vector>

namespace migo {

namespace {

struct Token {
  enum class Kind { Ident, Int, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  std::int64_t value = 0;
  int line = 1, col = 1;
};

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1, col = 1;
  Token cur;

  explicit Lexer(const std::string& s) : src(s) { advance(); }

  [[noreturn]] void fail(const std::string& msg, int l, int c) { throw ParseError(msg, l, c); }

  void bump(char c) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_ws() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == '/' && pos + 1 < src.size() && src[pos + 1] == '/') {
        while (pos < src.size() && src[pos] != '\n') bump(src[pos]);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump(c);
      } else {
        break;
      }
    }
  }

  void advance() {
    skip_ws();
    cur = Token{};
    cur.line = line;
    cur.col = col;
    if (pos >= src.size()) {
      cur.kind = Token::Kind::End;
      return;
    }
    char c = src[pos];
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string id;
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) {
        id.push_back(src[pos]);
        bump(src[pos]);
      }
      cur.kind = Token::Kind::Ident;
      cur.text = id;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::int64_t v = 0;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
        v = v * 10 + (src[pos] - '0');
        bump(src[pos]);
      }
      cur.kind = Token::Kind::Int;
      cur.value = v;
      return;
    }
    // two-character operators first
    static const char* two[] = {"[]", "!=", "<=", ">=", "=="};
    for (const char* op : two) {
      if (src.compare(pos, 2, op) == 0) {
        cur.kind = Token::Kind::Punct;
        cur.text = op;
        bump(src[pos]);
        bump(src[pos]);
        return;
      }
    }
    cur.kind = Token::Kind::Punct;
    cur.text = std::string(1, c);
    bump(c);
  }

  bool is_ident(const char* s) const { return cur.kind == Token::Kind::Ident && cur.text == s; }
  bool is_punct(const char* s) const { return cur.kind == Token::Kind::Punct && cur.text == s; }

  void expect_punct(const char* s) {
    if (!is_punct(s)) fail(std::string("expected '") + s + "'", cur.line, cur.col);
    advance();
  }

  void expect_ident(const char* s) {
    if (!is_ident(s)) fail(std::string("expected '") + s + "'", cur.line, cur.col);
    advance();
  }

  std::string take_name() {
    if (cur.kind != Token::Kind::Ident) fail("expected identifier", cur.line, cur.col);
    std::string n = cur.text;
    advance();
    return n;
  }
};

bool is_keyword(const std::string& s) {
  static const std::set<std::string> kw = {"def",    "in",   "if",   "then", "else", "new",
                                           "close",  "select", "tau",  "not",  "succ", "true",
                                           "false",  "int",  "bool", "chan", "and",  "or",
                                           "send",   "recv", "oplus", "branch", "newchan", "end"};
  return kw.count(s) > 0;
}

// --- expression parsing -------------------------------------------------
//
// Precedence: or < and < comparison < additive < multiplicative < unary.
// In send payloads and call arguments a top-level '>' closes the bracket,
// so comparisons there need parentheses.

struct ExprParser {
  Lexer& lx;
  bool angle_context; // '>' at depth 0 terminates the expression

  ExprPtr parse() { return parse_or(0); }

  ExprPtr parse_or(int depth) {
    ExprPtr e = parse_and(depth);
    while (lx.is_ident("or")) {
      lx.advance();
      e = Expr::bin(BinOp::Or, e, parse_and(depth));
    }
    return e;
  }

  ExprPtr parse_and(int depth) {
    ExprPtr e = parse_cmp(depth);
    while (lx.is_ident("and")) {
      lx.advance();
      e = Expr::bin(BinOp::And, e, parse_cmp(depth));
    }
    return e;
  }

  ExprPtr parse_cmp(int depth) {
    ExprPtr e = parse_add(depth);
    for (;;) {
      BinOp op;
      if (lx.is_punct("==") || lx.is_punct("=")) op = BinOp::Eq;
      else if (lx.is_punct("!=")) op = BinOp::Ne;
      else if (lx.is_punct("<")) op = BinOp::Lt;
      else if (lx.is_punct("<=")) op = BinOp::Le;
      else if (lx.is_punct(">=")) op = BinOp::Ge;
      else if (lx.is_punct(">") && !(angle_context && depth == 0)) op = BinOp::Gt;
      else break;
      lx.advance();
      e = Expr::bin(op, e, parse_add(depth));
    }
    return e;
  }

  ExprPtr parse_add(int depth) {
    ExprPtr e = parse_mul(depth);
    for (;;) {
      if (lx.is_punct("+")) {
        lx.advance();
        e = Expr::bin(BinOp::Add, e, parse_mul(depth));
      } else if (lx.is_punct("-")) {
        lx.advance();
        e = Expr::bin(BinOp::Sub, e, parse_mul(depth));
      } else {
        break;
      }
    }
    return e;
  }

  ExprPtr parse_mul(int depth) {
    ExprPtr e = parse_unary(depth);
    for (;;) {
      if (lx.is_punct("*")) {
        lx.advance();
        e = Expr::bin(BinOp::Mul, e, parse_unary(depth));
      } else if (lx.is_punct("%")) {
        lx.advance();
        e = Expr::bin(BinOp::Mod, e, parse_unary(depth));
      } else {
        break;
      }
    }
    return e;
  }

  ExprPtr parse_unary(int depth) {
    if (lx.is_ident("not") || lx.is_ident("succ")) {
      bool is_not = lx.cur.text == "not";
      lx.advance();
      lx.expect_punct("(");
      ExprPtr inner = parse_or(depth + 1);
      lx.expect_punct(")");
      return is_not ? Expr::mk_not(inner) : Expr::mk_succ(inner);
    }
    if (lx.is_punct("(")) {
      lx.advance();
      ExprPtr inner = parse_or(depth + 1);
      lx.expect_punct(")");
      return inner;
    }
    if (lx.cur.kind == Token::Kind::Int) {
      auto v = lx.cur.value;
      lx.advance();
      return Expr::lit_int(v);
    }
    if (lx.is_ident("true")) {
      lx.advance();
      return Expr::lit_bool(true);
    }
    if (lx.is_ident("false")) {
      lx.advance();
      return Expr::lit_bool(false);
    }
    if (lx.is_punct("-") ) {
      lx.advance();
      if (lx.cur.kind != Token::Kind::Int)
        lx.fail("expected integer after '-'", lx.cur.line, lx.cur.col);
      auto v = lx.cur.value;
      lx.advance();
      return Expr::lit_int(-v);
    }
    if (lx.cur.kind == Token::Kind::Ident && !is_keyword(lx.cur.text)) {
      return Expr::mk_var(lx.take_name());
    }
    lx.fail("expected expression", lx.cur.line, lx.cur.col);
  }
};

ExprPtr parse_expr(Lexer& lx, bool angle_context) {
  ExprParser ep{lx, angle_context};
  return ep.parse();
}

// --- process parsing ----------------------------------------------------

struct ProgParser {
  Lexer lx;
  int next_mark = 0;

  explicit ProgParser(const std::string& s) : lx(s) {}

  Sort parse_sort() {
    if (lx.is_ident("int")) {
      lx.advance();
      return Sort::Int;
    }
    if (lx.is_ident("bool")) {
      lx.advance();
      return Sort::Bool;
    }
    lx.fail("expected sort (int or bool)", lx.cur.line, lx.cur.col);
  }

  Prefix parse_prefix() {
    if (lx.is_ident("tau")) {
      lx.advance();
      return Prefix::tau();
    }
    Name u = lx.take_name();
    if (lx.is_punct("!")) {
      lx.advance();
      lx.expect_punct("<");
      ExprPtr e = parse_expr(lx, true);
      lx.expect_punct(">");
      return Prefix::send(u, e);
    }
    if (lx.is_punct("?")) {
      lx.advance();
      lx.expect_punct("(");
      Name y = lx.take_name();
      lx.expect_punct(")");
      return Prefix::recv(u, y);
    }
    lx.fail("expected '!' or '?' after channel", lx.cur.line, lx.cur.col);
  }

  // A sequential process; '|' is handled by parse_par.
  ProcPtr parse_seq() {
    if (lx.is_punct("(")) {
      lx.advance();
      ProcPtr p = parse_par();
      lx.expect_punct(")");
      return p;
    }
    if (lx.cur.kind == Token::Kind::Int && lx.cur.value == 0) {
      lx.advance();
      return Process::inact();
    }
    if (lx.is_ident("close")) {
      lx.advance();
      Name u = lx.take_name();
      lx.expect_punct(";");
      return Process::close(u, parse_seq());
    }
    if (lx.is_ident("select")) {
      lx.advance();
      lx.expect_punct("{");
      std::vector<std::pair<Prefix, ProcPtr>> bs;
      for (;;) {
        Prefix pi = parse_prefix();
        ProcPtr body = Process::inact();
        if (lx.is_punct(";")) {
          lx.advance();
          body = parse_par();
        }
        bs.emplace_back(std::move(pi), std::move(body));
        if (lx.is_punct("[]")) {
          lx.advance();
          continue;
        }
        break;
      }
      lx.expect_punct("}");
      if (bs.empty()) lx.fail("empty select", lx.cur.line, lx.cur.col);
      return Process::select(std::move(bs));
    }
    if (lx.is_ident("if")) {
      lx.advance();
      std::optional<ExprPtr> guard;
      if (lx.is_punct("*")) {
        lx.advance();
      } else {
        guard = parse_expr(lx, false);
      }
      lx.expect_ident("then");
      ProcPtr t = parse_seq();
      lx.expect_ident("else");
      ProcPtr f = parse_seq();
      return Process::cond(guard, t, f, next_mark++);
    }
    if (lx.is_ident("new")) {
      lx.advance();
      Name y = lx.take_name();
      lx.expect_punct(":");
      Sort s = parse_sort();
      int cap = 0;
      if (lx.is_punct(",")) {
        lx.advance();
        if (lx.cur.kind != Token::Kind::Int)
          lx.fail("expected buffer bound", lx.cur.line, lx.cur.col);
        cap = static_cast<int>(lx.cur.value);
        lx.advance();
      }
      lx.expect_punct(";");
      return Process::newchan(y, s, cap, parse_seq());
    }
    if (lx.is_ident("tau")) {
      lx.advance();
      lx.expect_punct(";");
      return Process::prefixed(Prefix::tau(), parse_seq());
    }
    if (lx.cur.kind == Token::Kind::Ident && !is_keyword(lx.cur.text)) {
      Name head = lx.take_name();
      if (lx.is_punct("!")) {
        lx.advance();
        lx.expect_punct("<");
        ExprPtr e = parse_expr(lx, true);
        lx.expect_punct(">");
        lx.expect_punct(";");
        return Process::prefixed(Prefix::send(head, e), parse_seq());
      }
      if (lx.is_punct("?")) {
        lx.advance();
        lx.expect_punct("(");
        Name y = lx.take_name();
        lx.expect_punct(")");
        lx.expect_punct(";");
        return Process::prefixed(Prefix::recv(head, y), parse_seq());
      }
      if (lx.is_punct("<")) {
        lx.advance();
        // Call arguments: expressions; bare variables may be channel args.
        // They are split by the callee's signature during validation.
        std::vector<ExprPtr> args;
        if (!lx.is_punct(">")) {
          for (;;) {
            args.push_back(parse_expr(lx, true));
            if (lx.is_punct(",")) {
              lx.advance();
              continue;
            }
            break;
          }
        }
        lx.expect_punct(">");
        return Process::call(head, std::move(args), {});
      }
      lx.fail("expected '!', '?' or '<' after name", lx.cur.line, lx.cur.col);
    }
    lx.fail("expected process", lx.cur.line, lx.cur.col);
  }

  ProcPtr parse_par() {
    ProcPtr p = parse_seq();
    while (lx.is_punct("|")) {
      lx.advance();
      p = Process::par(p, parse_seq());
    }
    return p;
  }

  Definition parse_def() {
    Definition d;
    d.name = lx.take_name();
    lx.expect_punct("(");
    bool seen_chan = false;
    while (!lx.is_punct(")")) {
      Param prm;
      prm.name = lx.take_name();
      lx.expect_punct(":");
      if (lx.is_ident("chan")) {
        lx.advance();
        prm.is_chan = true;
        prm.sort = parse_sort();
        seen_chan = true;
        d.chan_params.push_back(prm);
      } else {
        prm.sort = parse_sort();
        if (seen_chan)
          lx.fail("value parameters must precede channel parameters", lx.cur.line, lx.cur.col);
        d.value_params.push_back(prm);
      }
      if (lx.is_punct(",")) lx.advance();
    }
    lx.expect_punct(")");
    lx.expect_punct("=");
    d.body = parse_par();
    return d;
  }

  Program parse() {
    Program prog;
    lx.expect_ident("def");
    while (!lx.is_ident("in")) {
      Definition d = parse_def();
      if (prog.defs.count(d.name))
        lx.fail("duplicate definition '" + d.name + "'", lx.cur.line, lx.cur.col);
      prog.defs.emplace(d.name, std::move(d));
      if (lx.is_punct(";")) lx.advance();
    }
    lx.expect_ident("in");
    prog.main = parse_par();
    if (lx.cur.kind != Token::Kind::End)
      lx.fail("trailing input after main process", lx.cur.line, lx.cur.col);
    return prog;
  }
};

// --- type parsing -------------------------------------------------------

struct TypeParser {
  Lexer lx;

  explicit TypeParser(const std::string& s) : lx(s) {}

  TAction parse_action() {
    if (lx.is_ident("tau")) {
      lx.advance();
      return TAction::tau();
    }
    if (lx.is_ident("send")) {
      lx.advance();
      return TAction::send(lx.take_name());
    }
    if (lx.is_ident("recv")) {
      lx.advance();
      return TAction::recv(lx.take_name());
    }
    lx.fail("expected 'send', 'recv' or 'tau'", lx.cur.line, lx.cur.col);
  }

  TypePtr cont_or_zero() {
    if (lx.is_punct(";")) {
      lx.advance();
      return parse_seq();
    }
    return TypeTerm::inact();
  }

  TypePtr parse_seq() {
    if (lx.is_punct("(")) {
      lx.advance();
      TypePtr t = parse_par();
      lx.expect_punct(")");
      return t;
    }
    if (lx.cur.kind == Token::Kind::Int && lx.cur.value == 0) {
      lx.advance();
      return TypeTerm::inact();
    }
    if (lx.is_ident("send") || lx.is_ident("recv") || lx.is_ident("tau")) {
      TAction k = parse_action();
      return TypeTerm::prefix(k, cont_or_zero());
    }
    if (lx.is_ident("oplus")) {
      lx.advance();
      lx.expect_punct("{");
      std::vector<TypePtr> ts;
      for (;;) {
        ts.push_back(parse_par());
        if (lx.is_punct(",")) {
          lx.advance();
          continue;
        }
        break;
      }
      lx.expect_punct("}");
      return TypeTerm::choice(std::move(ts));
    }
    if (lx.is_ident("branch")) {
      lx.advance();
      lx.expect_punct("{");
      std::vector<std::pair<TAction, TypePtr>> bs;
      for (;;) {
        TAction k = parse_action();
        TypePtr body = cont_or_zero();
        bs.emplace_back(std::move(k), std::move(body));
        if (lx.is_punct("[]")) {
          lx.advance();
          continue;
        }
        break;
      }
      lx.expect_punct("}");
      return TypeTerm::branch(std::move(bs));
    }
    if (lx.is_ident("newchan")) {
      lx.advance();
      Name a = lx.take_name();
      int cap = 0;
      if (lx.is_punct(",")) {
        lx.advance();
        if (lx.cur.kind != Token::Kind::Int)
          lx.fail("expected buffer bound", lx.cur.line, lx.cur.col);
        cap = static_cast<int>(lx.cur.value);
        lx.advance();
      }
      lx.expect_punct(";");
      return TypeTerm::newchan(a, cap, parse_seq());
    }
    if (lx.is_ident("end")) {
      lx.advance();
      lx.expect_punct("[");
      Name u = lx.take_name();
      lx.expect_punct("]");
      return TypeTerm::close_req(u, cont_or_zero());
    }
    if (lx.cur.kind == Token::Kind::Ident && !is_keyword(lx.cur.text)) {
      Name head = lx.take_name();
      lx.expect_punct("<");
      std::vector<Name> args;
      if (!lx.is_punct(">")) {
        for (;;) {
          args.push_back(lx.take_name());
          if (lx.is_punct(",")) {
            lx.advance();
            continue;
          }
          break;
        }
      }
      lx.expect_punct(">");
      return TypeTerm::call(head, std::move(args));
    }
    lx.fail("expected type term", lx.cur.line, lx.cur.col);
  }

  TypePtr parse_par() {
    TypePtr t = parse_seq();
    while (lx.is_punct("|")) {
      lx.advance();
      t = TypeTerm::par(t, parse_seq());
    }
    return t;
  }

  TypeSystem parse() {
    TypeSystem sys;
    while (lx.cur.kind != Token::Kind::End) {
      TypeEquation eq;
      eq.name = lx.take_name();
      lx.expect_punct("(");
      while (!lx.is_punct(")")) {
        eq.params.push_back(lx.take_name());
        if (lx.is_punct(",")) lx.advance();
      }
      lx.expect_punct(")");
      lx.expect_punct("=");
      eq.body = parse_par();
      if (sys.equations.count(eq.name))
        lx.fail("duplicate equation '" + eq.name + "'", lx.cur.line, lx.cur.col);
      sys.equations.emplace(eq.name, std::move(eq));
      if (lx.is_punct(";")) lx.advance();
    }
    if (!sys.equations.count(sys.entry))
      throw ParseError("missing entry equation t0()", lx.cur.line, lx.cur.col);
    if (!sys.equations.at(sys.entry).params.empty())
      throw ParseError("entry equation t0 must have no parameters", lx.cur.line, lx.cur.col);
    // arity and definedness of calls
    for (const auto& [name, eq] : sys.equations) {
      check_calls(eq.body, sys);
    }
    return sys;
  }

  void check_calls(const TypePtr& t, const TypeSystem& sys) {
    if (!t) return;
    if (t->kind == TypeTerm::Kind::Call) {
      const TypeEquation* eq = sys.find(t->callee);
      if (!eq) throw ParseError("call to undefined equation '" + t->callee + "'", 0, 0);
      if (eq->params.size() != t->args.size())
        throw ParseError("arity mismatch in call to '" + t->callee + "'", 0, 0);
      return;
    }
    if (t->cont) check_calls(t->cont, sys);
    for (const auto& c : t->choices) check_calls(c, sys);
    for (const auto& [k, b] : t->branches) check_calls(b, sys);
    if (t->left) check_calls(t->left, sys);
    if (t->right) check_calls(t->right, sys);
  }
};

// Splits parsed call arguments into value and channel arguments using the
// callee's signature; raises arity errors here so parsing yields a
// well-formed Program.
ProcPtr resolve_calls(const ProcPtr& p, const Program& prog) {
  if (!p) return p;
  switch (p->kind) {
    case Process::Kind::Prefixed:
      return Process::prefixed(p->prefix, resolve_calls(p->cont, prog));
    case Process::Kind::Close:
      return Process::close(p->chan, resolve_calls(p->cont, prog));
    case Process::Kind::Select: {
      std::vector<std::pair<Prefix, ProcPtr>> bs;
      for (const auto& [pi, body] : p->branches) bs.emplace_back(pi, resolve_calls(body, prog));
      return Process::select(std::move(bs));
    }
    case Process::Kind::Cond:
      return Process::cond(p->guard, resolve_calls(p->then_branch, prog),
                           resolve_calls(p->else_branch, prog), p->mark);
    case Process::Kind::NewChan:
      return Process::newchan(p->chan, p->payload, p->capacity, resolve_calls(p->cont, prog));
    case Process::Kind::Par:
      return Process::par(resolve_calls(p->left, prog), resolve_calls(p->right, prog));
    case Process::Kind::Call: {
      auto it = prog.defs.find(p->callee);
      if (it == prog.defs.end()) throw ParseError("call to undefined process '" + p->callee + "'", 0, 0);
      const Definition& d = it->second;
      size_t nv = d.value_params.size(), nc = d.chan_params.size();
      if (p->val_args.size() != nv + nc)
        throw ParseError("arity mismatch in call to '" + p->callee + "': expected " +
                             std::to_string(nv + nc) + " arguments, got " +
                             std::to_string(p->val_args.size()),
                         0, 0);
      std::vector<ExprPtr> vs(p->val_args.begin(), p->val_args.begin() + nv);
      std::vector<Name> us;
      for (size_t i = nv; i < nv + nc; ++i) {
        const ExprPtr& e = p->val_args[i];
        if (e->kind != Expr::Kind::Var)
          throw ParseError("channel argument " + std::to_string(i + 1) + " of '" + p->callee +
                               "' must be a name",
                           0, 0);
        us.push_back(e->var);
      }
      return Process::call(p->callee, std::move(vs), std::move(us));
    }
    default:
      return p;
  }
}

void check_value_vars(const ProcPtr& body, const std::set<Name>& params, const Name& where) {
  std::set<Name> fv = free_vars(body);
  for (const auto& v : fv)
    if (!params.count(v)) throw ParseError("unbound variable '" + v + "' in " + where, 0, 0);
}

} // namespace

Program parse_program(const std::string& text) {
  ProgParser p(text);
  Program prog = p.parse();
  for (auto& [name, def] : prog.defs) def.body = resolve_calls(def.body, prog);
  prog.main = resolve_calls(prog.main, prog);
  for (const auto& [name, def] : prog.defs) {
    std::set<Name> params;
    for (const auto& prm : def.value_params) params.insert(prm.name);
    check_value_vars(def.body, params, "definition " + name);
  }
  check_value_vars(prog.main, {}, "main process");
  return prog;
}

TypeSystem parse_type_system(const std::string& text) {
  TypeParser p(text);
  return p.parse();
}

} // namespace migo
