#include "facetflow/expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace facetflow {

struct Expr::Node {
  // op: 'n' literal, 'x'/'y' variable, binary + - * / ^, 'f' function call
  char op = 'n';
  double literal = 0.0;
  std::function<double(double)> fn;
  std::shared_ptr<const Node> a, b;

  double eval(double x, double y) const {
    switch (op) {
      case 'n': return literal;
      case 'x': return x;
      case 'y': return y;
      case '+': return a->eval(x, y) + b->eval(x, y);
      case '-': return a->eval(x, y) - b->eval(x, y);
      case '*': return a->eval(x, y) * b->eval(x, y);
      case '/': return a->eval(x, y) / b->eval(x, y);
      case '^': return std::pow(a->eval(x, y), b->eval(x, y));
      case 'f': return fn(a->eval(x, y));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

struct Parser {
  const std::string& s;
  size_t pos = 0;

  explicit Parser(const std::string& text) : s(text) {}

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("expression error at position " + std::to_string(pos) + ": " +
                                what + " in '" + s + "'");
  }

  NodePtr make(char op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  NodePtr number(double v) {
    auto n = std::make_shared<Expr::Node>();
    n->literal = v;
    return n;
  }

  NodePtr sum() {
    NodePtr left = eat('-') ? make('-', number(0.0), product()) : product();
    for (;;) {
      if (eat('+'))
        left = make('+', left, product());
      else if (eat('-'))
        left = make('-', left, product());
      else
        return left;
    }
  }

  NodePtr product() {
    NodePtr left = power();
    for (;;) {
      if (eat('*'))
        left = make('*', left, power());
      else if (eat('/'))
        left = make('/', left, power());
      else
        return left;
    }
  }

  NodePtr power() {
    NodePtr base = atom();
    if (eat('^')) {
      NodePtr expo = eat('-') ? make('-', number(0.0), power()) : power();
      return make('^', base, expo);
    }
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos >= s.size()) fail("unexpected end");
    char c = s[pos];
    if (c == '(') {
      ++pos;
      NodePtr inner = sum();
      if (!eat(')')) fail("missing ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t end = pos;
      const char* begin = s.c_str() + pos;
      char* out = nullptr;
      double v = std::strtod(begin, &out);
      end = pos + static_cast<size_t>(out - begin);
      if (out == begin) fail("bad number");
      pos = end;
      return number(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos;
      while (pos < s.size() && std::isalnum(static_cast<unsigned char>(s[pos]))) ++pos;
      std::string name = s.substr(start, pos - start);
      if (name == "x") return make('x');
      if (name == "y") return make('y');
      if (name == "pi") return number(M_PI);
      static const std::pair<const char*, double (*)(double)> fns[] = {
          {"sin", std::sin}, {"cos", std::cos}, {"tan", std::tan},  {"exp", std::exp},
          {"log", std::log}, {"sqrt", std::sqrt}, {"abs", std::fabs}};
      for (auto& [fname, fptr] : fns) {
        if (name == fname) {
          if (!eat('(')) fail("expected '(' after " + name);
          NodePtr arg = sum();
          if (!eat(')')) fail("missing ')'");
          auto n = std::make_shared<Expr::Node>();
          n->op = 'f';
          n->fn = fptr;
          n->a = arg;
          return n;
        }
      }
      fail("unknown identifier '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

Expr Expr::parse(const std::string& text) {
  Parser p(text);
  Expr e;
  e.text_ = text;
  e.root_ = p.sum();
  p.skip();
  if (p.pos != text.size()) p.fail("trailing input");
  return e;
}

double Expr::eval(double x, double y) const {
  if (!root_) throw std::logic_error("Expr: empty expression");
  return root_->eval(x, y);
}

}  // namespace facetflow
