#pragma once

#include <memory>
#include <string>

namespace facetflow {

// Arithmetic over variables x and y: + - * / ^, parentheses, unary minus,
// the functions sin cos tan exp log sqrt abs, and the constant pi.
class Expr {
 public:
  static Expr parse(const std::string& text);  // throws std::invalid_argument
  double eval(double x, double y) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace facetflow
