#include "minklab/fspec.hpp"

#include <cctype>
#include <cmath>
#include <memory>

#include "minklab/errors.hpp"

namespace minklab {

namespace {

// Tiny recursive-descent expression compiler to a closure tree.
struct Node {
  virtual ~Node() = default;
  virtual double eval(const Vec& x) const = 0;
};
using NodePtr = std::unique_ptr<Node>;

struct Num : Node {
  double v;
  explicit Num(double v) : v(v) {}
  double eval(const Vec&) const override { return v; }
};
struct Var : Node {
  int idx;
  explicit Var(int i) : idx(i) {}
  double eval(const Vec& x) const override { return x[idx]; }
};
struct Bin : Node {
  char op;
  NodePtr a, b;
  Bin(char op, NodePtr a, NodePtr b) : op(op), a(std::move(a)), b(std::move(b)) {}
  double eval(const Vec& x) const override {
    double u = a->eval(x), v = b->eval(x);
    switch (op) {
      case '+': return u + v;
      case '-': return u - v;
      case '*': return u * v;
      case '/': return u / v;
      default: return std::pow(u, v);
    }
  }
};
struct Neg : Node {
  NodePtr a;
  explicit Neg(NodePtr a) : a(std::move(a)) {}
  double eval(const Vec& x) const override { return -a->eval(x); }
};
struct Fun : Node {
  double (*fn)(double);
  NodePtr a;
  Fun(double (*fn)(double), NodePtr a) : fn(fn), a(std::move(a)) {}
  double eval(const Vec& x) const override { return fn(a->eval(x)); }
};

class Parser {
 public:
  Parser(const std::string& s, int dim) : s_(s), dim_(dim) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size())
      fail(ErrorCode::ConfigInvalid, "trailing characters in expression at position " +
                                         std::to_string(pos_));
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {  // + -
    NodePtr a = term();
    for (;;) {
      if (eat('+')) a = std::make_unique<Bin>('+', std::move(a), term());
      else if (eat('-')) a = std::make_unique<Bin>('-', std::move(a), term());
      else return a;
    }
  }
  NodePtr term() {  // * /
    NodePtr a = power();
    for (;;) {
      if (eat('*')) a = std::make_unique<Bin>('*', std::move(a), power());
      else if (eat('/')) a = std::make_unique<Bin>('/', std::move(a), power());
      else return a;
    }
  }
  NodePtr power() {  // ^, right associative
    NodePtr a = unary();
    if (eat('^')) return std::make_unique<Bin>('^', std::move(a), power());
    return a;
  }
  NodePtr unary() {
    if (eat('-')) return std::make_unique<Neg>(unary());
    (void)eat('+');
    return atom();
  }
  NodePtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail(ErrorCode::ConfigInvalid, "unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!eat(')')) fail(ErrorCode::ConfigInvalid, "missing ')' in expression");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t end = pos_;
      while (end < s_.size() &&
             (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
              s_[end] == 'e' || s_[end] == 'E' ||
              ((s_[end] == '+' || s_[end] == '-') && (s_[end - 1] == 'e' || s_[end - 1] == 'E'))))
        ++end;
      double v = std::strtod(s_.substr(pos_, end - pos_).c_str(), nullptr);
      pos_ = end;
      return std::make_unique<Num>(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
        ++end;
      std::string name = s_.substr(pos_, end - pos_);
      pos_ = end;
      if (name == "pi") return std::make_unique<Num>(kPi);
      static const char* vars = "xyzw";
      for (int i = 0; i < 4; ++i) {
        if (name.size() == 1 && name[0] == vars[i]) return make_var(i);
        if (name == std::string("x") + std::to_string(i)) return make_var(i);
      }
      // function call
      if (!eat('(')) fail(ErrorCode::ConfigInvalid, "unknown identifier: " + name);
      NodePtr arg = expr();
      if (!eat(')')) fail(ErrorCode::ConfigInvalid, "missing ')' after " + name);
      if (name == "exp") return std::make_unique<Fun>(+[](double v) { return std::exp(v); }, std::move(arg));
      if (name == "cos") return std::make_unique<Fun>(+[](double v) { return std::cos(v); }, std::move(arg));
      if (name == "sin") return std::make_unique<Fun>(+[](double v) { return std::sin(v); }, std::move(arg));
      if (name == "abs") return std::make_unique<Fun>(+[](double v) { return std::abs(v); }, std::move(arg));
      if (name == "sqrt") return std::make_unique<Fun>(+[](double v) { return std::sqrt(v); }, std::move(arg));
      fail(ErrorCode::ConfigInvalid, "unknown function: " + name);
    }
    fail(ErrorCode::ConfigInvalid, std::string("unexpected character '") + c + "' in expression");
  }
  NodePtr make_var(int i) {
    if (i >= dim_)
      fail(ErrorCode::ConfigInvalid, "variable index exceeds the ambient dimension");
    return std::make_unique<Var>(i);
  }

  const std::string& s_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

std::function<double(const Vec&)> parse_expression(const std::string& expr, int dim) {
  Parser parser(expr, dim);
  std::shared_ptr<Node> root(parser.parse().release());
  return [root](const Vec& x) { return root->eval(x); };
}

DensitySpec density_from_formula(const std::string& expr, const SymmetryGroup& group,
                                 const SphereGrid& grid) {
  auto base = parse_expression(expr, group.dim);
  const auto elements = group.elements;  // copy into the closure
  DensitySpec d;
  d.f = [base, elements](const Vec& x) {
    double s = 0.0;
    for (const Mat& m : elements) s += base(m.transpose() * x);
    return s / static_cast<double>(elements.size());
  };
  d.is_constant_one = false;
  d.certify(grid);
  return d;
}

DensitySpec density_from_table(const std::vector<double>& values, const SymmetryGroup& group,
                               const SphereGrid& grid, double tol) {
  if (values.size() != grid.nodes.size())
    fail(ErrorCode::ConfigInvalid, "table size does not match the grid");
  // Nearest-node lookup backed by the grid (adequate for tabulated densities;
  // the grid spacing bounds the transport error).
  auto nodes = grid.nodes;
  auto vals = values;
  DensitySpec d;
  d.f = [nodes, vals](const Vec& x) {
    int best = 0;
    double bd = -2.0;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
      double dd = nodes[static_cast<std::size_t>(i)].dot(x);
      if (dd > bd) {
        bd = dd;
        best = i;
      }
    }
    return vals[static_cast<std::size_t>(best)];
  };
  d.is_constant_one = false;
  d.certify(grid);
  double defect = d.invariance_defect(group, grid);
  if (defect > tol)
    fail(ErrorCode::ConfigInvalid,
         "tabulated density is not group-invariant (defect " + std::to_string(defect) + ")");
  return d;
}

}  // namespace minklab
