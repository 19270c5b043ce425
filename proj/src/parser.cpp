#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "fsl/dsl/ast.hpp"

namespace fsl::dsl {

namespace {

struct FuncSig {
  int arity;
  std::vector<int> window_args;  // positions that must be integer literals >= 1
};

const std::map<std::string, FuncSig>& function_table() {
  static const std::map<std::string, FuncSig> table = {
      {"rank", {1, {}}},         {"ts_rank", {2, {1}}},
      {"delay", {2, {1}}},       {"delta", {2, {1}}},
      {"ts_min", {2, {1}}},      {"ts_max", {2, {1}}},
      {"ts_sum", {2, {1}}},      {"ts_mean", {2, {1}}},
      {"ts_std", {2, {1}}},      {"corr", {3, {2}}},
      {"cov", {3, {2}}},         {"decay_linear", {2, {1}}},
      {"sma", {3, {1, 2}}},      {"sign", {1, {}}},
      {"abs", {1, {}}},          {"log", {1, {}}},
      {"min", {2, {}}},          {"max", {2, {}}},
      {"power", {2, {}}},        {"cond", {3, {}}},
  };
  return table;
}

const std::map<std::string, Column>& column_table() {
  static const std::map<std::string, Column> table = {
      {"open", Column::OPEN},       {"high", Column::HIGH},
      {"low", Column::LOW},         {"close", Column::CLOSE},
      {"vwap", Column::VWAP},       {"volume", Column::VOLUME},
      {"market_cap", Column::MARKET_CAP}, {"return", Column::RETURN},
  };
  return table;
}

struct Token {
  enum class Kind { NUMBER, IDENT, OP, LPAREN, RPAREN, COMMA, END } kind;
  std::string text;
  double number = 0.0;
  int offset = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }
  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
    tok_.offset = int(pos_);
    if (pos_ >= src_.size()) {
      tok_.kind = Token::Kind::END;
      return;
    }
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t end = pos_;
      double v = std::stod(src_.substr(pos_), &end);
      tok_ = {Token::Kind::NUMBER, src_.substr(pos_, end), v, int(pos_)};
      pos_ += end;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_'))
        ++pos_;
      tok_ = {Token::Kind::IDENT, src_.substr(start, pos_ - start), 0,
              int(start)};
      return;
    }
    if (c == '(') {
      tok_ = {Token::Kind::LPAREN, "(", 0, int(pos_++)};
      return;
    }
    if (c == ')') {
      tok_ = {Token::Kind::RPAREN, ")", 0, int(pos_++)};
      return;
    }
    if (c == ',') {
      tok_ = {Token::Kind::COMMA, ",", 0, int(pos_++)};
      return;
    }
    static const std::string two_char[] = {"<=", ">=", "==", "!="};
    for (const auto& op : two_char)
      if (src_.compare(pos_, 2, op) == 0) {
        tok_ = {Token::Kind::OP, op, 0, int(pos_)};
        pos_ += 2;
        return;
      }
    if (std::string("+-*/<>").find(c) != std::string::npos) {
      tok_ = {Token::Kind::OP, std::string(1, c), 0, int(pos_++)};
      return;
    }
    throw Error("lex error: unexpected character '" + std::string(1, c) +
                "' at offset " + std::to_string(pos_));
  }

  const std::string& src_;
  size_t pos_ = 0;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : src_(src), lex_(src) {}

  NodePtr parse_expression() {
    NodePtr n = parse_comparison();
    expect_end();
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, int offset) {
    throw Error(msg + " at offset " + std::to_string(offset));
  }

  void expect_end() {
    if (lex_.peek().kind != Token::Kind::END)
      fail("unexpected trailing input '" + lex_.peek().text + "'",
           lex_.peek().offset);
  }

  NodePtr parse_comparison() {
    NodePtr lhs = parse_additive();
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::OP &&
        (t.text == "<" || t.text == "<=" || t.text == ">" || t.text == ">=" ||
         t.text == "==" || t.text == "!=")) {
      Token op = lex_.take();
      NodePtr rhs = parse_additive();
      auto n = std::make_unique<Node>();
      n->kind = Node::Kind::BINARY;
      n->offset = op.offset;
      n->op = op.text == "<"    ? BinOp::LT
              : op.text == "<=" ? BinOp::LE
              : op.text == ">"  ? BinOp::GT
              : op.text == ">=" ? BinOp::GE
              : op.text == "==" ? BinOp::EQ
                                : BinOp::NE;
      n->args.push_back(std::move(lhs));
      n->args.push_back(std::move(rhs));
      return n;
    }
    return lhs;
  }

  NodePtr parse_additive() {
    NodePtr lhs = parse_term();
    while (lex_.peek().kind == Token::Kind::OP &&
           (lex_.peek().text == "+" || lex_.peek().text == "-")) {
      Token op = lex_.take();
      NodePtr rhs = parse_term();
      auto n = std::make_unique<Node>();
      n->kind = Node::Kind::BINARY;
      n->offset = op.offset;
      n->op = op.text == "+" ? BinOp::ADD : BinOp::SUB;
      n->args.push_back(std::move(lhs));
      n->args.push_back(std::move(rhs));
      lhs = std::move(n);
    }
    return lhs;
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    while (lex_.peek().kind == Token::Kind::OP &&
           (lex_.peek().text == "*" || lex_.peek().text == "/")) {
      Token op = lex_.take();
      NodePtr rhs = parse_unary();
      auto n = std::make_unique<Node>();
      n->kind = Node::Kind::BINARY;
      n->offset = op.offset;
      n->op = op.text == "*" ? BinOp::MUL : BinOp::DIV;
      n->args.push_back(std::move(lhs));
      n->args.push_back(std::move(rhs));
      lhs = std::move(n);
    }
    return lhs;
  }

  NodePtr parse_unary() {
    if (lex_.peek().kind == Token::Kind::OP && lex_.peek().text == "-") {
      Token op = lex_.take();
      auto n = std::make_unique<Node>();
      n->kind = Node::Kind::NEG;
      n->offset = op.offset;
      n->args.push_back(parse_unary());
      return n;
    }
    return parse_primary();
  }

  NodePtr parse_primary() {
    Token t = lex_.take();
    if (t.kind == Token::Kind::NUMBER) {
      auto n = std::make_unique<Node>();
      n->kind = Node::Kind::LITERAL;
      n->offset = t.offset;
      n->literal = t.number;
      return n;
    }
    if (t.kind == Token::Kind::LPAREN) {
      NodePtr inner = parse_comparison();
      if (lex_.peek().kind != Token::Kind::RPAREN)
        fail("expected ')'", lex_.peek().offset);
      lex_.take();
      return inner;
    }
    if (t.kind == Token::Kind::IDENT) {
      if (lex_.peek().kind == Token::Kind::LPAREN) return parse_call(t);
      auto col = column_table().find(t.text);
      if (col == column_table().end())
        fail("unknown identifier '" + t.text + "'", t.offset);
      auto n = std::make_unique<Node>();
      n->kind = Node::Kind::COLUMN;
      n->offset = t.offset;
      n->column = col->second;
      return n;
    }
    fail("expected expression, got '" + t.text + "'", t.offset);
  }

  NodePtr parse_call(const Token& name) {
    auto sig = function_table().find(name.text);
    if (sig == function_table().end())
      fail("unknown function '" + name.text + "'", name.offset);
    lex_.take();  // '('
    std::vector<NodePtr> args;
    if (lex_.peek().kind != Token::Kind::RPAREN) {
      args.push_back(parse_comparison());
      while (lex_.peek().kind == Token::Kind::COMMA) {
        lex_.take();
        args.push_back(parse_comparison());
      }
    }
    if (lex_.peek().kind != Token::Kind::RPAREN)
      fail("expected ')'", lex_.peek().offset);
    lex_.take();
    if (int(args.size()) != sig->second.arity)
      fail("arity mismatch: " + name.text + " requires " +
               std::to_string(sig->second.arity) + " arguments, got " +
               std::to_string(args.size()),
           name.offset);
    auto n = std::make_unique<Node>();
    n->kind = Node::Kind::CALL;
    n->offset = name.offset;
    n->func = name.text;
    for (int pos : sig->second.window_args) {
      const Node& w = *args[pos];
      if (w.kind != Node::Kind::LITERAL || w.literal != double(int(w.literal)) ||
          int(w.literal) < 1)
        fail("window argument " + std::to_string(pos + 1) + " of " +
                 name.text + " must be an integer >= 1",
             w.offset);
      n->windows.push_back(int(w.literal));
    }
    if (name.text == "sma" && n->windows[1] > n->windows[0])
      fail("sma: m must not exceed w", name.offset);
    n->args = std::move(args);
    return n;
  }

  const std::string& src_;
  Lexer lex_;
};

int node_lookback(const Node& n) {
  switch (n.kind) {
    case Node::Kind::LITERAL:
      return 0;
    case Node::Kind::COLUMN:
      return n.column == Column::RETURN ? 2 : 1;
    case Node::Kind::NEG:
      return node_lookback(*n.args[0]);
    case Node::Kind::BINARY:
      return std::max(node_lookback(*n.args[0]), node_lookback(*n.args[1]));
    case Node::Kind::CALL: {
      int child = 0;
      for (const auto& a : n.args) child = std::max(child, node_lookback(*a));
      if (n.func == "delay" || n.func == "delta") return child + n.windows[0];
      if (!n.windows.empty()) return child + n.windows[0] - 1;
      return child;
    }
  }
  return 0;
}

}  // namespace

int AlphaExpression::lookback() const { return node_lookback(*ast); }

AlphaExpression parse(const std::string& source, const std::string& name) {
  AlphaExpression e;
  e.name = name;
  e.source = source;
  e.ast = Parser(source).parse_expression();
  return e;
}

std::vector<AlphaExpression> load_expression_bundle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("load_expression_bundle: cannot open '" + path + "'");
  std::vector<AlphaExpression> out;
  std::ostringstream errors;
  int n_errors = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors << "  line " << lineno << ": expected 'name = formula'\n";
      ++n_errors;
      continue;
    }
    std::string name = line.substr(0, eq);
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t") + 1);
    try {
      out.push_back(parse(line.substr(eq + 1), name));
    } catch (const Error& e) {
      errors << "  line " << lineno << " (" << name << "): " << e.what()
             << "\n";
      ++n_errors;
    }
  }
  if (n_errors)
    throw Error("expression bundle '" + path + "' has " +
                std::to_string(n_errors) + " invalid line(s):\n" +
                errors.str());
  return out;
}

}  // namespace fsl::dsl
