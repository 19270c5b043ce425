#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fsl/common.hpp"

namespace fsl::dsl {

enum class Column { OPEN, HIGH, LOW, CLOSE, VWAP, VOLUME, MARKET_CAP, RETURN };

enum class BinOp { ADD, SUB, MUL, DIV, LT, LE, GT, GE, EQ, NE };

struct Node;
using NodePtr = std::unique_ptr<Node>;

struct Node {
  enum class Kind { LITERAL, COLUMN, NEG, BINARY, CALL } kind;
  int offset = 0;  // byte offset into the source, for diagnostics

  double literal = 0.0;               // LITERAL
  Column column = Column::CLOSE;      // COLUMN
  BinOp op = BinOp::ADD;              // BINARY
  std::string func;                   // CALL
  std::vector<NodePtr> args;          // NEG (1), BINARY (2), CALL (n)
  std::vector<int> windows;           // CALL: integer window parameters
};

struct AlphaExpression {
  std::string name;
  std::string source;
  NodePtr ast;

  // Trading days of history the expression needs before its first output.
  int lookback() const;
};

// Recursive-descent parse with precedence
//   unary minus > * / > + - > comparisons.
// Throws Error with a byte offset on lex errors, unknown identifiers,
// arity mismatches and non-integer window arguments.
AlphaExpression parse(const std::string& source,
                      const std::string& name = "");

// `name = formula` per line, '#' comments. Either every formula parses or
// the load fails with a report naming every offending line.
std::vector<AlphaExpression> load_expression_bundle(const std::string& path);

}  // namespace fsl::dsl
