#include "fsl/dsl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fsl/dsl/rolling.hpp"

namespace fsl::dsl {

namespace {

struct Context {
  const PricePanel& panel;
  const ReturnPanel& returns;
};

MatrixXd column_matrix(const Context& ctx, Column c) {
  switch (c) {
    case Column::OPEN: return ctx.panel.open;
    case Column::HIGH: return ctx.panel.high;
    case Column::LOW: return ctx.panel.low;
    case Column::CLOSE: return ctx.panel.close;
    case Column::VWAP: return ctx.panel.vwap;
    case Column::VOLUME: return ctx.panel.volume;
    case Column::MARKET_CAP: return ctx.panel.market_cap;
    case Column::RETURN: return ctx.returns.returns;
  }
  throw Error("evaluate: unknown column");
}

void check_column_present(const MatrixXd& m, const Node& n) {
  if ((m.array() == m.array()).any()) return;  // any non-NaN cell
  throw Error("evaluate: column referenced at offset " +
              std::to_string(n.offset) + " has no data in the panel");
}

template <typename F>
MatrixXd elementwise1(const MatrixXd& a, F&& f) {
  MatrixXd out(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      out(i, j) = is_missing(a(i, j)) ? missing() : f(a(i, j));
  return out;
}

template <typename F>
MatrixXd elementwise2(const MatrixXd& a, const MatrixXd& b, F&& f) {
  MatrixXd out(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      out(i, j) = (is_missing(a(i, j)) || is_missing(b(i, j)))
                      ? missing()
                      : f(a(i, j), b(i, j));
  return out;
}

template <typename F>
MatrixXd per_asset(const MatrixXd& a, F&& f) {
  MatrixXd out(a.rows(), a.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < a.cols(); ++j) out.col(j) = f(a.col(j));
  return out;
}

template <typename F>
MatrixXd per_asset2(const MatrixXd& a, const MatrixXd& b, F&& f) {
  MatrixXd out(a.rows(), a.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    out.col(j) = f(a.col(j), b.col(j));
  return out;
}

MatrixXd eval_node(const Node& n, const Context& ctx);

MatrixXd eval_call(const Node& n, const Context& ctx) {
  const std::string& f = n.func;
  if (f == "rank") {
    MatrixXd a = eval_node(*n.args[0], ctx);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      Eigen::RowVectorXd r = a.row(i);
      rank_row(r);
      a.row(i) = r;
    }
    return a;
  }
  if (f == "sign")
    return elementwise1(eval_node(*n.args[0], ctx), [](double v) {
      return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
    });
  if (f == "abs")
    return elementwise1(eval_node(*n.args[0], ctx),
                        [](double v) { return std::abs(v); });
  if (f == "log")
    return elementwise1(eval_node(*n.args[0], ctx), [](double v) {
      return v > 0 ? std::log(v) : missing();
    });
  if (f == "min")
    return elementwise2(eval_node(*n.args[0], ctx), eval_node(*n.args[1], ctx),
                        [](double a, double b) { return std::min(a, b); });
  if (f == "max")
    return elementwise2(eval_node(*n.args[0], ctx), eval_node(*n.args[1], ctx),
                        [](double a, double b) { return std::max(a, b); });
  if (f == "power")
    return elementwise2(eval_node(*n.args[0], ctx), eval_node(*n.args[1], ctx),
                        [](double a, double b) {
                          double v = std::pow(a, b);
                          return std::isfinite(v) ? v : missing();
                        });
  if (f == "cond") {
    MatrixXd p = eval_node(*n.args[0], ctx);
    MatrixXd a = eval_node(*n.args[1], ctx);
    MatrixXd b = eval_node(*n.args[2], ctx);
    MatrixXd out(p.rows(), p.cols());
    for (Eigen::Index j = 0; j < p.cols(); ++j)
      for (Eigen::Index i = 0; i < p.rows(); ++i)
        out(i, j) = is_missing(p(i, j)) ? missing()
                    : p(i, j) != 0.0    ? a(i, j)
                                        : b(i, j);
    return out;
  }

  const int w = n.windows.empty() ? 0 : n.windows[0];
  MatrixXd a = eval_node(*n.args[0], ctx);
  if (f == "delay") return per_asset(a, [&](const auto& c) { return delay(c, w); });
  if (f == "delta") return per_asset(a, [&](const auto& c) { return delta(c, w); });
  if (f == "ts_sum")
    return per_asset(a, [&](const auto& c) { return kernels::ts_sum(c, w); });
  if (f == "ts_mean")
    return per_asset(a, [&](const auto& c) { return kernels::ts_mean(c, w); });
  if (f == "ts_std")
    return per_asset(a, [&](const auto& c) { return kernels::ts_std(c, w); });
  if (f == "ts_min")
    return per_asset(a, [&](const auto& c) { return kernels::ts_min(c, w); });
  if (f == "ts_max")
    return per_asset(a, [&](const auto& c) { return kernels::ts_max(c, w); });
  if (f == "ts_rank")
    return per_asset(a, [&](const auto& c) { return kernels::ts_rank(c, w); });
  if (f == "decay_linear")
    return per_asset(a,
                     [&](const auto& c) { return kernels::decay_linear(c, w); });
  if (f == "sma")
    return per_asset(
        a, [&](const auto& c) { return sma(c, n.windows[0], n.windows[1]); });
  if (f == "corr" || f == "cov") {
    MatrixXd b = eval_node(*n.args[1], ctx);
    const int wi = n.windows[0];
    if (f == "corr")
      return per_asset2(a, b, [&](const auto& x, const auto& y) {
        return kernels::corr(x, y, wi);
      });
    return per_asset2(a, b, [&](const auto& x, const auto& y) {
      return kernels::cov(x, y, wi);
    });
  }
  throw Error("evaluate: unimplemented function '" + f + "'");
}

MatrixXd eval_node(const Node& n, const Context& ctx) {
  switch (n.kind) {
    case Node::Kind::LITERAL:
      return MatrixXd::Constant(ctx.panel.n_dates(), ctx.panel.n_assets(),
                                n.literal);
    case Node::Kind::COLUMN: {
      MatrixXd m = column_matrix(ctx, n.column);
      check_column_present(m, n);
      return m;
    }
    case Node::Kind::NEG:
      return elementwise1(eval_node(*n.args[0], ctx),
                          [](double v) { return -v; });
    case Node::Kind::BINARY: {
      MatrixXd a = eval_node(*n.args[0], ctx);
      MatrixXd b = eval_node(*n.args[1], ctx);
      switch (n.op) {
        case BinOp::ADD:
          return elementwise2(a, b, [](double x, double y) { return x + y; });
        case BinOp::SUB:
          return elementwise2(a, b, [](double x, double y) { return x - y; });
        case BinOp::MUL:
          return elementwise2(a, b, [](double x, double y) { return x * y; });
        case BinOp::DIV:
          return elementwise2(a, b, [](double x, double y) {
            return y != 0 ? x / y : missing();
          });
        case BinOp::LT:
          return elementwise2(a, b, [](double x, double y) { return double(x < y); });
        case BinOp::LE:
          return elementwise2(a, b, [](double x, double y) { return double(x <= y); });
        case BinOp::GT:
          return elementwise2(a, b, [](double x, double y) { return double(x > y); });
        case BinOp::GE:
          return elementwise2(a, b, [](double x, double y) { return double(x >= y); });
        case BinOp::EQ:
          return elementwise2(a, b, [](double x, double y) { return double(x == y); });
        case BinOp::NE:
          return elementwise2(a, b, [](double x, double y) { return double(x != y); });
      }
      throw Error("evaluate: unknown operator");
    }
    case Node::Kind::CALL:
      return eval_call(n, ctx);
  }
  throw Error("evaluate: unknown node kind");
}

}  // namespace

void rank_row(Eigen::RowVectorXd& row) {
  std::vector<int> idx;
  for (Eigen::Index j = 0; j < row.size(); ++j)
    if (!is_missing(row[j])) idx.push_back(int(j));
  const int m = int(idx.size());
  if (m == 0) return;
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return row[a] < row[b]; });
  // average ranks for ties, scaled by the count of present assets
  Eigen::RowVectorXd out = row;
  int i = 0;
  while (i < m) {
    int j = i;
    while (j + 1 < m && row[idx[j + 1]] == row[idx[i]]) ++j;
    double avg_rank = 0.5 * double(i + 1 + j + 1);  // 1-based
    for (int k = i; k <= j; ++k) out[idx[k]] = avg_rank / m;
    i = j + 1;
  }
  row = out;
}

SignalPanel evaluate(const AlphaExpression& expr, const PricePanel& panel,
                     const ReturnPanel& returns, int window) {
  if (!expr.ast) throw Error("evaluate: empty expression");
  if (expr.lookback() > window)
    throw Error("evaluate: expression '" + expr.name + "' needs " +
                std::to_string(expr.lookback()) +
                " days of history but window is " + std::to_string(window));
  Context ctx{panel, returns};
  SignalPanel s;
  s.name = expr.name;
  s.window = window;
  s.assets = panel.assets;
  s.calendar = panel.calendar;
  s.values = eval_node(*expr.ast, ctx);
  return s;
}

}  // namespace fsl::dsl
