#include "fsl/dsl/rolling.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace fsl::dsl {

namespace {

inline VectorXd all_missing(Eigen::Index n) {
  return VectorXd::Constant(n, missing());
}

// Window [t-w+1, t] is evaluable iff every x there is present.
template <typename F>
VectorXd naive_window(const VectorXd& x, int w, F&& f) {
  const Eigen::Index n = x.size();
  VectorXd out = all_missing(n);
  for (Eigen::Index t = w - 1; t < n; ++t) {
    bool ok = true;
    for (int i = 0; i < w && ok; ++i) ok = !is_missing(x[t - i]);
    if (ok) out[t] = f(x.segment(t - w + 1, w));
  }
  return out;
}

template <typename F>
VectorXd naive_window2(const VectorXd& x, const VectorXd& y, int w, F&& f) {
  const Eigen::Index n = x.size();
  VectorXd out = all_missing(n);
  for (Eigen::Index t = w - 1; t < n; ++t) {
    bool ok = true;
    for (int i = 0; i < w && ok; ++i)
      ok = !is_missing(x[t - i]) && !is_missing(y[t - i]);
    if (ok) out[t] = f(x.segment(t - w + 1, w), y.segment(t - w + 1, w));
  }
  return out;
}

double window_cov(const Eigen::Ref<const VectorXd>& a,
                  const Eigen::Ref<const VectorXd>& b) {
  double ma = a.mean(), mb = b.mean();
  return ((a.array() - ma) * (b.array() - mb)).sum() / double(a.size() - 1);
}

double window_corr(const Eigen::Ref<const VectorXd>& a,
                   const Eigen::Ref<const VectorXd>& b) {
  double va = window_cov(a, a), vb = window_cov(b, b);
  if (va <= 0 || vb <= 0) return missing();
  return window_cov(a, b) / std::sqrt(va * vb);
}

double window_rank(const Eigen::Ref<const VectorXd>& win) {
  double last = win[win.size() - 1];
  double below = 0, equal = 0;
  for (Eigen::Index i = 0; i < win.size(); ++i) {
    if (win[i] < last) ++below;
    if (win[i] == last) ++equal;
  }
  return (below + 0.5 * (equal + 1)) / double(win.size());
}

double window_decay(const Eigen::Ref<const VectorXd>& win) {
  const int w = int(win.size());
  double num = 0;
  for (int i = 0; i < w; ++i) num += double(i + 1) * win[i];
  return num / (0.5 * w * (w + 1));
}

}  // namespace

namespace reference {

VectorXd ts_sum(const VectorXd& x, int w) {
  return naive_window(x, w, [](const auto& win) { return win.sum(); });
}
VectorXd ts_mean(const VectorXd& x, int w) {
  return naive_window(x, w, [](const auto& win) { return win.mean(); });
}
VectorXd ts_std(const VectorXd& x, int w) {
  if (w < 2) throw Error("ts_std: window must be >= 2");
  return naive_window(x, w, [](const auto& win) {
    return std::sqrt(std::max(0.0, window_cov(win, win)));
  });
}
VectorXd ts_min(const VectorXd& x, int w) {
  return naive_window(x, w, [](const auto& win) { return win.minCoeff(); });
}
VectorXd ts_max(const VectorXd& x, int w) {
  return naive_window(x, w, [](const auto& win) { return win.maxCoeff(); });
}
VectorXd ts_rank(const VectorXd& x, int w) {
  return naive_window(x, w, [](const auto& win) { return window_rank(win); });
}
VectorXd decay_linear(const VectorXd& x, int w) {
  return naive_window(x, w, [](const auto& win) { return window_decay(win); });
}
VectorXd cov(const VectorXd& x, const VectorXd& y, int w) {
  if (w < 2) throw Error("cov: window must be >= 2");
  return naive_window2(x, y, w, [](const auto& a, const auto& b) {
    return window_cov(a, b);
  });
}
VectorXd corr(const VectorXd& x, const VectorXd& y, int w) {
  if (w < 2) throw Error("corr: window must be >= 2");
  return naive_window2(x, y, w, [](const auto& a, const auto& b) {
    return window_corr(a, b);
  });
}

}  // namespace reference

namespace kernels {

namespace {

// Rolling sums with a missing-count so NaN never contaminates the
// accumulators; outputs appear only for fully-present windows.
class RollingSums {
 public:
  RollingSums(int w) : w_(w) {}
  void push(double x) {
    if (is_missing(x)) {
      ++nan_;
    } else {
      sum_ += x;
      sumsq_ += x * x;
    }
    ++count_;
  }
  void pop(double x) {
    if (is_missing(x)) {
      --nan_;
    } else {
      sum_ -= x;
      sumsq_ -= x * x;
    }
    --count_;
  }
  bool full_and_present() const { return count_ == w_ && nan_ == 0; }
  long double sum() const { return sum_; }
  long double sumsq() const { return sumsq_; }

 private:
  int w_, count_ = 0, nan_ = 0;
  // Extended precision: the difference sumsq - sum^2/w cancels badly on
  // near-constant windows and must still match the two-pass oracle.
  long double sum_ = 0, sumsq_ = 0;
};

}  // namespace

VectorXd ts_sum(const VectorXd& x, int w) {
  const Eigen::Index n = x.size();
  VectorXd out = VectorXd::Constant(n, missing());
  RollingSums acc(w);
  for (Eigen::Index t = 0; t < n; ++t) {
    acc.push(x[t]);
    if (t >= w) acc.pop(x[t - w]);
    if (t >= w - 1 && acc.full_and_present()) out[t] = double(acc.sum());
  }
  return out;
}

VectorXd ts_mean(const VectorXd& x, int w) {
  VectorXd out = ts_sum(x, w);
  for (Eigen::Index t = 0; t < out.size(); ++t)
    if (!is_missing(out[t])) out[t] /= w;
  return out;
}

VectorXd ts_std(const VectorXd& x, int w) {
  if (w < 2) throw Error("ts_std: window must be >= 2");
  const Eigen::Index n = x.size();
  VectorXd out = VectorXd::Constant(n, missing());
  RollingSums acc(w);
  for (Eigen::Index t = 0; t < n; ++t) {
    acc.push(x[t]);
    if (t >= w) acc.pop(x[t - w]);
    if (t >= w - 1 && acc.full_and_present()) {
      long double var = (acc.sumsq() - acc.sum() * acc.sum() / w) / (w - 1);
      out[t] = double(std::sqrt(std::max(0.0L, var)));
    }
  }
  return out;
}

namespace {

template <bool Max>
VectorXd extremum(const VectorXd& x, int w) {
  const Eigen::Index n = x.size();
  VectorXd out = VectorXd::Constant(n, missing());
  std::deque<Eigen::Index> dq;  // monotonic indices
  int nan_in_window = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (is_missing(x[t])) ++nan_in_window;
    if (t >= w && is_missing(x[t - w])) --nan_in_window;
    while (!dq.empty() && dq.front() <= t - w) dq.pop_front();
    if (!is_missing(x[t])) {
      while (!dq.empty() &&
             (Max ? x[dq.back()] <= x[t] : x[dq.back()] >= x[t]))
        dq.pop_back();
      dq.push_back(t);
    }
    if (t >= w - 1 && nan_in_window == 0 && !dq.empty()) out[t] = x[dq.front()];
  }
  return out;
}

}  // namespace

VectorXd ts_min(const VectorXd& x, int w) { return extremum<false>(x, w); }
VectorXd ts_max(const VectorXd& x, int w) { return extremum<true>(x, w); }

// O(w) per step; the window scan is the cheapest correct option for ranks.
VectorXd ts_rank(const VectorXd& x, int w) { return reference::ts_rank(x, w); }
VectorXd decay_linear(const VectorXd& x, int w) {
  return reference::decay_linear(x, w);
}

VectorXd cov(const VectorXd& x, const VectorXd& y, int w) {
  if (w < 2) throw Error("cov: window must be >= 2");
  const Eigen::Index n = std::min(x.size(), y.size());
  VectorXd out = VectorXd::Constant(x.size(), missing());
  long double sx = 0, sy = 0, sxy = 0;
  int count = 0, nan = 0;
  auto push = [&](Eigen::Index t, double sign) {
    if (is_missing(x[t]) || is_missing(y[t])) {
      nan += int(sign);
    } else {
      sx += (long double)(sign) * x[t];
      sy += (long double)(sign) * y[t];
      sxy += (long double)(sign) * x[t] * y[t];
    }
    count += int(sign);
  };
  for (Eigen::Index t = 0; t < n; ++t) {
    push(t, +1);
    if (t >= w) push(t - w, -1);
    if (t >= w - 1 && count == w && nan == 0)
      out[t] = double((sxy - sx * sy / w) / (w - 1));
  }
  return out;
}

VectorXd corr(const VectorXd& x, const VectorXd& y, int w) {
  if (w < 2) throw Error("corr: window must be >= 2");
  // Pairwise-present masking: a NaN in either series hides both points.
  VectorXd xm = x, ym = y;
  for (Eigen::Index t = 0; t < x.size(); ++t)
    if (is_missing(x[t]) || is_missing(y[t])) xm[t] = ym[t] = missing();
  if (w == 2) {
    // two points correlate at exactly +-1 (or have zero variance); the
    // rolling-sum route cancels catastrophically here, so compute directly
    VectorXd out = VectorXd::Constant(x.size(), missing());
    for (Eigen::Index t = 1; t < x.size(); ++t) {
      if (is_missing(xm[t]) || is_missing(xm[t - 1])) continue;
      double dx = xm[t] - xm[t - 1], dy = ym[t] - ym[t - 1];
      if (dx == 0 || dy == 0) continue;  // zero-variance window
      out[t] = (dx > 0) == (dy > 0) ? 1.0 : -1.0;
    }
    return out;
  }
  VectorXd cxy = cov(xm, ym, w);
  VectorXd sx = ts_std(xm, w), sy = ts_std(ym, w);
  VectorXd out = VectorXd::Constant(x.size(), missing());
  for (Eigen::Index t = 0; t < x.size(); ++t) {
    if (is_missing(cxy[t])) continue;
    if (sx[t] <= 0 || sy[t] <= 0) continue;  // zero-variance window
    out[t] = std::clamp(cxy[t] / (sx[t] * sy[t]), -1.0, 1.0);
  }
  return out;
}

}  // namespace kernels

VectorXd delay(const VectorXd& x, int d) {
  if (d < 1) throw Error("delay: d must be >= 1");
  VectorXd out = VectorXd::Constant(x.size(), missing());
  for (Eigen::Index t = d; t < x.size(); ++t) out[t] = x[t - d];
  return out;
}

VectorXd delta(const VectorXd& x, int d) {
  VectorXd lag = delay(x, d);
  VectorXd out = VectorXd::Constant(x.size(), missing());
  for (Eigen::Index t = 0; t < x.size(); ++t)
    if (!is_missing(x[t]) && !is_missing(lag[t])) out[t] = x[t] - lag[t];
  return out;
}

VectorXd sma(const VectorXd& x, int w, int m) {
  if (w < 1 || m < 1 || m > w) throw Error("sma: need 1 <= m <= w");
  VectorXd out = VectorXd::Constant(x.size(), missing());
  double prev = missing();
  for (Eigen::Index t = 0; t < x.size(); ++t) {
    if (is_missing(x[t])) {
      prev = missing();
      continue;
    }
    prev = is_missing(prev) ? x[t] : (m * x[t] + (w - m) * prev) / w;
    out[t] = prev;
  }
  return out;
}

}  // namespace fsl::dsl
