// Compares the naive serial reference kernels against the incremental
// production kernels, per operator, serial and OpenMP-parallel across
// columns. Also checks agreement while it's at it, so a perf run doubles
// as a sanity pass.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fsl/dsl/rolling.hpp"
#include "fsl/rng.hpp"

using namespace fsl;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

using Unary = VectorXd (*)(const VectorXd&, int);
using Binary = VectorXd (*)(const VectorXd&, const VectorXd&, int);

double max_abs_diff(const VectorXd& a, const VectorXd& b) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (is_missing(a[i]) != is_missing(b[i])) return 1e300;
    if (!is_missing(a[i])) m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

template <class Fn>
double run_columns(const std::vector<VectorXd>& cols, bool parallel, Fn f) {
  auto t0 = Clock::now();
  volatile double sink = 0.0;
#pragma omp parallel for schedule(static) if (parallel)
  for (int j = 0; j < int(cols.size()); ++j) {
    VectorXd out = f(cols[size_t(j)]);
    sink = sink + out[out.size() - 1];
  }
  return ms_since(t0);
}

void bench_unary(const char* name, Unary ref, Unary fast,
                 const std::vector<VectorXd>& cols, int w) {
  double worst = 0.0;
  for (const auto& c : cols) worst = std::max(worst, max_abs_diff(ref(c, w), fast(c, w)));
  double t_ref = run_columns(cols, false, [&](const VectorXd& c) { return ref(c, w); });
  double t_ser = run_columns(cols, false, [&](const VectorXd& c) { return fast(c, w); });
  double t_par = run_columns(cols, true, [&](const VectorXd& c) { return fast(c, w); });
  std::printf("%-12s ref %8.1f ms   kernel %8.1f ms (%5.1fx)   omp %8.1f ms (%5.1fx)   maxdiff %.2e\n",
              name, t_ref, t_ser, t_ref / t_ser, t_par, t_ref / t_par, worst);
}

void bench_binary(const char* name, Binary ref, Binary fast,
                  const std::vector<VectorXd>& xs,
                  const std::vector<VectorXd>& ys, int w) {
  double worst = 0.0;
  for (size_t j = 0; j < xs.size(); ++j)
    worst = std::max(worst, max_abs_diff(ref(xs[j], ys[j], w), fast(xs[j], ys[j], w)));
  auto time = [&](bool parallel, Binary f) {
    auto t0 = Clock::now();
    volatile double sink = 0.0;
#pragma omp parallel for schedule(static) if (parallel)
    for (int j = 0; j < int(xs.size()); ++j) {
      VectorXd out = f(xs[size_t(j)], ys[size_t(j)], w);
      sink = sink + out[out.size() - 1];
    }
    return ms_since(t0);
  };
  double t_ref = time(false, ref);
  double t_ser = time(false, fast);
  double t_par = time(true, fast);
  std::printf("%-12s ref %8.1f ms   kernel %8.1f ms (%5.1fx)   omp %8.1f ms (%5.1fx)   maxdiff %.2e\n",
              name, t_ref, t_ser, t_ref / t_ser, t_par, t_ref / t_par, worst);
}

}  // namespace

int main(int argc, char** argv) {
  int T = argc > 1 ? std::atoi(argv[1]) : 20000;
  int n_cols = argc > 2 ? std::atoi(argv[2]) : 64;
  int w = argc > 3 ? std::atoi(argv[3]) : 120;

  Rng rng(2024);
  std::vector<VectorXd> xs, ys;
  for (int j = 0; j < n_cols; ++j) {
    VectorXd x(T), y(T);
    for (int t = 0; t < T; ++t) {
      x[t] = rng.next_gaussian();
      y[t] = 0.3 * x[t] + rng.next_gaussian();
      if (rng.next_uniform() < 0.01) x[t] = missing();  // realistic gaps
    }
    xs.push_back(std::move(x));
    ys.push_back(std::move(y));
  }

#ifdef _OPENMP
  std::printf("T=%d cols=%d w=%d threads=%d\n", T, n_cols, w,
              omp_get_max_threads());
#else
  std::printf("T=%d cols=%d w=%d (OpenMP off)\n", T, n_cols, w);
#endif

  namespace ref = dsl::reference;
  namespace ker = dsl::kernels;
  bench_unary("ts_sum", ref::ts_sum, ker::ts_sum, xs, w);
  bench_unary("ts_mean", ref::ts_mean, ker::ts_mean, xs, w);
  bench_unary("ts_std", ref::ts_std, ker::ts_std, xs, w);
  bench_unary("ts_min", ref::ts_min, ker::ts_min, xs, w);
  bench_unary("ts_max", ref::ts_max, ker::ts_max, xs, w);
  bench_unary("ts_rank", ref::ts_rank, ker::ts_rank, xs, w);
  bench_unary("decay_linear", ref::decay_linear, ker::decay_linear, xs, w);
  bench_binary("cov", ref::cov, ker::cov, xs, ys, w);
  bench_binary("corr", ref::corr, ker::corr, xs, ys, w);
  return 0;
}
