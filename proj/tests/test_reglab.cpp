#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fsl/reg/cv.hpp"
#include "fsl/reg/lasso.hpp"
#include "fsl/reg/ols.hpp"
#include "fsl/reg/pca.hpp"
#include "fsl/rng.hpp"

using namespace fsl;
using namespace fsl::reg;

namespace {

MatrixXd random_matrix(Rng& r, int n, int p) {
  MatrixXd X(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) X(i, j) = r.next_gaussian();
  return X;
}

VectorXd random_vector(Rng& r, int n) {
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = r.next_gaussian();
  return v;
}

// Centered, mutually orthogonal columns with unit sample variance (n = 4).
MatrixXd helmert4() {
  MatrixXd X(4, 3);
  X.col(0) << 1, -1, 1, -1;
  X.col(1) << 1, 1, -1, -1;
  X.col(2) << 1, -1, -1, 1;
  X *= std::sqrt(3.0) / 2.0;  // sample variance (n-1 denominator) -> 1
  return X;
}

}  // namespace

TEST_CASE("soft_threshold definition") {
  CHECK(soft_threshold(2.0, 0.5) == doctest::Approx(1.5));
  CHECK(soft_threshold(0.3, 0.5) == 0.0);
  CHECK(soft_threshold(-2.0, 0.5) == doctest::Approx(-1.5));
  CHECK(soft_threshold(0.0, 0.0) == 0.0);
}

TEST_CASE("lasso tau=0 is OLS on a single column") {
  MatrixXd X(3, 1);
  X << 1, 2, 3;
  VectorXd y(3);
  y << 2, 4, 6;
  LassoFit f = lasso_fit(X, y, 0.0);
  CHECK(f.intercept == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(f.coef[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(f.converged);
}

TEST_CASE("lasso at tau_max fully shrinks") {
  Rng r(11);
  MatrixXd X = random_matrix(r, 40, 6);
  VectorXd y = random_vector(r, 40);
  double tm = tau_max(X, y);
  LassoFit f = lasso_fit(X, y, tm * (1.0 + 1e-12));
  CHECK(f.active_set.empty());
  CHECK(f.intercept == doctest::Approx(y.mean()).epsilon(1e-12));
}

TEST_CASE("orthonormal design matches the soft-threshold closed form") {
  MatrixXd X = helmert4();
  VectorXd y(4);
  y << 0.7, -1.1, 2.0, 0.3;
  double tau = 1.3;
  LassoFit f = lasso_fit(X, y, tau);
  // Columns are centered with unit sample variance, so standardization is
  // the identity and b_j = ST(z_j'yc, tau/2) / (z_j'z_j), z_j'z_j = n-1.
  VectorXd yc = y.array() - y.mean();
  for (int j = 0; j < 3; ++j) {
    double expect = soft_threshold(X.col(j).dot(yc), tau / 2.0) / 3.0;
    CHECK(f.coef[j] == doctest::Approx(expect).epsilon(1e-8));
  }
}

TEST_CASE("KKT certificate holds on random fits") {
  Rng r(21);
  for (int rep = 0; rep < 25; ++rep) {
    MatrixXd X = random_matrix(r, 30, 8);
    VectorXd y = random_vector(r, 30);
    double tau = tau_max(X, y) * (0.05 + 0.9 * r.next_uniform());
    LassoFit f = lasso_fit(X, y, tau);
    CHECK(f.converged);
    CHECK(f.kkt_violation <= 1e-6);
  }
}

TEST_CASE("scale consistency: scaling a column rescales its coefficient") {
  Rng r(31);
  MatrixXd X = random_matrix(r, 50, 5);
  VectorXd y = X * VectorXd::LinSpaced(5, 1, 2) + 0.1 * random_vector(r, 50);
  double tau = 0.5 * tau_max(X, y);
  LassoFit a = lasso_fit(X, y, tau);
  MatrixXd Xs = X;
  const double c = 7.0;
  Xs.col(2) *= c;
  LassoFit b = lasso_fit(Xs, y, tau);
  CHECK(b.coef[2] == doctest::Approx(a.coef[2] / c).epsilon(1e-8));
  VectorXd fa = a.predict(X), fb = b.predict(Xs);
  CHECK((fa - fb).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("lasso_path grid and warm-start consistency") {
  Rng r(41);
  MatrixXd X = random_matrix(r, 60, 7);
  VectorXd y = random_vector(r, 60);
  Path p = lasso_path(X, y, 50, 0.05);
  REQUIRE(p.taus.size() == 50);
  CHECK(p.fits.front().active_set.empty());
  CHECK(p.taus.back() / p.taus.front() == doctest::Approx(0.05).epsilon(1e-12));
  for (size_t i = 1; i < p.taus.size(); ++i) CHECK(p.taus[i] < p.taus[i - 1]);
  // warm-started path coefficients match cold starts
  for (size_t i : {size_t(10), size_t(30), size_t(49)}) {
    LassoFit cold = lasso_fit(X, y, p.taus[i]);
    CHECK((p.fits[i].coef - cold.coef).lpNorm<Eigen::Infinity>() < 1e-8);
  }
}

TEST_CASE("degenerate constant response flags the path") {
  Rng r(43);
  MatrixXd X = random_matrix(r, 20, 3);
  VectorXd y = VectorXd::Constant(20, 3.5);
  Path p = lasso_path(X, y, 10, 0.05);
  CHECK(p.degenerate);
  for (const auto& f : p.fits) {
    CHECK(f.active_set.empty());
    CHECK(f.intercept == doctest::Approx(3.5));
  }
}

TEST_CASE("hand CV fixture: flat tie breaks to larger tau") {
  std::vector<double> taus = {1.0, 0.5, 0.1};
  MatrixXd fold_mse(2, 3);
  fold_mse << 0.6, 0.6, 0.6, 0.6, 0.6, 0.6;
  CvCurve c = summarize_cv(taus, fold_mse);
  CHECK(c.tau_min == 1.0);
  CHECK(c.tau_1se == 1.0);
}

TEST_CASE("hand CV fixture 1: means [1.00 0.80 0.80], SE 0.05") {
  std::vector<double> taus = {1.0, 0.5, 0.1};
  // two folds at m -/+ 0.05 give mean m and SE 0.05 exactly
  MatrixXd fold_mse(2, 3);
  fold_mse << 0.95, 0.75, 0.75, 1.05, 0.85, 0.85;
  CvCurve c = summarize_cv(taus, fold_mse);
  CHECK(c.mean_error[0] == doctest::Approx(1.00));
  CHECK(c.std_error[1] == doctest::Approx(0.05));
  CHECK(c.tau_min == 0.5);  // argmin tie -> larger tau
  CHECK(c.tau_1se == 0.5);
}

TEST_CASE("hand CV fixture 2: means [1.00 0.84 0.80], threshold 0.85") {
  std::vector<double> taus = {1.0, 0.5, 0.1};
  MatrixXd fold_mse(2, 3);
  fold_mse << 0.95, 0.79, 0.75, 1.05, 0.89, 0.85;
  CvCurve c = summarize_cv(taus, fold_mse);
  CHECK(c.tau_min == 0.1);
  CHECK(c.mean_error[0] + c.std_error[0] > 0.85);  // sanity on the fixture
  CHECK(c.tau_1se == 0.5);
}

TEST_CASE("tau_1se >= tau_min on 1000 random curves") {
  Rng r(53);
  for (int rep = 0; rep < 1000; ++rep) {
    int n_taus = 3 + int(r.next_below(30));
    int k = 2 + int(r.next_below(8));
    std::vector<double> taus(n_taus);
    double t = 1.0;
    for (int i = 0; i < n_taus; ++i) {
      taus[i] = t;
      t *= 0.8;
    }
    MatrixXd fold_mse(k, n_taus);
    for (int f = 0; f < k; ++f)
      for (int i = 0; i < n_taus; ++i)
        fold_mse(f, i) = 0.1 + r.next_uniform();
    CvCurve c = summarize_cv(taus, fold_mse);
    REQUIRE(c.tau_1se >= c.tau_min);
    REQUIRE(c.idx_1se <= c.idx_min);
  }
}

TEST_CASE("kfold_cv is deterministic and respects k > n") {
  Rng r(61);
  MatrixXd X = random_matrix(r, 30, 4);
  VectorXd y = random_vector(r, 30);
  CvCurve a = kfold_cv(X, y, 5, 99, 40);
  CvCurve b = kfold_cv(X, y, 5, 99, 40);
  CHECK(a.tau_1se == b.tau_1se);
  for (size_t i = 0; i < a.mean_error.size(); ++i)
    CHECK(a.mean_error[i] == b.mean_error[i]);
  CHECK_THROWS_AS((void)kfold_cv(X, y, 31, 1), Error);
}

TEST_CASE("fold assignment partitions evenly") {
  auto f = fold_assignment(23, 10, 7);
  std::vector<int> counts(10, 0);
  for (int x : f) ++counts[x];
  for (int c : counts) CHECK((c == 2 || c == 3));
  CHECK(f == fold_assignment(23, 10, 7));
  CHECK(f != fold_assignment(23, 10, 8));
}

TEST_CASE("elastic net degenerates to lasso at l1_ratio = 1") {
  Rng r(71);
  for (int rep = 0; rep < 20; ++rep) {
    MatrixXd X = random_matrix(r, 25, 6);
    VectorXd y = random_vector(r, 25);
    double tau = tau_max(X, y) * (0.1 + 0.8 * r.next_uniform());
    LassoFit l = lasso_fit(X, y, tau);
    LassoFit e = elastic_net_fit(X, y, tau, 1.0);
    CHECK((l.coef - e.coef).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK(l.intercept == doctest::Approx(e.intercept).epsilon(1e-10));
  }
}

TEST_CASE("ridge closed form on an orthonormal design") {
  MatrixXd X = helmert4().leftCols(2);
  VectorXd y(4);
  y << 1.0, -0.4, 0.9, -2.2;
  double tau = 0.8;
  LassoFit f = elastic_net_fit(X, y, tau, 0.0);
  VectorXd yc = y.array() - y.mean();
  // b_j = z_j'yc / (z_j'z_j + tau/2) with z_j'z_j = n-1 = 3
  for (int j = 0; j < 2; ++j) {
    double expect = X.col(j).dot(yc) / (3.0 + tau / 2.0);
    CHECK(f.coef[j] == doctest::Approx(expect).epsilon(1e-8));
  }
}

TEST_CASE("grouping effect: duplicated column under l1_ratio < 1") {
  Rng r(81);
  MatrixXd base = random_matrix(r, 40, 3);
  MatrixXd X(40, 4);
  X << base, base.col(1);
  VectorXd y = base * VectorXd::LinSpaced(3, 0.5, 1.5) +
               0.05 * random_vector(r, 40);
  LassoFit f = elastic_net_fit(X, y, 0.4 * tau_max(X, y, 0.5), 0.5);
  CHECK(std::abs(f.coef[1] - f.coef[3]) < 1e-8);
}

TEST_CASE("enet_cv picks a ratio and satisfies the 1-SE invariant") {
  Rng r(91);
  MatrixXd X = random_matrix(r, 60, 5);
  VectorXd y = X.col(0) * 2.0 + 0.3 * random_vector(r, 60);
  EnetCvResult res = enet_cv(X, y, {0.5, 1.0}, 5, 42, 40);
  CHECK((res.l1_ratio == 0.5 || res.l1_ratio == 1.0));
  CHECK(res.curve.tau_1se >= res.curve.tau_min);
  CHECK(res.fit.tau == doctest::Approx(res.curve.tau_1se));
}

TEST_CASE("ols_hc3 hand case: intercept-only, y = 1 2 3") {
  MatrixXd X = MatrixXd::Ones(3, 1);
  VectorXd y(3);
  y << 1, 2, 3;
  OlsFit f = ols_hc3(X, y);
  CHECK(f.coef[0] == doctest::Approx(2.0));
  CHECK(f.leverage[0] == doctest::Approx(1.0 / 3.0));
  CHECK(f.hc3_se[0] == doctest::Approx(0.7071).epsilon(1e-4));
}

TEST_CASE("ols_hc3 exact fit: zero se, undefined t") {
  MatrixXd X(4, 2);
  X << 1, 1, 1, 2, 1, 3, 1, 4;
  VectorXd y = 2.0 * X.col(1) + VectorXd::Constant(4, 1.0);
  OlsFit f = ols_hc3(X, y);
  CHECK(f.hc3_se[0] == 0.0);
  CHECK(f.hc3_se[1] == 0.0);
  CHECK(std::isnan(f.t[0]));
  CHECK(std::isnan(f.t[1]));
}

TEST_CASE("ols_hc3 matches the textbook formula on random designs") {
  Rng r(101);
  for (int rep = 0; rep < 20; ++rep) {
    MatrixXd X(20, 3);
    X.col(0).setOnes();
    X.col(1) = random_vector(r, 20);
    X.col(2) = random_vector(r, 20);
    VectorXd y = random_vector(r, 20);
    OlsFit f = ols_hc3(X, y);

    // Independent route: explicit normal equations and leverage loop.
    MatrixXd XtXi = (X.transpose() * X).inverse();
    VectorXd beta = XtXi * X.transpose() * y;
    VectorXd e = y - X * beta;
    MatrixXd meat = MatrixXd::Zero(3, 3);
    for (int i = 0; i < 20; ++i) {
      double h = (X.row(i) * XtXi * X.row(i).transpose())(0);
      double w = e[i] * e[i] / ((1 - h) * (1 - h));
      meat += w * X.row(i).transpose() * X.row(i);
    }
    MatrixXd V = XtXi * meat * XtXi;
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(f.coef[j] - beta[j]) < 1e-10);
      CHECK(std::abs(f.hc3_se[j] - std::sqrt(V(j, j))) < 1e-10);
    }
  }
}

TEST_CASE("ols_hc3 rank deficiency names the dependent column") {
  MatrixXd X(5, 3);
  X.col(0).setOnes();
  X.col(1) << 1, 2, 3, 4, 5;
  X.col(2) = 2.0 * X.col(1);
  VectorXd y(5);
  y << 1, 2, 1, 2, 1;
  // Either twin may be reported; the pivoting decides which one is
  // "dependent".
  std::vector<std::string> names = {"const", "a", "a_twice"};
  CHECK_THROWS_WITH_AS((void)ols_hc3(X, y, &names),
                       doctest::Contains("dependent columns: a"), Error);
}

TEST_CASE("ols_hc3 rejects perfect-leverage rows") {
  // Row 0 is the only one with a nonzero second regressor -> h_00 = 1.
  MatrixXd X(4, 2);
  X << 1, 1, 1, 0, 1, 0, 1, 0;
  VectorXd y(4);
  y << 5, 1, 2, 3;
  CHECK_THROWS_WITH_AS((void)ols_hc3(X, y), doctest::Contains("row 0"), Error);
}

TEST_CASE("pca: rank-1 data retains one component at share 1") {
  VectorXd t(6);
  t << -2, -1, 0, 1, 2, 3;
  MatrixXd X(6, 3);
  X.col(0) = t;
  X.col(1) = 2.0 * t;
  X.col(2) = -0.5 * t;
  PcaResult p = pca_reduce(X, 0.9);
  CHECK(p.retained == 1);
  CHECK(p.explained_share[0] == doctest::Approx(1.0));
}

TEST_CASE("pca: loadings are orthonormal, eigenvalues descending") {
  Rng r(111);
  MatrixXd X = random_matrix(r, 40, 5);
  PcaResult p = pca_reduce(X, 1.0);
  MatrixXd I = p.loadings.transpose() * p.loadings;
  CHECK((I - MatrixXd::Identity(I.rows(), I.cols()))
            .lpNorm<Eigen::Infinity>() < 1e-10);
  for (int i = 1; i < p.eigenvalues.size(); ++i)
    CHECK(p.eigenvalues[i] <= p.eigenvalues[i - 1] + 1e-12);
}

TEST_CASE("pca retained count from exact eigenvalue arithmetic") {
  // Sample covariance exactly diag(4, 1, 0.01): 4/5.01 < 0.9 <= 5/5.01.
  MatrixXd X = helmert4();
  X.col(0) *= 2.0;
  X.col(2) *= 0.1;
  PcaResult p = pca_reduce(X, 0.9);
  CHECK(p.retained == 2);
  CHECK(p.eigenvalues[0] == doctest::Approx(4.0));
  CHECK(p.eigenvalues[2] == doctest::Approx(0.01));
}

TEST_CASE("objective is non-increasing along extra sweeps") {
  // Indirect check: a converged fit's objective does not exceed the
  // objective of any truncated run.
  Rng r(121);
  MatrixXd X = random_matrix(r, 30, 6);
  VectorXd y = random_vector(r, 30);
  double tau = 0.3 * tau_max(X, y);
  FitOptions few;
  few.max_sweeps = 1;
  few.kkt_tol = 1e30;  // accept whatever one sweep produced
  LassoFit partial = lasso_fit(X, y, tau, few);
  LassoFit full = lasso_fit(X, y, tau);
  CHECK(full.objective <= partial.objective + 1e-12);
}

TEST_CASE("1-SE active set nests inside the tau_min active set") {
  Rng r(131);
  MatrixXd X = random_matrix(r, 80, 6);
  VectorXd y = X.col(0) + 0.5 * X.col(1) + 0.2 * random_vector(r, 80);
  CvCurve c = kfold_cv(X, y, 5, 3, 60);
  LassoFit at_min = lasso_fit(X, y, c.tau_min);
  LassoFit at_1se = lasso_fit(X, y, c.tau_1se);
  for (int j : at_1se.active_set) {
    bool in_min = std::find(at_min.active_set.begin(),
                            at_min.active_set.end(), j) !=
                  at_min.active_set.end();
    CHECK(in_min);
  }
}
