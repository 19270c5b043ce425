#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fsl/reg/lasso.hpp"
#include "fsl/reg/ols.hpp"
#include "fsl/rng.hpp"
#include "fsl/synth.hpp"

using namespace fsl;
using namespace fsl::synth;

namespace {

SyntheticDGP small_dgp() {
  SyntheticDGP d;
  d.n_assets = 40;
  d.T = 120;
  d.p_controls = 4;
  d.d_alphas = 1;
  d.control_lambda = VectorXd::Zero(4);
  d.control_lambda[1] = 0.3;
  d.alpha_lambda = VectorXd::Constant(1, 0.005);
  d.confounding = MatrixXd::Zero(1, 4);
  d.noise_scale = 0.5;
  d.gamma0 = 0.001;
  d.seed = 42;
  return d;
}

}  // namespace

TEST_CASE("dgp json round-trips losslessly") {
  SyntheticDGP d = small_dgp();
  d.confounding(0, 2) = 0.9;
  d.zero_loading_controls = {2};
  SyntheticDGP e = SyntheticDGP::from_json(d.to_json());
  CHECK(e.n_assets == d.n_assets);
  CHECK(e.T == d.T);
  CHECK(e.control_lambda == d.control_lambda);
  CHECK(e.alpha_lambda == d.alpha_lambda);
  CHECK(e.confounding == d.confounding);
  CHECK(e.zero_loading_controls == d.zero_loading_controls);
  CHECK(e.noise_scale == d.noise_scale);
  CHECK(e.gamma0 == d.gamma0);
  CHECK(e.seed == d.seed);
}

TEST_CASE("dgp validation catches bad shapes") {
  SyntheticDGP d = small_dgp();
  d.control_lambda = VectorXd::Zero(3);
  CHECK_THROWS_AS(d.validate(), Error);
  d = small_dgp();
  d.confounding = MatrixXd::Zero(2, 4);
  CHECK_THROWS_AS(d.validate(), Error);
  d = small_dgp();
  d.zero_loading_controls = {9};
  CHECK_THROWS_AS(d.validate(), Error);
  CHECK_THROWS_AS((void)SyntheticDGP::from_json("{not json"), Error);
}

TEST_CASE("generate is reproducible byte-for-byte under a fixed seed") {
  SyntheticDGP d = small_dgp();
  SyntheticData a = generate(d);
  SyntheticData b = generate(d);
  CHECK(a.assets.returns == b.assets.returns);
  CHECK(a.controls[0].returns == b.controls[0].returns);
  CHECK(a.alphas[0].returns == b.alphas[0].returns);
  CHECK(a.truth.loadings_h == b.truth.loadings_h);
  d.seed = 43;
  SyntheticData c = generate(d);
  CHECK(a.assets.returns != c.assets.returns);
}

TEST_CASE("truth record is complete and consistent") {
  SyntheticDGP d = small_dgp();
  SyntheticData data = generate(d);
  CHECK(data.truth.support == std::vector<int>{1});
  CHECK(data.truth.loadings_h.rows() == d.n_assets);
  CHECK(data.truth.loadings_g.cols() == d.d_alphas);
  CHECK(data.truth.expected_return.size() == d.n_assets);
  CHECK(data.assets.months.size() == size_t(d.T));
  CHECK(data.controls.size() == size_t(d.p_controls));
  CHECK(data.alphas.size() == size_t(d.d_alphas));
  // expected return honors the premium construction
  VectorXd expect = VectorXd::Constant(d.n_assets, d.gamma0) +
                    data.truth.loadings_h * d.control_lambda +
                    data.truth.loadings_g * d.alpha_lambda;
  CHECK((data.truth.expected_return - expect).lpNorm<Eigen::Infinity>() <
        1e-12);
}

TEST_CASE("zero_loading_controls zeroes the asset loadings") {
  SyntheticDGP d = small_dgp();
  d.zero_loading_controls = {0, 3};
  SyntheticData data = generate(d);
  CHECK(data.truth.loadings_h.col(0).norm() == 0.0);
  CHECK(data.truth.loadings_h.col(3).norm() == 0.0);
  CHECK(data.truth.loadings_h.col(1).norm() > 0.0);
}

TEST_CASE("confounded alpha correlates with its control") {
  SyntheticDGP d = small_dgp();
  d.T = 2000;
  d.confounding(0, 2) = 0.9;
  SyntheticData data = generate(d);
  const VectorXd& g = data.alphas[0].returns;
  const VectorXd& h = data.controls[2].returns;
  double c = ((g.array() - g.mean()) * (h.array() - h.mean())).sum() /
             (std::sqrt((g.array() - g.mean()).square().sum()) *
              std::sqrt((h.array() - h.mean()).square().sum()));
  CHECK(c == doctest::Approx(0.9).epsilon(0.05));
}

TEST_CASE("oracle_lasso: tau = 0 is OLS") {
  Rng r(5);
  MatrixXd X(20, 3);
  VectorXd y(20);
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = r.next_gaussian();
    y[i] = r.next_gaussian();
  }
  OracleFit o = oracle_lasso(X, y, 0.0);
  MatrixXd D(20, 4);
  D.col(0).setOnes();
  D.rightCols(3) = X;
  VectorXd beta = D.colPivHouseholderQr().solve(y);
  CHECK(o.intercept == doctest::Approx(beta[0]).epsilon(1e-8));
  for (int j = 0; j < 3; ++j)
    CHECK(o.coef[j] == doctest::Approx(beta[j + 1]).epsilon(1e-8));
}

TEST_CASE("oracle_lasso: huge tau shrinks to zero") {
  Rng r(7);
  MatrixXd X(15, 2);
  VectorXd y(15);
  for (int i = 0; i < 15; ++i) {
    X(i, 0) = r.next_gaussian();
    X(i, 1) = r.next_gaussian();
    y[i] = r.next_gaussian();
  }
  OracleFit o = oracle_lasso(X, y, 1e6);
  CHECK(o.coef.norm() == 0.0);
  CHECK(o.intercept == doctest::Approx(y.mean()));
}

TEST_CASE("oracle_lasso agrees with lasso_fit on random instances") {
  Rng r(11);
  for (int rep = 0; rep < 10; ++rep) {
    MatrixXd X(30, 8);
    VectorXd y(30);
    for (int i = 0; i < 30; ++i) {
      for (int j = 0; j < 8; ++j) X(i, j) = r.next_gaussian();
      y[i] = r.next_gaussian();
    }
    double tau = reg::tau_max(X, y) * (0.05 + 0.9 * r.next_uniform());
    OracleFit o = oracle_lasso(X, y, tau);
    reg::LassoFit f = reg::lasso_fit(X, y, tau);
    CHECK((o.coef - f.coef).lpNorm<Eigen::Infinity>() < 1e-6);
    CHECK(std::abs(o.intercept - f.intercept) < 1e-6);
  }
}

TEST_CASE("oracle_lasso rejects p > 12") {
  MatrixXd X = MatrixXd::Random(30, 13);
  VectorXd y = VectorXd::Random(30);
  CHECK_THROWS_AS((void)oracle_lasso(X, y, 1.0), Error);
}

TEST_CASE("noiseless large-T limit: stage 3 approaches the truth") {
  SyntheticDGP d = small_dgp();
  d.T = 4000;
  d.n_assets = 100;
  d.noise_scale = 1e-4;
  SyntheticData data = generate(d);
  MomentSet m = compute_moments(data.assets, data.controls, data.alphas);
  SelectionSets sets;
  for (int j = 0; j < d.p_controls; ++j) sets.I1.push_back(j);
  sets.stage2_active = {{}};
  PremiumTable t = stage3_infer(m, sets);
  CHECK(t.alphas[0].lambda ==
        doctest::Approx(d.alpha_lambda[0]).epsilon(0.05));
  CHECK(t.gamma0 == doctest::Approx(d.gamma0).epsilon(0.1));
}

TEST_CASE("support_recovery_rate runs and logs per run") {
  SyntheticDGP d = small_dgp();
  d.control_lambda[1] = 0.5;
  CvConfig cv;
  cv.k = 5;
  cv.n_taus = 40;
  RecoveryResult res = support_recovery_rate(d, 8, cv);
  CHECK(res.runs.size() == 8);
  CHECK(res.rate >= 0.0);
  CHECK(res.rate <= 1.0);
  for (int i = 0; i < 8; ++i) CHECK(res.runs[i].seed == d.seed + uint64_t(i));
  // deterministic
  RecoveryResult res2 = support_recovery_rate(d, 8, cv);
  CHECK(res.rate == res2.rate);
  for (int i = 0; i < 8; ++i)
    CHECK(res.runs[i].recovered == res2.runs[i].recovered);
}

TEST_CASE("zero premiums everywhere: DS table centered near zero") {
  SyntheticDGP d = small_dgp();
  d.control_lambda.setZero();
  d.alpha_lambda.setZero();
  d.gamma0 = 0.0;
  d.T = 360;
  d.n_assets = 80;
  SyntheticData data = generate(d);
  MomentSet m = compute_moments(data.assets, data.controls, data.alphas);
  CvConfig cfg;
  cfg.k = 5;
  cfg.n_taus = 50;
  cfg.seed = 3;
  DsResult r = run_double_selection(m, cfg);
  // a single draw: just require the estimate to be statistically unremarkable
  CHECK(std::abs(r.table.alphas[0].t) < 4.0);
}
