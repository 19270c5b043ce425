#include "fsl/synth.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include <json.hpp>

#include "fsl/dates.hpp"
#include "fsl/rng.hpp"

namespace fsl::synth {

void SyntheticDGP::validate() const {
  if (n_assets < 2) throw Error("dgp: n_assets must be >= 2");
  if (T < 3) throw Error("dgp: T must be >= 3");
  if (p_controls < 1) throw Error("dgp: p_controls must be >= 1");
  if (d_alphas < 1) throw Error("dgp: d_alphas must be >= 1");
  if (control_lambda.size() != p_controls)
    throw Error("dgp: control_lambda length != p_controls");
  if (alpha_lambda.size() != d_alphas)
    throw Error("dgp: alpha_lambda length != d_alphas");
  if (confounding.rows() != d_alphas || confounding.cols() != p_controls)
    throw Error("dgp: confounding must be d_alphas x p_controls");
  if (noise_scale < 0) throw Error("dgp: noise_scale must be >= 0");
  for (int j : zero_loading_controls)
    if (j < 0 || j >= p_controls)
      throw Error("dgp: zero_loading_controls index out of range");
}

std::string SyntheticDGP::to_json() const {
  nlohmann::json j;
  j["n_assets"] = n_assets;
  j["T"] = T;
  j["p_controls"] = p_controls;
  j["d_alphas"] = d_alphas;
  j["control_lambda"] = std::vector<double>(
      control_lambda.data(), control_lambda.data() + control_lambda.size());
  j["alpha_lambda"] = std::vector<double>(
      alpha_lambda.data(), alpha_lambda.data() + alpha_lambda.size());
  std::vector<std::vector<double>> conf(d_alphas);
  for (int a = 0; a < d_alphas; ++a)
    for (int k = 0; k < p_controls; ++k) conf[a].push_back(confounding(a, k));
  j["confounding"] = conf;
  j["zero_loading_controls"] = zero_loading_controls;
  j["noise_scale"] = noise_scale;
  j["gamma0"] = gamma0;
  j["seed"] = seed;
  return j.dump(2);
}

SyntheticDGP SyntheticDGP::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("dgp: bad json: ") + e.what());
  }
  SyntheticDGP d;
  try {
    d.n_assets = j.at("n_assets").get<int>();
    d.T = j.at("T").get<int>();
    d.p_controls = j.at("p_controls").get<int>();
    d.d_alphas = j.at("d_alphas").get<int>();
    auto cl = j.at("control_lambda").get<std::vector<double>>();
    d.control_lambda = Eigen::Map<VectorXd>(cl.data(), Eigen::Index(cl.size()));
    auto al = j.at("alpha_lambda").get<std::vector<double>>();
    d.alpha_lambda = Eigen::Map<VectorXd>(al.data(), Eigen::Index(al.size()));
    auto conf = j.at("confounding").get<std::vector<std::vector<double>>>();
    d.confounding.resize(Eigen::Index(conf.size()),
                         conf.empty() ? 0 : Eigen::Index(conf[0].size()));
    for (size_t a = 0; a < conf.size(); ++a) {
      if (Eigen::Index(conf[a].size()) != d.confounding.cols())
        throw Error("dgp: ragged confounding matrix");
      for (size_t k = 0; k < conf[a].size(); ++k)
        d.confounding(Eigen::Index(a), Eigen::Index(k)) = conf[a][k];
    }
    if (j.contains("zero_loading_controls"))
      d.zero_loading_controls =
          j.at("zero_loading_controls").get<std::vector<int>>();
    d.noise_scale = j.value("noise_scale", 1.0);
    d.gamma0 = j.value("gamma0", 0.0);
    d.seed = j.value("seed", uint64_t(1));
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("dgp: bad field: ") + e.what());
  }
  d.validate();
  return d;
}

namespace {

MatrixXd gaussian_matrix(Rng& r, int rows, int cols) {
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = r.next_gaussian();
  return m;
}

std::vector<Date> monthly_calendar(int T) {
  std::vector<Date> out;
  out.reserve(T);
  int y = 1975, m = 1;
  for (int t = 0; t < T; ++t) {
    out.push_back(Date(y * 10000 + m * 100 + 28));
    if (++m > 12) { m = 1; ++y; }
  }
  return out;
}

}  // namespace

SyntheticData generate(const SyntheticDGP& dgp) {
  dgp.validate();
  const int n = dgp.n_assets, T = dgp.T, p = dgp.p_controls, d = dgp.d_alphas;
  const MatrixXd& C = dgp.confounding;

  // Idiosyncratic alpha scales keep Var(g_j) = 1 when |C_j| <= 1.
  VectorXd c(d);
  for (int a = 0; a < d; ++a)
    c[a] = std::sqrt(std::max(0.0, 1.0 - C.row(a).squaredNorm()));

  Rng r_h(Rng::derive(dgp.seed, 1));
  Rng r_g(Rng::derive(dgp.seed, 2));
  Rng r_bh(Rng::derive(dgp.seed, 3));
  Rng r_bg(Rng::derive(dgp.seed, 4));
  Rng r_eps(Rng::derive(dgp.seed, 5));

  MatrixXd H = gaussian_matrix(r_h, T, p);                 // control shocks
  MatrixXd G = H * C.transpose() +
               gaussian_matrix(r_g, T, d) * c.asDiagonal();  // alpha shocks
  MatrixXd Bh = gaussian_matrix(r_bh, n, p);
  for (int j : dgp.zero_loading_controls) Bh.col(j).setZero();
  MatrixXd Bg = gaussian_matrix(r_bg, n, d);

  // Population factor covariance with factors ordered (controls, alphas):
  //   Sigma = [[I, C'], [C, CC' + diag(c^2)]]
  // Intercepts alpha_i = gamma0 + beta_i' Sigma lambda make the population
  // regression of E[r] on Cov(r, F) recover lambda exactly, confounded or not.
  VectorXd sl_h = dgp.control_lambda + C.transpose() * dgp.alpha_lambda;
  VectorXd sl_g = C * dgp.control_lambda +
                  (C * C.transpose() +
                   MatrixXd(c.array().square().matrix().asDiagonal())) *
                      dgp.alpha_lambda;
  VectorXd intercept =
      VectorXd::Constant(n, dgp.gamma0) + Bh * sl_h + Bg * sl_g;

  MatrixXd R = gaussian_matrix(r_eps, T, n) * dgp.noise_scale;
  R += H * Bh.transpose() + G * Bg.transpose();
  R.rowwise() += intercept.transpose();

  SyntheticData out;
  out.assets.months = monthly_calendar(T);
  out.assets.portfolio_ids.reserve(n);
  for (int i = 0; i < n; ++i)
    out.assets.portfolio_ids.push_back("synth" + std::to_string(i));
  out.assets.returns = R;

  auto make_series = [&](const std::string& name, const VectorXd& v) {
    FactorSeries s;
    s.name = name;
    s.frequency = Frequency::MONTHLY;
    s.dates = out.assets.months;
    s.returns = v;
    return s;
  };
  for (int k = 0; k < p; ++k)
    out.controls.push_back(make_series("h" + std::to_string(k), H.col(k)));
  for (int a = 0; a < d; ++a)
    out.alphas.push_back(make_series("g" + std::to_string(a), G.col(a)));

  out.truth.control_lambda = dgp.control_lambda;
  out.truth.alpha_lambda = dgp.alpha_lambda;
  out.truth.loadings_h = Bh;
  out.truth.loadings_g = Bg;
  out.truth.expected_return = intercept;
  for (int k = 0; k < p; ++k)
    if (dgp.control_lambda[k] != 0.0) out.truth.support.push_back(k);
  return out;
}

OracleFit oracle_lasso(const MatrixXd& X, const VectorXd& y, double tau) {
  const Eigen::Index p = X.cols();
  const double n = double(X.rows());
  if (p > 12) throw Error("oracle_lasso: p must be <= 12");
  if (X.rows() < 2 || y.size() != X.rows())
    throw Error("oracle_lasso: bad dimensions");
  if (tau < 0) throw Error("oracle_lasso: tau must be >= 0");

  // Standardize exactly like the coordinate-descent solver so objectives
  // are directly comparable.
  VectorXd mean = X.colwise().mean();
  MatrixXd Z = X.rowwise() - mean.transpose();
  VectorXd scale(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    scale[j] = std::sqrt(Z.col(j).squaredNorm() / (n - 1.0));
    if (scale[j] > 0) Z.col(j) /= scale[j];
  }
  double ymean = y.mean();
  VectorXd yc = y.array() - ymean;
  MatrixXd ZtZ = Z.transpose() * Z;
  VectorXd Zty = Z.transpose() * yc;

  double best_obj = std::numeric_limits<double>::infinity();
  VectorXd best_b = VectorXd::Zero(p);

  long total = 1;
  for (Eigen::Index j = 0; j < p; ++j) total *= 3;
  std::vector<int> sgn(p);
  for (long code = 0; code < total; ++code) {
    long rem = code;
    int k = 0;
    bool feasible_pattern = true;
    for (Eigen::Index j = 0; j < p; ++j) {
      sgn[j] = int(rem % 3) - 1;  // -1, 0, +1
      rem /= 3;
      if (sgn[j] != 0) {
        if (scale[j] == 0) { feasible_pattern = false; break; }
        ++k;
      }
    }
    if (!feasible_pattern) continue;

    VectorXd b = VectorXd::Zero(p);
    if (k > 0) {
      MatrixXd A(k, k);
      VectorXd rhs(k);
      std::vector<Eigen::Index> idx;
      for (Eigen::Index j = 0; j < p; ++j)
        if (sgn[j] != 0) idx.push_back(j);
      for (int a = 0; a < k; ++a) {
        rhs[a] = Zty[idx[a]] - 0.5 * tau * sgn[idx[a]];
        for (int bcol = 0; bcol < k; ++bcol) A(a, bcol) = ZtZ(idx[a], idx[bcol]);
      }
      Eigen::FullPivLU<MatrixXd> lu(A);
      if (!lu.isInvertible()) continue;
      VectorXd bs = lu.solve(rhs);
      bool sign_ok = true;
      for (int a = 0; a < k; ++a)
        if (bs[a] * sgn[idx[a]] <= 0) { sign_ok = false; break; }
      if (!sign_ok) continue;
      for (int a = 0; a < k; ++a) b[idx[a]] = bs[a];
    }

    VectorXd grad = Zty - ZtZ * b;
    bool kkt_ok = true;
    for (Eigen::Index j = 0; j < p; ++j)
      if (sgn[j] == 0 && scale[j] > 0 &&
          std::abs(grad[j]) > 0.5 * tau * (1.0 + 1e-12)) {
        kkt_ok = false;
        break;
      }
    if (!kkt_ok) continue;

    double obj = (yc - Z * b).squaredNorm() / n + (tau / n) * b.lpNorm<1>();
    if (obj < best_obj) {
      best_obj = obj;
      best_b = b;
    }
  }

  OracleFit fit;
  fit.objective = best_obj;
  fit.coef = VectorXd::Zero(p);
  for (Eigen::Index j = 0; j < p; ++j)
    if (scale[j] > 0) fit.coef[j] = best_b[j] / scale[j];
  fit.intercept = ymean - mean.dot(fit.coef);
  return fit;
}

RecoveryResult support_recovery_rate(const SyntheticDGP& dgp, int runs,
                                     const CvConfig& cv) {
  if (runs < 1) throw Error("support_recovery_rate: runs must be >= 1");
  RecoveryResult out;
  out.runs.resize(runs);
  std::atomic<int> hits{0};
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < runs; ++i) {
    SyntheticDGP d = dgp;
    d.seed = dgp.seed + uint64_t(i);
    CvConfig c = cv;
    c.seed = Rng::derive(d.seed, 77);
    SyntheticData data = generate(d);
    MomentSet m = compute_moments(data.assets, data.controls, data.alphas);
    std::vector<int> sel = stage1_select(m, c);
    bool ok = std::includes(sel.begin(), sel.end(),
                            data.truth.support.begin(),
                            data.truth.support.end());
    RecoveryRun& run = out.runs[i];
    run.seed = d.seed;
    run.recovered = ok;
    for (int j : sel)
      if (!std::binary_search(data.truth.support.begin(),
                              data.truth.support.end(), j))
        ++run.false_discoveries;
    if (ok) hits.fetch_add(1);
  }
  out.rate = double(hits.load()) / double(runs);
  return out;
}

}  // namespace fsl::synth
