#include "fsl/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "fsl/reg/pca.hpp"
#include "fsl/rng.hpp"

namespace fsl {

namespace {

std::map<int, int> present_months(const FactorSeries& f) {
  std::map<int, int> out;  // month key -> index
  for (Eigen::Index t = 0; t < f.returns.size(); ++t)
    if (!is_missing(f.returns[t])) out[f.dates[t].month_key()] = int(t);
  return out;
}

}  // namespace

MomentSet compute_moments(const TestAssetPanel& assets,
                          const std::vector<FactorSeries>& controls,
                          const std::vector<FactorSeries>& alphas,
                          int min_overlap, MomentLog* log) {
  if (controls.empty()) throw Error("compute_moments: no control factors");
  for (const auto& f : controls)
    if (f.frequency != Frequency::MONTHLY)
      throw Error("compute_moments: control '" + f.name + "' is not monthly");
  for (const auto& f : alphas)
    if (f.frequency != Frequency::MONTHLY)
      throw Error("compute_moments: alpha '" + f.name + "' is not monthly");

  // months where every factor has a value
  std::set<int> common;
  {
    auto first = present_months(controls[0]);
    for (auto& [k, v] : first) common.insert(k);
  }
  auto intersect = [&](const FactorSeries& f) {
    auto pm = present_months(f);
    for (auto it = common.begin(); it != common.end();)
      it = pm.count(*it) ? std::next(it) : common.erase(it);
  };
  for (size_t i = 1; i < controls.size(); ++i) intersect(controls[i]);
  for (const auto& f : alphas) intersect(f);
  {  // and where the asset panel has a row
    std::set<int> panel_months;
    for (const auto& d : assets.months) panel_months.insert(d.month_key());
    for (auto it = common.begin(); it != common.end();)
      it = panel_months.count(*it) ? std::next(it) : common.erase(it);
  }
  const int T = int(common.size());
  if (T < min_overlap)
    throw Error("compute_moments: aligned sample has " + std::to_string(T) +
                " months, need >= " + std::to_string(min_overlap));

  std::map<int, int> month_row;  // month key -> asset panel row
  for (size_t i = 0; i < assets.months.size(); ++i)
    month_row[assets.months[i].month_key()] = int(i);

  // factor matrix over the aligned sample, standardized in place
  auto aligned_factor = [&](const FactorSeries& f) {
    auto pm = present_months(f);
    VectorXd v(T);
    int i = 0;
    for (int mk : common) v[i++] = f.returns[pm.at(mk)];
    double mean = v.mean();
    double var = (v.array() - mean).square().sum() / double(T - 1);
    if (var <= 0)
      throw Error("compute_moments: factor '" + f.name + "' has zero variance");
    return VectorXd(v / std::sqrt(var));  // unit variance, mean kept
  };

  MatrixXd H(T, controls.size()), G(T, alphas.size());
  MomentSet m;
  for (size_t k = 0; k < controls.size(); ++k) {
    H.col(Eigen::Index(k)) = aligned_factor(controls[k]);
    m.control_labels.push_back(controls[k].name);
  }
  for (size_t k = 0; k < alphas.size(); ++k) {
    G.col(Eigen::Index(k)) = aligned_factor(alphas[k]);
    m.alpha_labels.push_back(alphas[k].name);
  }

  // asset rows complete over the aligned sample; others dropped and logged
  std::vector<int> kept;
  for (Eigen::Index a = 0; a < assets.returns.cols(); ++a) {
    bool complete = true;
    for (int mk : common)
      if (is_missing(assets.returns(month_row.at(mk), a))) {
        complete = false;
        break;
      }
    if (complete)
      kept.push_back(int(a));
    else if (log)
      log->dropped_assets.push_back(assets.portfolio_ids[a]);
  }
  if (kept.empty()) throw Error("compute_moments: no complete test assets");

  const int n = int(kept.size());
  MatrixXd R(T, n);
  {
    int i = 0;
    for (int mk : common) {
      for (int a = 0; a < n; ++a)
        R(i, a) = assets.returns(month_row.at(mk), kept[a]);
      ++i;
    }
  }
  for (int a = 0; a < n; ++a) m.asset_labels.push_back(assets.portfolio_ids[kept[a]]);

  m.T = T;
  m.rbar = R.colwise().mean();
  auto cov_block = [&](const MatrixXd& F) {
    MatrixXd Rc = R.rowwise() - m.rbar.transpose();
    MatrixXd Fc = F.rowwise() - F.colwise().mean();
    return MatrixXd(Rc.transpose() * Fc / double(T - 1));
  };
  m.C_h = cov_block(H);
  m.C_g = cov_block(G);
  return m;
}

namespace {

// Full-data path + CV; returns the active set at tau_1se.
std::vector<int> lasso_1se_select(const MatrixXd& X, const VectorXd& y,
                                  const CvConfig& cfg, uint64_t seed) {
  reg::Path path = reg::lasso_path(X, y, cfg.n_taus, cfg.eps);
  if (path.degenerate) return {};
  reg::CvCurve curve =
      reg::kfold_cv(X, y, cfg.k, seed, cfg.n_taus, cfg.eps);
  return path.fits[curve.idx_1se].active_set;
}

PremiumTable infer(const MomentSet& m, const MatrixXd& controls_block,
                   const std::vector<std::string>& control_names,
                   const std::string& estimator) {
  const Eigen::Index n = m.rbar.size();
  const Eigen::Index pc = controls_block.cols(), d = m.C_g.cols();
  const Eigen::Index cols = 1 + pc + d;
  if (n <= cols)
    throw Error("stage 3: under-identified (" + std::to_string(n) +
                " assets for " + std::to_string(cols) + " columns)");
  MatrixXd X(n, cols);
  X.col(0).setOnes();
  if (pc > 0) X.middleCols(1, pc) = controls_block;
  X.rightCols(d) = m.C_g;
  std::vector<std::string> names{"intercept"};
  for (const auto& s : control_names) names.push_back(s);
  for (const auto& s : m.alpha_labels) names.push_back(s);

  reg::OlsFit fit = reg::ols_hc3(X, m.rbar, &names);
  PremiumTable table;
  table.gamma0 = fit.coef[0];
  for (Eigen::Index j = 0; j < pc; ++j)
    table.controls.push_back({control_names[j], fit.coef[1 + j], fit.t[1 + j],
                              significance_stars(fit.t[1 + j]), estimator});
  for (Eigen::Index j = 0; j < d; ++j) {
    double t = fit.t[1 + pc + j];
    table.alphas.push_back({m.alpha_labels[j], fit.coef[1 + pc + j], t,
                            significance_stars(t), estimator});
  }
  return table;
}

}  // namespace

std::vector<int> stage1_select(const MomentSet& m, const CvConfig& cfg) {
  return lasso_1se_select(m.C_h, m.rbar, cfg, Rng::derive(cfg.seed, 0));
}

SelectionSets stage2_select(const MomentSet& m, const CvConfig& cfg,
                            std::vector<int> stage1) {
  SelectionSets sets;
  sets.I1 = std::move(stage1);
  const int d = int(m.C_g.cols());
  sets.stage2_active.resize(d);
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < d; ++j) {
    // full control universe, own tau and derived seed per alpha
    sets.stage2_active[j] = lasso_1se_select(
        m.C_h, m.C_g.col(j), cfg, Rng::derive(cfg.seed, uint64_t(j) + 1));
  }
  std::set<int> u;
  for (const auto& s : sets.stage2_active) u.insert(s.begin(), s.end());
  sets.I2.assign(u.begin(), u.end());
  return sets;
}

PremiumTable stage3_infer(const MomentSet& m, const SelectionSets& sets,
                          int* duplicate_controls_dropped) {
  std::set<int> u(sets.I1.begin(), sets.I1.end());
  u.insert(sets.I2.begin(), sets.I2.end());
  std::vector<int> selected(u.begin(), u.end());

  // collinearity guard: drop exact duplicates among selected controls
  std::vector<int> kept;
  int dropped = 0;
  for (int j : selected) {
    bool dup = false;
    for (int k : kept) {
      VectorXd a = m.C_h.col(j), b = m.C_h.col(k);
      double ca = (a.array() - a.mean()).matrix().norm();
      double cb = (b.array() - b.mean()).matrix().norm();
      if (ca == 0 || cb == 0) continue;
      double corr = (a.array() - a.mean()).matrix().dot(
                        (b.array() - b.mean()).matrix()) /
                    (ca * cb);
      if (std::abs(std::abs(corr) - 1.0) < 1e-12) {
        dup = true;
        break;
      }
    }
    if (dup)
      ++dropped;
    else
      kept.push_back(j);
  }
  if (duplicate_controls_dropped) *duplicate_controls_dropped = dropped;

  MatrixXd block(m.rbar.size(), kept.size());
  std::vector<std::string> names;
  for (size_t i = 0; i < kept.size(); ++i) {
    block.col(Eigen::Index(i)) = m.C_h.col(kept[i]);
    names.push_back(m.control_labels[kept[i]]);
  }
  return infer(m, block, names, "DS");
}

DsResult run_double_selection(const MomentSet& m, const CvConfig& cfg) {
  DsResult r;
  r.sets = stage2_select(m, cfg, stage1_select(m, cfg));
  r.table = stage3_infer(m, r.sets);
  return r;
}

DsResult run_single_selection(const MomentSet& m, const CvConfig& cfg) {
  DsResult r;
  r.sets.I1 = stage1_select(m, cfg);
  MatrixXd block(m.rbar.size(), r.sets.I1.size());
  std::vector<std::string> names;
  for (size_t i = 0; i < r.sets.I1.size(); ++i) {
    block.col(Eigen::Index(i)) = m.C_h.col(r.sets.I1[i]);
    names.push_back(m.control_labels[r.sets.I1[i]]);
  }
  r.table = infer(m, block, names, "SS");
  return r;
}

PremiumTable run_enet_benchmark(const MomentSet& m, const CvConfig& cfg,
                                const std::vector<double>& l1_ratios) {
  reg::EnetCvResult cv = reg::enet_cv(m.C_h, m.rbar, l1_ratios, cfg.k,
                                      Rng::derive(cfg.seed, 0), cfg.n_taus,
                                      cfg.eps);
  MatrixXd block(m.rbar.size(), cv.fit.active_set.size());
  std::vector<std::string> names;
  for (size_t i = 0; i < cv.fit.active_set.size(); ++i) {
    block.col(Eigen::Index(i)) = m.C_h.col(cv.fit.active_set[i]);
    names.push_back(m.control_labels[cv.fit.active_set[i]]);
  }
  return infer(m, block, names, "ENET");
}

PremiumTable run_pca_benchmark(const MomentSet& m, double var_target) {
  reg::PcaResult pca = reg::pca_reduce(m.C_h, var_target);
  std::vector<std::string> names;
  for (int i = 0; i < pca.retained; ++i)
    names.push_back("pc" + std::to_string(i + 1));
  return infer(m, pca.scores, names, "PCA");
}

}  // namespace fsl
