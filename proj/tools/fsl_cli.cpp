// fsl: factor-screening toolkit command line.
//
// Subcommands: ingest, signals, portfolios, ds, ss, enet, pca, synth,
// report. Every run writes a manifest.json next to its outputs with
// FNV-1a hashes of the inputs, the seed, version and stage timings, so any
// artifact is reconstructible from the named inputs plus the seed.
// Exit codes: 0 ok, 1 stage failure, 2 invalid configuration.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fsl/dsl/eval.hpp"
#include "fsl/panel.hpp"
#include "fsl/pipeline.hpp"
#include "fsl/portfolio.hpp"
#include "fsl/report.hpp"
#include "fsl/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fsl;

namespace {

constexpr const char* kVersion = "0.1.0";

uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  uint64_t h = 1469598103934665603ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= uint8_t(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

struct Manifest {
  json j;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  Manifest(const std::string& command, uint64_t seed) {
    j["version"] = kVersion;
    j["command"] = command;
    j["seed"] = seed;
    j["inputs"] = json::object();
    j["timings_ms"] = json::object();
  }
  void input(const std::string& path) {
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016llx",
                  (unsigned long long)fnv1a_file(path));
    j["inputs"][path] = std::string("fnv1a:") + hex;
  }
  void lap(const std::string& stage) {
    auto now = std::chrono::steady_clock::now();
    j["timings_ms"][stage] =
        std::chrono::duration_cast<std::chrono::milliseconds>(now - t0)
            .count();
    t0 = now;
  }
  void write(const fs::path& dir) {
    std::ofstream(dir / "manifest.json") << j.dump(2) << "\n";
  }
};

// --- factor series files: two tab-separated columns, date and value ------

FactorSeries read_series(const std::string& path, Frequency freq) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  FactorSeries s;
  s.name = fs::path(path).stem().string();
  s.frequency = freq;
  std::vector<double> vals;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("date", 0) == 0) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error(path + ": expected date\\tvalue");
    s.dates.push_back(parse_date(line.substr(0, tab)));
    std::string v = line.substr(tab + 1);
    vals.push_back(v == "NA" || v.empty() ? missing() : std::stod(v));
  }
  s.returns = Eigen::Map<VectorXd>(vals.data(), Eigen::Index(vals.size()));
  return s;
}

void write_series(const FactorSeries& s, const std::string& path) {
  std::ofstream out(path);
  out << "date\tvalue\n";
  out.precision(17);
  for (Eigen::Index t = 0; t < s.returns.size(); ++t) {
    out << to_string(s.dates[t]) << "\t";
    if (is_missing(s.returns[t]))
      out << "NA\n";
    else
      out << s.returns[t] << "\n";
  }
}

std::vector<FactorSeries> read_series_dir(const std::string& dir,
                                          Frequency freq, Manifest& man) {
  std::vector<std::string> paths;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) paths.push_back(e.path().string());
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw Error("no factor files in " + dir);
  std::vector<FactorSeries> out;
  for (const auto& p : paths) {
    man.input(p);
    out.push_back(read_series(p, freq));
  }
  return out;
}

// --- test-asset panel: date column plus one column per portfolio ---------

TestAssetPanel read_assets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(path + ": empty assets file");
  TestAssetPanel p;
  std::istringstream hs(line);
  std::string cell;
  std::getline(hs, cell, '\t');  // "date"
  while (std::getline(hs, cell, '\t')) p.portfolio_ids.push_back(cell);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::getline(ls, cell, '\t');
    p.months.push_back(parse_date(cell));
    std::vector<double> row;
    while (std::getline(ls, cell, '\t'))
      row.push_back(cell == "NA" || cell.empty() ? missing()
                                                 : std::stod(cell));
    if (row.size() != p.portfolio_ids.size())
      throw Error(path + ": ragged row at " + cell);
    rows.push_back(std::move(row));
  }
  p.returns.resize(Eigen::Index(rows.size()),
                   Eigen::Index(p.portfolio_ids.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      p.returns(Eigen::Index(i), Eigen::Index(j)) = rows[i][j];
  return p;
}

void write_assets(const TestAssetPanel& p, const std::string& path) {
  std::ofstream out(path);
  out << "date";
  for (const auto& id : p.portfolio_ids) out << "\t" << id;
  out << "\n";
  out.precision(17);
  for (Eigen::Index t = 0; t < p.returns.rows(); ++t) {
    out << to_string(p.months[t]);
    for (Eigen::Index j = 0; j < p.returns.cols(); ++j) {
      if (is_missing(p.returns(t, j)))
        out << "\tNA";
      else
        out << "\t" << p.returns(t, j);
    }
    out << "\n";
  }
}

void write_signal(const dsl::SignalPanel& s, const std::string& path) {
  std::ofstream out(path);
  out << "date";
  for (const auto& a : s.assets) out << "\t" << a;
  out << "\n";
  out.precision(17);
  for (Eigen::Index t = 0; t < s.values.rows(); ++t) {
    out << to_string(s.calendar[t]);
    for (Eigen::Index j = 0; j < s.values.cols(); ++j) {
      if (is_missing(s.values(t, j)))
        out << "\tNA";
      else
        out << "\t" << s.values(t, j);
    }
    out << "\n";
  }
}

dsl::SignalPanel read_signal(const std::string& path) {
  TestAssetPanel flat = read_assets(path);  // same wide layout
  dsl::SignalPanel s;
  s.name = fs::path(path).stem().string();
  s.assets = flat.portfolio_ids;
  s.calendar = flat.months;
  s.values = flat.returns;
  return s;
}

// CV parameters common to the regression subcommands.
struct CvFlags {
  CvConfig cfg;
  void attach(CLI::App* cmd) {
    cmd->add_option("--seed", cfg.seed, "fold-assignment seed");
    cmd->add_option("--k", cfg.k, "CV folds")->check(CLI::Range(2, 1000));
    cmd->add_option("--n-taus", cfg.n_taus, "grid length")
        ->check(CLI::Range(2, 10000));
    cmd->add_option("--eps", cfg.eps, "tau_min/tau_max ratio")
        ->check(CLI::Range(1e-6, 1.0));
  }
};

int run_estimator(const std::string& name, const std::string& assets_path,
                  const std::string& controls_dir,
                  const std::string& alphas_dir, const CvConfig& cfg,
                  const std::string& out_path, double pca_var) {
  Manifest man(name, cfg.seed);
  man.input(assets_path);
  TestAssetPanel assets = read_assets(assets_path);
  auto controls = read_series_dir(controls_dir, Frequency::MONTHLY, man);
  auto alphas = read_series_dir(alphas_dir, Frequency::MONTHLY, man);
  man.lap("load");

  MomentLog log;
  MomentSet m = compute_moments(assets, controls, alphas, 24, &log);
  man.lap("moments");

  PremiumTable table;
  if (name == "ds")
    table = run_double_selection(m, cfg).table;
  else if (name == "ss")
    table = run_single_selection(m, cfg).table;
  else if (name == "enet")
    table = run_enet_benchmark(m, cfg);
  else
    table = run_pca_benchmark(m, pca_var);
  man.lap("estimate");

  std::ofstream(out_path) << render_table(table, TableStyle::TSV);
  man.j["outputs"] = {out_path};
  man.j["dropped_assets"] = log.dropped_assets;
  man.write(fs::path(out_path).parent_path());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"factor screening toolkit"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "load, filter and snapshot a price panel");
  std::string in_path, out_dir = ".", schema_path;
  double min_price = 5.0;
  bool no_filters = false;
  ingest->add_option("--input", in_path, "delimited price file")->required();
  ingest->add_option("--out", out_dir, "output directory");
  ingest->add_option("--schema", schema_path, "JSON column mapping");
  ingest->add_option("--min-price", min_price, "price filter threshold");
  ingest->add_flag("--no-filters", no_filters, "skip all filters");

  // signals
  auto* signals = app.add_subcommand("signals", "evaluate an expression bundle");
  std::string bundle_path, panel_path, sig_out = ".";
  int window = 252;
  signals->add_option("--bundle", bundle_path, "name = formula file")->required();
  signals->add_option("--panel", panel_path, "price panel snapshot")->required();
  signals->add_option("--window", window, "evaluation window (trading days)")
      ->check(CLI::Range(1, 10000));
  signals->add_option("--out", sig_out, "output directory");

  // portfolios
  auto* portfolios = app.add_subcommand("portfolios", "sort signals into factors and test assets");
  std::string sig_dir, pf_panel, pf_out = ".", spec_str = "3x2", weighting = "value";
  portfolios->add_option("--signals", sig_dir, "directory of signal panels")->required();
  portfolios->add_option("--panel", pf_panel, "price panel snapshot")->required();
  portfolios->add_option("--spec", spec_str, "size x signal bins, e.g. 3x2 or 5x5");
  portfolios->add_option("--weighting", weighting)->check(CLI::IsMember({"value", "equal"}));
  portfolios->add_option("--out", pf_out, "output directory");

  // estimators
  std::string assets_path, controls_dir, alphas_dir, report_out = "report.tsv";
  double pca_var = 0.90;
  CvFlags cv;
  std::vector<CLI::App*> est_cmds;
  for (const char* nm : {"ds", "ss", "enet", "pca"}) {
    auto* c = app.add_subcommand(nm, std::string(nm) + " estimator");
    c->add_option("--assets", assets_path, "test-asset panel TSV")->required();
    c->add_option("--controls", controls_dir, "control factor directory")->required();
    c->add_option("--alphas", alphas_dir, "candidate factor directory")->required();
    c->add_option("--out", report_out, "report TSV path");
    cv.attach(c);
    if (std::string(nm) == "pca")
      c->add_option("--var-target", pca_var, "retained variance share");
    est_cmds.push_back(c);
  }

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate synthetic fixtures / recovery runs");
  std::string dgp_path, synth_out = ".";
  int runs = 1;
  CvFlags synth_cv;
  synth_cmd->add_option("--spec", dgp_path, "DGP JSON")->required();
  synth_cmd->add_option("--runs", runs, "Monte-Carlo runs")->check(CLI::Range(1, 100000));
  synth_cmd->add_option("--out", synth_out, "output directory");
  synth_cv.attach(synth_cmd);

  // report
  auto* report_cmd = app.add_subcommand("report", "restyle a TSV report");
  std::string rep_in, rep_out, style = "markdown";
  report_cmd->add_option("--in", rep_in, "report TSV")->required();
  report_cmd->add_option("--out", rep_out, "output path")->required();
  report_cmd->add_option("--style", style)->check(CLI::IsMember({"tsv", "markdown"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ingest) {
      Manifest man("ingest", 0);
      man.input(in_path);
      PanelSchema schema;
      if (!schema_path.empty()) {
        man.input(schema_path);
        std::ifstream sf(schema_path);
        json sj = json::parse(sf, nullptr, true);
        schema.date = sj.value("date", schema.date);
        schema.asset = sj.value("asset", schema.asset);
        schema.open = sj.value("open", schema.open);
        schema.high = sj.value("high", schema.high);
        schema.low = sj.value("low", schema.low);
        schema.close = sj.value("close", schema.close);
        schema.vwap = sj.value("vwap", schema.vwap);
        schema.volume = sj.value("volume", schema.volume);
        schema.market_cap = sj.value("market_cap", schema.market_cap);
        schema.exchange = sj.value("exchange", schema.exchange);
        schema.share_class = sj.value("share_class", schema.share_class);
      }
      LoadStats ls;
      PricePanel p = load_panel(in_path, schema, &ls);
      man.lap("load");
      FilterStats fstats;
      if (!no_filters) {
        FilterPolicy policy;
        policy.min_price = min_price;
        p = apply_filters(p, policy, &fstats);
      }
      man.lap("filter");
      fs::create_directories(out_dir);
      write_panel(p, (fs::path(out_dir) / "panel.csv").string());
      std::ofstream(fs::path(out_dir) / "filter_audit.json")
          << fstats.to_json() << "\n";
      man.j["rows_read"] = ls.rows_read;
      man.j["duplicates_dropped"] = ls.duplicates_dropped;
      man.j["nonpositive_dropped"] = ls.nonpositive_dropped;
      man.write(out_dir);
    } else if (*signals) {
      Manifest man("signals", 0);
      man.input(bundle_path);
      man.input(panel_path);
      auto exprs = dsl::load_expression_bundle(bundle_path);
      PricePanel p = load_panel(panel_path, {});
      ReturnPanel r = compute_returns(p);
      man.lap("load");
      fs::create_directories(sig_out);
      for (const auto& e : exprs) {
        dsl::SignalPanel s = dsl::evaluate(e, p, r, window);
        write_signal(s, (fs::path(sig_out) / (e.name + ".tsv")).string());
      }
      man.lap("evaluate");
      man.j["expressions"] = exprs.size();
      man.write(sig_out);
    } else if (*portfolios) {
      Manifest man("portfolios", 0);
      man.input(pf_panel);
      auto x = spec_str.find('x');
      if (x == std::string::npos) {
        std::cerr << "bad --spec '" << spec_str << "', expected BxB\n";
        return 2;
      }
      SortSpec spec;
      spec.size_bins = std::stoi(spec_str.substr(0, x));
      spec.signal_bins = std::stoi(spec_str.substr(x + 1));
      spec.weighting =
          weighting == "value" ? Weighting::VALUE : Weighting::EQUAL;
      PricePanel p = load_panel(pf_panel, {});
      ReturnPanel r = compute_returns(p);
      man.lap("load");
      fs::create_directories(pf_out);
      for (const auto& e : fs::directory_iterator(sig_dir)) {
        if (!e.is_regular_file()) continue;
        man.input(e.path().string());
        dsl::SignalPanel s = read_signal(e.path().string());
        SortDiagnostics diag;
        TestAssetPanel cells = bivariate_independent_sort(s, p, r, spec, &diag);
        write_assets(cells,
                     (fs::path(pf_out) / (s.name + "_cells.tsv")).string());
        FactorSeries hml = hml_decile_factor(s, p, r, spec.weighting);
        FactorSeries monthly = aggregate_daily_to_monthly(hml);
        monthly.name = s.name;
        write_series(monthly,
                     (fs::path(pf_out) / (s.name + "_hml.tsv")).string());
      }
      man.lap("sort");
      man.write(pf_out);
    } else if (*synth_cmd) {
      std::ifstream sf(dgp_path);
      if (!sf) {
        std::cerr << "cannot read " << dgp_path << "\n";
        return 2;
      }
      std::ostringstream ss;
      ss << sf.rdbuf();
      synth::SyntheticDGP dgp = synth::SyntheticDGP::from_json(ss.str());
      Manifest man("synth", dgp.seed);
      man.input(dgp_path);
      fs::create_directories(synth_out);
      if (runs == 1) {
        synth::SyntheticData data = synth::generate(dgp);
        write_assets(data.assets,
                     (fs::path(synth_out) / "assets.tsv").string());
        fs::create_directories(fs::path(synth_out) / "controls");
        fs::create_directories(fs::path(synth_out) / "alphas");
        for (const auto& s : data.controls)
          write_series(s, (fs::path(synth_out) / "controls" /
                           (s.name + ".tsv")).string());
        for (const auto& s : data.alphas)
          write_series(s, (fs::path(synth_out) / "alphas" /
                           (s.name + ".tsv")).string());
        json truth;
        truth["support"] = data.truth.support;
        truth["control_lambda"] = std::vector<double>(
            data.truth.control_lambda.data(),
            data.truth.control_lambda.data() + dgp.p_controls);
        truth["alpha_lambda"] = std::vector<double>(
            data.truth.alpha_lambda.data(),
            data.truth.alpha_lambda.data() + dgp.d_alphas);
        std::ofstream(fs::path(synth_out) / "truth.json")
            << truth.dump(2) << "\n";
      } else {
        synth::RecoveryResult res =
            synth::support_recovery_rate(dgp, runs, synth_cv.cfg);
        json rj;
        rj["rate"] = res.rate;
        rj["runs"] = json::array();
        for (const auto& run : res.runs)
          rj["runs"].push_back({{"seed", run.seed},
                                {"recovered", run.recovered},
                                {"false_discoveries", run.false_discoveries}});
        std::ofstream(fs::path(synth_out) / "recovery.json")
            << rj.dump(2) << "\n";
      }
      man.lap("generate");
      man.write(synth_out);
    } else if (*report_cmd) {
      std::ifstream in(rep_in);
      if (!in) {
        std::cerr << "cannot read " << rep_in << "\n";
        return 2;
      }
      std::ostringstream ss;
      ss << in.rdbuf();
      PremiumTable t = parse_table_tsv(ss.str());
      std::ofstream(rep_out) << render_table(
          t, style == "tsv" ? TableStyle::TSV : TableStyle::MARKDOWN);
    } else {
      for (size_t i = 0; i < est_cmds.size(); ++i) {
        if (*est_cmds[i]) {
          const char* names[] = {"ds", "ss", "enet", "pca"};
          return run_estimator(names[i], assets_path, controls_dir,
                               alphas_dir, cv.cfg, report_out, pca_var);
        }
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
