#include "trawl/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "trawl/bench.hpp"
#include "trawl/config.hpp"
#include "trawl/csv.hpp"
#include "trawl/error.hpp"
#include "trawl/forecast.hpp"
#include "trawl/infer.hpp"
#include "trawl/pairwise.hpp"
#include "trawl/simulate.hpp"

namespace trawl {

using ojson = nlohmann::ordered_json;

void check_path_support(const SeedDistribution& seed, std::span<const double> x) {
  const std::string fam = family_name(seed.family());
  bool all_int = true;
  for (double v : x) all_int = all_int && v == std::floor(v);
  if (seed.discrete()) {
    if (!all_int) throw UnsupportedError("path has non-integer values but the levy seed " + fam + " is discrete");
  } else if (all_int) {
    throw UnsupportedError("path holds only integers (count data) but the levy seed " + fam +
                           " is continuous; choose poisson, negbinomial or skellam");
  }
  for (double v : x)
    if (!in_support(seed, v))
      throw UnsupportedError("observation " + format_number(v) + " lies outside the support of the levy seed " + fam);
}

namespace {

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;
  std::string out;
};

void add_common(CLI::App* c, Common& o, bool config_required) {
  auto* cfg = c->add_option("--config", o.config, "JSON configuration file");
  if (config_required) cfg->required();
  c->add_option("--seed", o.seed, "root random seed (overrides the config)");
  c->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  c->add_option("--out", o.out, "output path");
}

void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

RunConfig config_for(const Common& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.seed_given) c.seed = o.seed;
  c.fit.seed = c.seed;
  c.fit.threads = o.threads;
  return c;
}

const ModelSpec& need_model(const RunConfig& c, const std::string& source) {
  if (!c.model) throw ConfigError(source, 0, "'levy_seed' and 'trawl' are required");
  return *c.model;
}

int cmd_simulate(const Common& o, std::ostream& out, std::ostream& err) {
  const RunConfig c = config_for(o);
  const ModelSpec& m = need_model(c, o.config);
  SimOptions so;
  so.threads = o.threads;
  const auto x = simulate(m, c.n, c.tau, stream_seed(c.seed, "cli", "simulate"), so);
  std::ostringstream csv;
  write_path(csv, x, c.tau);
  emit(o.out, csv.str(), out);
  const auto marg = m.marginal();
  std::ostream& s = o.out.empty() ? err : out;
  s << "mean " << format_number(mean(marg)) << '\n'
    << "var " << format_number(variance(marg)) << '\n'
    << "acf(tau) " << format_number(acf(m.trawl, c.tau)) << '\n';
  return kExitOk;
}

ojson fit_settings(const FitConfig& f) {
  return ojson{{"lags", f.lags},
               {"n_samples", f.n_samples},
               {"cv_degree", f.cv_degree},
               {"method", pair_method_name(f.method)},
               {"optimizer", optimizer_name(f.optimizer)},
               {"max_iter", f.max_iter},
               {"grad_tol", f.grad_tol},
               {"log_space", f.log_space},
               {"adaptive", f.adaptive},
               {"seed", f.seed}};
}

int cmd_fit(const Common& o, const std::string& data, const std::string& method, const std::string& init_file,
            bool timing, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig c = config_for(o);
  const ModelSpec& structure = need_model(c, o.config);
  const PathData d = load_path(data);
  check_path_support(structure.seed, d.x);
  ojson r;
  r["method"] = method;
  r["data"] = {{"file", std::filesystem::path(data).filename().string()}, {"n", d.x.size()}, {"tau", d.tau}};
  if (method == "gmm") {
    const ModelSpec g = gmm_fit(d.x, d.tau, structure);
    r["model"] = model_to_json(g);
    r["param_names"] = g.param_names();
    r["theta"] = g.theta();
    const auto pm = path_moments(d.x, 1);
    r["diagnostics"] = {{"sample_mean", pm.mean}, {"sample_var", pm.var}, {"acf_lag1", pm.acf.at(0)}};
  } else {
    FitConfig fc = c.fit;
    fc.seed = stream_seed(c.seed, "cli", "fit");
    const std::optional<ModelSpec> init =
        init_file.empty() ? std::optional<ModelSpec>(gmm_fit(d.x, d.tau, structure)) : load_model(init_file);
    if (init->seed.family() != structure.seed.family() || init->trawl.kind() != structure.trawl.kind())
      throw ConfigError(init_file, 0, "initial model does not match the configured levy seed and trawl");
    const FitResult f = pl_fit(d.x, d.tau, structure, fc, init);
    r["model"] = model_to_json(f.model);
    r["param_names"] = f.model.param_names();
    r["theta"] = f.model.theta();
    r["init"] = model_to_json(f.init);
    r["init"]["source"] = init_file.empty() ? "gmm" : std::filesystem::path(init_file).filename().string();
    r["objective_trace"] = f.objective_trace;
    r["grad_norm_trace"] = f.grad_norm_trace;
    r["diagnostics"] = {{"iterations", f.iterations},    {"converged", f.converged},
                        {"fallback_used", f.fallback_used}, {"message", f.message},
                        {"lag_samples", f.lag_samples},  {"cv_fallbacks", f.cv_fallbacks}};
    r["settings"] = fit_settings(fc);
  }
  if (timing) r["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(o.out, r.dump(2) + "\n", out);
  return kExitOk;
}

int cmd_forecast(const Common& o, const std::string& data, const std::string& model_file,
                 const std::vector<int>& horizons, bool quantiles, std::size_t samples, std::ostream& out) {
  const RunConfig c = config_for(o);
  const ModelSpec m = load_model(model_file);
  const PathData d = load_path(data);
  check_path_support(m.seed, d.x);
  const double last = d.x.back();
  std::vector<std::string> header = {"horizon", "t", "forecast"};
  if (quantiles) header.insert(header.end(), {"q05", "q50", "q95"});
  std::ostringstream csv;
  CsvWriter w(csv, header);
  for (int h : horizons) {
    if (h < 0) throw ConfigError("--horizons", 0, "horizons must be nonnegative");
    w.cell(h).cell(d.t.back() + h * d.tau).cell(conditional_mean(m, last, h * d.tau));
    if (quantiles) {
      if (h == 0) {
        w.cell(last).cell(last).cell(last);
      } else {
        Rng rng(stream_seed(c.seed, "cli", "forecast", std::uint64_t(h)));
        const auto s = conditional_sample(m, last, h * d.tau, samples, rng);
        for (double p : {0.05, 0.5, 0.95}) w.cell(sample_quantile(s, p));
      }
    }
    w.end_row();
  }
  emit(o.out, csv.str(), out);
  return kExitOk;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

int cmd_bench(const Common& o, const std::string& suite, const std::string& scale, std::size_t replicates,
              bool timing, std::ostream& out) {
  const RunConfig c = config_for(o);
  const bool full = scale == "full";
  if (o.out.empty()) throw ConfigError("--out", 0, "bench needs an output directory");
  const std::filesystem::path dir(o.out);
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& text) {
    write_file(dir / name, text);
    written.push_back(name);
  };
  if (suite == "grad") {
    GradBenchConfig g;
    g.replicates = replicates ? replicates : (full ? 1000 : 20);
    g.seed = c.seed;
    g.threads = o.threads;
    const auto r = grad_bench(g);
    std::ostringstream t, ref;
    CsvWriter w(t, {"estimator", "m", "parameter", "bias", "sd", "mae", "medae", "rmse"});
    for (const auto& row : r.rows)
      w.cell(row.estimator).cell(row.degree).cell(row.parameter).cell(row.bias).cell(row.sd).cell(row.mae)
          .cell(row.medae).cell(row.rmse).end_row();
    CsvWriter wr(ref, {"parameter", "simulated", "evaluated_at", "true_gradient"});
    const auto names = r.at.param_names();
    const auto th0 = g.truth.theta(), th = r.at.theta();
    for (std::size_t i = 0; i < names.size(); ++i)
      wr.cell(names[i]).cell(th0[i]).cell(th[i]).cell(r.true_grad[i]).end_row();
    put("grad_bias_sd.csv", t.str());
    put("grad_reference.csv", ref.str());
  } else if (suite == "cv") {
    CvBenchConfig cc;
    cc.paths = replicates ? replicates : (full ? 1000 : 10);
    cc.seed = c.seed;
    cc.threads = o.threads;
    const auto r = cv_bench(cc);
    std::ostringstream a, b, p;
    CsvWriter wa(a, {"path", "m", "quantile", "ratio"});
    CsvWriter wb(b, {"path", "parameter", "quantile", "ratio"});
    for (const auto& row : r.rows) {
      if (row.statistic == "r^m")
        wa.cell(row.path).cell(row.degree).cell(row.quantile).cell(row.ratio).end_row();
      else
        wb.cell(row.path).cell(row.statistic.substr(6)).cell(row.quantile).cell(row.ratio).end_row();
    }
    CsvWriter wp(p, {"path", "alpha", "beta", "lambda", "gmm_alpha", "gmm_beta", "gmm_lambda"});
    for (std::size_t i = 0; i < r.truths.size(); ++i) {
      wp.cell(i);
      for (double v : r.truths[i].theta()) wp.cell(v);
      for (double v : r.at[i].theta()) wp.cell(v);
      wp.end_row();
    }
    put("cv_ratio.csv", a.str());
    put("pg_sf_ratio.csv", b.str());
    put("cv_paths.csv", p.str());
  } else if (suite == "inference") {
    InferenceBenchConfig ic;
    ic.replicates = replicates ? replicates : (full ? 100 : 20);
    ic.n = full ? 1000 : 500;
    ic.seed = c.seed;
    ic.fit = c.fit;
    ic.fit.threads = o.threads;
    const auto r = inference_bench(ic);
    std::ostringstream a, b;
    std::vector<std::string> h = {"replicate", "method"};
    h.insert(h.end(), r.names.begin(), r.names.end());
    h.push_back("converged");
    if (timing) h.push_back("wall_time");
    CsvWriter wa(a, h);
    for (std::size_t i = 0; i < r.gmm.size(); ++i) {
      for (int k = 0; k < 2; ++k) {
        wa.cell(i).cell(k ? "pl" : "gmm");
        for (double v : (k ? r.pl[i] : r.gmm[i]).theta()) wa.cell(v);
        wa.cell(k ? (r.pl_converged[i] ? "true" : "false") : "true");
        if (timing) wa.cell(k ? r.pl_seconds[i] : 0.0);
        wa.end_row();
      }
    }
    CsvWriter wb(b, {"metric", "parameter", "gmm", "pl", "ratio"});
    for (std::size_t i = 0; i < r.names.size(); ++i) {
      wb.cell("rmse").cell(r.names[i]).cell(r.gmm_metrics.rmse[i]).cell(r.pl_metrics.rmse[i]).cell(r.rmse_ratio[i]).end_row();
      wb.cell("mae").cell(r.names[i]).cell(r.gmm_metrics.mae[i]).cell(r.pl_metrics.mae[i])
          .cell(r.pl_metrics.mae[i] / r.gmm_metrics.mae[i]).end_row();
      wb.cell("medae").cell(r.names[i]).cell(r.gmm_metrics.medae[i]).cell(r.pl_metrics.medae[i])
          .cell(r.pl_metrics.medae[i] / r.gmm_metrics.medae[i]).end_row();
    }
    auto whole = [&](const char* name, double g, double p) { wb.cell(name).cell("all").cell(g).cell(p).cell(p / g).end_row(); };
    whole("kl_mean", r.gmm_metrics.kl_mean, r.pl_metrics.kl_mean);
    whole("kl_median", r.gmm_metrics.kl_median, r.pl_metrics.kl_median);
    whole("acf_l1_mean", r.gmm_metrics.acf_l1_mean, r.pl_metrics.acf_l1_mean);
    whole("acf_l2_mean", r.gmm_metrics.acf_l2_mean, r.pl_metrics.acf_l2_mean);
    whole("acf_l1_median", r.gmm_metrics.acf_l1_median, r.pl_metrics.acf_l1_median);
    whole("acf_l2_median", r.gmm_metrics.acf_l2_median, r.pl_metrics.acf_l2_median);
    put("inference_replicates.csv", a.str());
    put("inference_summary.csv", b.str());
  } else if (suite == "forecast") {
    ForecastBenchConfig fc;
    fc.forecast.replicates = replicates ? replicates : (full ? 20 : 5);
    fc.seed = c.seed;
    fc.fit = c.fit;
    fc.fit.threads = o.threads;
    const auto r = forecast_bench(fc);
    std::ostringstream a;
    CsvWriter wa(a, {"horizon", "metric", "estimator", "value"});
    for (const auto& row : r.rows) wa.cell(row.horizon).cell(row.metric).cell(row.estimator).cell(row.value).end_row();
    put("forecast_errors.csv", a.str());
  } else {
    throw ConfigError("--suite", 0, "unknown suite '" + suite + "'");
  }
  for (const auto& f : written) out << (dir / f).string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trawl process simulation, pairwise-likelihood inference and forecasting"};
  app.require_subcommand(1);
  Common o;

  auto* sim = app.add_subcommand("simulate", "simulate a path and write a t,x table");
  add_common(sim, o, true);

  std::string data, method = "pl", init_file, model_file, suite, scale = "desk";
  std::vector<int> horizons = {1, 5, 10};
  bool timing = false, quantiles = false;
  std::size_t samples = 0, replicates = 0;

  auto* fit = app.add_subcommand("fit", "fit a model to a t,x table and write a JSON report");
  add_common(fit, o, true);
  fit->add_option("data", data, "t,x table")->required();
  fit->add_option("--method", method, "gmm or pl")->check(CLI::IsMember({"gmm", "pl"}));
  fit->add_option("--init", init_file, "model JSON used as the PL starting point (default: GMM)");
  fit->add_flag("--timing", timing, "record wall time in the report");

  auto* fc = app.add_subcommand("forecast", "conditional mean forecasts from the last observation");
  add_common(fc, o, false);
  fc->add_option("data", data, "t,x table")->required();
  fc->add_option("--model", model_file, "model JSON (a fit report or a config)")->required();
  fc->add_option("--horizons", horizons, "horizons in steps of tau")->delimiter(',');
  fc->add_flag("--quantiles", quantiles, "add 0.05, 0.5, 0.95 quantiles of the conditional law");
  fc->add_option("--samples", samples, "conditional samples per horizon");

  auto* bench = app.add_subcommand("bench", "benchmark tables");
  add_common(bench, o, false);
  bench->add_option("--suite", suite, "grad, cv, inference or forecast")
      ->required()
      ->check(CLI::IsMember({"grad", "cv", "inference", "forecast"}));
  bench->add_option("--scale", scale, "desk or full")->check(CLI::IsMember({"desk", "full"}));
  bench->add_option("--replicates", replicates, "override the number of replicates (paths for cv)");
  bench->add_flag("--timing", timing, "add wall-time columns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  for (auto* sc : {sim, fit, fc, bench})
    if (sc->parsed()) o.seed_given = sc->count("--seed") > 0;

  try {
    if (sim->parsed()) return cmd_simulate(o, out, err);
    if (fit->parsed()) return cmd_fit(o, data, method, init_file, timing, out);
    if (fc->parsed()) {
      const std::size_t n = samples ? samples : (o.config.empty() ? 2000 : load_config(o.config).forecast_samples);
      return cmd_forecast(o, data, model_file, horizons, quantiles, n, out);
    }
    if (bench->parsed()) return cmd_bench(o, suite, scale, replicates, timing, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const CsvError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const UnsupportedError& e) {
    err << "error: unsupported: " << e.what() << '\n';
    return kExitUnsupported;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace trawl
