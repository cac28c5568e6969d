#include "trawl/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "trawl/error.hpp"

namespace trawl {

using nlohmann::json;

ConfigError::ConfigError(const std::string& source, int line, const std::string& what)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
      line_(line) {}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

int line_at(const std::string& text, std::size_t pos) {
  pos = std::min(pos, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {
    try {
      doc_ = json::parse(text);
    } catch (const json::parse_error& e) {
      // e.byte is one past the offending character.
      throw ConfigError(source_, line_at(text, e.byte > 0 ? e.byte - 1 : 0), "invalid JSON: " + clean(e.what()));
    }
    if (!doc_.is_object()) throw ConfigError(source_, 1, "top level must be an object");
  }

  const json& doc() const { return doc_; }

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& what) const {
    std::string name;
    for (const auto& k : path) name += (name.empty() ? "" : ".") + k;
    throw ConfigError(source_, locate(path), (name.empty() ? "" : name + ": ") + what);
  }

  // Rejects keys outside `allowed`.
  void check_keys(const json& obj, const std::vector<std::string>& path, const std::set<std::string>& allowed) const {
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!allowed.count(it.key())) {
        auto p = path;
        p.push_back(it.key());
        fail(p, "unknown key");
      }
  }

  const json& object(const json& parent, const std::vector<std::string>& path) const {
    if (!parent.contains(path.back())) fail(path, "missing key");
    const json& v = parent.at(path.back());
    if (!v.is_object()) fail(path, "expected an object");
    return v;
  }

  double number(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  std::uint64_t unsigned_int(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_number_unsigned()) fail(path, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  std::string string(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  bool boolean(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(number(e, path));
    return out;
  }

 private:
  static std::string clean(const std::string& w) {
    const auto p = w.find("] ");
    return p == std::string::npos ? w : w.substr(p + 2);
  }

  // Line of the last key of `path`, found by scanning for the keys in order.
  int locate(const std::vector<std::string>& path) const {
    std::size_t pos = 0;
    bool found = false;
    for (const auto& k : path) {
      const auto p = text_.find("\"" + k + "\"", pos);
      if (p == std::string::npos) break;
      pos = p + 1;
      found = true;
    }
    return found ? line_at(text_, pos) : 0;
  }

  const std::string& text_;
  std::string source_;
  json doc_;
};

std::vector<double> default_seed_params(Family f) {
  switch (f) {
    case Family::NegBinomial: return {1.0, 0.5};
    case Family::Gaussian: return {0.0, 1.0};
    case Family::NIG: return {1.0, 0.0, 1.0, 0.0};
    default: return std::vector<double>(param_count(f), 1.0);
  }
}

ModelSpec read_model(const Reader& r, const json& root, std::vector<std::string> base) {
  auto at = [&](std::vector<std::string> tail) {
    auto p = base;
    p.insert(p.end(), tail.begin(), tail.end());
    return p;
  };
  const json& ls = r.object(root, at({"levy_seed"}));
  r.check_keys(ls, at({"levy_seed"}), {"family", "params"});
  if (!ls.contains("family")) r.fail(at({"levy_seed"}), "missing key 'family'");
  Family fam;
  try {
    fam = family_from_name(r.string(ls["family"], at({"levy_seed", "family"})));
  } catch (const DomainError& e) {
    r.fail(at({"levy_seed", "family"}), e.what());
  }
  std::vector<double> sp = ls.contains("params") ? r.numbers(ls["params"], at({"levy_seed", "params"}))
                                                 : default_seed_params(fam);
  if (static_cast<int>(sp.size()) != param_count(fam))
    r.fail(at({"levy_seed", "params"}),
           "family " + family_name(fam) + " takes " + std::to_string(param_count(fam)) + " parameters");
  std::optional<SeedDistribution> seed;
  try {
    seed.emplace(fam, std::span<const double>(sp));
  } catch (const DomainError& e) {
    r.fail(at({"levy_seed", "params"}), e.what());
  }

  const json& tr = r.object(root, at({"trawl"}));
  r.check_keys(tr, at({"trawl"}), {"kind", "params", "weights"});
  if (!tr.contains("kind")) r.fail(at({"trawl"}), "missing key 'kind'");
  TrawlKind kind;
  try {
    kind = trawl_from_name(r.string(tr["kind"], at({"trawl", "kind"})));
  } catch (const DomainError& e) {
    r.fail(at({"trawl", "kind"}), e.what());
  }
  std::vector<double> w = tr.contains("weights") ? r.numbers(tr["weights"], at({"trawl", "weights"}))
                                                 : std::vector<double>{};
  if (kind != TrawlKind::SupExponential && !w.empty()) r.fail(at({"trawl", "weights"}), "only supexponential takes weights");
  if (kind == TrawlKind::SupExponential && w.empty()) r.fail(at({"trawl"}), "supexponential needs 'weights'");
  const std::size_t np = kind == TrawlKind::SupExponential ? w.size() : (kind == TrawlKind::Exponential ? 1 : 2);
  std::vector<double> tp = tr.contains("params") ? r.numbers(tr["params"], at({"trawl", "params"}))
                                                 : std::vector<double>(np, 1.0);
  if (tp.size() != np) r.fail(at({"trawl", "params"}), "trawl " + trawl_name(kind) + " takes " + std::to_string(np) + " parameters");
  try {
    switch (kind) {
      case TrawlKind::Exponential: return {*seed, TrawlFunction::exponential(tp[0])};
      case TrawlKind::SupExponential: return {*seed, TrawlFunction::sup_exponential(w, tp)};
      case TrawlKind::InvGaussian: return {*seed, TrawlFunction::inv_gaussian(tp[0], tp[1])};
      case TrawlKind::Gamma: return {*seed, TrawlFunction::gamma(tp[0], tp[1])};
    }
  } catch (const DomainError& e) {
    r.fail(at({"trawl", "params"}), e.what());
  }
  r.fail(at({"trawl", "kind"}), "unsupported trawl");
}

void read_fit(const Reader& r, const json& f, FitConfig& c) {
  const std::vector<std::string> b = {"fit"};
  auto p = [&](const char* k) { return std::vector<std::string>{"fit", k}; };
  r.check_keys(f, b, {"lags", "n_samples", "cv_degree", "method", "optimizer", "max_iter", "grad_tol", "log_space",
                      "adaptive", "target_rel_var", "max_samples"});
  if (f.contains("lags")) {
    c.lags.clear();
    if (!f["lags"].is_array()) r.fail(p("lags"), "expected an array of positive integers");
    for (const auto& v : f["lags"]) {
      if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) r.fail(p("lags"), "expected positive integers");
      c.lags.push_back(static_cast<int>(v.get<std::uint64_t>()));
    }
  }
  if (f.contains("n_samples")) c.n_samples = r.unsigned_int(f["n_samples"], p("n_samples"));
  if (f.contains("cv_degree")) c.cv_degree = static_cast<int>(r.unsigned_int(f["cv_degree"], p("cv_degree")));
  if (f.contains("method")) {
    try {
      c.method = pair_method_from_name(r.string(f["method"], p("method")));
    } catch (const DomainError& e) {
      r.fail(p("method"), e.what());
    }
  }
  if (f.contains("optimizer")) {
    try {
      c.optimizer = optimizer_from_name(r.string(f["optimizer"], p("optimizer")));
    } catch (const DomainError& e) {
      r.fail(p("optimizer"), e.what());
    }
  }
  if (f.contains("max_iter")) c.max_iter = static_cast<int>(r.unsigned_int(f["max_iter"], p("max_iter")));
  if (f.contains("grad_tol")) c.grad_tol = r.number(f["grad_tol"], p("grad_tol"));
  if (f.contains("log_space")) c.log_space = r.boolean(f["log_space"], p("log_space"));
  if (f.contains("adaptive")) c.adaptive = r.boolean(f["adaptive"], p("adaptive"));
  if (f.contains("target_rel_var")) c.target_rel_var = r.number(f["target_rel_var"], p("target_rel_var"));
  if (f.contains("max_samples")) c.max_samples = r.unsigned_int(f["max_samples"], p("max_samples"));
  try {
    c.validate();
  } catch (const DomainError& e) {
    r.fail(b, e.what());
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  const Reader r(text, source);
  const json& d = r.doc();
  r.check_keys(d, {}, {"levy_seed", "trawl", "n", "tau", "seed", "fit", "forecast"});
  RunConfig c;
  if (d.contains("levy_seed") != d.contains("trawl"))
    r.fail({d.contains("levy_seed") ? "levy_seed" : "trawl"}, "'levy_seed' and 'trawl' must be given together");
  if (d.contains("levy_seed")) c.model = read_model(r, d, {});
  if (d.contains("n")) {
    c.n = r.unsigned_int(d["n"], {"n"});
    if (c.n < 2) r.fail({"n"}, "need at least 2 observations");
  }
  if (d.contains("tau")) {
    c.tau = r.number(d["tau"], {"tau"});
    if (!(c.tau > 0.0)) r.fail({"tau"}, "must be positive");
  }
  if (d.contains("seed")) c.seed = r.unsigned_int(d["seed"], {"seed"});
  c.fit.seed = c.seed;
  if (d.contains("fit")) read_fit(r, r.object(d, {"fit"}), c.fit);
  if (d.contains("forecast")) {
    const json& f = r.object(d, {"forecast"});
    r.check_keys(f, {"forecast"}, {"samples"});
    if (f.contains("samples")) {
      c.forecast_samples = r.unsigned_int(f["samples"], {"forecast", "samples"});
      if (c.forecast_samples < 1) r.fail({"forecast", "samples"}, "must be positive");
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) { return parse_config(read_text_file(path), path); }

ModelSpec parse_model(const std::string& text, const std::string& source) {
  const Reader r(text, source);
  const json& d = r.doc();
  if (d.contains("model")) return read_model(r, r.object(d, {"model"}), {"model"});
  if (!d.contains("levy_seed") || !d.contains("trawl")) r.fail({}, "expected 'levy_seed' and 'trawl', or 'model'");
  return read_model(r, d, {});
}

ModelSpec load_model(const std::string& path) { return parse_model(read_text_file(path), path); }

nlohmann::ordered_json model_to_json(const ModelSpec& m) {
  nlohmann::ordered_json j;
  j["levy_seed"] = {{"family", family_name(m.seed.family())}, {"params", m.seed.param_vector()}};
  nlohmann::ordered_json t = {{"kind", trawl_name(m.trawl.kind())}, {"params", m.trawl.params()}};
  if (m.trawl.kind() == TrawlKind::SupExponential) t["weights"] = m.trawl.weights();
  j["trawl"] = t;
  return j;
}

}  // namespace trawl
