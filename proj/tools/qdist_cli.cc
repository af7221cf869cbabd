// Copyright 2026 The qdist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// qdist: batch runner for approximation sweeps, estimator trials, inequality
// campaigns, polarization, instance generation and cost benchmarks.
//
// Every run is driven by one JSON config object; flags override its keys.
// Exit status: 0 success, 1 I/O failure, 2 usage error or failed check.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qdist/io.hpp"
#include "qdist/qdist.hpp"

using namespace qdist;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;

struct Shared {
  std::string config_path;
  std::string out;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::size_t> max_dense_dim;
  bool quiet = false;
  bool no_timestamp = false;
};

/// Config object for one run, with the set of keys the subcommand accepts.
class Config {
 public:
  Config(Json j, std::set<std::string> allowed) : j_(std::move(j)), allowed_(std::move(allowed)) {
    for (const char *k : {"seed", "threads", "max_dense_dim"}) allowed_.insert(k);
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!allowed_.count(it.key())) throw Error(ErrorCode::kParse, "unknown config key '" + it.key() + "'");
    }
  }

  bool has(const std::string &k) const { return j_.contains(k) && !j_.at(k).is_null(); }

  template <class T>
  T get(const std::string &k, T fallback) const {
    if (!has(k)) return fallback;
    try {
      return j_.at(k).get<T>();
    } catch (const Json::exception &) {
      throw Error(ErrorCode::kParse, "config key '" + k + "' has the wrong type");
    }
  }

  std::vector<double> doubles(const std::string &k, std::vector<double> fallback) const {
    if (!has(k)) return fallback;
    const Json &v = j_.at(k);
    if (v.is_number()) return {v.get<double>()};
    return get<std::vector<double>>(k, {});
  }

  SchattenOrder order(const Json &v, const std::string &k) const {
    if (v.is_string() && (v == "inf" || v == "infinity")) return SchattenOrder::infinity();
    if (!v.is_number()) throw Error(ErrorCode::kParse, "config key '" + k + "' must be a number or \"inf\"");
    return SchattenOrder::finite(v.get<double>());
  }

  std::vector<SchattenOrder> orders(const std::string &k, std::vector<SchattenOrder> fallback) const {
    if (!has(k)) return fallback;
    const Json &v = j_.at(k);
    if (!v.is_array()) return {order(v, k)};
    std::vector<SchattenOrder> out;
    for (const auto &e : v) out.push_back(order(e, k));
    return out;
  }

  std::uint64_t seed() const { return get<std::uint64_t>("seed", 0); }
  unsigned threads() const { return get<unsigned>("threads", 0); }
  std::size_t max_dense_dim() const { return get<std::size_t>("max_dense_dim", kMaxDenseDim); }

 private:
  Json j_;
  std::set<std::string> allowed_;
};

Config load_config(const Shared &sh, std::set<std::string> allowed) {
  Json j = Json::object();
  if (!sh.config_path.empty()) {
    j = read_json_file(sh.config_path);
    if (!j.is_object()) throw Error(ErrorCode::kParse, sh.config_path + ": config must be a JSON object");
  }
  for (const auto &kv : sh.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::kParse, "--set expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    // Values are JSON when they parse as JSON, plain strings otherwise.
    const Json parsed = Json::parse(value, nullptr, false);
    j[key] = parsed.is_discarded() ? Json(value) : parsed;
  }
  if (sh.seed) j["seed"] = *sh.seed;
  if (sh.threads) j["threads"] = *sh.threads;
  if (sh.max_dense_dim) j["max_dense_dim"] = *sh.max_dense_dim;
  return Config(std::move(j), std::move(allowed));
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void emit(const Shared &sh, const std::string &text) {
  if (sh.out.empty() || sh.out == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text_file(sh.out, text);
  }
}

void note(const Shared &sh, const std::string &msg) {
  if (!sh.quiet) std::cerr << msg << "\n";
}

std::string csv_comment(const Shared &sh, const std::string &cmd) {
  return sh.no_timestamp ? "" : "qdist " + cmd + " generated " + utc_now();
}

double runtime_cell(const Shared &sh, double ms) { return sh.no_timestamp ? 0.0 : ms; }

DensityMatrix load_density(const std::string &path) { return density_from_json(read_json_file(path)); }

void check_dense_dim(const Config &cfg, std::size_t dim) { check_dense_cap(dim, cfg.max_dense_dim()); }

// approx: sweep (q, dtilde) or (q, eps) cells of the Chebyshev approximation.
int cmd_approx(const Shared &sh) {
  const Config cfg = load_config(sh, {"q", "dtilde", "eps", "grid"});
  const auto qs = cfg.doubles("q", {0.5, 1.0, 1.5, 2.0});
  const int grid = cfg.get<int>("grid", 10000);
  std::vector<std::pair<double, int>> cells;
  std::vector<double> eps_of_cell;
  if (cfg.has("eps")) {
    for (double q : qs) {
      for (double eps : cfg.doubles("eps", {})) {
        const long long d = degree_for_error(q, eps, beta_prime(q));
        const long long dt = dtilde_for_degree(d);
        if (dt > (1LL << 24)) throw Error(ErrorCode::kParamOutOfRange, "dtilde above 2^24");
        cells.emplace_back(q, static_cast<int>(dt));
        eps_of_cell.push_back(eps);
      }
    }
  } else {
    const auto dts = cfg.get<std::vector<int>>("dtilde", {16, 32, 64, 128});
    if (dts.empty()) throw Error(ErrorCode::kParse, "dtilde list is empty");
    for (double q : qs) {
      for (int dt : dts) cells.emplace_back(q, dt);
    }
  }
  if (cells.empty()) throw Error(ErrorCode::kParse, "nothing to sweep");
  std::vector<ApproxRow> rows(cells.size());
  parallel_for(cells.size(), cfg.threads(), [&](std::size_t i) { rows[i] = approx_row(cells[i].first, cells[i].second, grid); });

  CsvTable t({"q", "dtilde", "degree", "max_error", "bound_4eps", "runtime_ms"});
  int bad = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto &r = rows[i];
    bool ok = r.bounded() && r.within_bound();
    if (!eps_of_cell.empty()) ok = ok && r.max_error <= eps_of_cell[i];
    if (!ok) {
      ++bad;
      note(sh, "check failed at q = " + fmt_double(r.q) + ", dtilde = " + std::to_string(r.dtilde) + " (max |P| " + fmt_double(r.max_abs) +
                   ", error " + fmt_double(r.max_error) + ")");
    }
    t.add({fmt_double(r.q), std::to_string(r.dtilde), std::to_string(r.degree), fmt_double(r.max_error), fmt_double(r.bound_4eps),
           fmt_double(runtime_cell(sh, r.runtime_ms))});
  }
  emit(sh, t.str(csv_comment(sh, "approx")));
  note(sh, std::to_string(rows.size()) + " cells, " + std::to_string(bad) + " failed checks");
  return bad == 0 ? kExitOk : kExitUsage;
}

// estimate: estimator trials on a fixed instance or on seeded random pairs.
int cmd_estimate(const Shared &sh) {
  const Config cfg = load_config(sh, {"alpha", "eps", "backend", "model", "quantity", "trials", "n_qubits", "max_rank", "rho0",
                                      "rho1", "format", "alpha_min", "alpha_max", "max_dtilde"});
  EstimateCampaign c;
  c.alpha = cfg.get<double>("alpha", 2.0);
  c.eps = cfg.get<double>("eps", 0.1);
  c.backend = parse_backend(cfg.get<std::string>("backend", "hadamard_sampling"));
  const auto model = cfg.get<std::string>("model", "query");
  if (model != "query" && model != "sample") throw Error(ErrorCode::kParse, "model must be query or sample");
  c.model = model == "query" ? CostModel::kQuery : CostModel::kSample;
  const auto quantity = cfg.get<std::string>("quantity", "distance");
  if (quantity != "distance" && quantity != "powered") throw Error(ErrorCode::kParse, "quantity must be distance or powered");
  c.quantity = quantity == "distance" ? Quantity::kDistance : Quantity::kPowered;
  c.trials = cfg.get<int>("trials", 1);
  c.n_qubits = cfg.get<std::size_t>("n_qubits", 2);
  c.max_rank = cfg.get<std::size_t>("max_rank", 4);
  c.seed = cfg.seed();
  c.threads = cfg.threads();
  c.options.alpha_min = cfg.get<double>("alpha_min", c.options.alpha_min);
  c.options.alpha_max = cfg.get<double>("alpha_max", c.options.alpha_max);
  c.options.max_dtilde = cfg.get<long long>("max_dtilde", c.options.max_dtilde);
  if (cfg.has("alpha_min") || cfg.has("alpha_max")) {
    note(sh, "warning: alpha range widened to (" + fmt_double(c.options.alpha_min) + ", " + fmt_double(c.options.alpha_max) +
                 "]; near alpha = 1 the series degree explodes");
  }
  if (c.n_qubits < 1) throw Error(ErrorCode::kParamOutOfRange, "n_qubits must be >= 1");
  check_dense_dim(cfg, std::size_t{1} << std::min<std::size_t>(c.n_qubits, 62));
  if (cfg.has("rho0") != cfg.has("rho1")) throw Error(ErrorCode::kParse, "rho0 and rho1 must be given together");
  if (cfg.has("rho0")) {
    auto r0 = load_density(cfg.get<std::string>("rho0", "")), r1 = load_density(cfg.get<std::string>("rho1", ""));
    check_dense_dim(cfg, r0.dim());
    c.instance.emplace(std::move(r0), std::move(r1));
  }
  const auto format = cfg.get<std::string>("format", "csv");
  if (format != "csv" && format != "json") throw Error(ErrorCode::kParse, "format must be csv or json");

  const auto reports = run_estimate_campaign(c);
  const double tol = reports.front().error_bound;
  const double rate = success_rate(reports, c.eps);
  if (format == "json") {
    Json arr = Json::array();
    for (const auto &r : reports) arr.push_back(to_json(r));
    Json doc{{"reports", std::move(arr)}, {"success_rate", rate}};
    if (!sh.no_timestamp) doc["generated"] = utc_now();
    emit(sh, dump_json(doc) + "\n");
  } else {
    CsvTable t(estimation_csv_header());
    for (const auto &r : reports) t.add(estimation_csv_row(r));
    emit(sh, t.str(csv_comment(sh, "estimate")));
  }
  note(sh, "success_rate " + fmt_double(rate) + " (abs_err <= eps over " + std::to_string(reports.size()) + " trials; error bound " +
               fmt_double(tol) + ")");
  return kExitOk;
}

// verify: inequality campaign over seeded random pairs and triples.
int cmd_verify(const Shared &sh) {
  const Config cfg = load_config(sh, {"pairs", "alphas", "max_qubits", "max_rank", "slack"});
  VerifyCampaign c;
  c.pairs = cfg.get<int>("pairs", c.pairs);
  c.alphas = cfg.orders("alphas", c.alphas);
  c.max_qubits = cfg.get<std::size_t>("max_qubits", c.max_qubits);
  c.max_rank = cfg.get<std::size_t>("max_rank", c.max_rank);
  c.slack = cfg.get<double>("slack", c.slack);
  c.seed = cfg.seed();
  c.threads = cfg.threads();
  check_dense_dim(cfg, std::size_t{1} << std::min<std::size_t>(c.max_qubits, 62));
  const auto r = run_verify_campaign(c);
  CsvTable t({"trial", "check", "alpha", "margin", "ok"});
  for (const auto &v : r.rows) t.add({std::to_string(v.trial), v.check, v.alpha, fmt_double(v.margin), v.margin >= -c.slack ? "1" : "0"});
  emit(sh, t.str(csv_comment(sh, "verify")));
  note(sh, std::to_string(r.violations) + " violations in " + std::to_string(r.rows.size()) + " checks");
  return r.violations == 0 ? kExitOk : kExitUsage;
}

// polarize: partial polarization with a certificate per input pair.
int cmd_polarize(const Shared &sh) {
  const Config cfg = load_config(sh, {"a", "b", "k", "alpha", "l", "m", "pairs", "cp", "rho0", "rho1"});
  const double a = cfg.get<double>("a", 0.8), b = cfg.get<double>("b", 0.25);
  const int k = cfg.get<int>("k", 2);
  PolarizationPlan plan = polarization_plan(a, b, k);
  if (cfg.has("l") || cfg.has("m")) plan = custom_plan(a, b, k, cfg.get<int>("l", plan.l), cfg.get<long long>("m", plan.m));
  const SchattenOrder alpha = cfg.has("alpha") ? cfg.orders("alpha", {}).front() : SchattenOrder::finite(1);
  const unsigned threads = cfg.threads();

  Json certs = Json::array();
  bool all = true;
  auto record = [&](const PolarizationCertificate &c, Json input) {
    Json j = to_json(c);
    j["input"] = std::move(input);
    all = all && c.satisfied;
    certs.push_back(std::move(j));
  };
  if (cfg.has("cp")) {
    const auto path = cfg.get<std::string>("cp", "");
    record(partial_polarize(commuting_pair_from_json(read_json_file(path)), plan, alpha, threads).certificate, path);
  }
  if (cfg.has("rho0") != cfg.has("rho1")) throw Error(ErrorCode::kParse, "rho0 and rho1 must be given together");
  if (cfg.has("rho0")) {
    const auto p0 = cfg.get<std::string>("rho0", ""), p1 = cfg.get<std::string>("rho1", "");
    const auto r0 = load_density(p0), r1 = load_density(p1);
    record(partial_polarize(r0, r1, plan, alpha, cfg.max_dense_dim()).certificate, Json::array({p0, p1}));
  }
  if (cfg.has("pairs") || certs.empty()) {
    // Diagonal qubit fixtures rho = diag(p, 1 - p), sigma = diag(q, 1 - q).
    const auto pairs = cfg.get<std::vector<std::vector<double>>>("pairs", {{0.95, 0.05}, {0.5, 0.25}});
    for (const auto &pq : pairs) {
      if (pq.size() != 2) throw Error(ErrorCode::kParse, "pairs entries must be [p, q]");
      record(partial_polarize(cp_from_qubit(pq[0], pq[1]), plan, alpha, threads).certificate, Json::array({pq[0], pq[1]}));
    }
  }
  Json doc{{"certificates", std::move(certs)}};
  if (!sh.no_timestamp) doc["generated"] = utc_now();
  emit(sh, dump_json(doc) + "\n");
  note(sh, all ? "all certificates satisfied" : "some certificate is not satisfied");
  return all ? kExitOk : kExitUsage;
}

// instances: write seeded instance files into the --out directory.
int cmd_instances(const Shared &sh) {
  const Config cfg = load_config(sh, {"kind", "count", "n_qubits", "rank", "overlap", "p", "q", "output_qubit"});
  const auto kind = cfg.get<std::string>("kind", "random");
  const int count = cfg.get<int>("count", 1);
  const auto n = cfg.get<std::size_t>("n_qubits", 2);
  if (count < 1) throw Error(ErrorCode::kParamOutOfRange, "count must be >= 1");
  if (n < 1) throw Error(ErrorCode::kParamOutOfRange, "n_qubits must be >= 1");
  check_dense_dim(cfg, std::size_t{1} << std::min<std::size_t>(n + (kind == "pureqsd" ? 1 : 0), 62));
  if (sh.out.empty() || sh.out == "-") throw Error(ErrorCode::kParse, "instances needs --out DIR");
  std::error_code ec;
  std::filesystem::create_directories(sh.out, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + sh.out + ": " + ec.message());

  const Rng root(cfg.seed());
  Json manifest = Json::array();
  auto write = [&](const std::string &name, const Json &j) {
    write_text_file(sh.out + "/" + name, dump_json(j) + "\n");
    return name;
  };
  for (int i = 0; i < count; ++i) {
    const std::uint64_t s = root.split(static_cast<std::uint64_t>(i))();
    const std::string stem = "instance_" + std::to_string(i);
    Json entry{{"index", i}, {"seed", s}};
    if (kind == "random") {
      const auto rank = cfg.get<std::size_t>("rank", 0);
      const auto [r0, r1] = rank == 0 ? random_pair(n, 4, s)
                                      : std::pair{random_density(n, rank, Rng(s).split(1)()), random_density(n, rank, Rng(s).split(2)())};
      entry["rho0"] = write(stem + "_rho0.json", to_json(r0));
      entry["rho1"] = write(stem + "_rho1.json", to_json(r1));
    } else if (kind == "pure_overlap") {
      const auto [a, b] = pure_instance_pair(cfg.get<double>("overlap", 0.5), n, s);
      entry["rho0"] = write(stem + "_rho0.json", to_json(DensityMatrix::from_pure(a)));
      entry["rho1"] = write(stem + "_rho1.json", to_json(DensityMatrix::from_pure(b)));
    } else if (kind == "pureqsd") {
      const auto inst = pureqsd_from_unitary(random_unitary(std::size_t{1} << n, s), cfg.get<std::size_t>("output_qubit", 0));
      entry["rho0"] = write(stem + "_rho0.json", to_json(DensityMatrix::from_pure(inst.psi0)));
      entry["rho1"] = write(stem + "_rho1.json", to_json(DensityMatrix::from_pure(inst.psi1)));
      entry["accept_prob"] = inst.accept_prob;
      entry["overlap_sq"] = inst.overlap_sq;
    } else if (kind == "qubit_cp") {
      entry["cp"] = write(stem + "_cp.json", to_json(cp_from_qubit(cfg.get<double>("p", 0.95), cfg.get<double>("q", 0.05))));
    } else {
      throw Error(ErrorCode::kParse, "unknown instance kind '" + kind + "'");
    }
    manifest.push_back(std::move(entry));
  }
  Json doc{{"kind", kind}, {"instances", std::move(manifest)}};
  if (!sh.no_timestamp) doc["generated"] = utc_now();
  write_text_file(sh.out + "/manifest.json", dump_json(doc) + "\n");
  note(sh, "wrote " + std::to_string(count) + " instances to " + sh.out);
  return kExitOk;
}

// bench: ledger cost against 1/eps with a fitted log-log slope.
int cmd_bench(const Shared &sh) {
  const Config cfg = load_config(sh, {"model", "alpha", "eps", "backend", "tolerance"});
  BenchCampaign c;
  const auto model = cfg.get<std::string>("model", "query");
  if (model != "query" && model != "sample") throw Error(ErrorCode::kParse, "model must be query or sample");
  c.model = model == "query" ? CostModel::kQuery : CostModel::kSample;
  c.backend = parse_backend(cfg.get<std::string>("backend", model == "query" ? "qae" : "hadamard_sampling"));
  c.alpha = cfg.get<double>("alpha", 2.0);
  c.eps = cfg.doubles("eps", c.eps);
  c.seed = cfg.seed();
  c.threads = cfg.threads();
  if (cfg.has("tolerance")) c.tolerance = cfg.get<double>("tolerance", 0.0);
  const auto r = run_bench_campaign(c);
  CsvTable t({"model", "alpha", "eps", "inv_eps", "cost", "degree", "slope", "theory", "runtime_ms"});
  for (const auto &p : r.points) {
    t.add({model, fmt_double(c.alpha), fmt_double(p.eps), fmt_double(1.0 / p.eps), fmt_double(p.cost), std::to_string(p.degree),
           fmt_double(r.slope), fmt_double(r.theory), fmt_double(runtime_cell(sh, p.runtime_ms))});
  }
  emit(sh, t.str(csv_comment(sh, "bench")));
  note(sh, "slope " + fmt_double(r.slope) + ", theory " + fmt_double(r.theory) + ", tolerance " + fmt_double(r.tolerance) +
               (r.within() ? ": within" : ": OUTSIDE"));
  return r.within() ? kExitOk : kExitUsage;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"qdist: quantum l_alpha distance estimation and reductions"};
  app.require_subcommand(1);
  Shared sh;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::size_t max_dense = 0;

  struct Sub {
    const char *name;
    const char *help;
    int (*run)(const Shared &);
  };
  const Sub subs[] = {
      {"approx", "Chebyshev approximation sweep (CSV)", cmd_approx},
      {"estimate", "estimator trials (CSV or JSON)", cmd_estimate},
      {"verify", "inequality campaign (CSV); exit 2 on any violation", cmd_verify},
      {"polarize", "partial polarization certificates (JSON)", cmd_polarize},
      {"instances", "write seeded instance files into --out DIR", cmd_instances},
      {"bench", "cost vs 1/eps slope (CSV); exit 2 outside tolerance", cmd_bench},
  };
  std::vector<std::pair<CLI::App *, const Sub *>> registered;
  for (const auto &s : subs) {
    CLI::App *sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", sh.config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", sh.out, "output path (stdout when omitted)");
    sub->add_option("--seed", seed, "root seed (overrides config)");
    sub->add_option("--threads", threads, "worker threads, 0 = all cores (overrides config)");
    sub->add_option("--max-dense-dim", max_dense, "largest dense dimension allowed (default 4096)");
    sub->add_option("--set", sh.sets, "override a config key: key=value (value parsed as JSON when possible)");
    sub->add_flag("--quiet", sh.quiet, "no summary on stderr");
    sub->add_flag("--no-timestamp", sh.no_timestamp, "omit the timestamp line and zero runtime columns");
    registered.emplace_back(sub, &s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    // ExistingFile failures are missing inputs, not bad usage.
    app.exit(e);
    return std::string(e.what()).find("File does not exist") != std::string::npos ? kExitIo : kExitUsage;
  }

  for (const auto &[sub, s] : registered) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed")) sh.seed = seed;
    if (sub->count("--threads")) sh.threads = threads;
    if (sub->count("--max-dense-dim")) sh.max_dense_dim = max_dense;
    try {
      return s->run(sh);
    } catch (const Error &e) {
      std::cerr << "qdist " << s->name << ": " << e.what() << "\n";
      return e.code() == ErrorCode::kIo ? kExitIo : kExitUsage;
    } catch (const std::exception &e) {
      std::cerr << "qdist " << s->name << ": " << e.what() << "\n";
      return kExitUsage;
    }
  }
  return kExitUsage;
}
