// Command-line front end: JSON experiment specs in, CSV data + JSON provenance
// sidecar out. Exit codes: 0 ok, 2 validation error, 3 validity error from the
// bound evaluators, 4 envelope verification failure.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "efb/bandit.hpp"
#include "efb/bounds.hpp"
#include "efb/kinf.hpp"
#include "efb/mcverify.hpp"
#include "efb/specio.hpp"

using namespace efb;

namespace {

struct Options {
  std::string spec_path;
  std::string out_path;  // empty -> spec's "output" -> stdout
  uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
  std::string format = "csv";
};

struct Sink {
  std::ostringstream csv;
  json meta;
};

void emit(const Sink& sink, const Options& opt) {
  if (opt.out_path.empty()) {
    std::cout << sink.csv.str();
    return;
  }
  std::ofstream out(opt.out_path);
  if (!out) throw ConfigError("cannot write output file: " + opt.out_path);
  if (opt.format == "json") {
    json rows = json::array();
    std::istringstream in(sink.csv.str());
    std::string header, line;
    std::getline(in, header);
    std::vector<std::string> cols;
    {
      std::istringstream hs(header);
      std::string c;
      while (std::getline(hs, c, ',')) cols.push_back(c);
    }
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::string cell;
      json row;
      for (std::size_t i = 0; i < cols.size() && std::getline(ls, cell, ','); ++i)
        row[cols[i]] = cell;
      rows.push_back(row);
    }
    out << rows.dump(2) << "\n";
  } else {
    out << sink.csv.str();
  }
  std::ofstream meta(opt.out_path + ".meta.json");
  meta << sink.meta.dump(2) << "\n";
}

struct BoundSetup {
  FamilyModel model;
  NaturalParam theta_star;
  ParamRegion region;
  BoundConfig cfg;
};

BoundSetup parse_bound_setup(const json& c, double default_b) {
  BoundSetup s;
  s.model = parse_family(c.at("family"));
  s.theta_star = parse_theta(c.at("theta_star"), s.model.K);
  s.region = parse_region(s.model, c.at("region"));
  const double epsilon = c.at("epsilon").get<double>();
  const double xi = c.value("xi", 0.0);
  const double p = c.value("p", 0.5);
  const double eta = c.value("eta", 0.5);
  const double b = c.value("b", default_b);
  const double q = c.value("q", (xi >= s.model.K / 2.0) ? 0.8 : 1.0);
  s.cfg = make_bound_config(s.model, s.region, s.theta_star, epsilon, b, p, q, eta, xi);
  return s;
}

json bound_provenance(const BoundSetup& s) {
  const BoundConfig& cfg = s.cfg;
  json j;
  j["K"] = cfg.K;
  j["epsilon"] = cfg.epsilon;
  j["rho_eps"] = cfg.rho_eps;
  j["b"] = cfg.b;
  j["p"] = cfg.p;
  j["q"] = cfg.q;
  j["eta"] = cfg.eta;
  j["xi"] = cfg.xi;
  j["alpha"] = cfg.alpha;
  j["chi_unit"] = cfg.chi_unit;
  j["chi_eps"] = cfg.chi_eps;
  j["cover_count"] = cfg.cover_count;
  j["big_C"] = cfg.big_C;
  j["big_C4"] = cfg.big_C4;
  j["v_rho"] = cfg.region.v_rho;
  j["V_rho"] = cfg.region.V_rho;
  j["rho"] = cfg.region.rho;
  j["theta_lo"] = cfg.region.theta_lo;
  j["theta_hi"] = cfg.region.theta_hi;
  const double chi = cfg.chi_eps;
  j["c"] = chi * chi / std::pow(2.0 * std::log(5.0), 2);
  j["c_prime_xi_ge_K_half"] = std::sqrt(threshold_f(5.0, cfg.xi) / 5.0);
  j["c_prime_xi_lt_K_half"] = std::sqrt(threshold_f(4.0, cfg.xi) / 4.0);
  j["t_chi"] = t_chi_exact(chi);
  j["t_chi_closed_form"] = t_chi_closed_form(chi);
  j["t_range_low"] = 85.0 / (chi * chi);
  return j;
}

std::vector<double> t_grid_of(const json& c) {
  if (c.contains("t_grid")) return c.at("t_grid").get<std::vector<double>>();
  return {c.at("t").get<double>()};
}

int cmd_kinf(const json& c, const Options& opt, Sink& sink) {
  check_keys(c, {"family", "theta", "mu", "mu_grid"}, "kinf config");
  const FamilyModel m = parse_family(c.at("family"));
  const NaturalParam th = parse_theta(c.at("theta"), m.K);
  std::vector<double> mus;
  if (c.contains("mu_grid"))
    mus = c.at("mu_grid").get<std::vector<double>>();
  else
    mus = {c.at("mu").get<double>()};
  const std::string h = hash_hex(c);
  sink.csv << "mu,value,lambda,active,config_hash\n";
  for (double mu : mus) {
    const KinfResult r = kinf(m, th, mu);
    sink.csv << format_real(mu) << "," << format_real(r.value) << "," << format_real(r.lambda)
             << "," << (r.active ? 1 : 0) << "," << h << "\n";
  }
  sink.meta["config"] = c;
  sink.meta["config_hash"] = h;
  return 0;
}

int cmd_bound(const std::string& which, const json& c, const Options& opt, Sink& sink) {
  const std::string h = hash_hex(c);
  sink.csv << "t,value,window,config_hash\n";
  if (which == "prior") {
    check_keys(c, {"xi", "t", "t_grid"}, "bound.prior config");
    for (double t : t_grid_of(c))
      sink.csv << format_real(t) << "," << format_real(prior_bound_cgmms(t, c.value("xi", 0.0)))
               << ",-," << h << "\n";
    sink.meta["config"] = c;
    sink.meta["config_hash"] = h;
    return 0;
  }
  if (which == "sanov") {
    check_keys(c, {"family", "theta", "mu_threshold", "t", "t_grid"}, "bound.sanov config");
    const FamilyModel m = parse_family(c.at("family"));
    const NaturalParam th = parse_theta(c.at("theta"), m.K);
    const double mu = c.at("mu_threshold").get<double>();
    for (double t : t_grid_of(c))
      sink.csv << format_real(t) << "," << format_real(sanov_bound(m, th, mu, t)) << ",-," << h
               << "\n";
    sink.meta["config"] = c;
    sink.meta["config_hash"] = h;
    return 0;
  }

  const std::vector<std::string> keys = {"family", "region", "theta_star", "epsilon", "xi",
                                         "p",      "eta",    "q",          "b",       "t",
                                         "t_grid", "variant"};
  check_keys(c, keys, "bound." + which + " config");
  BoundSetup s = parse_bound_setup(c, 4.0);
  sink.meta["config"] = c;
  sink.meta["config_hash"] = h;
  sink.meta["resolved"] = bound_provenance(s);
  for (double t : t_grid_of(c)) {
    if (which == "cor1") {
      sink.csv << format_real(t) << "," << format_real(cor1_bound(t, s.cfg)) << ",-," << h << "\n";
    } else if (which == "cor2") {
      const Cor2Result r = cor2_bound(t, s.cfg);
      const char* w = r.window == Cor2Window::below_range ? "below_range"
                      : r.window == Cor2Window::mid_range ? "mid_range"
                                                          : "high_range";
      sink.csv << format_real(t) << "," << format_real(r.value) << "," << w << "," << h << "\n";
    } else {  // theorem
      const std::string v = c.value("variant", std::string("f_of_t"));
      const BoundVariant variant =
          v == "f_of_t_over_n" ? BoundVariant::f_of_t_over_n : BoundVariant::f_of_t;
      sink.csv << format_real(t) << "," << format_real(theorem_main_bound(t, s.cfg, variant))
               << ",-," << h << "\n";
    }
  }
  return 0;
}

int cmd_simulate_regret(const json& c, const Options& opt, uint64_t seed, int replicates,
                        Sink& sink) {
  check_keys(c, {"instance", "strategy", "xi", "T", "epsilon"}, "simulate.regret config");
  const BanditInstance inst = parse_instance(c.at("instance"));
  const std::string sname = c.at("strategy").get<std::string>();
  Strategy strat;
  if (sname == "klucb")
    strat = Strategy::KLUCB;
  else if (sname == "klucb+" || sname == "klucbplus")
    strat = Strategy::KLUCBplus;
  else
    throw ConfigError("unknown strategy: " + sname);
  const double xi = c.value("xi", 0.0);
  const int T = c.at("T").get<int>();
  const std::string h = hash_hex(c);

  const auto recs = run_episodes(inst, strat, xi, T, replicates, seed, opt.threads);
  sink.csv << "replicate,t,pseudo_regret,crossings,config_hash\n";
  for (int i = 0; i < replicates; ++i) {
    const auto& r = recs[i];
    for (std::size_t k = 0; k < r.checkpoints.size(); ++k)
      sink.csv << i << "," << r.checkpoints[k] << "," << format_real(r.regret_at[k]) << ","
               << r.crossings_at[k] << "," << h << "\n";
  }
  sink.meta["config"] = c;
  sink.meta["config_hash"] = h;
  sink.meta["seed"] = seed;
  sink.meta["replicates"] = replicates;
  return 0;
}

int cmd_simulate_crossing(const json& c, const Options& opt, uint64_t seed, Sink& sink) {
  check_keys(c,
             {"family", "region", "theta_star", "epsilon", "xi", "variant", "restrict_to_region",
              "t", "t_grid", "n_runs", "exact", "envelope", "p", "eta", "q", "b"},
             "simulate.crossing config");
  BoundSetup s = parse_bound_setup(c, 4.0);
  CrossingSpec spec;
  spec.model = s.model;
  spec.theta_star = s.theta_star;
  spec.epsilon = s.cfg.epsilon;
  spec.region = s.region;
  spec.xi = s.cfg.xi;
  const std::string v = c.value("variant", std::string("f_of_t"));
  spec.variant = v == "f_of_t_over_n" ? BoundVariant::f_of_t_over_n : BoundVariant::f_of_t;
  spec.restrict_to_region = c.value("restrict_to_region", true);
  const uint64_t n_runs = c.value("n_runs", 10000);
  const bool want_exact = c.value("exact", spec.model.kind == FamilyKind::Bernoulli);
  const std::string env_kind = c.value("envelope", std::string("cor1"));
  const std::string h = hash_hex(c);

  sink.csv << "spec_hash,t,xi,variant,p_hat,ci_low,ci_high,exact,envelope,pass\n";
  bool all_pass = true;
  for (double td : t_grid_of(c)) {
    spec.t = static_cast<int>(td);
    CrossingEstimate est = estimate_crossing(spec, n_runs, seed, opt.threads);
    if (want_exact && spec.model.kind == FamilyKind::Bernoulli && spec.t <= 2000)
      est.exact = exact_crossing_bernoulli(spec);
    std::string env_str, pass_str;
    if (env_kind != "none") {
      double bound = 1.0;
      if (env_kind == "cor1")
        bound = cor1_bound(td, s.cfg);
      else if (env_kind == "theorem")
        bound = theorem_main_bound(td, s.cfg, BoundVariant::f_of_t);
      else
        throw ConfigError("unknown envelope kind: " + env_kind);
      est.envelope = bound;
      const EnvelopeReport rep = compare_to_envelope(est, bound);
      bool ok = rep.pass;
      if (est.exact) ok = ok && *est.exact <= bound;
      all_pass = all_pass && ok;
      env_str = format_real(bound);
      pass_str = ok ? "1" : "0";
    }
    sink.csv << h << "," << spec.t << "," << format_real(spec.xi) << "," << v << ","
             << format_real(est.p_hat) << "," << format_real(est.ci_low) << ","
             << format_real(est.ci_high) << "," << (est.exact ? format_real(*est.exact) : "")
             << "," << env_str << "," << pass_str << "\n";
  }
  sink.meta["config"] = c;
  sink.meta["config_hash"] = h;
  sink.meta["resolved"] = bound_provenance(s);
  sink.meta["seed"] = seed;
  return all_pass ? 0 : 4;
}

int cmd_verify_envelope(const json& c, const Options& opt, uint64_t seed, Sink& sink) {
  check_keys(c, {"region", "mu_stars", "epsilons", "xis", "ts", "p", "eta", "q"},
             "verify.envelope config");
  const FamilyModel m = FamilyModel::bernoulli();
  const auto mu_stars = c.value("mu_stars", std::vector<double>{0.6, 0.75, 0.9});
  const auto epsilons = c.value("epsilons", std::vector<double>{0.05, 0.1});
  const auto xis = c.value("xis", std::vector<double>{0.0, 0.5, 1.0});
  const auto ts = c.value("ts", std::vector<double>{64, 256, 1024, 2000});
  const double p = c.value("p", 0.5), eta = c.value("eta", 0.5);

  ParamRegion region;
  if (c.contains("region")) {
    region = parse_region(m, c.at("region"));
  } else {
    RegionBox box;
    box.mean_lo = 0.2;
    box.mean_hi = 0.97;
    region = region_curvature(m, box, 0.3);
  }
  const std::string h = hash_hex(c);
  sink.csv << "spec_hash,t,xi,variant,p_hat,ci_low,ci_high,exact,envelope,pass\n";
  bool all_pass = true;
  json resolved = json::array();
  for (double mu_star : mu_stars)
    for (double eps : epsilons)
      for (double xi : xis) {
        const NaturalParam th{{bernoulli_theta(mu_star)}};
        const double q = c.value("q", (xi >= m.K / 2.0) ? 0.8 : 1.0);
        const BoundConfig cfg = make_bound_config(m, region, th, eps, 4.0, p, q, eta, xi);
        CrossingSpec spec;
        spec.model = m;
        spec.theta_star = th;
        spec.epsilon = eps;
        spec.region = region;
        spec.xi = xi;
        spec.variant = BoundVariant::f_of_t;
        spec.restrict_to_region = true;
        for (double td : ts) {
          spec.t = static_cast<int>(td);
          const double exact = exact_crossing_bernoulli(spec);
          const double exact_strict = exact_crossing_bernoulli(spec, true);
          const double b_thm = theorem_main_bound(td, cfg, BoundVariant::f_of_t);
          const double b_c1 = cor1_bound(td, cfg);
          const bool ok = exact <= b_thm && exact_strict <= b_c1;
          all_pass = all_pass && ok;
          sink.csv << h << "," << spec.t << "," << format_real(xi) << ",f_of_t,,,,"
                   << format_real(exact) << "," << format_real(std::min(b_thm, b_c1)) << ","
                   << (ok ? "1" : "0") << "\n";
        }
      }
  sink.meta["config"] = c;
  sink.meta["config_hash"] = h;
  sink.meta["seed"] = seed;
  return all_pass ? 0 : 4;
}

int dispatch(const std::string& command, const json& config, const Options& opt, uint64_t seed,
             int replicates) {
  Sink sink;
  sink.meta["command"] = command;
  int rc = 0;
  if (command == "kinf")
    rc = cmd_kinf(config, opt, sink);
  else if (command == "bound.cor1")
    rc = cmd_bound("cor1", config, opt, sink);
  else if (command == "bound.cor2")
    rc = cmd_bound("cor2", config, opt, sink);
  else if (command == "bound.theorem")
    rc = cmd_bound("theorem", config, opt, sink);
  else if (command == "bound.prior")
    rc = cmd_bound("prior", config, opt, sink);
  else if (command == "bound.sanov")
    rc = cmd_bound("sanov", config, opt, sink);
  else if (command == "simulate.regret")
    rc = cmd_simulate_regret(config, opt, seed, replicates, sink);
  else if (command == "simulate.crossing")
    rc = cmd_simulate_crossing(config, opt, seed, sink);
  else if (command == "verify.envelope")
    rc = cmd_verify_envelope(config, opt, seed, sink);
  else
    throw ConfigError("unknown command: " + command);
  emit(sink, opt);
  return rc;
}

int run_spec(Options& opt, const std::string& forced_command) {
  const json spec = load_json_file(opt.spec_path);
  std::string command = forced_command;
  json config;
  uint64_t seed = opt.seed;
  int replicates = 1;
  if (forced_command.empty()) {
    check_keys(spec, {"command", "config", "output", "seed", "replicates"}, "experiment spec");
    command = spec.at("command").get<std::string>();
    config = spec.at("config");
    if (spec.contains("output") && opt.out_path.empty())
      opt.out_path = spec.at("output").get<std::string>();
    if (spec.contains("seed") && !opt.seed_set) seed = spec.at("seed").get<uint64_t>();
    replicates = spec.value("replicates", 1);
  } else {
    config = spec;
    if (config.is_object() && config.contains("replicates")) {
      replicates = config.at("replicates").get<int>();
      config.erase("replicates");
    }
  }
  return dispatch(command, config, opt, seed, replicates);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exponential-family boundary-crossing bounds and KL-UCB simulators"};
  app.require_subcommand(1);
  Options opt;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--spec", opt.spec_path, "JSON spec file")->required();
    sub->add_option("--out", opt.out_path, "output CSV path (default: spec output or stdout)");
    sub->add_option("--seed", opt.seed, "seed override")->each([&](const std::string&) {
      opt.seed_set = true;
    });
    sub->add_option("--threads", opt.threads, "worker cap for simulate commands");
    sub->add_option("--format", opt.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  };

  std::string forced;
  auto* run = app.add_subcommand("run", "run a full experiment spec");
  add_common(run);
  auto* kinf_cmd = app.add_subcommand("kinf", "projected divergence");
  add_common(kinf_cmd);
  auto* bound = app.add_subcommand("bound", "bound evaluators");
  std::vector<std::pair<std::string, CLI::App*>> bound_subs;
  for (const std::string name : {"cor1", "cor2", "theorem", "prior", "sanov"}) {
    auto* sub = bound->add_subcommand(name);
    add_common(sub);
    bound_subs.emplace_back("bound." + name, sub);
  }
  bound->require_subcommand(1);
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo simulators");
  auto* sim_regret = simulate->add_subcommand("regret");
  add_common(sim_regret);
  auto* sim_crossing = simulate->add_subcommand("crossing");
  add_common(sim_crossing);
  simulate->require_subcommand(1);
  auto* verify = app.add_subcommand("verify", "envelope verification");
  auto* verify_env = verify->add_subcommand("envelope");
  add_common(verify_env);
  verify->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }

  if (kinf_cmd->parsed()) forced = "kinf";
  for (auto& [name, sub] : bound_subs)
    if (sub->parsed()) forced = name;
  if (sim_regret->parsed()) forced = "simulate.regret";
  if (sim_crossing->parsed()) forced = "simulate.crossing";
  if (verify_env->parsed()) forced = "verify.envelope";

  try {
    return run_spec(opt, forced);
  } catch (const ValidityError& e) {
    std::cerr << "validity error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
