#include "cli/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cli/config.hpp"
#include "cli/csv.hpp"
#include "robustq/parallel.hpp"
#include "robustq/reneging.hpp"
#include "robustq/scheduling.hpp"
#include "robustq/sim/mc_oracle.hpp"
#include "robustq/sim/priority_sim.hpp"
#include "robustq/sim/reneging_sim.hpp"

namespace robustq::cli {

namespace {

json input_or_empty(const CommandOptions& opt) {
  return opt.input ? load_json(*opt.input) : json::object();
}

std::filesystem::path input_dir(const CommandOptions& opt) {
  return opt.input ? opt.input->parent_path() : std::filesystem::path{};
}

void write_text(const std::filesystem::path& target, const std::string& text) {
  const auto path = resolve_output(target);
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text) || !f.flush()) throw ConfigError("cannot write output file: " + path.string());
}

void emit(const CommandOptions& opt, std::ostream& out, const std::string& text) {
  if (opt.output) {
    write_text(*opt.output, text);
  } else {
    out << text;
  }
}

int grid_points(const CommandOptions& opt, const json& j, int fallback) {
  const int n = opt.grid_points ? *opt.grid_points : static_cast<int>(number_or(j, "grid_points", fallback));
  if (n < 2) throw ConfigError("grid_points must be >= 2");
  return n;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return v;
}

template <class F>
auto config_guard(F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string default_family_name(const UncertaintyFamily& f) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, FamilyQ1>) return "Q1_u" + shortest(x.u) + "_alpha" + shortest(x.alpha_anchor);
        if constexpr (std::is_same_v<T, FamilyQ2>) return "Q2_a" + shortest(x.a) + "_b" + shortest(x.b);
        if constexpr (std::is_same_v<T, FamilyQ3>) return "Q3_a" + shortest(x.a) + "_b" + shortest(x.b);
        if constexpr (std::is_same_v<T, FamilyQ4>) return "Q4_alpha0" + shortest(x.alpha0) + "_u" + shortest(x.u);
      },
      f);
}

json default_family_set() {
  return json::array({
      {{"kind", "Q2"}, {"a", 0.5}, {"b", 2.0}},
      {{"kind", "Q3"}, {"a", 0.5}, {"b", 2.0}},
      {{"kind", "Q2"}, {"a", 0.8}, {"b", 1.25}},
      {{"kind", "Q3"}, {"a", 0.8}, {"b", 1.25}},
      {{"kind", "Q4"}, {"alpha0", 3.0}, {"u", 0.2}},
      {{"kind", "Q4"}, {"alpha0", 6.0}, {"u", 0.2}},
  });
}

json estimate_json(const sim::McEstimate& e) {
  return {{"point", e.point},     {"std_err", e.std_err}, {"replications", e.replications},
          {"seed", e.seed},       {"finite", e.finite},   {"method", e.method}};
}

json bound_json(const std::optional<BoundValue>& b, const std::string& status) {
  json j;
  j["status"] = status;
  if (b) {
    j["value"] = b->value;
    j["theta_star"] = b->diagnostics.theta_star;
    if (!b->diagnostics.note.empty()) j["note"] = b->diagnostics.note;
  } else {
    j["value"] = nullptr;
  }
  return j;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_err_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

std::filesystem::path resolve_output(const std::filesystem::path& p) {
  if (p.is_absolute()) return p;
  if (const char* dir = std::getenv("ROBUSTQ_OUTPUT_DIR"); dir && *dir) return std::filesystem::path(dir) / p;
  return p;
}

// ---------------------------------------------------------------------------

int cmd_rdr_family(const CommandOptions& opt, std::ostream& out, std::ostream& log) {
  const json j = input_or_empty(opt);
  const double rate = number_or(j, "rate", 1.0);
  const double lo = number_or(j, "alpha_min", 1.1);
  const double hi = opt.alpha_max ? *opt.alpha_max : number_or(j, "alpha_max", 10.0);
  const int n = grid_points(opt, j, 100);
  if (!(lo > 1.0 && hi > lo)) throw ConfigError("need 1 < alpha_min < alpha_max");
  if (!(rate > 0.0)) throw ConfigError("rate must be > 0");
  const json fams = j.contains("families") ? j.at("families") : default_family_set();
  if (!fams.is_array() || fams.empty()) throw ConfigError("'families' must be a non-empty array");

  CsvWriter csv({"family", "alpha", "rdr"});
  const PoissonReference ref{rate, std::nullopt};
  for (const auto& fj : fams) {
    const UncertaintyFamily fam = parse_family(fj);
    const std::string name = fj.contains("name") ? fj.at("name").get<std::string>() : default_family_name(fam);
    std::vector<double> alphas;
    if (const auto* q1 = std::get_if<FamilyQ1>(&fam)) {
      alphas = {q1->alpha_anchor};
    } else if (const auto* q4 = std::get_if<FamilyQ4>(&fam); q4 && q4->alpha0 <= hi) {
      // The divergence budget only controls orders below alpha0.
      if (!(q4->alpha0 > lo)) throw ConfigError(name + ": alpha0 must exceed alpha_min");
      for (int i = 0; i < n; ++i) alphas.push_back(lo + (q4->alpha0 - lo) * i / n);
    } else {
      alphas = linspace(lo, hi, n);
    }
    for (double a : alphas) csv.field(name).field(a).field(rdr(fam, ref, a)).end_row();
    if (opt.verbosity > 0) log << name << ": " << alphas.size() << " rows\n";
  }
  emit(opt, out, csv.str());
  return kOk;
}

int cmd_rdr_renewal(const CommandOptions& opt, std::ostream& out, std::ostream& log) {
  if (!opt.input) throw ConfigError("rdr-renewal needs --input with a 'renewal' object");
  const json j = load_json(*opt.input);
  const RenewalSpec spec = parse_renewal(j.contains("renewal") ? j.at("renewal") : json(), input_dir(opt));
  std::vector<double> alphas = j.contains("alphas") ? numbers(j, "alphas") : std::vector<double>{number_or(j, "alpha", 2.0)};
  BoundOptions bo;
  bo.override_hypotheses = j.value("override_hypotheses", false);

  json reports = json::array();
  bool refused = false;
  for (double a : alphas) {
    if (!(a > 1.0)) throw ConfigError("alpha must be > 1");
    const BoundReport r = renewal_bounds(spec, a, bo);
    json rep;
    rep["alpha"] = a;
    rep["rough"] = r.rough;
    rep["g1"] = bound_json(r.g1, r.g1_status);
    rep["g2"] = bound_json(r.g2, r.g2_status);
    rep["g3"] = bound_json(r.g3, r.g3_status);
    rep["closed_form"] = r.closed_form ? json(*r.closed_form) : json(nullptr);
    reports.push_back(rep);
    refused = refused || !r.g2;
    if (opt.verbosity > 0) log << "alpha=" << a << " g2: " << r.g2_status << ", g3: " << r.g3_status << '\n';
  }
  json doc;
  doc["family"] = spec.family();
  doc["full_support"] = spec.full_support();
  doc["reports"] = reports;
  emit(opt, out, doc.dump(2) + "\n");
  return refused ? kUnestimable : kOk;
}

int cmd_bound_scheduling(const CommandOptions& opt, std::ostream& out, std::ostream& log) {
  const json j = input_or_empty(opt);
  const SchedulingInstance base = parse_scheduling_instance(j.contains("instance") ? j.at("instance") : json{{"preset", "left"}});
  const double lo = number_or(j, "beta_min", 0.1);
  const double hi = number_or(j, "beta_max", 15.0);
  const int n = grid_points(opt, j, 60);
  if (!(lo > 0.0 && hi > lo)) throw ConfigError("need 0 < beta_min < beta_max");
  json curves = j.contains("curves") ? j.at("curves")
                                     : json::array({{{"family", "reference"}},
                                                    {{"family", "Q2"}, {"delta", 0.65}},
                                                    {{"family", "Q2"}, {"delta", 0.15}},
                                                    {{"family", "Q3"}, {"delta", 0.65}},
                                                    {{"family", "Q3"}, {"delta", 0.15}}});
  const double rho = base.traffic_intensity();
  if (opt.verbosity > 0) log << "traffic intensity " << rho << '\n';

  CsvWriter csv({"curve", "beta", "bound", "gamma_star", "priority", "traffic_intensity"});
  const std::vector<double> betas = linspace(lo, hi, n);
  for (const auto& cj : curves) {
    const std::string fam = cj.value("family", std::string("reference"));
    SchedulingInstance inst = base;
    std::string name = cj.value("name", std::string());
    if (fam == "Q2" || fam == "Q3") {
      const double delta = number(cj, "delta");
      inst = config_guard([&] { return base.with_symmetric_envelopes(delta); });
      inst.family = fam == "Q2" ? EnvelopeFamily::q2 : EnvelopeFamily::q3;
      if (name.empty()) name = fam + "_delta" + shortest(delta);
    } else if (fam == "reference") {
      if (name.empty()) name = "reference";
    } else {
      throw ConfigError("unknown curve family '" + fam + "' (expected reference, Q2 or Q3)");
    }
    std::vector<RobustBoundResult> res(betas.size());
    parallel_for(betas.size(), opt.threads, [&](std::size_t i) {
      SchedulingInstance at = inst;
      at.beta = betas[i];
      if (fam == "reference") {
        res[i].bound = reference_rs_value(at);
        res[i].gamma_star = at.beta;
        res[i].priority_order = priority_index_order(at, at.beta);
      } else {
        res[i] = robust_rs_bound(at);
      }
    });
    for (std::size_t i = 0; i < betas.size(); ++i) {
      std::string prio;
      for (std::size_t c : res[i].priority_order) prio += (prio.empty() ? "" : " ") + std::to_string(c);
      csv.field(name).field(betas[i]).field(res[i].bound).field(res[i].gamma_star).field(prio).field(rho).end_row();
    }
  }
  emit(opt, out, csv.str());
  return kOk;
}

int cmd_bound_reneging(const CommandOptions& opt, std::ostream& out, std::ostream& log) {
  const json j = input_or_empty(opt);
  RenegingInstance inst;
  inst.lambda = number_or(j, "lambda", 2.0);
  inst.mu = number_or(j, "mu", 1.0);
  inst.theta = number_or(j, "theta", 1.0);
  inst.gamma = inst.gamma0();
  config_guard([&] {
    inst.validate();
    return 0;
  });
  const double delta = number_or(j, "delta", 0.3);
  if (!(delta >= 0.0 && delta < 1.0)) throw ConfigError("delta must lie in [0, 1)");
  const GammaBox small_box = j.contains("small_box") ? parse_gamma_box(j.at("small_box")) : GammaBox{1.0, 1.1, 1.0, 1.1};
  const GammaBox large_box = j.contains("large_box") ? parse_gamma_box(j.at("large_box")) : GammaBox{1.0, 1.5, 1.0, 1.5};
  const bool paper = opt.paper_convention || j.value("paper_convention", false);
  const int n = grid_points(opt, j, 60);
  const double span = number_or(j, "gamma_span", 3.0);
  if (!(span > 0.0)) throw ConfigError("gamma_span must be > 0");

  const auto columns = standard_figure3_columns(delta, small_box, large_box,
                                                paper ? GammaConvention::paper_bracket : GammaConvention::rdr);
  const auto rows = figure3_data(inst, columns, default_gamma_grid(inst, n, span), opt.threads);
  std::vector<std::string> header{"gamma", "ref_decay"};
  for (const auto& c : columns) header.push_back("bound_" + c.name);
  for (const auto& c : columns) header.push_back("alpha_star_" + c.name);
  CsvWriter csv(header);
  for (const auto& r : rows) {
    csv.field(r.gamma).field(r.ref_decay);
    for (double b : r.bounds) csv.field(b);
    for (double a : r.alpha_stars) csv.field(a);
    csv.end_row();
  }
  if (opt.verbosity > 0) log << rows.size() << " gamma rows, " << columns.size() << " families\n";
  emit(opt, out, csv.str());
  return kOk;
}

// ---------------------------------------------------------------------------

namespace {

int simulate_reneging_scenario(const json& j, const CommandOptions& opt, std::uint64_t seed, std::ostream& out,
                               std::ostream& log) {
  const auto dir = input_dir(opt);
  sim::RenegingConfig cfg;
  cfg.servers = static_cast<int>(number(j, "servers"));
  cfg.horizon = number(j, "horizon");
  cfg.arrivals = parse_process(j.contains("arrivals") ? j.at("arrivals") : json(), dir);
  if (j.contains("patience")) cfg.patience = parse_patience(j.at("patience"), dir);
  if (j.contains("services")) {
    cfg.services.clear();
    if (!j.at("services").is_array()) throw ConfigError("'services' must be an array of process specs");
    for (const auto& s : j.at("services")) cfg.services.push_back(parse_process(s, dir));
  }
  cfg.initial_customers = static_cast<int>(number_or(j, "initial_customers", 0));
  cfg.seed = seed;
  cfg.assert_invariants = opt.assert_invariants;
  config_guard([&] {
    cfg.validate();
    return 0;
  });
  const int reps = static_cast<int>(number_or(j, "replications", 1));
  if (reps < 1) throw ConfigError("replications must be >= 1");

  const auto runs = sim::simulate_reneging_batch(cfg, reps, opt.threads);
  std::vector<double> rates;
  json counts = json::array();
  for (const auto& r : runs) {
    rates.push_back(r.reneging_rate);
    counts.push_back(r.reneging_count);
  }
  json doc;
  doc["model"] = "reneging";
  doc["seed"] = seed;
  doc["replications"] = reps;
  doc["servers"] = cfg.servers;
  doc["horizon"] = cfg.horizon;
  doc["reneging_rate"] = mean_of(rates);
  doc["reneging_rate_std_err"] = std_err_of(rates);
  doc["reneging_counts"] = counts;

  int code = kOk;
  if (j.contains("tail_threshold")) {
    const int tail_reps = static_cast<int>(number_or(j, "tail_replications", std::max(reps, 2)));
    const auto te = config_guard([&] { return sim::mc_tail_probability(cfg, number(j, "tail_threshold"), tail_reps, seed, opt.threads); });
    json t = estimate_json(te.estimate);
    t["threshold"] = te.threshold;
    t["hits"] = te.hits;
    t["p_hat"] = te.p_hat;
    t["p_lo"] = te.p_lo;
    t["p_hi"] = te.p_hi;
    t["unestimable"] = te.unestimable;
    doc["tail"] = t;
    if (te.unestimable) {
      log << "tail probability unestimable: no replication exceeded the threshold\n";
      code = kUnestimable;
    }
  }
  if (j.contains("event_log")) {
    sim::RenegingConfig c = cfg;
    c.record_log = true;
    const auto first = sim::simulate_reneging(c);
    write_text(j.at("event_log").get<std::string>(), first.log->to_csv());
  }
  emit(opt, out, doc.dump(2) + "\n");
  return code;
}

int simulate_priority_scenario(const json& j, const CommandOptions& opt, std::uint64_t seed, std::ostream& out) {
  const auto dir = input_dir(opt);
  sim::PriorityConfig cfg;
  cfg.instance.arrival_rates = numbers(j, "arrival_rates");
  cfg.instance.service_rates = numbers(j, "service_rates");
  cfg.instance.costs.assign(cfg.instance.arrival_rates.size(), 1.0);
  if (j.contains("priority")) {
    for (double p : numbers(j, "priority")) {
      if (p < 0.0 || p != std::floor(p)) throw ConfigError("priority entries must be class indices");
      cfg.priority.push_back(static_cast<std::size_t>(p));
    }
  } else {
    cfg.priority.resize(cfg.instance.arrival_rates.size());
    for (std::size_t i = 0; i < cfg.priority.size(); ++i) cfg.priority[i] = i;
  }
  cfg.scaling = number_or(j, "scaling", 1.0);
  cfg.horizon = number(j, "horizon");
  if (j.contains("arrivals")) {
    for (const auto& s : j.at("arrivals")) cfg.arrivals.push_back(parse_process(s, dir));
  }
  if (j.contains("services")) {
    for (const auto& s : j.at("services")) cfg.services.push_back(parse_process(s, dir));
  }
  cfg.seed = seed;
  cfg.assert_invariants = opt.assert_invariants;
  config_guard([&] {
    cfg.validate();
    return 0;
  });
  const int reps = static_cast<int>(number_or(j, "replications", 1));
  if (reps < 1) throw ConfigError("replications must be >= 1");
  const auto runs = sim::simulate_multiclass_priority_batch(cfg, reps, opt.threads);

  const std::size_t k = cfg.instance.num_classes();
  json mean_queue = json::array(), se_queue = json::array(), mean_avg = json::array(), terminal = json::array();
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> q, avg;
    for (const auto& r : runs) {
      q.push_back(static_cast<double>(r.queue[i]));
      avg.push_back(r.time_average[i]);
    }
    mean_queue.push_back(mean_of(q));
    se_queue.push_back(std_err_of(q));
    mean_avg.push_back(mean_of(avg));
  }
  for (const auto& r : runs) terminal.push_back(r.queue);
  json doc;
  doc["model"] = "priority";
  doc["seed"] = seed;
  doc["replications"] = reps;
  doc["scaling"] = cfg.scaling;
  doc["horizon"] = cfg.horizon;
  doc["mean_terminal_queue"] = mean_queue;
  doc["mean_terminal_queue_std_err"] = se_queue;
  doc["mean_time_average_queue"] = mean_avg;
  doc["terminal_queues"] = terminal;
  emit(opt, out, doc.dump(2) + "\n");
  return kOk;
}

int simulate_renyi_scenario(const json& j, const CommandOptions& opt, std::uint64_t seed, std::ostream& out,
                            std::ostream& log) {
  const auto q = parse_process(j.contains("process") ? j.at("process") : json(), input_dir(opt));
  const double ref = number(j, "ref_rate");
  const double alpha = number_or(j, "alpha", 2.0);
  const double horizon = number(j, "horizon");
  const int reps = static_cast<int>(number_or(j, "replications", 1000));
  sim::McOptions mo;
  mo.threads = opt.threads;
  const std::string method = j.value("method", std::string("tilted"));
  if (method == "naive") {
    mo.method = sim::McMethod::naive;
  } else if (method != "tilted") {
    throw ConfigError("unknown method '" + method + "' (expected tilted or naive)");
  }
  const RenyiOrder order = alpha == 1.0 ? RenyiOrder::relative_entropy() : config_guard([&] { return RenyiOrder::of(alpha); });
  const auto e = config_guard([&] { return sim::mc_renyi_rate(q, ref, order, horizon, reps, seed, mo); });
  json doc = estimate_json(e);
  doc["model"] = "renyi";
  doc["alpha"] = alpha;
  doc["horizon"] = horizon;
  emit(opt, out, doc.dump(2) + "\n");
  if (!e.finite) {
    log << "Renyi rate unestimable: every replication had zero likelihood ratio\n";
    return kUnestimable;
  }
  return kOk;
}

}  // namespace

int cmd_simulate(const CommandOptions& opt, std::ostream& out, std::ostream& log) {
  if (!opt.input) throw ConfigError("simulate needs --input with a scenario file");
  const json j = load_json(*opt.input);
  const std::string model = j.value("model", std::string());
  const std::uint64_t seed = opt.seed ? *opt.seed : static_cast<std::uint64_t>(number_or(j, "seed", 1.0));
  if (model == "reneging") return simulate_reneging_scenario(j, opt, seed, out, log);
  if (model == "priority") return simulate_priority_scenario(j, opt, seed, out);
  if (model == "renyi") return simulate_renyi_scenario(j, opt, seed, out, log);
  throw ConfigError("unknown scenario model '" + model + "' (expected reneging, priority or renyi)");
}

// ---------------------------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust performance bounds for queueing models via Renyi divergence rates"};
  app.require_subcommand(1);
  CommandOptions opt;
  std::string input, output;
  std::uint64_t seed = 0;
  int grid = 0;
  double alpha_max = 0.0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("-i,--input", input, "JSON configuration file");
    sub->add_option("-o,--output", output, "output file (default: stdout)");
    sub->add_option("--seed", seed, "override the scenario seed");
    sub->add_option("--grid-points", grid, "number of grid points");
    sub->add_option("--alpha-max", alpha_max, "upper end of the alpha grid");
    sub->add_flag("--assert", opt.assert_invariants, "check simulator state invariants after every event");
    sub->add_flag("--paper-convention", opt.paper_convention, "report Gamma-box values as the bare bracket");
    sub->add_option("--threads", opt.threads, "worker thread cap")->check(CLI::PositiveNumber);
    sub->add_flag("-v,--verbose", opt.verbosity, "progress notes on stderr");
  };
  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const CommandOptions&, std::ostream&, std::ostream&);
  };
  const Entry entries[] = {
      {"rdr-family", "RDR of an uncertainty family on an alpha grid (CSV)", cmd_rdr_family},
      {"rdr-renewal", "RDR bounds for a renewal inter-jump law (JSON)", cmd_rdr_renewal},
      {"bound-scheduling", "robust risk-sensitive scheduling bounds on a beta grid (CSV)", cmd_bound_scheduling},
      {"bound-reneging", "robust reneging decay-rate bounds on a gamma grid (CSV)", cmd_bound_reneging},
      {"simulate", "run a simulation scenario (JSON)", cmd_simulate},
  };
  std::vector<std::pair<CLI::App*, const Entry*>> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    common(sub);
    subs.emplace_back(sub, &e);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << e.what() << '\n';
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  for (const auto& [sub, entry] : subs) {
    if (!sub->parsed()) continue;
    if (sub->count("--input")) opt.input = input;
    if (sub->count("--output")) opt.output = output;
    if (sub->count("--seed")) opt.seed = seed;
    if (sub->count("--grid-points")) opt.grid_points = grid;
    if (sub->count("--alpha-max")) opt.alpha_max = alpha_max;
    try {
      return entry->fn(opt, out, err);
    } catch (const ConfigError& e) {
      err << "error: " << e.what() << '\n';
      return kConfigError;
    } catch (const json::exception& e) {
      err << "error: " << e.what() << '\n';
      return kConfigError;
    } catch (const HypothesisError& e) {
      err << "refused: " << e.what() << '\n';
      return kUnestimable;
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << '\n';
      return kConfigError;
    }
  }
  return kConfigError;
}

}  // namespace robustq::cli
