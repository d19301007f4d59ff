#include "cli/config.hpp"

#include <fstream>
#include <sstream>

namespace robustq::cli {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string kind_of(const json& j) {
  const json& k = field(j, "kind");
  if (!k.is_string()) throw ConfigError("'kind' must be a string");
  return k.get<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open input file: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.is_object() && j.contains(key) ? number(j, key) : fallback;
}

std::vector<double> numbers(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array()) throw ConfigError(std::string("field '") + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(std::string("field '") + key + "' must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

UncertaintyFamily parse_family(const json& j) {
  const std::string k = kind_of(j);
  UncertaintyFamily f;
  if (k == "Q1") {
    f = FamilyQ1{number(j, "u"), number(j, "alpha")};
  } else if (k == "Q2") {
    f = FamilyQ2{number(j, "a"), number(j, "b")};
  } else if (k == "Q3") {
    f = FamilyQ3{number(j, "a"), number(j, "b")};
  } else if (k == "Q4") {
    f = FamilyQ4{number(j, "alpha0"), number(j, "u")};
  } else {
    throw ConfigError("unknown family kind '" + k + "' (expected Q1, Q2, Q3 or Q4)");
  }
  try {
    validate(f);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return f;
}

RenewalSpec parse_renewal(const json& j, const std::filesystem::path& base_dir) {
  const std::string k = kind_of(j);
  try {
    if (k == "exponential") return RenewalSpec::exponential(number(j, "rate"));
    if (k == "gamma") return RenewalSpec::gamma(number(j, "shape"), number(j, "rate"));
    if (k == "phase_type") return RenewalSpec::phase_type(numbers(j, "weights"), numbers(j, "rates"));
    if (k == "tabulated") return RenewalSpec::tabulated(numbers(j, "x"), numbers(j, "g"));
    if (k == "csv") {
      const json& p = field(j, "path");
      if (!p.is_string()) throw ConfigError("'path' must be a string");
      const auto path = resolve(base_dir, p.get<std::string>());
      if (!std::filesystem::exists(path)) throw ConfigError("density file not found: " + path.string());
      return RenewalSpec::from_csv(path);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("renewal law: ") + e.what());
  }
  throw ConfigError("unknown renewal kind '" + k + "' (expected exponential, gamma, phase_type, tabulated or csv)");
}

sim::PrimitiveProcessSpec parse_process(const json& j, const std::filesystem::path& base_dir) {
  const std::string k = kind_of(j);
  sim::PrimitiveProcessSpec s;
  if (k == "poisson") {
    s = sim::PoissonProcess{number(j, "rate")};
  } else if (k == "renewal") {
    s = sim::RenewalProcess{parse_renewal(field(j, "law"), base_dir)};
  } else if (k == "cox") {
    sim::CoxPiecewise c;
    c.breaks = numbers(j, "breaks");
    c.levels = numbers(j, "levels");
    c.period = number_or(j, "period", 0.0);
    c.lower = number(j, "lower");
    c.upper = number(j, "upper");
    s = c;
  } else if (k == "cox_two_level") {
    try {
      s = sim::CoxPiecewise::two_level(number(j, "lambda0"), number(j, "a"), number(j, "b"), number_or(j, "period", 1.0));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (k == "lattice") {
    s = sim::LatticeProcess{number(j, "period"), number_or(j, "offset", number(j, "period"))};
  } else if (k == "fixed") {
    s = sim::FixedPoints{numbers(j, "times")};
  } else {
    throw ConfigError("unknown process kind '" + k + "' (expected poisson, renewal, cox, cox_two_level, lattice or fixed)");
  }
  try {
    sim::validate(s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

sim::PatienceSpec parse_patience(const json& j, const std::filesystem::path& base_dir) {
  sim::PatienceSpec p;
  const std::string k = kind_of(j);
  if (k == "infinite") return p;
  if (k == "constant") {
    p.constant = number(j, "value");
    if (!(p.constant > 0.0)) throw ConfigError("constant patience must be > 0");
    return p;
  }
  p.law = parse_renewal(j, base_dir);
  return p;
}

GammaBox parse_gamma_box(const json& j) {
  GammaBox b;
  const auto k = numbers(j, "k");
  const auto rho = numbers(j, "rho");
  if (k.size() != 2 || rho.size() != 2) throw ConfigError("Gamma box needs k: [lo, hi] and rho: [lo, hi]");
  b = GammaBox{k[0], k[1], rho[0], rho[1]};
  try {
    b.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return b;
}

SchedulingInstance parse_scheduling_instance(const json& j) {
  SchedulingInstance inst;
  if (j.contains("preset")) {
    const json& p = j.at("preset");
    if (!p.is_string()) throw ConfigError("'preset' must be a string");
    inst = scheduling_preset(p.get<std::string>());
  } else {
    inst.arrival_rates = numbers(j, "arrival_rates");
    inst.service_rates = numbers(j, "service_rates");
    inst.costs = numbers(j, "costs");
    inst.horizon = number_or(j, "horizon", 1.0);
  }
  try {
    inst.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return inst;
}

SchedulingInstance scheduling_preset(const std::string& name) {
  SchedulingInstance inst;
  inst.service_rates = {8, 10, 12, 9, 14};
  inst.costs = {0.3, 0.2, 0.2, 0.1, 0.2};
  inst.horizon = 1.0;
  if (name == "left") {
    inst.arrival_rates = {1, 1.5, 1.8, 2, 2};
  } else if (name == "right") {
    inst.arrival_rates = {0.5, 0.75, 0.9, 1, 1};
  } else {
    throw ConfigError("unknown scheduling preset '" + name + "' (expected left or right)");
  }
  return inst;
}

}  // namespace robustq::cli
