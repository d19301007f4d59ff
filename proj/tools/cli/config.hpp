#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "robustq/families.hpp"
#include "robustq/renewal.hpp"
#include "robustq/reneging.hpp"
#include "robustq/scheduling.hpp"
#include "robustq/sim/point_process.hpp"
#include "robustq/sim/reneging_sim.hpp"

namespace robustq::cli {

using nlohmann::json;

// Bad input: unreadable file, malformed JSON, or invalid parameters. Maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json load_json(const std::filesystem::path& path);

// Field access that reports the offending key.
double number(const json& j, const char* key);
double number_or(const json& j, const char* key, double fallback);
std::vector<double> numbers(const json& j, const char* key);

UncertaintyFamily parse_family(const json& j);
RenewalSpec parse_renewal(const json& j, const std::filesystem::path& base_dir = {});
sim::PrimitiveProcessSpec parse_process(const json& j, const std::filesystem::path& base_dir = {});
sim::PatienceSpec parse_patience(const json& j, const std::filesystem::path& base_dir = {});
GammaBox parse_gamma_box(const json& j);
SchedulingInstance parse_scheduling_instance(const json& j);

// The two five-class instances of the scheduling example (lambda scaled by 1 and by 1/2).
SchedulingInstance scheduling_preset(const std::string& name);

}  // namespace robustq::cli
