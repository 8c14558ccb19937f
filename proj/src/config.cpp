#include "jcasbeam/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <stdexcept>

namespace jcasbeam {

using nlohmann::json;

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
  if (elements < 2) fail("elements must be at least 2");
  if (fixed_beam_elements < 1 || fixed_beam_elements > elements) fail("fixed beam width out of range");
  if (scan_beam_elements < 1 || scan_beam_elements > elements) fail("scan beam width out of range");
  if (paths < 1) fail("paths must be positive");
  if (!(rho > 0.0 && rho < 1.0)) fail("rho must lie in (0, 1)");
  if (gain_ratio < 0.0 || gain_ratio > 1.0) fail("gain ratio outside [0, 1]");
  if (scan_power_ratio < 0.0 || scan_power_ratio > 1.0) fail("scan power ratio outside [0, 1]");
  if (rx_power_ratio < 0.0 || rx_power_ratio > 1.0) fail("rx power ratio outside [0, 1]");
  if (global_iterations < 1) fail("global iterations must be positive");
  if (bounds_scale < 0.5 || bounds_scale > 1.0) fail("bounds scale outside [0.5, 1]");
  if (integration_steps < 1) fail("integration steps must be positive");
  if (integration_range_deg <= 0.0) fail("integration range must be positive");
  if (grid_points < 2) fail("grid needs at least two points");
  if (ils_iterations < 1) fail("ils iterations must be positive");
  if (trials < 1) fail("trials must be at least 1");
  if (scan_directions_deg.empty()) fail("need at least one scanning direction");
  if (threads < 0) fail("threads must be nonnegative");
  const std::set<std::string> combiner_known{"m1-ref", "unconstrained", "p1", "p2", "p3", "p4"};
  for (const auto& m : combiner_methods) {
    if (!combiner_known.count(m)) fail("unknown combiner method '" + m + "'");
  }
  const std::set<std::string> global_known{"p5", "p6", "p7", "p8"};
  for (const auto& m : global_methods) {
    if (!global_known.count(m)) fail("unknown global method '" + m + "'");
  }
}

namespace {

json to_json(const ExperimentConfig& c) {
  return json{
      {"array",
       {{"elements", c.elements},
        {"fixed_beam_elements", c.fixed_beam_elements},
        {"scan_beam_elements", c.scan_beam_elements}}},
      {"channel",
       {{"paths", c.paths},
        {"los_nlos_ratio_db", c.los_nlos_ratio_db},
        {"angular_spread_deg", c.angular_spread_deg},
        {"los_direction_deg", c.los_direction_deg}}},
      {"combiner",
       {{"rho", c.rho},
        {"methods", c.combiner_methods},
        {"gain_ratio", c.gain_ratio},
        {"scan_power_ratio", c.scan_power_ratio},
        {"rx_power_ratio", c.rx_power_ratio}}},
      {"global",
       {{"methods", c.global_methods},
        {"iterations", c.global_iterations},
        {"bounds_scale", c.bounds_scale}}},
      {"scan_directions_deg", c.scan_directions_deg},
      {"sweep_direction_deg", c.sweep_direction_deg},
      {"paths_direction_deg", c.paths_direction_deg},
      {"pattern_direction_deg", c.pattern_direction_deg},
      {"integration", {{"steps", c.integration_steps}, {"range_deg", c.integration_range_deg}}},
      {"synthesis", {{"grid_points", c.grid_points}, {"ils_iterations", c.ils_iterations}}},
      {"trials", c.trials},
      {"seed", c.seed},
      {"threads", c.threads},
  };
}

void check_known_keys(const json& j, const json& reference, const std::string& prefix) {
  for (const auto& [key, value] : j.items()) {
    if (!reference.contains(key)) {
      throw std::invalid_argument("config: unknown key '" + prefix + key + "'");
    }
    if (value.is_object() && reference.at(key).is_object()) {
      check_known_keys(value, reference.at(key), prefix + key + ".");
    }
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig c;
  check_known_keys(j, to_json(c), "");

  if (j.contains("array")) {
    const auto& a = j["array"];
    c.elements = a.value("elements", c.elements);
    c.fixed_beam_elements = a.value("fixed_beam_elements", c.fixed_beam_elements);
    c.scan_beam_elements = a.value("scan_beam_elements", c.scan_beam_elements);
  }
  if (j.contains("channel")) {
    const auto& ch = j["channel"];
    c.paths = ch.value("paths", c.paths);
    c.los_nlos_ratio_db = ch.value("los_nlos_ratio_db", c.los_nlos_ratio_db);
    c.angular_spread_deg = ch.value("angular_spread_deg", c.angular_spread_deg);
    c.los_direction_deg = ch.value("los_direction_deg", c.los_direction_deg);
  }
  if (j.contains("combiner")) {
    const auto& co = j["combiner"];
    c.rho = co.value("rho", c.rho);
    c.combiner_methods = co.value("methods", c.combiner_methods);
    c.gain_ratio = co.value("gain_ratio", c.gain_ratio);
    c.scan_power_ratio = co.value("scan_power_ratio", c.scan_power_ratio);
    c.rx_power_ratio = co.value("rx_power_ratio", c.rx_power_ratio);
  }
  if (j.contains("global")) {
    const auto& g = j["global"];
    c.global_methods = g.value("methods", c.global_methods);
    c.global_iterations = g.value("iterations", c.global_iterations);
    c.bounds_scale = g.value("bounds_scale", c.bounds_scale);
  }
  c.scan_directions_deg = j.value("scan_directions_deg", c.scan_directions_deg);
  c.sweep_direction_deg = j.value("sweep_direction_deg", c.sweep_direction_deg);
  c.paths_direction_deg = j.value("paths_direction_deg", c.paths_direction_deg);
  c.pattern_direction_deg = j.value("pattern_direction_deg", c.pattern_direction_deg);
  if (j.contains("integration")) {
    const auto& i = j["integration"];
    c.integration_steps = i.value("steps", c.integration_steps);
    c.integration_range_deg = i.value("range_deg", c.integration_range_deg);
  }
  if (j.contains("synthesis")) {
    const auto& s = j["synthesis"];
    c.grid_points = s.value("grid_points", c.grid_points);
    c.ils_iterations = s.value("ils_iterations", c.ils_iterations);
  }
  c.trials = j.value("trials", c.trials);
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string ExperimentConfig::to_json_text() const { return to_json(*this).dump(2); }

std::uint64_t ExperimentConfig::hash() const {
  ExperimentConfig canonical = *this;
  canonical.threads = 0;  // parallelism degree must not affect outputs
  const std::string dump = to_json(canonical).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace jcasbeam
