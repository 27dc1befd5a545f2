// g2flow command line driver.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include "g2flow/commands.hpp"
#include "g2flow/errors.hpp"

namespace {

struct Flag {
  const char* name;
  const char* help;
};

// Valued flags; names mirror the flat config keys.
const Flag kValued[] = {
    {"family", "b7, d7, kmn, k11, cs, cone or ac"},
    {"m", "K_{m,n} / AC integer m"},
    {"n", "K_{m,n} / AC integer n"},
    {"r0", "singular orbit scale (> 0)"},
    {"alpha1", "b7/d7 alpha1 (auto from the constraint when omitted)"},
    {"alpha2", "b7/d7 alpha2 (defaults to alpha1)"},
    {"alpha3", "b7/d7 alpha3"},
    {"alpha", "k11 asymmetry, |alpha| < 1"},
    {"beta", "kmn/k11 beta > 0"},
    {"c", "cs or ac end parameter"},
    {"p", "override p (ac family)"},
    {"q", "override q (ac family)"},
    {"t0", "cone start time"},
    {"t1", "solve: end arc length"},
    {"t-switch", "series handoff parameter near the singular orbit"},
    {"T-switch", "series handoff arc length on the AC end"},
    {"rtol", "integrator relative tolerance"},
    {"atol", "integrator absolute tolerance"},
    {"event-tol", "event localization tolerance"},
    {"cushion", "relative chamber cushion"},
    {"t-max", "classification arc-length budget"},
    {"k", "slope of the gamma_2 curve, in (1,2)"},
    {"c-tol", "relative bracket width for c_ac"},
    {"beta-tol", "relative bracket width for beta_ac"},
    {"sweep-param", "beta, c, alpha, alpha3 or r0"},
    {"values", "comma separated sweep values"},
    {"from", "sweep range start"},
    {"to", "sweep range end"},
    {"count", "sweep range size"},
    {"threads", "sweep worker threads (0 = hardware)"},
    {"out", "output directory"},
    {"seed", "random seed for property checks"},
    {"only", "verify: comma separated criterion ids"}};
const Flag kBool[] = {{"confirm-blowup", "integrate incomplete runs to the terminal event"},
                      {"quick", "verify: fast subset"}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"g2flow: cohomogeneity-one G2 metrics, seeding, classification and shooting"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config with flat keys (default: $G2FLOW_CONFIG)");

  const std::map<std::string, std::string> help = {
      {"solve", "integrate one seed, write trajectory CSV and manifest"},
      {"classify", "classify one seed (ALC / AC / Incomplete / Indeterminate)"},
      {"sweep", "classify a ladder of seeds over one parameter"},
      {"find-ac", "locate the critical AC solution by forward and backward shooting"},
      {"figure1", "write the curve bundle around the AC solution and a gnuplot script"},
      {"verify", "run the acceptance checks"}};
  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
  std::vector<CLI::App*> subs;
  for (const auto& [name, text] : help) {
    CLI::App* sub = app.add_subcommand(name, text);
    sub->add_option("--config", config_path, "JSON config with flat keys (default: $G2FLOW_CONFIG)");
    for (const Flag& f : kValued) sub->add_option(std::string("--") + f.name, values[f.name], f.help);
    for (const Flag& f : kBool) sub->add_flag(std::string("--") + f.name, flags[f.name], f.help);
    subs.push_back(sub);
  }
  CLI11_PARSE(app, argc, argv);

  CLI::App* active = nullptr;
  for (CLI::App* s : subs)
    if (s->parsed()) active = s;

  nlohmann::json overrides = nlohmann::json::object();
  for (const Flag& f : kValued)
    if (active->count(std::string("--") + f.name) > 0) overrides[f.name] = values[f.name];
  for (const Flag& f : kBool)
    if (active->count(std::string("--") + f.name) > 0) overrides[f.name] = flags[f.name];

  g2flow::RunConfig cfg;
  try {
    if (config_path.empty())
      if (const char* env = std::getenv("G2FLOW_CONFIG")) config_path = env;
    const nlohmann::json file =
        config_path.empty() ? nlohmann::json::object() : g2flow::load_config_file(config_path);
    cfg = g2flow::merge_config(file, overrides);
  } catch (const g2flow::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return g2flow::kConfigError;
  }
  return g2flow::run_command(active->get_name(), cfg, std::cout, std::cerr);
}
