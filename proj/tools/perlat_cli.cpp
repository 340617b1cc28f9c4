// Batch front end. Every subcommand assembles one JSON configuration,
// hands it to the library runner, and writes the resulting transcript.
// File handling lives here so the runners stay pure functions of their
// configuration.

#include "CLI11.hpp"
#include "perlat/harness.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>

namespace {

using perlat::json;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw perlat::config_error("cannot read " + path);
  json j;
  in >> j;
  return j;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw perlat::config_error("cannot write " + path);
  out << text;
}

// Instance files may be bare instance objects or transcripts whose
// outputs carry one.
json load_instance(const std::string& path) {
  json j = read_json_file(path);
  if (j.contains("outputs") && j["outputs"].contains("instance")) return j["outputs"]["instance"];
  if (j.contains("instance") && !j.contains("periods")) return j["instance"];
  return j;
}

std::string iso_now() {
  char buf[32];
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string out_prefix(const std::string& out) {
  const std::string suffix = ".json";
  if (out.size() > suffix.size() && out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0)
    return out.substr(0, out.size() - suffix.size());
  return out;
}

struct Cli {
  std::string config_path, out_path;
  std::string seed_s, budget_s;

  // Raw string-valued settings keyed by configuration name; CLI11
  // records presence so explicit flags override the config file.
  std::map<std::string, std::string> strings;
  std::map<std::string, long long> counts;
  std::string instance_path, in_path;
  std::vector<std::string> report_files;
};

void add_rat_opt(CLI::App* cmd, Cli& cli, const std::string& flag, const std::string& key,
                 const std::string& help) {
  cmd->add_option(flag, cli.strings[key], help);
}

void add_count_opt(CLI::App* cmd, Cli& cli, const std::string& flag, const std::string& key,
                   const std::string& help) {
  cmd->add_option(flag, cli.counts[key], help);
}

int run(int argc, char** argv) {
  CLI::App app{"period lattice toolkit: synthesize instances, plan grids, sample, recover, verify"};
  app.require_subcommand(1);
  Cli cli;

  app.add_option("--seed", cli.seed_s, "64-bit seed for all randomized draws");
  app.add_option("--budget-terms", cli.budget_s, "abort once a computation would exceed this many terms");
  app.add_option("--out", cli.out_path, "write the JSON transcript here");
  app.add_option("--config", cli.config_path, "JSON file of settings; explicit flags override it");

  CLI::App* synth = app.add_subcommand("synth", "build a synthetic cornered instance");
  add_count_opt(synth, cli, "--n", "n", "dimension");
  add_rat_opt(synth, cli, "--periods", "periods", "comma-separated periods, overrides the random draw");
  add_count_opt(synth, cli, "--period-low", "period_low", "smallest random period");
  add_count_opt(synth, cli, "--period-high", "period_high", "largest random period");
  add_count_opt(synth, cli, "--cuts", "cuts", "axis cuts per dimension");
  add_count_opt(synth, cli, "--merges", "merges", "cell merges after cutting");
  add_rat_opt(synth, cli, "--cbox", "cbox", "corner counting box side");

  CLI::App* plan_cmd = app.add_subcommand("plan", "choose grid parameters for an instance");
  plan_cmd->add_option("--instance", cli.instance_path, "instance JSON file or transcript holding one");
  add_rat_opt(plan_cmd, cli, "--mode", "mode", "desk or theorem");
  add_count_opt(plan_cmd, cli, "--n", "n", "dimension");
  add_rat_opt(plan_cmd, cli, "--A", "A", "growth bound");
  add_rat_opt(plan_cmd, cli, "--C", "C", "box constant");
  add_rat_opt(plan_cmd, cli, "--D", "D", "corner density");
  add_rat_opt(plan_cmd, cli, "--lambda1", "lambda1", "shortest period");
  add_rat_opt(plan_cmd, cli, "--det", "det", "lattice determinant");
  add_rat_opt(plan_cmd, cli, "--nu", "nu", "covering radius bound, 0 derives one");
  add_rat_opt(plan_cmd, cli, "--gamma", "gamma", "dual accuracy target");

  CLI::App* sample = app.add_subcommand("sample", "run the sampling experiment on an instance");
  sample->add_option("--instance", cli.instance_path, "instance JSON file or transcript holding one");
  add_rat_opt(sample, cli, "--N", "N", "fine evaluation resolution");
  add_rat_opt(sample, cli, "--q", "q", "phase modulus");
  add_rat_opt(sample, cli, "--L", "L", "shift grid reach");
  add_rat_opt(sample, cli, "--N0", "N0", "coarse evaluation resolution");
  add_rat_opt(sample, cli, "--kappa", "kappa", "window width fraction");
  add_rat_opt(sample, cli, "--mode", "mode", "planning mode for defaulted parameters");

  CLI::App* recover = app.add_subcommand("recover", "recover a basis from sampled estimates");
  recover->add_option("--in", cli.in_path, "sample transcript supplying estimates and bounds");
  recover->add_option("--instance", cli.instance_path, "instance JSON for a ground-truth comparison");
  add_rat_opt(recover, cli, "--eps", "eps", "certified estimate accuracy");
  add_rat_opt(recover, cli, "--dual-det", "dual_det", "determinant of the estimated lattice");
  add_rat_opt(recover, cli, "--dual-mu", "dual_mu", "first minimum bound of the estimated lattice");
  add_rat_opt(recover, cli, "--mode", "mode", "reduction mode, kz or lll");
  add_rat_opt(recover, cli, "--gamma-target", "gamma_target", "require the certified dual error below this");

  CLI::App* verify = app.add_subcommand("verify", "run one verification suite");
  add_rat_opt(verify, cli, "--mode", "mode", "part1, sampler, recovery, or shift");
  verify->add_option("--instance", cli.instance_path, "instance JSON file or transcript holding one");
  add_count_opt(verify, cli, "--n", "n", "dimension");
  add_count_opt(verify, cli, "--trials", "trials", "randomized trials");
  add_rat_opt(verify, cli, "--N", "N", "evaluation resolution override");
  add_rat_opt(verify, cli, "--q", "q", "phase modulus override");
  add_rat_opt(verify, cli, "--kappa", "kappa", "window width fraction override");
  add_rat_opt(verify, cli, "--L", "L", "shift grid reach override");

  CLI::App* report = app.add_subcommand("report", "aggregate transcripts into tables");
  report->add_option("files", cli.report_files, "transcript JSON files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 4;
  }
  CLI::App* active = app.get_subcommands().front();
  const std::string name = active->get_name();

  json cfg = cli.config_path.empty() ? json::object() : read_json_file(cli.config_path);
  if (!cfg.is_object()) throw perlat::config_error("configuration file must hold a JSON object");
  cfg["subcommand"] = name;

  if (!cli.instance_path.empty()) cfg["instance"] = load_instance(cli.instance_path);
  if (!cli.in_path.empty()) {
    json tr = read_json_file(cli.in_path);
    const json& o = tr.contains("outputs") ? tr["outputs"] : tr;
    for (const char* key : {"estimates", "eps", "dual_det", "dual_mu", "instance"})
      if (o.contains(key)) cfg[key] = o[key];
  }
  if (!cli.report_files.empty() || name == "report") {
    json ts = json::array();
    for (const std::string& f : cli.report_files) ts.push_back(read_json_file(f));
    cfg["transcripts"] = std::move(ts);
  }

  for (const auto& [key, value] : cli.strings)
    if (active->count("--" + (key == "period_low"     ? std::string("period-low")
                              : key == "period_high"  ? std::string("period-high")
                              : key == "dual_det"     ? std::string("dual-det")
                              : key == "dual_mu"      ? std::string("dual-mu")
                              : key == "gamma_target" ? std::string("gamma-target")
                              : key)) > 0) {
      if (key == "periods") {
        json arr = json::array();
        std::string item;
        std::stringstream ss(value);
        while (std::getline(ss, item, ',')) arr.push_back(item);
        cfg[key] = std::move(arr);
      } else if (key == "mode" || key == "N" || key == "q" || key == "L" || key == "N0") {
        cfg[key] = value;
      } else {
        cfg[key] = perlat::rat_to_json(perlat::rat_parse(value));
      }
    }
  for (const auto& [key, value] : cli.counts) {
    const std::string flag = key == "period_low"    ? "period-low"
                             : key == "period_high" ? "period-high"
                                                    : key;
    if (active->count("--" + flag) > 0) cfg[key] = value;
  }
  if (app.count("--seed") > 0) cfg["seed"] = std::stoull(cli.seed_s);
  if (app.count("--budget-terms") > 0) cfg["budget_terms"] = cli.budget_s;

  perlat::Transcript t = perlat::run_experiment(cfg);
  t.metadata["created"] = iso_now();

  if (!cli.out_path.empty())
    write_text_file(cli.out_path, t.to_json().dump(2) + "\n");

  if (name == "plan") {
    const json& pj = t.outputs["parameters"];
    std::cout << "mode " << t.outputs["mode"].get<std::string>() << "\n";
    for (const char* key : {"N", "N0", "q", "L"})
      std::cout << key << " " << pj[key].get<std::string>() << "\n";
    for (const char* key : {"kappa", "eps_sample", "f_precision", "window_width", "window_target"})
      std::cout << key << " " << perlat::rat_str(perlat::rat_from_json(pj[key])) << "\n";
    for (const perlat::Check& c : t.checks)
      std::cout << c.name << ": " << (c.pass ? "holds" : "violated") << "\n";
  } else if (name == "report") {
    std::vector<perlat::Transcript> ts;
    for (const auto& j : cfg["transcripts"]) ts.push_back(perlat::Transcript::from_json(j));
    const std::string md = perlat::report_markdown(ts);
    std::cout << md;
    if (!cli.out_path.empty()) {
      const std::string prefix = out_prefix(cli.out_path);
      write_text_file(prefix + ".csv", perlat::report_csv(ts));
      write_text_file(prefix + ".md", md);
    }
  } else {
    std::cout << perlat::checks_csv(t.checks);
  }
  return t.all_pass() ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const perlat::budget_error& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const perlat::check_error& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 2;
  } catch (const perlat::config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 4;
  } catch (const json::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
