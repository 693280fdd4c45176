#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "localnews/app.hpp"
#include "localnews/metrics.hpp"
#include "localnews/service.hpp"

namespace {

localnews::AppConfig load_config(const std::string& path) {
  localnews::AppConfig config = localnews::AppConfig::load(path);
  std::cout << "config:\n" << config.to_json() << '\n';
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyperlocal news geotagging, serving and evaluation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string publishers_path;
  std::string json_out;
  std::string out_dir = "synth-out";
  std::string host = "0.0.0.0";
  std::uint64_t seed = 1;
  int port = 8080;

  auto* stamp_cmd = app.add_subcommand("stamp", "stamp the corpus with impacted geohashes");
  stamp_cmd->add_option("--config", config_path, "config file")->required();

  auto* affinity_cmd =
      app.add_subcommand("affinity", "build publisher-to-location affinity entries");
  affinity_cmd->add_option("--config", config_path, "config file")->required();
  affinity_cmd->add_option("--publishers", publishers_path,
                           "file listing strongly local publisher ids (one per line)");

  auto* serve_cmd = app.add_subcommand("serve", "run the feed HTTP service");
  serve_cmd->add_option("--config", config_path, "config file")->required();
  serve_cmd->add_option("--host", host, "bind address");
  serve_cmd->add_option("--port", port, "bind port");

  auto* eval_cmd = app.add_subcommand("eval", "replay impressions against ensemble and DMA");
  eval_cmd->add_option("--config", config_path, "config file")->required();
  eval_cmd->add_option("--json-out", json_out, "write the machine-readable report here");

  auto* synth_cmd = app.add_subcommand("synth", "generate the synthetic benchmark");
  synth_cmd->add_option("--config", config_path, "config file (optional for synth)");
  synth_cmd->add_option("--seed", seed, "generator seed")->required();
  synth_cmd->add_option("--out-dir", out_dir, "output directory")->required();

  auto* validate_cmd = app.add_subcommand("gazetteer-validate", "check the gazetteer file");
  validate_cmd->add_option("--config", config_path, "config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (stamp_cmd->parsed()) {
      localnews::run_stamp(load_config(config_path), std::cout);
    } else if (affinity_cmd->parsed()) {
      std::optional<std::string> publishers;
      if (!publishers_path.empty()) publishers = publishers_path;
      localnews::run_affinity(load_config(config_path), publishers, std::cout);
    } else if (serve_cmd->parsed()) {
      localnews::FeedService service(load_config(config_path));
      std::cout << "serving on " << host << ":" << port << '\n';
      service.run(host, port);
    } else if (eval_cmd->parsed()) {
      const localnews::EvalReport report = localnews::run_eval(load_config(config_path), std::cout);
      if (!json_out.empty()) {
        std::ofstream out(json_out);
        if (!out) throw localnews::IoError("cannot write report to " + json_out);
        out << localnews::eval_report_to_json(report) << '\n';
      }
    } else if (synth_cmd->parsed()) {
      localnews::run_synth(seed, out_dir, std::cout);
    } else if (validate_cmd->parsed()) {
      localnews::run_gazetteer_validate(load_config(config_path), std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
