#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "comprec/cli.hpp"

namespace {

using nlohmann::json;

comprec::SweepConfig default_sweep() {
  comprec::SweepConfig cfg;
  cfg.slice_counts = {2, 10, 30, 100};
  cfg.alpha_grid = {0.0, 1.5, 16};
  return cfg;
}

comprec::SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config file '" + path + "' not readable");
  const json j = json::parse(in);
  if (!j.is_object()) throw std::invalid_argument("config file: expected a JSON object");
  static const std::set<std::string> known = {"alphabet",    "channel", "slice_counts",
                                             "alpha_min",   "alpha_max", "alpha_steps",
                                             "priors",      "output",  "format"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key))
      throw std::invalid_argument("config file: unknown key '" + key + "'");

  comprec::SweepConfig cfg = default_sweep();
  if (j.contains("alphabet")) cfg.alphabet = comprec::alphabet_from_string(j["alphabet"]);
  if (j.contains("channel")) cfg.channel = comprec::channel_from_string(j["channel"]);
  if (j.contains("slice_counts")) cfg.slice_counts = j["slice_counts"].get<std::vector<int>>();
  if (j.contains("alpha_min")) cfg.alpha_grid.min = j["alpha_min"].get<double>();
  if (j.contains("alpha_max")) cfg.alpha_grid.max = j["alpha_max"].get<double>();
  if (j.contains("alpha_steps")) cfg.alpha_grid.steps = j["alpha_steps"].get<int>();
  if (j.contains("priors")) cfg.priors = j["priors"].get<std::vector<double>>();
  if (j.contains("output")) cfg.output = j["output"].get<std::string>();
  if (j.contains("format")) cfg.format = j["format"].get<std::string>();
  return cfg;
}

void with_output(const std::string& path, const std::function<void(std::ostream&)>& emit) {
  if (path.empty()) {
    emit(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("output file '" + path + "' not writable");
  emit(out);
}

void check_report_format(const std::string& fmt) {
  if (fmt != "text" && fmt != "jsonl")
    throw std::invalid_argument("format: must be text or jsonl");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slice-and-compress receiver simulator"};
  app.require_subcommand(1);

  auto* sweep = app.add_subcommand("sweep", "error probabilities over an amplitude grid");
  std::string sw_alphabet, sw_channel, sw_output, sw_format, sw_config;
  std::vector<int> sw_ns;
  std::vector<double> sw_priors;
  double sw_amin = 0, sw_amax = 0;
  int sw_asteps = 0;
  sweep->add_option("--alphabet", sw_alphabet, "bpsk | 3ask | multimode");
  sweep->add_option("--channel", sw_channel, "exact-pure | ideal-swap | stirap");
  sweep->add_option("--n", sw_ns, "slice counts")->delimiter(',');
  sweep->add_option("--alpha-min", sw_amin, "grid start");
  sweep->add_option("--alpha-max", sw_amax, "grid end");
  sweep->add_option("--alpha-steps", sw_asteps, "number of grid points");
  sweep->add_option("--priors", sw_priors, "hypothesis priors")->delimiter(',');
  sweep->add_option("--output", sw_output, "output path (default stdout)");
  sweep->add_option("--format", sw_format, "csv | jsonl");
  sweep->add_option("--config", sw_config, "JSON config file; flags override its values");

  auto* gram = app.add_subcommand("gram", "coherent vs compressed Gram matrices");
  std::string gr_alphabet = "bpsk", gr_output, gr_format = "text";
  double gr_alpha = 0;
  int gr_n = 0;
  gram->add_option("--alphabet", gr_alphabet, "bpsk | 3ask | multimode");
  gram->add_option("--alpha", gr_alpha, "amplitude")->required();
  gram->add_option("--n", gr_n, "slice count")->required();
  gram->add_option("--output", gr_output, "output path (default stdout)");
  gram->add_option("--format", gr_format, "text | jsonl");

  auto* run = app.add_subcommand("run", "single receiver run with diagnostics");
  std::string rn_alphabet = "bpsk", rn_channel = "exact-pure", rn_output, rn_format = "text";
  double rn_alpha = 0;
  int rn_n = 0;
  run->add_option("--alphabet", rn_alphabet, "bpsk | 3ask | multimode");
  run->add_option("--channel", rn_channel, "exact-pure | ideal-swap | stirap");
  run->add_option("--alpha", rn_alpha, "amplitude")->required();
  run->add_option("--n", rn_n, "slice count")->required();
  run->add_option("--output", rn_output, "output path (default stdout)");
  run->add_option("--format", rn_format, "text | jsonl");

  auto* mm = app.add_subcommand("multimode", "three-codeword demo over four binary modes");
  std::string mm_channel = "exact-pure", mm_output, mm_format = "text";
  double mm_alpha = 0;
  int mm_n = 0;
  mm->add_option("--channel", mm_channel, "exact-pure | ideal-swap | stirap");
  mm->add_option("--alpha", mm_alpha, "per-mode amplitude")->required();
  mm->add_option("--n", mm_n, "slice count")->required();
  mm->add_option("--output", mm_output, "output path (default stdout)");
  mm->add_option("--format", mm_format, "text | jsonl");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sweep->parsed()) {
      comprec::SweepConfig cfg =
          sw_config.empty() ? default_sweep() : load_sweep_config(sw_config);
      if (sweep->count("--alphabet")) cfg.alphabet = comprec::alphabet_from_string(sw_alphabet);
      if (sweep->count("--channel")) cfg.channel = comprec::channel_from_string(sw_channel);
      if (sweep->count("--n")) cfg.slice_counts = sw_ns;
      if (sweep->count("--alpha-min")) cfg.alpha_grid.min = sw_amin;
      if (sweep->count("--alpha-max")) cfg.alpha_grid.max = sw_amax;
      if (sweep->count("--alpha-steps")) cfg.alpha_grid.steps = sw_asteps;
      if (sweep->count("--priors")) cfg.priors = sw_priors;
      if (sweep->count("--output")) cfg.output = sw_output;
      if (sweep->count("--format")) cfg.format = sw_format;
      cfg.validate();
      const std::vector<comprec::SweepRow> rows = comprec::run_sweep(cfg);
      with_output(cfg.output, [&](std::ostream& os) {
        if (cfg.format == "jsonl")
          comprec::write_sweep_jsonl(os, rows);
        else
          comprec::write_sweep_csv(os, rows);
      });
    } else if (gram->parsed()) {
      check_report_format(gr_format);
      const comprec::GramReport rep =
          comprec::run_gram(comprec::alphabet_from_string(gr_alphabet), gr_alpha, gr_n);
      with_output(gr_output, [&](std::ostream& os) {
        if (gr_format == "jsonl")
          comprec::write_gram_jsonl(os, rep);
        else
          comprec::write_gram_text(os, rep);
      });
    } else if (run->parsed()) {
      check_report_format(rn_format);
      const comprec::RunReport rep =
          comprec::run_single(comprec::alphabet_from_string(rn_alphabet), rn_alpha, rn_n,
                              comprec::channel_from_string(rn_channel));
      with_output(rn_output, [&](std::ostream& os) {
        if (rn_format == "jsonl")
          comprec::write_run_jsonl(os, rep);
        else
          comprec::write_run_text(os, rep);
      });
    } else if (mm->parsed()) {
      check_report_format(mm_format);
      const comprec::MultimodeReport rep =
          comprec::run_multimode(mm_alpha, mm_n, comprec::channel_from_string(mm_channel));
      with_output(mm_output, [&](std::ostream& os) {
        if (mm_format == "jsonl")
          comprec::write_multimode_jsonl(os, rep);
        else
          comprec::write_multimode_text(os, rep);
      });
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
