// splinelab: run, replay, sweep and plot-data front end for the experiment harness.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "splinelab.hpp"

namespace fs = std::filesystem;
namespace ex = splinelab::experiment;

namespace {

enum Exit { ok = 0, invariant_failure = 1, usage_error = 2 };

std::string default_out() {
  const char* env = std::getenv("SPLINELAB_OUT");
  return env && *env ? env : "out";
}

int finish(const ex::Report& rep, const std::string& out_dir, bool strict) {
  fs::create_directories(out_dir);
  const auto base = (fs::path(out_dir) / rep.name).string();
  ex::write_text(base + ".csv", rep.csv());
  ex::write_text(base + ".json", rep.to_json().dump(1) + "\n");
  std::size_t failed = 0, warned = 0;
  for (const auto& r : rep.rows) {
    failed += !r.hard_ok();
    warned += !r.warnings.empty();
  }
  std::cout << rep.rows.size() << " rows -> " << base << ".{csv,json}";
  if (failed) std::cout << ", " << failed << " with invariant failures";
  if (warned) std::cout << ", " << warned << " with warnings";
  std::cout << '\n';
  if (failed || (strict && warned)) return invariant_failure;
  return ok;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spline basis, Gram matrix and projector experiments"};
  app.require_subcommand(1);

  std::string out_dir = default_out();
  unsigned threads = 1;
  std::optional<std::uint64_t> seed_override;
  bool strict = false;
  app.add_option("--out", out_dir, "Output directory (default: $SPLINELAB_OUT or ./out)");
  app.add_option("--threads", threads, "Worker threads, 0 = auto")->capture_default_str();
  app.add_option("--seed-override", seed_override, "Replace the base seed of random partitions");
  app.add_flag("--strict", strict, "Treat invariant warnings as failures");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run every cell of a config");
  run->add_option("config", config_path, "Config JSON")->required()->check(CLI::ExistingFile);

  std::string report_path;
  std::size_t row_index = 0;
  auto* replay = app.add_subcommand("replay", "Re-run one report row and compare it bitwise");
  replay->add_option("report", report_path, "Report JSON")->required()->check(CLI::ExistingFile);
  replay->add_option("--row", row_index, "Row index")->required();

  std::string template_path;
  auto* sweep = app.add_subcommand("sweep", "Expand a config template over its \"grid\" and run all cells");
  sweep->add_option("template", template_path, "Template JSON with a \"grid\" object")
      ->required()
      ->check(CLI::ExistingFile);

  std::string plot_report, x_col = "mesh_mu", y_col = "op_norm", group_col, plot_out;
  auto* plot = app.add_subcommand("plotdata", "Emit x/y series from a report as CSV");
  plot->add_option("report", plot_report, "Report JSON")->required()->check(CLI::ExistingFile);
  plot->add_option("--x", x_col, "X column")->capture_default_str();
  plot->add_option("--y", y_col, "Y column")->capture_default_str();
  plot->add_option("--group", group_col, "Column that splits series");
  plot->add_option("--file", plot_out, "Write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? ok : usage_error;
  }

  try {
    if (*run) {
      const auto config = ex::read_json(config_path);
      const auto name = config.value("name", fs::path(config_path).stem().string());
      return finish(ex::run(config, name, threads, seed_override), out_dir, strict);
    }
    if (*sweep) {
      const auto tmpl = ex::read_json(template_path);
      const auto name = tmpl.value("name", fs::path(template_path).stem().string());
      return finish(ex::sweep(tmpl, name, threads, seed_override), out_dir, strict);
    }
    if (*replay) {
      const auto report = ex::read_json(report_path);
      const auto& rows = report.at("rows");
      if (row_index >= rows.size()) {
        std::cerr << "error: report has " << rows.size() << " rows\n";
        return usage_error;
      }
      const auto r = ex::replay(rows.at(row_index));
      if (!r.mismatches.empty()) {
        std::cerr << "replay mismatch in:";
        for (const auto& m : r.mismatches) std::cerr << ' ' << m;
        std::cerr << '\n';
        return invariant_failure;
      }
      std::cout << "row " << row_index << " (" << r.row.config_hash << ") replayed identically\n";
      return r.row.hard_ok() ? ok : invariant_failure;
    }
    if (*plot) {
      const auto text = ex::plot_data(ex::read_json(plot_report), x_col, y_col, group_col);
      if (plot_out.empty()) std::cout << text;
      else ex::write_text(plot_out, text);
      return ok;
    }
  } catch (const ex::HashMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return invariant_failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage_error;
  }
  return usage_error;
}
