// Copyright 2026 The mobo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: run, sweep, plot, hv, problems.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mobo/harness.h"
#include "mobo/pareto.h"
#include "mobo/problems.h"
#include "mobo/serialization.h"
#include "mobo/svg_plot.h"

namespace {

namespace fs = std::filesystem;
using namespace mobo;

struct ExperimentFlags {
  std::string problem = "branin_currin";
  std::string method = "qehvi";
  std::string mode = "joint";
  harness::ExperimentConfig config;
};

void add_experiment_flags(CLI::App* app, ExperimentFlags& f, bool with_method) {
  app->add_option("--problem", f.problem, "problem name (see `mobo problems`)")->capture_default_str();
  if (with_method) {
    app->add_option("--method", f.method, "qehvi, qparego or sobol")->capture_default_str();
  }
  app->add_option("--q", f.config.q, "batch size")->capture_default_str();
  app->add_option("--budget", f.config.budget, "total evaluations including the initial design")
      ->capture_default_str();
  app->add_option("--mc-samples", f.config.mc_samples, "QMC samples per acquisition")
      ->capture_default_str();
  app->add_option("--zeta", f.config.zeta, "approximate decomposition tolerance")->capture_default_str();
  app->add_option("--mode", f.mode, "joint or sequential-greedy")->capture_default_str();
  app->add_flag("--infer-ref", f.config.infer_ref, "use the nadir heuristic reference point");
  app->add_option("--noise", f.config.noise, "noise sd as a fraction of each objective range")
      ->capture_default_str();
  app->add_option("--restarts", f.config.opt.restarts, "optimizer restarts")->capture_default_str();
  app->add_option("--raw-samples", f.config.opt.raw_samples, "raw samples for initial conditions")
      ->capture_default_str();
}

harness::ExperimentConfig resolve(const ExperimentFlags& f) {
  harness::ExperimentConfig c = f.config;
  c.problem = f.problem;
  c.method = harness::parse_method(f.method);
  c.mode = harness::parse_mode(f.mode);
  return c;
}

std::string trial_name(const harness::ExperimentConfig& c) {
  return c.problem + "_" + std::string(harness::to_string(c.method)) + "_q" + std::to_string(c.q) +
         "_seed" + std::to_string(c.seed) + ".json";
}

void write_outputs(const fs::path& out, const std::vector<harness::BoTrace>& traces) {
  for (const auto& t : traces) io::write_file(out / trial_name(t.config), io::to_json(t).dump(1) + "\n");
  io::write_file(out / "results.csv", io::results_csv(traces));
}

void print_summary(const harness::BoTrace& t) {
  const auto& last = t.records.back();
  std::printf("%-26s %-8s q=%zu seed=%llu evals=%zu hv=%.6g log_hv_diff=%.4f\n",
              t.config.problem.c_str(), std::string(harness::to_string(t.config.method)).c_str(),
              t.config.q, static_cast<unsigned long long>(t.config.seed), last.evaluations, last.hv,
              last.log_hv_diff);
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-objective Bayesian optimization benchmarks"};
  app.require_subcommand(1);

  ExperimentFlags run_flags;
  std::string run_out = "results";
  auto* run = app.add_subcommand("run", "run one trial");
  add_experiment_flags(run, run_flags, true);
  run->add_option("--seed", run_flags.config.seed, "trial seed")->capture_default_str();
  run->add_option("--out", run_out, "output directory")->capture_default_str();

  ExperimentFlags sweep_flags;
  std::vector<std::string> sweep_methods{"qehvi", "qparego", "sobol"};
  std::size_t sweep_trials = 20;
  std::uint64_t first_seed = 0;
  std::string sweep_out = "results";
  auto* sweep = app.add_subcommand("sweep", "run a seed x method grid");
  add_experiment_flags(sweep, sweep_flags, false);
  sweep->add_option("--methods", sweep_methods, "methods to compare")->delimiter(',');
  sweep->add_option("--trials", sweep_trials, "seeds per method")->capture_default_str();
  sweep->add_option("--seed", first_seed, "first seed")->capture_default_str();
  sweep->add_option("--out", sweep_out, "output directory")->capture_default_str();

  std::string plot_in, plot_out = "plot.svg", plot_axis = "evaluations", plot_metric = "log_hv_diff";
  std::string plot_title;
  auto* plot = app.add_subcommand("plot", "plot median +/- 2 SE across seeds from results.csv");
  plot->add_option("--results", plot_in, "aggregated results CSV")->required();
  plot->add_option("--out", plot_out, "SVG file")->capture_default_str();
  plot->add_option("--x-axis", plot_axis, "evaluations or iterations")->capture_default_str();
  plot->add_option("--metric", plot_metric, "log_hv_diff or hv")->capture_default_str();
  plot->add_option("--title", plot_title, "plot title");

  std::string hv_front, hv_candidates, hv_decomp_out;
  std::vector<double> hv_ref;
  bool hv_infer = false;
  double hv_zeta = 0.0;
  auto* hv = app.add_subcommand("hv", "hypervolume, HVI and box decomposition of CSV point sets");
  hv->add_option("--front", hv_front, "CSV of observed points (maximization)")->required();
  hv->add_option("--ref", hv_ref, "reference point, comma separated")->delimiter(',');
  hv->add_flag("--infer-ref", hv_infer, "reference point from the nadir heuristic");
  hv->add_option("--candidates", hv_candidates, "CSV of new points; prints their joint HVI");
  hv->add_option("--zeta", hv_zeta, "approximate decomposition tolerance")->capture_default_str();
  hv->add_option("--decomposition", hv_decomp_out, "write the box decomposition as JSON");

  auto* list = app.add_subcommand("problems", "list registered problems");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const harness::BoTrace t = harness::run_bo(resolve(run_flags));
      write_outputs(run_out, {t});
      print_summary(t);
    } else if (sweep->parsed()) {
      harness::SweepConfig s;
      s.base = resolve(sweep_flags);
      for (const auto& m : sweep_methods) s.methods.push_back(harness::parse_method(m));
      for (std::size_t i = 0; i < sweep_trials; ++i) s.seeds.push_back(first_seed + i);
      const auto traces = harness::sweep(s);
      write_outputs(sweep_out, traces);
      for (const auto& t : traces) print_summary(t);
    } else if (plot->parsed()) {
      const auto rows = io::parse_results_csv(io::read_file(plot_in));
      const auto axis = plot_axis == "iterations" ? plot::XAxis::kIteration : plot::XAxis::kEvaluations;
      const auto metric = plot_metric == "hv" ? plot::Metric::kHv : plot::Metric::kLogHvDiff;
      plot::PlotOptions o;
      o.title = plot_title;
      o.x_label = axis == plot::XAxis::kIteration ? "BO iterations" : "function evaluations";
      o.y_label = metric == plot::Metric::kHv ? "hypervolume" : "log10 HV difference";
      io::write_file(plot_out, plot::render_svg(plot::summarize(rows, axis, metric), o));
    } else if (hv->parsed()) {
      const Matrix points = io::parse_points_csv(io::read_file(hv_front));
      Vector ref;
      if (hv_infer) {
        ref = pareto::infer_reference_point(points);
      } else if (!hv_ref.empty()) {
        ref = to_vector(hv_ref);
      } else {
        std::cerr << "hv: give --ref or --infer-ref\n";
        return 2;
      }
      const pareto::ParetoFront front = points.rows() > 0 ? pareto::ParetoFront(points, ref)
                                                          : pareto::ParetoFront(ref);
      const pareto::BoxDecomposition decomp = pareto::box_decompose(front, hv_zeta);
      std::printf("front_points %zu\nhypervolume %.17g\nboxes %zu\n", front.size(),
                  pareto::hypervolume(front), decomp.size());
      if (!hv_candidates.empty()) {
        const Matrix Y = io::parse_points_csv(io::read_file(hv_candidates));
        std::printf("hvi %.17g\n", pareto::hvi_inclusion_exclusion(Y, decomp));
      }
      if (!hv_decomp_out.empty()) io::write_file(hv_decomp_out, io::to_json(decomp).dump(1) + "\n");
    } else if (list->parsed()) {
      for (const auto& name : problems::problem_names()) {
        const problems::ProblemSpec p = problems::make_problem(name);
        std::printf("%-26s d=%-3zu M=%zu V=%zu\n", name.c_str(), p.d, p.M, p.V);
      }
    }
  } catch (const mobo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
