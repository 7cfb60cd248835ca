// Copyright 2026 The trimest Authors
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

// trimest command-line front end. Settings resolve as command-line flags over
// config-file keys over built-in defaults; every run records the resolved set
// in its manifest.
//
// Exit status: 0 success, 2 usage or input error, 3 numerical failure.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "trimest/trimest.h"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

using Settings = std::map<std::string, std::string>;

class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

[[noreturn]] void usage_error(const std::string& msg) { throw CliError(kExitUsage, msg); }

int exit_code_for(trimest_status s) {
  switch (s) {
    case TRIMEST_OK: return kExitOk;
    case TRIMEST_ERR_NOT_PD:
    case TRIMEST_ERR_LINE_SEARCH:
    case TRIMEST_ERR_INTERNAL: return kExitNumeric;
    default: return kExitUsage;
  }
}

void check(trimest_status s) {
  if (s != TRIMEST_OK) throw CliError(exit_code_for(s), trimest_last_error());
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using DatasetPtr = std::unique_ptr<trimest_dataset, Deleter<trimest_dataset, trimest_dataset_free>>;
using SpecPtr = std::unique_ptr<trimest_spec, Deleter<trimest_spec, trimest_spec_free>>;
using FitPtr = std::unique_ptr<trimest_fit, Deleter<trimest_fit, trimest_fit_free>>;
using CvPtr = std::unique_ptr<trimest_cv, Deleter<trimest_cv, trimest_cv_free>>;
using ExperimentPtr = std::unique_ptr<trimest_experiment, Deleter<trimest_experiment, trimest_experiment_free>>;
using ReportPtr = std::unique_ptr<trimest_report, Deleter<trimest_report, trimest_report_free>>;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

Settings read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) usage_error("cannot open config '" + path + "'");
  Settings out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty())
      usage_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Defaults

const std::vector<std::string> kSolverKeys = {"max_iter",     "tol_rel_obj",         "tol_grad_map",
                                              "ls_shrink",    "ls_init_step",        "weight_stable_iters",
                                              "rho",          "solver"};

void add_solver_defaults(Settings& d) {
  d["max_iter"] = "10000";
  d["tol_rel_obj"] = "1e-10";
  d["tol_grad_map"] = "1e-7";
  d["ls_shrink"] = "0.5";
  d["ls_init_step"] = "1";
  d["weight_stable_iters"] = "5";
  d["rho"] = "inf";
  d["solver"] = "partial";
  for (const char* k : {"max_iter", "tol_rel_obj", "tol_grad_map", "ls_shrink", "ls_init_step", "weight_stable_iters"})
    d[std::string("inner_") + k] = d[k];
}

void add_scenario_defaults(Settings& d, const std::string& scenario) {
  d["scenario"] = scenario;
  d["k"] = "0";
  d["flip_rule"] = "frac";
  d["flip_frac"] = "0.1";
  d["q"] = "10";
  d["rank"] = "3";
  d["contamination"] = "0";
  d["noise_sd"] = "0.1";
  d["outlier_mean"] = "2";
  d["outlier_sd"] = "1";
  d["p_o"] = "0.1";
  d["variant"] = "M1";
  d["ar_rho"] = "0.5";
  d["signal"] = "1";
  d["linear_noise_sd"] = "1";
  d["outlier_shift"] = "20";
  d["outlier_model"] = "vertical";
  if (scenario == "logistic_flip") {
    d["n"] = "200";
    d["p"] = "60";
  } else if (scenario == "tracenorm") {
    d["n"] = "50";
    d["p"] = "60";
    d["q"] = "5";
    d["contamination"] = "0.2";
  } else if (scenario == "ggm_mixture") {
    d["n"] = "100";
    d["p"] = "50";
  } else {
    d["n"] = "200";
    d["p"] = "100";
    d["k"] = "5";
    d["contamination"] = "0.1";
  }
}

std::string estimator_for(const std::string& scenario) {
  if (scenario == "logistic_flip") return "trimmed_logistic";
  if (scenario == "tracenorm") return "tracenorm_lts";
  if (scenario == "ggm_mixture") return "trimmed_glasso";
  return "sparse_lts";
}

std::string default_lambda_max(const std::string& scenario) {
  if (scenario == "logistic_flip") return "0.2";
  if (scenario == "tracenorm") return "10";
  return "1";
}

Settings defaults_for(const std::string& command, const std::string& scenario) {
  Settings d;
  d["command"] = command;
  d["seed"] = "0";
  d["threads"] = "1";
  if (command == "fit" || command == "cv") {
    d["estimator"] = "sparse_lts";
    d["lambda"] = "0.1";
    d["data_kind"] = "auto";
    d["q"] = "1";
    d["untrimmed"] = "0";
    add_solver_defaults(d);
    if (command == "cv") {
      d["lambdas"] = "";
      d["hs"] = "";
      d["folds"] = "5";
      d["scoring"] = "auto";
    }
  } else if (command == "simulate") {
    add_scenario_defaults(d, scenario);
    add_solver_defaults(d);
    d["estimator"] = estimator_for(scenario);
    d["reps"] = "20";
    d["support_threshold"] = "1e-6";
    d["lambda_max"] = default_lambda_max(scenario);
    d["lambda_min_ratio"] = "0.02";
    d["n_lambda"] = "12";
    d["trim_fracs"] = scenario == "ggm_mixture" ? "0.1,0.15,0.2" : "0.1";
  } else if (command == "bench") {
    add_scenario_defaults(d, scenario);
    add_solver_defaults(d);
    d["n"] = "50";
    d["p"] = "300";
    d["q"] = "10";
    d["contamination"] = "0.2";
    d["estimator"] = estimator_for(scenario);
    d["lambda"] = "1";
    d["repeats"] = "3";
  } else if (command == "theory") {
    for (const auto& [k, v] : std::map<std::string, std::string>{
             {"kappa", "1"}, {"psi", "1"}, {"lambda", "0.1"}, {"tau2", "0"}, {"c", "1"}, {"c2", "0.5"},
             {"k", "5"}, {"p", "150"}, {"n", "100"}, {"h", "100"}, {"b_size", "10"}, {"fxb", "1"},
             {"a", "1"}, {"sigma_b", "1"}, {"tau", "3"}, {"draws", "1000"}, {"max_p", "10"},
             {"trials", "2000"}, {"n_cov", "2000"}, {"p_cov", "20"}})
      d[k] = v;
  } else {
    usage_error("unknown command '" + command + "' (expected fit, cv, simulate, bench or theory)");
  }
  return d;
}

// Keys that are valid without a default value.
std::set<std::string> optional_keys(const std::string& command) {
  std::set<std::string> k = {"output", "config"};
  if (command == "fit" || command == "cv") {
    k.insert({"input", "h", "trim_frac"});
  } else if (command == "bench") {
    k.insert({"h", "trim_frac"});
  }
  return k;
}

// ---------------------------------------------------------------------------
// Value helpers

const std::string& get(const Settings& s, const std::string& key) {
  const auto it = s.find(key);
  if (it == s.end()) usage_error("missing required setting '" + key + "'");
  return it->second;
}

double get_real(const Settings& s, const std::string& key) {
  const std::string& v = get(s, key);
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    usage_error("setting '" + key + "' is not a number: '" + v + "'");
  }
}

std::uint64_t get_count(const Settings& s, const std::string& key) {
  const std::string& v = get(s, key);
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    usage_error("setting '" + key + "' is not a non-negative integer: '" + v + "'");
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    usage_error("setting '" + key + "' is out of range: '" + v + "'");
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> get_real_list(const Settings& s, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(get(s, key))) {
    Settings one{{key, item}};
    out.push_back(get_real(one, key));
  }
  return out;
}

bool has(const Settings& s, const std::string& key) { return s.count(key) && !s.at(key).empty(); }

SpecPtr make_spec(const Settings& s, const std::string& estimator, std::optional<std::size_t> n_for_untrimmed) {
  trimest_spec* raw = nullptr;
  check(trimest_spec_create(estimator.c_str(), &raw));
  SpecPtr spec(raw);
  auto set = [&](const std::string& key, const std::string& value) {
    check(trimest_spec_set(spec.get(), key.c_str(), value.c_str()));
  };
  if (s.count("lambda")) set("lambda", get(s, "lambda"));
  for (const auto& k : kSolverKeys) set(k, get(s, k));
  for (const char* k : {"max_iter", "tol_rel_obj", "tol_grad_map", "ls_shrink", "ls_init_step", "weight_stable_iters"})
    set(std::string("inner_") + k, get(s, std::string("inner_") + k));
  if (has(s, "h")) set("h", get(s, "h"));
  if (has(s, "trim_frac")) set("trim_frac", get(s, "trim_frac"));
  if (n_for_untrimmed && s.count("untrimmed") && get_count(s, "untrimmed") != 0)
    set("h", std::to_string(*n_for_untrimmed));
  return spec;
}

trimest_data_kind data_kind_for(const Settings& s) {
  std::string kind = get(s, "data_kind");
  const std::string& est = get(s, "estimator");
  if (kind == "auto")
    kind = est == "trimmed_glasso" ? "ggm" : est == "tracenorm_lts" ? "multiresponse" : "regression";
  if (kind == "regression") return TRIMEST_DATA_REGRESSION;
  if (kind == "multiresponse") return TRIMEST_DATA_MULTIRESPONSE;
  if (kind == "ggm") return TRIMEST_DATA_GGM;
  usage_error("data_kind must be auto, regression, multiresponse or ggm");
}

DatasetPtr load_input(const Settings& s) {
  if (!has(s, "input")) usage_error("--input is required");
  trimest_dataset* raw = nullptr;
  check(trimest_dataset_load_csv(get(s, "input").c_str(), data_kind_for(s), get_count(s, "q"), &raw));
  return DatasetPtr(raw);
}

fs::path output_dir(const Settings& s) {
  if (!has(s, "output")) usage_error("--output is required");
  return fs::path(get(s, "output"));
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) usage_error("cannot create output directory '" + dir.string() + "': " + ec.message());
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) usage_error("cannot write '" + p.string() + "'");
  return out;
}

void write_settings(std::ostream& out, const Settings& s) {
  for (const auto& [k, v] : s)
    if (k != "config") out << k << '=' << v << '\n';
}

// ---------------------------------------------------------------------------
// Commands

int cmd_fit(const Settings& s) {
  const DatasetPtr data = load_input(s);
  const fs::path dir = output_dir(s);
  const std::size_t n = trimest_dataset_n(data.get());
  const SpecPtr spec = make_spec(s, get(s, "estimator"), n);

  const auto t0 = std::chrono::steady_clock::now();
  trimest_fit* raw = nullptr;
  check(trimest_fit_run(spec.get(), data.get(), &raw));
  const FitPtr fit(raw);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::size_t rows = 0, cols = 0;
  trimest_fit_theta_shape(fit.get(), &rows, &cols);
  std::vector<double> theta(rows * cols);
  trimest_fit_theta(fit.get(), theta.data());
  std::vector<std::uint8_t> w(n);
  trimest_fit_weights(fit.get(), w.data());
  std::vector<double> losses(n);
  trimest_fit_losses(fit.get(), losses.data());
  std::vector<double> trace(trimest_fit_trace_length(fit.get()));
  trimest_fit_trace(fit.get(), trace.data());

  ensure_dir(dir);
  {
    auto out = open_out(dir / "estimate.csv");
    const std::string& est = get(s, "estimator");
    for (std::size_t j = 0; j < cols; ++j) {
      if (j) out << ',';
      if (est == "trimmed_glasso") out << 'x' << (j + 1);
      else if (cols == 1) out << "theta";
      else out << 'y' << (j + 1);
    }
    out << '\n';
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) out << (j ? "," : "") << fmt(theta[i * cols + j]);
      out << '\n';
    }
  }
  {
    auto out = open_out(dir / "weights.csv");
    out << "sample_index,included,loss\n";
    for (std::size_t i = 0; i < n; ++i) out << i << ',' << int(w[i]) << ',' << fmt(losses[i]) << '\n';
  }
  {
    auto out = open_out(dir / "manifest.txt");
    write_settings(out, s);
    out << "result.n=" << n << '\n';
    out << "result.h=" << trimest_fit_h(fit.get()) << '\n';
    out << "result.objective=" << fmt(trimest_fit_objective(fit.get())) << '\n';
    out << "result.iterations=" << trimest_fit_iterations(fit.get()) << '\n';
    out << "result.converged=" << trimest_fit_converged(fit.get()) << '\n';
    out << "result.degenerate=" << trimest_fit_degenerate(fit.get()) << '\n';
    out << "result.weight_stabilized_at=" << trimest_fit_stabilized_at(fit.get()) << '\n';
    out << "result.ls_backtracks=" << trimest_fit_backtracks(fit.get()) << '\n';
    out << "result.pd_rejections=" << trimest_fit_pd_rejections(fit.get()) << '\n';
    out << "result.grad_map_residual=" << fmt(trimest_fit_grad_map_residual(fit.get())) << '\n';
    out << "result.trace_length=" << trace.size() << '\n';
    out << "result.trace_first=" << fmt(trace.front()) << '\n';
    out << "result.trace_last=" << fmt(trace.back()) << '\n';
  }
  {
    auto out = open_out(dir / "manifest_volatile.txt");
    out << "wall_time_seconds=" << fmt(secs) << '\n';
  }
  std::cout << "objective " << fmt(trimest_fit_objective(fit.get())) << " after " << trimest_fit_iterations(fit.get())
            << " iterations; wrote " << dir.string() << '\n';
  return kExitOk;
}

int cmd_cv(const Settings& s) {
  const DatasetPtr data = load_input(s);
  const fs::path dir = output_dir(s);
  const std::size_t n = trimest_dataset_n(data.get());
  const SpecPtr spec = make_spec(s, get(s, "estimator"), std::nullopt);

  const std::vector<double> lambdas = get_real_list(s, "lambdas");
  if (lambdas.empty()) usage_error("cv needs lambdas=<comma-separated list>");
  std::vector<std::size_t> hs;
  for (const auto& item : split_list(get(s, "hs"))) hs.push_back(get_count(Settings{{"hs", item}}, "hs"));
  if (hs.empty()) {
    if (get_count(s, "untrimmed") != 0) hs.push_back(n);
    else if (has(s, "h")) hs.push_back(get_count(s, "h"));
    else if (has(s, "trim_frac"))
      hs.push_back(n - static_cast<std::size_t>(std::floor(get_real(s, "trim_frac") * static_cast<double>(n) + 1e-12)));
    else hs.push_back(n);
  }
  std::string scoring = get(s, "scoring");
  if (scoring == "auto") scoring = get(s, "estimator") == "trimmed_glasso" ? "heldout_loglik" : "trimmed_mse";

  trimest_cv* raw = nullptr;
  check(trimest_cv_run(spec.get(), data.get(), lambdas.data(), lambdas.size(), hs.data(), hs.size(),
                       get_count(s, "folds"), scoring.c_str(), get_count(s, "seed"), get_count(s, "threads"), &raw));
  const CvPtr cv(raw);

  ensure_dir(dir);
  {
    auto out = open_out(dir / "cv.csv");
    out << "lambda,h,score\n";
    for (std::size_t i = 0; i < trimest_cv_cells(cv.get()); ++i) {
      double lam = 0.0, score = 0.0;
      std::size_t h = 0;
      trimest_cv_cell(cv.get(), i, &lam, &h, &score);
      out << fmt(lam) << ',' << h << ',' << fmt(score) << '\n';
    }
  }
  {
    auto out = open_out(dir / "manifest.txt");
    write_settings(out, s);
    out << "result.scoring=" << scoring << '\n';
    out << "result.best_lambda=" << fmt(trimest_cv_best_lambda(cv.get())) << '\n';
    out << "result.best_h=" << trimest_cv_best_h(cv.get()) << '\n';
  }
  std::cout << "best lambda " << fmt(trimest_cv_best_lambda(cv.get())) << ", best h " << trimest_cv_best_h(cv.get())
            << '\n';
  return kExitOk;
}

const std::vector<std::string> kScenarioKeys = {
    "n",         "p",           "k",          "flip_rule", "flip_frac",       "q",
    "rank",      "contamination", "noise_sd", "outlier_mean", "outlier_sd",   "p_o",
    "variant",   "ar_rho",      "signal",     "linear_noise_sd", "outlier_shift", "outlier_model"};

ExperimentPtr make_experiment(const Settings& s) {
  trimest_experiment* raw = nullptr;
  check(trimest_experiment_create(get(s, "scenario").c_str(), &raw));
  ExperimentPtr exp(raw);
  auto set = [&](const std::string& key, const std::string& value) {
    check(trimest_experiment_set(exp.get(), key.c_str(), value.c_str()));
  };
  for (const auto& k : kScenarioKeys) set(k, get(s, k));
  set("seed", get(s, "seed"));
  set("threads", get(s, "threads"));
  return exp;
}

int cmd_simulate(const Settings& s) {
  const fs::path dir = output_dir(s);
  if (get_count(s, "reps") == 0) usage_error("reps must be >= 1");
  ExperimentPtr exp = make_experiment(s);
  check(trimest_experiment_set(exp.get(), "reps", get(s, "reps").c_str()));
  check(trimest_experiment_set(exp.get(), "support_threshold", get(s, "support_threshold").c_str()));

  const double lmax = get_real(s, "lambda_max");
  const double ratio = get_real(s, "lambda_min_ratio");
  const std::uint64_t count = get_count(s, "n_lambda");
  if (!(lmax > 0.0) || !(ratio > 0.0 && ratio <= 1.0) || count == 0)
    usage_error("need lambda_max > 0, lambda_min_ratio in (0, 1] and n_lambda >= 1");
  std::vector<double> grid(count);
  for (std::uint64_t i = 0; i < count; ++i)
    grid[i] = lmax * std::pow(ratio, count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1));
  check(trimest_experiment_set_lambda_grid(exp.get(), grid.data(), grid.size()));

  const std::string estimator = get(s, "estimator");
  {
    SpecPtr spec = make_spec(s, estimator, std::nullopt);
    check(trimest_experiment_add_estimator(exp.get(), "untrimmed", spec.get()));
  }
  for (const auto& f : split_list(get(s, "trim_fracs"))) {
    SpecPtr spec = make_spec(s, estimator, std::nullopt);
    check(trimest_spec_set(spec.get(), "trim_frac", f.c_str()));
    check(trimest_experiment_add_estimator(exp.get(), ("trim_" + f).c_str(), spec.get()));
  }

  trimest_report* raw = nullptr;
  check(trimest_experiment_run(exp.get(), &raw));
  const ReportPtr report(raw);

  ensure_dir(dir);
  for (const char* which : {"records", "summary", "auc", "timing"})
    check(trimest_report_write(report.get(), which, (dir / (std::string(which) + ".csv")).string().c_str()));
  {
    auto out = open_out(dir / "manifest.txt");
    write_settings(out, s);
  }
  std::cout << "wrote " << dir.string() << '\n';
  return kExitOk;
}

int cmd_bench(const Settings& s) {
  const fs::path dir = output_dir(s);
  ExperimentPtr exp = make_experiment(s);
  trimest_dataset* raw_data = nullptr;
  check(trimest_experiment_generate(exp.get(), &raw_data));
  const DatasetPtr data(raw_data);
  Settings resolved = s;
  if (!has(resolved, "h") && !has(resolved, "trim_frac")) resolved["trim_frac"] = get(s, "contamination");
  const SpecPtr spec = make_spec(resolved, get(s, "estimator"), std::nullopt);

  const std::uint64_t repeats = get_count(s, "repeats");
  if (repeats == 0) usage_error("repeats must be >= 1");
  std::vector<trimest_bench_result> runs(repeats);
  for (auto& r : runs) check(trimest_bench_run(spec.get(), data.get(), &r));

  ensure_dir(dir);
  {
    // Wall times are volatile, so they get their own file.
    auto out = open_out(dir / "bench.csv");
    out << "repeat,solver,objective,iterations\n";
    auto times = open_out(dir / "bench_timing.csv");
    times << "repeat,solver,seconds\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
      out << i << ",partial," << fmt(runs[i].partial_objective) << ',' << runs[i].partial_iterations << '\n';
      out << i << ",alternate," << fmt(runs[i].alternate_objective) << ',' << runs[i].alternate_iterations << '\n';
      times << i << ",partial," << fmt(runs[i].partial_seconds) << '\n';
      times << i << ",alternate," << fmt(runs[i].alternate_seconds) << '\n';
    }
  }
  {
    auto m = open_out(dir / "manifest.txt");
    write_settings(m, resolved);
  }
  std::cout << "partial " << fmt(runs.back().partial_seconds) << " s, alternate "
            << fmt(runs.back().alternate_seconds) << " s; wrote " << dir.string() << '\n';
  return kExitOk;
}

int cmd_theory(const Settings& s) {
  const double tau = get_real(s, "tau");
  if (!(tau > 2.0)) usage_error("tau must be > 2");
  std::vector<std::pair<std::string, double>> rows;
  double l2 = 0.0, r = 0.0;
  check(trimest_theory_theorem1(get_real(s, "kappa"), get_real(s, "psi"), get_real(s, "lambda"), get_real(s, "tau2"),
                                &l2, &r));
  rows.emplace_back("theorem1.l2_bound", l2);
  rows.emplace_back("theorem1.r_bound", r);

  const std::size_t p = get_count(s, "p");
  std::vector<double> eye(p * p, 0.0);
  for (std::size_t i = 0; i < p; ++i) eye[i * p + i] = 1.0;
  double v = 0.0;
  check(trimest_theory_ggm_lambda(eye.data(), p, get_count(s, "h"), get_count(s, "b_size"), get_real(s, "fxb"), tau,
                                  &v));
  rows.emplace_back("ggm.lambda_identity", v);
  check(trimest_theory_ggm_bound(get_real(s, "c"), get_real(s, "k"), p, get_count(s, "n"), get_real(s, "fxb"),
                                 get_count(s, "b_size"), get_real(s, "kappa"), &v));
  rows.emplace_back("ggm.frobenius_bound", v);
  check(trimest_theory_ggm_fxb(get_real(s, "a"), p, get_real(s, "sigma_b"), &v));
  rows.emplace_back("ggm.fxb_subgaussian", v);
  check(trimest_theory_lts_lambda(get_count(s, "h"), p, get_real(s, "c"), &v));
  rows.emplace_back("lts.lambda", v);
  check(trimest_theory_lts_bounds(get_real(s, "c"), get_real(s, "c2"), get_real(s, "k"), get_count(s, "b_size"),
                                  get_count(s, "h"), p, &l2, &r));
  rows.emplace_back("lts.l2_bound", l2);
  rows.emplace_back("lts.l1_bound", r);

  std::size_t passed = 0;
  const std::uint64_t draws = get_count(s, "draws");
  check(trimest_theory_rsc_sweep(draws, get_count(s, "max_p"), get_count(s, "seed"), &passed));
  rows.emplace_back("rsc.draws", static_cast<double>(draws));
  rows.emplace_back("rsc.passed", static_cast<double>(passed));

  trimest_samplecov_result sc{};
  check(trimest_theory_samplecov(get_count(s, "n_cov"), get_count(s, "p_cov"), tau, get_count(s, "trials"),
                                 get_count(s, "seed"), get_count(s, "threads"), &sc));
  rows.emplace_back("samplecov.trials", static_cast<double>(sc.trials));
  rows.emplace_back("samplecov.violation_rate", sc.rate);
  rows.emplace_back("samplecov.allowed_rate", sc.allowed_rate);
  rows.emplace_back("samplecov.standard_error", sc.standard_error);
  rows.emplace_back("samplecov.bound", sc.bound);

  for (const auto& [k, val] : rows) std::cout << std::left << std::setw(28) << k << fmt(val) << '\n';
  if (has(s, "output")) {
    const fs::path dir = output_dir(s);
    ensure_dir(dir);
    auto out = open_out(dir / "theory.csv");
    out << "quantity,value\n";
    for (const auto& [k, val] : rows) out << k << ',' << fmt(val) << '\n';
    auto m = open_out(dir / "manifest.txt");
    write_settings(m, s);
  }
  return kExitOk;
}

int run(int argc, char** argv) {
  CLI::App app{"trimest: trimmed regularized estimators"};
  app.set_help_flag("--help", "print this help and exit");
  std::map<std::string, std::string> flags;
  std::optional<std::string> command, input, output, estimator, lambda, h, trim_frac, seed, config, threads;
  std::vector<std::string> sets;
  app.add_option("--command", command, "fit, cv, simulate, bench or theory");
  app.add_option("--input", input, "input CSV (fit, cv)");
  app.add_option("--output", output, "output directory");
  app.add_option("--estimator", estimator, "sparse_lts, trimmed_logistic, trimmed_glasso or tracenorm_lts");
  app.add_option("--lambda", lambda, "regularization weight");
  app.add_option("--h", h, "number of samples kept");
  app.add_option("--trim-frac", trim_frac, "fraction of samples trimmed");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--config", config, "flat key=value config file");
  app.add_option("--threads", threads, "worker threads");
  app.add_option("--set", sets, "extra key=value setting (repeatable)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  Settings from_flags;
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) usage_error("--set expects key=value, got '" + kv + "'");
    from_flags[trim(kv.substr(0, eq))] = trim(kv.substr(eq + 1));
  }
  auto put = [&](const char* key, const std::optional<std::string>& v) {
    if (v) from_flags[key] = *v;
  };
  put("command", command);
  put("input", input);
  put("output", output);
  put("estimator", estimator);
  put("lambda", lambda);
  put("h", h);
  put("trim_frac", trim_frac);
  put("seed", seed);
  put("threads", threads);
  if (from_flags.count("h") && from_flags.count("trim_frac")) usage_error("give either --h or --trim-frac, not both");

  Settings from_config;
  if (config) {
    from_config = read_config(*config);
    if (from_config.count("h") && from_config.count("trim_frac"))
      usage_error("config sets both h and trim_frac");
  }

  auto pick = [&](const std::string& key, const std::string& fallback) {
    if (from_flags.count(key)) return from_flags[key];
    if (from_config.count(key)) return from_config[key];
    return fallback;
  };
  const std::string cmd = pick("command", "");
  if (cmd.empty()) usage_error("--command is required");
  const std::string scenario = pick("scenario", cmd == "bench" ? "tracenorm" : "ggm_mixture");

  Settings resolved = defaults_for(cmd, scenario);
  const std::set<std::string> extra = optional_keys(cmd);
  auto overlay = [&](const Settings& layer, const char* origin) {
    if (layer.count("h") || layer.count("trim_frac")) {
      resolved.erase("h");
      resolved.erase("trim_frac");
    }
    for (const auto& [k, v] : layer) {
      if (!resolved.count(k) && !extra.count(k)) usage_error(std::string("unknown ") + origin + " key '" + k + "'");
      resolved[k] = v;
    }
  };
  overlay(from_config, "config");
  overlay(from_flags, "command-line");
  if (config) resolved["config"] = *config;

  if (cmd == "fit") return cmd_fit(resolved);
  if (cmd == "cv") return cmd_cv(resolved);
  if (cmd == "simulate") return cmd_simulate(resolved);
  if (cmd == "bench") return cmd_bench(resolved);
  return cmd_theory(resolved);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CliError& e) {
    std::cerr << "trimest: " << e.what() << '\n';
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "trimest: " << e.what() << '\n';
    return kExitNumeric;
  }
}
