#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "warpreg/csv.hpp"
#include "warpreg/metrics.hpp"
#include "warpreg/reference.hpp"
#include "warpreg/registration.hpp"
#include "warpreg/simulate.hpp"
#include "warpreg/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace warpreg;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (item.key() == a) {
        ok = true;
        break;
      }
    if (!ok) throw UsageError(where + ": unknown field '" + item.key() + "'");
  }
}

template <typename T>
void take(const json& j, const char* k, T& out) {
  if (!j.contains(k)) return;
  try {
    out = j.at(k).get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string("config field '") + k + "' has the wrong type");
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

/// Accepts either a bare config or a manifest from a previous run (its
/// "config" object is used; stored args fill unset flags via *args_out).
json load_config(const std::string& path, json* args_out) {
  json j = load_json_file(path);
  if (j.contains("command") && j.contains("config")) {
    if (args_out && j.contains("args")) *args_out = j["args"];
    j = j["config"];
  }
  check_keys(j, {"dataset", "registration"}, "config");
  return j;
}

DatasetConfig parse_dataset(const json& root) {
  DatasetConfig cfg;
  if (!root.contains("dataset")) return cfg;
  const json& j = root.at("dataset");
  check_keys(j,
             {"n_curves", "n_terms", "centers", "widths", "z_mean", "z_std", "warp_family",
              "f1_b_min", "f1_b_max", "f2_c_set", "f2_b_max", "grid_size", "seed"},
             "dataset");
  take(j, "n_curves", cfg.n_curves);
  take(j, "n_terms", cfg.n_terms);
  take(j, "centers", cfg.centers);
  take(j, "widths", cfg.widths);
  take(j, "z_mean", cfg.z_mean);
  take(j, "z_std", cfg.z_std);
  if (j.contains("warp_family")) {
    std::string f = j.at("warp_family").get<std::string>();
    if (f == "f1")
      cfg.warp_family = WarpFamily::f1;
    else if (f == "f2")
      cfg.warp_family = WarpFamily::f2;
    else if (f == "none")
      cfg.warp_family = WarpFamily::none;
    else
      throw UsageError("dataset: warp_family must be 'f1', 'f2', or 'none'");
  }
  take(j, "f1_b_min", cfg.f1_b_min);
  take(j, "f1_b_max", cfg.f1_b_max);
  take(j, "f2_c_set", cfg.f2_c_set);
  take(j, "f2_b_max", cfg.f2_b_max);
  take(j, "grid_size", cfg.grid_size);
  take(j, "seed", cfg.seed);
  return cfg;
}

json dataset_to_json(const DatasetConfig& cfg) {
  const char* family = cfg.warp_family == WarpFamily::f1   ? "f1"
                       : cfg.warp_family == WarpFamily::f2 ? "f2"
                                                           : "none";
  return json{{"n_curves", cfg.n_curves},
              {"n_terms", cfg.n_terms},
              {"centers", cfg.centers},
              {"widths", cfg.widths},
              {"z_mean", cfg.z_mean},
              {"z_std", cfg.z_std},
              {"warp_family", family},
              {"f1_b_min", cfg.f1_b_min},
              {"f1_b_max", cfg.f1_b_max},
              {"f2_c_set", cfg.f2_c_set},
              {"f2_b_max", cfg.f2_b_max},
              {"grid_size", cfg.grid_size},
              {"seed", cfg.seed}};
}

RegistrationConfig parse_registration(const json& root) {
  RegistrationConfig cfg;
  std::string kind = "fourier";
  int order = 30, degree = 3, wcoeffs = 10, wdegree = 3;
  if (root.contains("registration")) {
    const json& j = root.at("registration");
    check_keys(j,
               {"basis_kind", "basis_order", "basis_degree", "warp_coeffs", "warp_degree",
                "lambda", "eval_grid", "denom_floor", "solver"},
               "registration");
    take(j, "basis_kind", kind);
    take(j, "basis_order", order);
    take(j, "basis_degree", degree);
    take(j, "warp_coeffs", wcoeffs);
    take(j, "warp_degree", wdegree);
    take(j, "lambda", cfg.objective.lambda);
    take(j, "eval_grid", cfg.objective.eval_grid);
    take(j, "denom_floor", cfg.objective.denom_floor);
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      check_keys(s,
                 {"max_iters", "ftol", "xtol", "initial_damping", "damping_up", "damping_down",
                  "fd_step", "pin_gauge", "multistart", "multistart_seed", "multistart_scale"},
                 "solver");
      take(s, "max_iters", cfg.solver.max_iters);
      take(s, "ftol", cfg.solver.ftol);
      take(s, "xtol", cfg.solver.xtol);
      take(s, "initial_damping", cfg.solver.initial_damping);
      take(s, "damping_up", cfg.solver.damping_up);
      take(s, "damping_down", cfg.solver.damping_down);
      take(s, "fd_step", cfg.solver.fd_step);
      take(s, "pin_gauge", cfg.solver.pin_gauge);
      take(s, "multistart", cfg.solver.multistart);
      take(s, "multistart_seed", cfg.solver.multistart_seed);
      take(s, "multistart_scale", cfg.solver.multistart_scale);
    }
  }
  if (kind == "fourier")
    cfg.basis = BasisSpec::fourier(order);
  else if (kind == "bspline")
    cfg.basis = BasisSpec::bspline(order, degree);
  else
    throw UsageError("registration: basis_kind must be 'fourier' or 'bspline'");
  cfg.warp_basis = BasisSpec::bspline(wcoeffs, wdegree);
  return cfg;
}

json registration_to_json(const RegistrationConfig& cfg) {
  return json{
      {"basis_kind", cfg.basis.kind == BasisKind::fourier ? "fourier" : "bspline"},
      {"basis_order", cfg.basis.requested_size},
      {"basis_degree", cfg.basis.degree},
      {"warp_coeffs", cfg.warp_basis.size},
      {"warp_degree", cfg.warp_basis.degree},
      {"lambda", cfg.objective.lambda},
      {"eval_grid", cfg.objective.eval_grid},
      {"denom_floor", cfg.objective.denom_floor},
      {"solver",
       json{{"max_iters", cfg.solver.max_iters},
            {"ftol", cfg.solver.ftol},
            {"xtol", cfg.solver.xtol},
            {"initial_damping", cfg.solver.initial_damping},
            {"damping_up", cfg.solver.damping_up},
            {"damping_down", cfg.solver.damping_down},
            {"fd_step", cfg.solver.fd_step},
            {"pin_gauge", cfg.solver.pin_gauge},
            {"multistart", cfg.solver.multistart},
            {"multistart_seed", cfg.solver.multistart_seed},
            {"multistart_scale", cfg.solver.multistart_scale}}}};
}

void write_manifest(const fs::path& path, json manifest) {
  manifest["version"] = kVersion;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << manifest.dump(2) << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct UnitCurves {
  std::vector<int> ids;
  std::vector<SampledCurve> curves;  // mapped onto [0,1]
  double t0 = 0.0, t1 = 1.0;         // original common domain
};

UnitCurves load_unit_curves(const std::string& path) {
  CurveTable table = read_curves_csv(path);
  for (const auto& c : table.curves)
    if (c.grid != table.curves.front().grid)
      throw UsageError(path + ": curves do not share a grid");
  UnitCurves u;
  u.ids = table.ids;
  u.curves.reserve(table.curves.size());
  for (const auto& c : table.curves) u.curves.push_back(to_unit_domain(c, &u.t0, &u.t1));
  return u;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? std::numeric_limits<double>::quiet_NaN() : s / static_cast<double>(v.size());
}

// ---- simulate ----------------------------------------------------------

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 const std::uint64_t* seed_override) {
  auto t_start = std::chrono::steady_clock::now();
  DatasetConfig cfg;
  if (!config_path.empty()) cfg = parse_dataset(load_config(config_path, nullptr));
  if (seed_override) cfg.seed = *seed_override;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  SyntheticDataset ds = generate(cfg);
  fs::create_directories(out_dir);
  fs::path out(out_dir);

  std::vector<int> ids(ds.curves.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  write_curves_csv((out / "curves.csv").string(), ids, ds.curves);

  std::vector<SampledCurve> warps;
  warps.reserve(ds.curves.size());
  const auto& grid = ds.curves.front().grid;
  for (const auto& tw : ds.true_warps) {
    std::vector<double> h(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) h[j] = tw(grid[j]);
    warps.emplace_back(grid, std::move(h));
  }
  write_curves_csv((out / "true_warps.csv").string(), ids, warps, "h");

  json cfg_json = {{"dataset", dataset_to_json(ds.config)}};
  {
    std::ofstream cf(out / "config.json", std::ios::binary);
    cf << cfg_json.dump(2) << "\n";
  }

  write_manifest(out / "manifest.json",
                 json{{"command", "simulate"},
                      {"args", json{{"config", config_path}, {"out", out_dir}}},
                      {"config", cfg_json},
                      {"inputs", json::array()},
                      {"outputs", {"curves.csv", "true_warps.csv", "config.json"}},
                      {"seed", ds.config.seed},
                      {"duration_seconds", seconds_since(t_start)}});
  return 0;
}

// ---- register ----------------------------------------------------------

int resolve_reference(const std::string& ref, const UnitCurves& u, const RegistrationConfig& cfg,
                      json* ref_json) {
  if (ref == "auto-j" || ref == "auto-power") {
    ReferenceChoice choice = ref == "auto-j" ? select_reference_j(u.curves, cfg)
                                             : select_reference_power(u.curves);
    if (ref_json)
      *ref_json = json{{"requested", ref},
                       {"index", choice.index},
                       {"method", choice.method == ReferenceMethod::j_criterion
                                      ? "j_criterion"
                                      : "half_power_median"},
                       {"scores", choice.scores}};
    return choice.index;
  }
  int idx = 0;
  try {
    std::size_t used = 0;
    idx = std::stoi(ref, &used);
    if (used != ref.size()) throw std::invalid_argument(ref);
  } catch (const std::exception&) {
    throw UsageError("--ref must be an index, 'auto-j', or 'auto-power' (got '" + ref + "')");
  }
  if (idx < 0 || static_cast<std::size_t>(idx) >= u.curves.size())
    throw UsageError("--ref index " + std::to_string(idx) + " out of range (have " +
                     std::to_string(u.curves.size()) + " curves)");
  if (ref_json) *ref_json = json{{"requested", ref}, {"index", idx}, {"method", "explicit"}};
  return idx;
}

void write_register_outputs(const fs::path& out, const UnitCurves& u,
                            const std::vector<RegistrationResult>& results) {
  {
    std::ofstream f(out / "results.csv", std::ios::binary);
    f << "curve_id,amplitude,prd,criterion,converged,iterations\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      f << u.ids[i] << ',' << format_double(r.amplitude) << ',' << format_double(r.prd) << ','
        << format_double(r.criterion) << ',' << (r.report.converged && !r.failed ? 1 : 0) << ','
        << r.report.iterations << "\n";
    }
  }
  auto back = [&](double t) { return u.t0 + (u.t1 - u.t0) * t; };
  {
    std::ofstream f(out / "warps.csv", std::ios::binary);
    f << "curve_id,t,h_hat\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& grid = u.curves[i].grid;
      for (double t : grid)
        f << u.ids[i] << ',' << format_double(back(t)) << ','
          << format_double(back(warp_eval(results[i].warp, t))) << "\n";
    }
  }
  {
    std::ofstream f(out / "aligned.csv", std::ios::binary);
    f << "curve_id,t,value\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& a = results[i].aligned;
      if (results[i].failed && a.size() == 0) {
        // keep the row structure: emit the unregistered curve
        const auto& c = u.curves[i];
        for (std::size_t j = 0; j < c.size(); ++j)
          f << u.ids[i] << ',' << format_double(back(c.grid[j])) << ','
            << format_double(c.values[j]) << "\n";
        continue;
      }
      for (std::size_t j = 0; j < a.size(); ++j)
        f << u.ids[i] << ',' << format_double(back(a.grid[j])) << ','
          << format_double(a.values[j]) << "\n";
    }
  }
}

int cmd_register(const std::string& in_path, const std::string& ref, const std::string& config_path,
                 const std::string& out_dir, const int* basis_order, const int* warp_coeffs,
                 const double* lambda, std::uint64_t seed) {
  auto t_start = std::chrono::steady_clock::now();
  json stored_args;
  json root;
  if (!config_path.empty()) root = load_config(config_path, &stored_args);
  RegistrationConfig cfg = parse_registration(root);

  std::string ref_spec = ref;
  if (ref_spec.empty()) ref_spec = stored_args.value("ref", "auto-power");
  std::string input = in_path;
  if (input.empty()) input = stored_args.value("in", "");
  if (input.empty()) throw UsageError("--in is required (no input recorded in the config)");

  if (basis_order) {
    cfg.basis = cfg.basis.kind == BasisKind::fourier
                    ? BasisSpec::fourier(*basis_order)
                    : BasisSpec::bspline(*basis_order, cfg.basis.degree);
  }
  if (warp_coeffs) cfg.warp_basis = BasisSpec::bspline(*warp_coeffs, cfg.warp_basis.degree);
  if (lambda) cfg.objective.lambda = *lambda;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  UnitCurves u = load_unit_curves(input);
  json ref_json;
  int ref_idx = resolve_reference(ref_spec, u, cfg, &ref_json);

  std::vector<RegistrationResult> results = register_set(u.curves, ref_idx, cfg);

  fs::create_directories(out_dir);
  fs::path out(out_dir);
  write_register_outputs(out, u, results);

  int bad = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (r.failed || !r.report.converged) ++bad;
    if (!r.message.empty())
      std::cerr << "curve " << u.ids[i] << ": " << r.message << "\n";
  }

  write_manifest(out / "manifest.json",
                 json{{"command", "register"},
                      {"args", json{{"in", input},
                                    {"ref", ref_spec},
                                    {"config", config_path},
                                    {"out", out_dir}}},
                      {"config", json{{"registration", registration_to_json(cfg)}}},
                      {"reference", ref_json},
                      {"domain", {u.t0, u.t1}},
                      {"inputs", {input}},
                      {"outputs", {"results.csv", "warps.csv", "aligned.csv"}},
                      {"seed", seed},
                      {"duration_seconds", seconds_since(t_start)}});
  if (bad > 0) {
    std::cerr << bad << " of " << results.size() << " registrations failed or did not converge\n";
    return 2;
  }
  return 0;
}

// ---- select-ref --------------------------------------------------------

int cmd_select_ref(const std::string& in_path, const std::string& method,
                   const std::string& config_path, const std::string& out_dir) {
  auto t_start = std::chrono::steady_clock::now();
  json root;
  if (!config_path.empty()) root = load_config(config_path, nullptr);
  RegistrationConfig cfg = parse_registration(root);

  UnitCurves u = load_unit_curves(in_path);
  ReferenceChoice choice;
  if (method == "j")
    choice = select_reference_j(u.curves, cfg);
  else if (method == "power")
    choice = select_reference_power(u.curves);
  else
    throw UsageError("--method must be 'j' or 'power'");

  fs::create_directories(out_dir);
  fs::path out(out_dir);
  {
    std::ofstream f(out / "selection.csv", std::ios::binary);
    f << "curve_id,score,selected\n";
    for (std::size_t i = 0; i < u.curves.size(); ++i)
      f << u.ids[i] << ',' << format_double(choice.scores[i]) << ','
        << (static_cast<int>(i) == choice.index ? 1 : 0) << "\n";
  }
  write_manifest(out / "manifest.json",
                 json{{"command", "select-ref"},
                      {"args", json{{"in", in_path}, {"method", method}, {"config", config_path},
                                    {"out", out_dir}}},
                      {"config", json{{"registration", registration_to_json(cfg)}}},
                      {"reference",
                       json{{"index", choice.index},
                            {"method", method == "j" ? "j_criterion" : "half_power_median"},
                            {"scores", choice.scores}}},
                      {"inputs", {in_path}},
                      {"outputs", {"selection.csv"}},
                      {"seed", 0},
                      {"duration_seconds", seconds_since(t_start)}});
  std::cout << "selected curve " << u.ids[static_cast<std::size_t>(choice.index)] << "\n";
  return 0;
}

// ---- evaluate ----------------------------------------------------------

struct ResultsTable {
  std::vector<int> ids;
  std::vector<double> prd;
  std::vector<int> converged;
};

ResultsTable read_results_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw UsageError(path + ": empty file");
  ResultsTable t;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      std::size_t c = line.find(',', pos);
      fields.push_back(line.substr(pos, c - pos));
      if (c == std::string::npos) break;
      pos = c + 1;
    }
    if (fields.size() != 6) throw UsageError(path + ": expected 6 columns");
    t.ids.push_back(std::stoi(fields[0]));
    t.prd.push_back(std::stod(fields[2]));
    t.converged.push_back(std::stoi(fields[4]));
  }
  return t;
}

int cmd_evaluate(const std::string& run_dir, const std::string& truth_dir, bool sweep,
                 const std::string& out_dir) {
  auto t_start = std::chrono::steady_clock::now();
  fs::path run(run_dir);
  json manifest = load_json_file((run / "manifest.json").string());
  if (manifest.value("command", "") != "register")
    throw UsageError(run_dir + " does not hold a register run");
  json cfg_root = manifest.value("config", json::object());
  RegistrationConfig cfg = parse_registration(cfg_root);
  int ref_idx = manifest.at("reference").value("index", 0);
  std::string curves_path = manifest.at("inputs").at(0).get<std::string>();

  UnitCurves u = load_unit_curves(curves_path);
  ResultsTable results = read_results_csv((run / "results.csv").string());
  CurveTable aligned = read_curves_csv((run / "aligned.csv").string());
  CurveTable warps = read_curves_csv((run / "warps.csv").string());
  if (results.ids != u.ids || aligned.ids != u.ids || warps.ids != u.ids)
    throw UsageError(run_dir + ": curve ids do not match " + curves_path);

  std::string out_eff = out_dir.empty() ? run_dir : out_dir;
  fs::create_directories(out_eff);
  fs::path out(out_eff);

  // Warp recovery against supplied ground truth: the inverse of each
  // estimated warp composed with the true warp should be the identity.
  std::vector<double> rmse;
  if (!truth_dir.empty()) {
    CurveTable truth = read_curves_csv((fs::path(truth_dir) / "true_warps.csv").string());
    if (truth.ids != u.ids)
      throw UsageError(truth_dir + ": true_warps.csv ids do not match the run");
    auto unit = [&](double v) { return (v - u.t0) / (u.t1 - u.t0); };
    for (std::size_t i = 0; i < u.curves.size(); ++i) {
      const auto& tr = truth.curves[i];
      const auto& w = warps.curves[i];  // (t, h_hat) in original units
      double acc = 0.0;
      for (std::size_t j = 0; j < tr.size(); ++j) {
        double t = unit(tr.grid[j]);
        double h_true = unit(tr.values[j]);
        // inverse of the estimated warp by swapping interpolation roles
        double w_inv = 0.0;
        {
          std::vector<double> hh(w.size()), tt(w.size());
          for (std::size_t k = 0; k < w.size(); ++k) {
            hh[k] = unit(w.values[k]);
            tt[k] = unit(w.grid[k]);
          }
          w_inv = interp_linear(hh, tt, h_true);
        }
        double d = w_inv - t;
        acc += d * d;
      }
      rmse.push_back(std::sqrt(acc / static_cast<double>(tr.size())));
    }
  }

  double var_before = 0.0, var_after = 0.0;
  bool have_var = u.curves.size() >= 2;
  if (have_var) {
    std::vector<SampledCurve> after_unit;
    after_unit.reserve(aligned.curves.size());
    for (const auto& c : aligned.curves) after_unit.push_back(to_unit_domain(c));
    auto [vb, va] = variance_reduction(u.curves, after_unit);
    var_before = vb;
    var_after = va;
  }

  {
    std::ofstream f(out / "per_curve.csv", std::ios::binary);
    f << "curve_id,prd,converged" << (rmse.empty() ? "" : ",warp_rmse") << "\n";
    for (std::size_t i = 0; i < u.curves.size(); ++i) {
      f << u.ids[i] << ',' << format_double(results.prd[i]) << ',' << results.converged[i];
      if (!rmse.empty()) f << ',' << format_double(rmse[i]);
      f << "\n";
    }
  }
  {
    std::ofstream f(out / "summary.csv", std::ios::binary);
    f << "metric,value\n";
    f << "n_curves," << u.curves.size() << "\n";
    f << "reference_index," << ref_idx << "\n";
    f << "prd_mean," << format_double(mean_of(results.prd)) << "\n";
    f << "prd_median," << format_double(median_of(results.prd)) << "\n";
    f << "prd_max," << format_double(*std::max_element(results.prd.begin(), results.prd.end()))
      << "\n";
    if (have_var) {
      f << "variance_before," << format_double(var_before) << "\n";
      f << "variance_after," << format_double(var_after) << "\n";
      f << "variance_ratio," << format_double(var_after / var_before) << "\n";
    }
    if (!rmse.empty()) {
      f << "warp_rmse_mean," << format_double(mean_of(rmse)) << "\n";
      f << "warp_rmse_max," << format_double(*std::max_element(rmse.begin(), rmse.end()))
        << "\n";
    }
  }

  json outputs = {"summary.csv", "per_curve.csv"};
  if (sweep) {
    const int orders[] = {10, 15, 20, 25, 30, 35, 40, 45};
    std::ofstream f(out / "prd_by_order.csv", std::ios::binary);
    std::ofstream fc(out / "prd_sweep_curves.csv", std::ios::binary);
    f << "order,prd_median,prd_mean,prd_max,n_failed\n";
    fc << "order,curve_id,prd\n";
    for (int order : orders) {
      RegistrationConfig c2 = cfg;
      c2.basis = cfg.basis.kind == BasisKind::fourier
                     ? BasisSpec::fourier(order)
                     : BasisSpec::bspline(order, cfg.basis.degree);
      std::vector<RegistrationResult> rr = register_set(u.curves, ref_idx, c2);
      std::vector<double> prds;
      int failed = 0;
      for (std::size_t i = 0; i < rr.size(); ++i) {
        if (rr[i].failed) {
          ++failed;
          continue;
        }
        prds.push_back(rr[i].prd);
        fc << order << ',' << u.ids[i] << ',' << format_double(rr[i].prd) << "\n";
      }
      f << order << ',' << format_double(median_of(prds)) << ',' << format_double(mean_of(prds))
        << ','
        << format_double(prds.empty() ? std::numeric_limits<double>::quiet_NaN()
                                      : *std::max_element(prds.begin(), prds.end()))
        << ',' << failed << "\n";
    }
    outputs.push_back("prd_by_order.csv");
    outputs.push_back("prd_sweep_curves.csv");
  }

  json inputs = {curves_path, (run / "results.csv").string(), (run / "aligned.csv").string(),
                 (run / "warps.csv").string()};
  if (!truth_dir.empty()) inputs.push_back((fs::path(truth_dir) / "true_warps.csv").string());
  write_manifest(out / "manifest.json",
                 json{{"command", "evaluate"},
                      {"args", json{{"run", run_dir}, {"truth", truth_dir}, {"sweep", sweep},
                                    {"out", out_eff}}},
                      {"config", cfg_root},
                      {"inputs", inputs},
                      {"outputs", outputs},
                      {"seed", 0},
                      {"duration_seconds", seconds_since(t_start)}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
  if (const char* env = std::getenv("WARPREG_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
#endif

  CLI::App app{"Curve registration by monotone time warping"};
  app.require_subcommand(1);

  std::string config_path, out_dir, in_path, ref_spec, method = "power";
  std::string run_dir, truth_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int basis_order = 0, warp_coeffs = 0;
  bool basis_order_given = false, warp_coeffs_given = false;
  double lambda = 0.0;
  bool lambda_given = false, sweep = false;

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic warped-curve dataset");
  sim->add_option("--config", config_path, "JSON config (dataset section)");
  sim->add_option("--out", out_dir, "Output directory")->required();
  sim->add_option("--seed", seed, "Override the dataset seed")->each([&](const std::string&) {
    seed_given = true;
  });

  auto* reg = app.add_subcommand("register", "Register a curve set against a reference");
  reg->add_option("--in", in_path, "Input curves.csv");
  reg->add_option("--ref", ref_spec, "Reference: index, 'auto-j', or 'auto-power'");
  reg->add_option("--config", config_path, "JSON config (registration section) or a manifest");
  reg->add_option("--out", out_dir, "Output directory")->required();
  reg->add_option("--basis-order", basis_order, "Curve basis size override")
      ->each([&](const std::string&) { basis_order_given = true; });
  reg->add_option("--warp-coeffs", warp_coeffs, "Warp coefficient count override")
      ->each([&](const std::string&) { warp_coeffs_given = true; });
  reg->add_option("--lambda", lambda, "Identity-pull penalty weight override")
      ->each([&](const std::string&) { lambda_given = true; });
  reg->add_option("--seed", seed, "Recorded in the manifest (runs are deterministic)");

  auto* sel = app.add_subcommand("select-ref", "Choose a reference curve");
  sel->add_option("--in", in_path, "Input curves.csv")->required();
  sel->add_option("--method", method, "'j' (exhaustive) or 'power' (half-interval energy)");
  sel->add_option("--config", config_path, "JSON config (registration section)");
  sel->add_option("--out", out_dir, "Output directory")->required();
  sel->add_option("--seed", seed, "Recorded in the manifest");

  auto* ev = app.add_subcommand("evaluate", "Summarize a register run");
  ev->add_option("--run", run_dir, "Directory of a register run")->required();
  ev->add_option("--truth", truth_dir, "Simulation directory with true_warps.csv");
  ev->add_flag("--sweep", sweep, "Re-register over the basis-order sweep");
  ev->add_option("--out", out_dir, "Output directory (defaults to the run directory)");
  ev->add_option("--seed", seed, "Recorded in the manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(config_path, out_dir, seed_given ? &seed : nullptr);
    if (reg->parsed())
      return cmd_register(in_path, ref_spec, config_path, out_dir,
                          basis_order_given ? &basis_order : nullptr,
                          warp_coeffs_given ? &warp_coeffs : nullptr,
                          lambda_given ? &lambda : nullptr, seed);
    if (sel->parsed()) return cmd_select_ref(in_path, method, config_path, out_dir);
    if (ev->parsed()) return cmd_evaluate(run_dir, truth_dir, sweep, out_dir);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
