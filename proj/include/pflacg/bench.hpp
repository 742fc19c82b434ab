#ifndef PFLACG_BENCH_HPP_
#define PFLACG_BENCH_HPP_

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pflacg/coupling.hpp"
#include "pflacg/problem_gen.hpp"
#include "pflacg/trace.hpp"

namespace pflacg {

enum class AlgorithmTag { afw, pfw, lazy_afw, acc, pflacg, pflacg_pfw, pflacg_lazy };

inline const char* to_string(AlgorithmTag t) {
  switch (t) {
    case AlgorithmTag::afw: return "afw";
    case AlgorithmTag::pfw: return "pfw";
    case AlgorithmTag::lazy_afw: return "lazy-afw";
    case AlgorithmTag::acc: return "acc";
    case AlgorithmTag::pflacg: return "pflacg";
    case AlgorithmTag::pflacg_pfw: return "pflacg-pfw";
    case AlgorithmTag::pflacg_lazy: return "pflacg-lazy";
  }
  return "?";
}

inline AlgorithmTag algorithm_tag_from(const std::string& s) {
  if (s == "afw") return AlgorithmTag::afw;
  if (s == "pfw") return AlgorithmTag::pfw;
  if (s == "lazy-afw") return AlgorithmTag::lazy_afw;
  if (s == "acc") return AlgorithmTag::acc;
  if (s == "pflacg") return AlgorithmTag::pflacg;
  if (s == "pflacg-pfw") return AlgorithmTag::pflacg_pfw;
  if (s == "pflacg-lazy") return AlgorithmTag::pflacg_lazy;
  throw InputError("unknown algorithm tag: " + s);
}

struct RunConfig {
  ProblemSpec problem;
  std::vector<AlgorithmTag> algorithms;
  double epsilon = 1e-6;
  CouplingMode mode = CouplingMode::lockstep;
  RunBudget budget;
  std::string output = "run.csv";
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

/// Config files are `key = value` lines with `#` comments. Keys: the
/// ProblemSpec keys (kind, n, alpha, seed, tau, pairs, zeros, caps,
/// cap_value, max_eig) plus algorithms (comma list), epsilon, mode,
/// budget_iters, budget_seconds, output.
inline RunConfig parse_run_config(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError("config line " + std::to_string(line_no) +
                       ": expected key = value");
    }
    kv[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
  }

  static const std::vector<std::string> known = {
      "kind", "n", "alpha", "seed", "tau", "pairs", "zeros", "caps",
      "cap_value", "max_eig", "algorithms", "epsilon", "mode",
      "budget_iters", "budget_seconds", "output"};
  for (const auto& [key, value] : kv) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw InputError("config: unknown key '" + key + "'");
    }
  }

  RunConfig cfg;
  cfg.problem = problem_spec_from_map(kv);
  if (auto it = kv.find("algorithms"); it != kv.end()) {
    std::stringstream ss(it->second);
    std::string tag;
    while (std::getline(ss, tag, ',')) {
      tag = detail::trim(tag);
      if (!tag.empty()) cfg.algorithms.push_back(algorithm_tag_from(tag));
    }
  }
  if (cfg.algorithms.empty()) {
    throw InputError("config: algorithms list must be nonempty");
  }
  if (auto it = kv.find("epsilon"); it != kv.end()) {
    cfg.epsilon = std::stod(it->second);
  }
  if (auto it = kv.find("mode"); it != kv.end()) {
    if (it->second == "lockstep") {
      cfg.mode = CouplingMode::lockstep;
    } else if (it->second == "parallel") {
      cfg.mode = CouplingMode::parallel;
    } else {
      throw InputError("config: mode must be lockstep or parallel");
    }
  }
  if (auto it = kv.find("budget_iters"); it != kv.end()) {
    cfg.budget.max_iterations = std::stol(it->second);
  }
  if (auto it = kv.find("budget_seconds"); it != kv.end()) {
    cfg.budget.max_seconds = std::stod(it->second);
  }
  if (auto it = kv.find("output"); it != kv.end()) cfg.output = it->second;
  return cfg;
}

inline void save_run_config(std::ostream& os, const RunConfig& cfg) {
  std::map<std::string, std::string> kv;
  problem_spec_to_map(cfg.problem, kv);
  for (const auto& [k, v] : kv) os << k << " = " << v << "\n";
  os << "algorithms = ";
  for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
    os << (i ? ", " : "") << to_string(cfg.algorithms[i]);
  }
  os << "\n";
  os << "epsilon = " << cfg.epsilon << "\n";
  os << "mode = "
     << (cfg.mode == CouplingMode::lockstep ? "lockstep" : "parallel") << "\n";
  os << "budget_iters = " << cfg.budget.max_iterations << "\n";
  if (std::isfinite(cfg.budget.max_seconds)) {
    os << "budget_seconds = " << cfg.budget.max_seconds << "\n";
  }
  os << "output = " << cfg.output << "\n";
}

struct AlgorithmOutcome {
  AlgorithmTag tag = AlgorithmTag::afw;
  bool ok = true;
  std::string error;
  double final_w = 0.0;
  double final_f = 0.0;
  long iterations = 0;
  bool converged = false;
  RunRecord last_row;  // summary counters come from the trace itself
};

/// Runs one algorithm on an experiment, streaming rows to the sink.
inline AlgorithmOutcome run_algorithm(
    AlgorithmTag tag, const Experiment& exp, double epsilon,
    CouplingMode mode, const RunBudget& budget, long run_id,
    const std::function<void(const RunRecord&)>& sink) {
  AlgorithmOutcome outcome;
  outcome.tag = tag;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };
  const std::string name = to_string(tag);
  auto push = [&](RunRecord r) {
    r.algorithm = name;
    r.run_id = run_id;
    r.elapsed_s = elapsed();
    outcome.last_row = r;
    if (sink) sink(r);
  };

  try {
    switch (tag) {
      case AlgorithmTag::afw:
      case AlgorithmTag::pfw:
      case AlgorithmTag::lazy_afw: {
        const CgVariant variant = tag == AlgorithmTag::afw ? CgVariant::afw
                                  : tag == AlgorithmTag::pfw
                                      ? CgVariant::pfw
                                      : CgVariant::lazy_afw;
        FirstOrderCounters counters;
        auto trace = [&](const CgTraceEvent& ev) {
          RunRecord r;
          r.iteration = ev.iteration;
          r.f_value = ev.f_value;
          r.wolfe_gap = ev.w;
          r.active_set_size = static_cast<long>(ev.support_size);
          r.restart = ev.epoch_end ? 1 : 0;
          r.epoch = ev.epoch;
          r.foo_calls = counters.foo_calls;
          r.lmo_calls = counters.lmo_calls;
          push(std::move(r));
        };
        auto result = run_cg(*exp.objective, *exp.region,
                             ActiveSet(exp.start), variant, epsilon, budget,
                             counters, trace);
        outcome.final_w = result.final_w;
        outcome.final_f = exp.objective->value(result.final_set.point());
        outcome.iterations = result.iterations;
        outcome.converged = result.converged;
        break;
      }
      case AlgorithmTag::acc: {
        auto* simplex = dynamic_cast<const SimplexRegion*>(exp.region.get());
        if (simplex == nullptr) {
          throw InputError(
              "acc runs standalone only over the simplex family, whose full "
              "vertex set is enumerable");
        }
        const Index n = simplex->dim();
        std::vector<std::shared_ptr<const Vertex>> verts;
        for (Index i = 0; i < n; ++i) {
          Vector e = Vector::Zero(n);
          e[i] = 1.0;
          verts.push_back(make_vertex(std::move(e)));
        }
        ActiveSet start(verts, std::vector<double>(n, 1.0 / double(n)));
        FirstOrderCounters counters;
        AccStream stream(*exp.objective, counters);
        const double s0 = sigma0_estimate(*exp.objective, start.point(),
                                          verts[0]->coords);
        counters.foo_calls += 2;
        stream.seed(start, nullptr, s0, s0);

        auto snapshot_row = [&](long call_index) {
          ActiveSet snap = stream.snapshot();
          auto gap = strong_wolfe_gap(*exp.objective, *exp.region, snap,
                                      counters);
          RunRecord r;
          r.iteration = call_index;
          r.f_value = gap.f_value;
          r.wolfe_gap = gap.w;
          r.active_set_size = static_cast<long>(snap.size());
          r.epoch = call_index;
          r.foo_calls = counters.foo_calls;
          r.lmo_calls = counters.lmo_calls;
          push(std::move(r));
          return gap.w;
        };
        double w = snapshot_row(0);
        long units = 0;
        while (w > epsilon && units < budget.max_iterations &&
               elapsed() <= budget.max_seconds && stream.active()) {
          const AccEvent ev = stream.advance();
          ++units;
          if (ev == AccEvent::call_complete) {
            w = snapshot_row(stream.call_count());
          } else if (ev == AccEvent::converged) {
            w = snapshot_row(stream.call_count());
            break;
          }
        }
        outcome.final_w = w;
        outcome.final_f = exp.objective->value(stream.latest_point());
        outcome.iterations = units;
        outcome.converged = w <= epsilon;
        break;
      }
      case AlgorithmTag::pflacg:
      case AlgorithmTag::pflacg_pfw:
      case AlgorithmTag::pflacg_lazy: {
        CouplingConfig cfg;
        cfg.epsilon = epsilon;
        cfg.mode = mode;
        cfg.budget = budget;
        cfg.cg_variant = tag == AlgorithmTag::pflacg ? CgVariant::afw
                         : tag == AlgorithmTag::pflacg_pfw
                             ? CgVariant::pfw
                             : CgVariant::lazy_afw;
        auto trace = [&](const CouplingTraceEvent& ev) {
          RunRecord r;
          r.iteration = ev.sequence;
          r.f_value = ev.f_value;
          r.wolfe_gap = ev.w;
          r.active_set_size = static_cast<long>(ev.support_size);
          r.restart = ev.restart ? 1 : 0;
          r.epoch = ev.epoch;
          r.foo_calls = ev.foo_calls;
          r.lmo_calls = ev.lmo_calls;
          push(std::move(r));
        };
        auto result = pflacg_run(*exp.objective, *exp.region, exp.start, cfg,
                                 trace);
        outcome.final_w = result.w_out;
        outcome.final_f = exp.objective->value(result.out_set.point());
        outcome.iterations = result.iterations;
        outcome.converged = result.converged;
        break;
      }
    }
  } catch (const std::exception& e) {
    outcome.ok = false;
    outcome.error = e.what();
  }
  return outcome;
}

/// High-accuracy reference solve for primal-gap reporting: a lockstep
/// coupled run driven to a strong Wolfe gap of 1e-11, which bounds the
/// primal gap by the same amount.
struct ReferenceOptimum {
  Vector x;
  double f_value = 0.0;
  double w = 0.0;
};

inline ReferenceOptimum reference_optimum(const Experiment& exp,
                                          RunBudget budget = {2000000, 600.0}) {
  CouplingConfig cfg;
  cfg.epsilon = 1e-11;
  cfg.mode = CouplingMode::lockstep;
  cfg.budget = budget;
  auto r = pflacg_run(*exp.objective, *exp.region, exp.start, cfg);
  ReferenceOptimum ref;
  ref.x = r.out_set.point();
  ref.f_value = exp.objective->value(ref.x);
  ref.w = r.w_out;
  return ref;
}

inline void print_summary_header(std::ostream& os) {
  os << std::left << std::setw(14) << "algorithm" << std::right
     << std::setw(13) << "final_w" << std::setw(12) << "iterations"
     << std::setw(12) << "foo_calls" << std::setw(12) << "lmo_calls"
     << std::setw(14) << "status" << "\n";
}

inline void print_summary_row(std::ostream& os, const AlgorithmOutcome& o) {
  os << std::left << std::setw(14) << to_string(o.tag) << std::right;
  if (o.ok) {
    os << std::setw(13) << std::scientific << std::setprecision(3)
       << o.final_w << std::setw(12) << o.iterations << std::setw(12)
       << o.last_row.foo_calls << std::setw(12) << o.last_row.lmo_calls
       << std::setw(14) << (o.converged ? "converged" : "budget");
  } else {
    os << "  error: " << o.error;
  }
  os << "\n";
}

/// `run --config <file>`: execute every configured algorithm on the
/// generated problem, stream rows into one CSV, print a summary table.
inline int cmd_run(const RunConfig& cfg, std::ostream& out,
                   std::ostream& err) {
  Experiment exp;
  try {
    exp = generate_experiment(cfg.problem);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  std::ofstream csv(cfg.output);
  if (!csv) {
    err << "error: cannot open output file " << cfg.output << "\n";
    return 2;
  }
  write_csv_header(csv);
  out << "problem: " << exp.description << "\n";
  print_summary_header(out);
  bool any_error = false;
  for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
    auto outcome = run_algorithm(
        cfg.algorithms[i], exp, cfg.epsilon, cfg.mode, cfg.budget,
        static_cast<long>(i),
        [&csv](const RunRecord& r) { write_csv_row(csv, r); });
    print_summary_row(out, outcome);
    any_error = any_error || !outcome.ok;
  }
  out << "trace written to " << cfg.output << "\n";
  (void)any_error;  // recorded in the table; other algorithms continued
  return 0;
}

enum class BenchFamily { simplex, lasso, birkhoff };
enum class BenchScale { desk, full };

inline BenchFamily bench_family_from(const std::string& s) {
  if (s == "simplex") return BenchFamily::simplex;
  if (s == "lasso") return BenchFamily::lasso;
  if (s == "birkhoff") return BenchFamily::birkhoff;
  throw InputError("unknown bench family: " + s);
}

/// The per-family problem parameters. Desk scales finish a full comparison
/// in minutes on one core; full scales are the sizes reported for these
/// experiment families (simplex n=10000 alpha=500, lasso n=1000 alpha=100
/// with 125 merged pairs, birkhoff 20x20 with 40 zeroed and 40 capped cells
/// and the quadratic rescaled to a top eigenvalue of 1e5).
inline ProblemSpec bench_problem_spec(BenchFamily family, BenchScale scale,
                                      std::uint64_t seed) {
  ProblemSpec spec;
  spec.seed = seed;
  switch (family) {
    case BenchFamily::simplex:
      spec.kind = ProblemKind::simplex;
      if (scale == BenchScale::full) {
        spec.n = 10000;
        spec.alpha = 500.0;
      } else {
        spec.n = 500;       // kappa ~ n^2/(4 alpha) ~ 5e3
        spec.alpha = 12.5;
      }
      break;
    case BenchFamily::lasso:
      spec.kind = ProblemKind::structured_lasso;
      spec.tau = 1.0;
      if (scale == BenchScale::full) {
        spec.n = 1000;
        spec.alpha = 100.0;
        spec.pair_count = 125;
      } else {
        spec.n = 200;
        spec.alpha = 10.0;
        spec.pair_count = 25;
      }
      break;
    case BenchFamily::birkhoff:
      spec.kind = ProblemKind::constrained_birkhoff;
      spec.alpha = 1.0;
      spec.cap_value = 0.5;
      if (scale == BenchScale::full) {
        spec.n = 400;
        spec.zero_count = 40;
        spec.cap_count = 40;
        spec.max_eig = 1e5;
      } else {
        spec.n = 64;
        spec.zero_count = 8;
        spec.cap_count = 8;
        spec.max_eig = 1e3;
      }
      break;
  }
  return spec;
}

/// The comparison set per family; the birkhoff family couples the lazified
/// CG variant, the others the plain and pairwise ones.
inline std::vector<AlgorithmTag> bench_algorithms(BenchFamily family) {
  switch (family) {
    case BenchFamily::simplex:
    case BenchFamily::lasso:
      return {AlgorithmTag::afw, AlgorithmTag::pfw, AlgorithmTag::lazy_afw,
              AlgorithmTag::pflacg, AlgorithmTag::pflacg_pfw};
    case BenchFamily::birkhoff:
      return {AlgorithmTag::afw, AlgorithmTag::lazy_afw, AlgorithmTag::pflacg,
              AlgorithmTag::pflacg_lazy};
  }
  return {};
}

struct BenchOptions {
  std::uint64_t seed = 42;
  CouplingMode mode = CouplingMode::lockstep;
  double epsilon = 1e-8;
  RunBudget budget{1000000, 240.0};
};

/// `bench --family <name> --scale <desk|full> --out <dir>`: run the family's
/// comparison set, one CSV per algorithm plus a combined summary CSV with
/// primal gaps against a high-accuracy reference.
inline int cmd_bench(BenchFamily family, BenchScale scale,
                     const std::string& out_dir, const BenchOptions& opt,
                     std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    err << "error: cannot create output directory " << out_dir << "\n";
    return 2;
  }
  const ProblemSpec spec = bench_problem_spec(family, scale, opt.seed);
  out << "generating " << spec.label() << " ...\n";
  Experiment exp;
  try {
    exp = generate_experiment(spec);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  out << "problem: " << exp.description << "\n";
  out << "computing reference optimum ...\n";
  const ReferenceOptimum ref = reference_optimum(exp);
  out << "reference f* = " << std::setprecision(17) << ref.f_value
      << " (w = " << ref.w << ")\n";

  const std::string family_name =
      family == BenchFamily::simplex ? "simplex"
      : family == BenchFamily::lasso ? "lasso"
                                     : "birkhoff";
  std::ofstream summary(fs::path(out_dir) /
                        (family_name + "-summary.csv"));
  summary << "family,algorithm,converged,final_w,primal_gap,iterations,"
             "foo_calls,lmo_calls\n";
  print_summary_header(out);
  for (AlgorithmTag tag : bench_algorithms(family)) {
    const std::string path =
        (fs::path(out_dir) / (family_name + "-" + to_string(tag) + ".csv"))
            .string();
    std::ofstream csv(path);
    write_csv_header(csv);
    auto outcome = run_algorithm(
        tag, exp, opt.epsilon, opt.mode, opt.budget, 0,
        [&csv](const RunRecord& r) { write_csv_row(csv, r); });
    print_summary_row(out, outcome);
    summary << family_name << ',' << to_string(tag) << ','
            << (outcome.converged ? 1 : 0) << ','
            << detail::csv_double(outcome.final_w) << ','
            << detail::csv_double(outcome.final_f - ref.f_value) << ','
            << outcome.iterations << ',' << outcome.last_row.foo_calls << ','
            << outcome.last_row.lmo_calls << "\n";
  }
  out << "wrote per-algorithm CSVs and " << family_name << "-summary.csv to "
      << out_dir << "\n";
  return 0;
}

/// `compare <csv>...`: iteration-to-threshold table per run, and for every
/// coupled run the first epoch at which its gap is at or below each
/// baseline's at the same epoch.
inline int cmd_compare(const std::vector<std::string>& paths,
                       std::ostream& out, std::ostream& err) {
  if (paths.size() < 2) {
    err << "error: compare needs at least two CSV files\n";
    return 2;
  }
  struct Series {
    std::string path;
    std::string algorithm;
    std::vector<RunRecord> rows;
    std::map<long, double> epoch_w;  // gap at each epoch boundary
  };
  std::vector<Series> series;
  for (const auto& path : paths) {
    std::ifstream is(path);
    if (!is) {
      err << "warning: skipping unreadable file " << path << "\n";
      continue;
    }
    try {
      Series s;
      s.path = path;
      s.rows = read_csv(is);
      if (s.rows.empty()) {
        err << "warning: skipping empty trace " << path << "\n";
        continue;
      }
      s.algorithm = s.rows.front().algorithm;
      s.epoch_w[0] = s.rows.front().wolfe_gap;
      for (const auto& r : s.rows) {
        if (r.restart != 0) s.epoch_w[r.epoch] = r.wolfe_gap;
      }
      series.push_back(std::move(s));
    } catch (const std::exception& e) {
      err << "warning: skipping malformed file " << path << " (" << e.what()
          << ")\n";
    }
  }
  if (series.empty()) {
    err << "warning: nothing to compare\n";
    return 0;
  }

  std::size_t name_width = 12;
  for (const auto& s : series) {
    name_width = std::max(
        name_width,
        std::filesystem::path(s.path).filename().string().size() +
            s.algorithm.size() + 4);
  }
  out << "iterations to reach gap thresholds:\n";
  out << std::left << std::setw(static_cast<int>(name_width)) << "file";
  std::vector<double> thresholds;
  for (int p = 2; p <= 10; p += 2) thresholds.push_back(std::pow(10.0, -p));
  for (double t : thresholds) {
    out << std::right << std::setw(9) << std::scientific
        << std::setprecision(0) << t;
  }
  out << "\n";
  for (const auto& s : series) {
    out << std::left << std::setw(static_cast<int>(name_width))
        << (std::filesystem::path(s.path).filename().string() + " [" +
            s.algorithm + "]");
    for (double t : thresholds) {
      long hit = -1;
      for (const auto& r : s.rows) {
        if (r.wolfe_gap <= t) {
          hit = r.iteration;
          break;
        }
      }
      out << std::right << std::setw(9);
      if (hit >= 0) {
        out << hit;
      } else {
        out << "-";
      }
    }
    out << "\n";
  }

  out << "\ncrossover epochs (first epoch with coupled gap <= baseline's):\n";
  for (const auto& pf : series) {
    if (pf.algorithm.rfind("pflacg", 0) != 0) continue;
    for (const auto& base : series) {
      if (&base == &pf || base.algorithm.rfind("pflacg", 0) == 0) continue;
      long crossover = -1;
      for (const auto& [epoch, w] : pf.epoch_w) {
        auto it = base.epoch_w.find(epoch);
        if (it == base.epoch_w.end()) continue;
        if (w <= it->second) {
          crossover = epoch;
          break;
        }
      }
      out << "  " << pf.algorithm << " vs " << base.algorithm << ": ";
      if (crossover >= 0) {
        out << "epoch " << crossover << "\n";
      } else {
        out << "none within shared epochs\n";
      }
    }
  }
  return 0;
}

}  // namespace pflacg

#endif  // PFLACG_BENCH_HPP_
