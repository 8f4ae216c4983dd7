// Command-line front end: fits a continuous piecewise-linear function with
// a budgeted (--segments) or penalized (--zeta) number of breakpoints to a
// CSV signal, emitting the result as CSV or JSON.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pwlfit/pwlfit.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIngest = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitPenalty = 4;
constexpr int kExitInternal = 5;
constexpr int kExitGuard = 6;

struct RunConfig {
  std::string mode = "constrained";
  int segments = 0;
  double zeta = 0.0;
  bool zeta_set = false;
  std::string kind = "discrete";
  std::string input;
  std::string format = "csv";
  bool emit_all_m = false;
  bool stats = false;
  bool oracle = false;
  int threads = 1;
};

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ';';
    out += std::to_string(v[k]);
  }
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ';';
    out += pwlfit::detail::format_double(v[k]);
  }
  return out;
}

void write_csv_row(std::ostream& os, const pwlfit::FitResult& fr) {
  os << fr.segments << ',' << pwlfit::detail::format_double(fr.objective) << ','
     << join_ints(fr.indices) << ',' << join_doubles(fr.values) << '\n';
}

void write_stats_csv(std::ostream& os, const pwlfit::InstrumentationReport& rep,
                     const pwlfit::Envelope& final_env) {
  for (std::size_t i = 0; i < rep.per_index_max.size(); ++i)
    os << i << ',' << rep.per_index_max[i] << '\n';
  os << "R," << rep.max_length << ",bound_held,"
     << (rep.bound_held ? "true" : "false") << '\n';
  os << "# final_envelope\n";
  final_env.dump(os);
}

nlohmann::ordered_json result_json(const pwlfit::FitResult& fr) {
  nlohmann::ordered_json j;
  j["segments"] = fr.segments;
  j["objective"] = fr.objective;
  j["indices"] = fr.indices;
  j["values"] = fr.values;
  return j;
}

nlohmann::ordered_json stats_json(const pwlfit::InstrumentationReport& rep,
                                  const pwlfit::Envelope& final_env) {
  nlohmann::ordered_json j;
  j["per_index_max"] = rep.per_index_max;
  j["R"] = rep.max_length;
  j["bound_held"] = rep.bound_held;
  std::ostringstream dump;
  final_env.dump(dump);
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(dump.str());
  while (std::getline(in, line)) lines.push_back(line);
  j["final_envelope"] = lines;
  return j;
}

int run(const RunConfig& cfg) {
  using namespace pwlfit;

  const SignalKind kind =
      cfg.kind == "continuous" ? SignalKind::continuous : SignalKind::discrete;
  Signal sig = io::ingest(cfg.input, kind);
  const Moments mom = compute_moments(sig);

  SolveOptions opt;
  opt.threads = cfg.threads;

  nlohmann::ordered_json jroot;
  jroot["mode"] = cfg.mode;

  if (cfg.mode == "regularized") {
    if (!(cfg.zeta >= 0.0)) throw invalid_input("zeta must be nonnegative");
    jroot["zeta"] = cfg.zeta;

    const StageTable tab = build_regularized_table(sig, mom, cfg.zeta, opt);
    FitResult fr = detail::result_from_envelope(tab.stages[0][0], tab.n, 0);
    fr.instrumentation = instrumentation_report(tab);

    if (cfg.format == "json") {
      nlohmann::ordered_json j = result_json(fr);
      for (auto& [k, v] : j.items()) jroot[k] = v;
      if (cfg.stats) jroot["stats"] = stats_json(fr.instrumentation, tab.stages[0][0]);
      std::cout << jroot.dump(2) << '\n';
    } else {
      write_csv_row(std::cout, fr);
      if (cfg.stats) write_stats_csv(std::cout, fr.instrumentation, tab.stages[0][0]);
    }
    return kExitOk;
  }

  // constrained
  if (cfg.segments < 1)
    throw infeasible("constrained mode requires --segments M >= 1");

  if (cfg.oracle) {
    std::vector<FitResult> results;
    const int m_lo = cfg.emit_all_m ? 1 : cfg.segments;
    for (int m = m_lo; m <= cfg.segments; ++m) {
      oracle::BruteResult br = oracle::brute_force(sig, m);
      FitResult fr;
      fr.indices = br.indices;
      fr.values = br.values;
      fr.objective = br.objective;
      fr.segments = m;
      results.push_back(std::move(fr));
    }
    if (cfg.format == "json") {
      if (cfg.emit_all_m) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& fr : results) arr.push_back(result_json(fr));
        jroot["results"] = arr;
      } else {
        for (auto& [k, v] : result_json(results.back()).items()) jroot[k] = v;
      }
      std::cout << jroot.dump(2) << '\n';
    } else {
      for (const auto& fr : results) write_csv_row(std::cout, fr);
    }
    return kExitOk;
  }

  const StageTable tab = build_constrained_table(sig, mom, cfg.segments, opt);
  const InstrumentationReport rep = instrumentation_report(tab);
  std::vector<FitResult> results;
  const int m_lo = cfg.emit_all_m ? 1 : cfg.segments;
  for (int m = m_lo; m <= cfg.segments; ++m) {
    FitResult fr = detail::result_from_envelope(tab.at(m, 0), tab.n, m);
    fr.instrumentation = rep;
    results.push_back(std::move(fr));
  }

  const Envelope& final_env = tab.at(cfg.segments, 0);
  if (cfg.format == "json") {
    if (cfg.emit_all_m) {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& fr : results) arr.push_back(result_json(fr));
      jroot["results"] = arr;
    } else {
      for (auto& [k, v] : result_json(results.back()).items()) jroot[k] = v;
    }
    if (cfg.stats) jroot["stats"] = stats_json(rep, final_env);
    std::cout << jroot.dump(2) << '\n';
  } else {
    for (const auto& fr : results) write_csv_row(std::cout, fr);
    if (cfg.stats) write_stats_csv(std::cout, rep, final_env);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{
      "pwlfit: least-squares fitting of a continuous piecewise-linear\n"
      "function with a budgeted or penalized number of breakpoints."};

  app.add_option("--mode", cfg.mode, "Solver mode")
      ->check(CLI::IsMember({"constrained", "regularized"}));
  auto* seg_opt = app.add_option("--segments", cfg.segments,
                                 "Segment budget M (constrained mode)");
  auto* zeta_opt =
      app.add_option("--zeta", cfg.zeta, "Per-segment penalty (regularized mode)");
  app.add_option("--kind", cfg.kind, "Signal kind")
      ->check(CLI::IsMember({"discrete", "continuous"}));
  app.add_option("--input", cfg.input, "Input CSV path")->required();
  app.add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--emit-all-m", cfg.emit_all_m,
               "Emit one result per m = 1..M (constrained mode)");
  app.add_flag("--stats", cfg.stats,
               "Append envelope-length statistics and the final envelope");
  app.add_flag("--oracle", cfg.oracle,
               "Use the exhaustive reference solver (small inputs only)");
  app.add_option("--threads", cfg.threads, "Worker threads for constrained stages")
      ->check(CLI::PositiveNumber);

  app.footer(
      "Exit codes:\n"
      "  0  success\n"
      "  1  command-line usage error\n"
      "  2  input could not be read or parsed\n"
      "  3  infeasible segment budget\n"
      "  4  invalid penalty\n"
      "  5  internal error\n"
      "  6  refused: input too large for the exhaustive solver");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  cfg.zeta_set = zeta_opt->count() > 0;
  const auto usage = [](const char* msg) {
    std::cerr << "error: " << msg << '\n';
    return kExitUsage;
  };
  if (cfg.mode == "constrained") {
    if (cfg.zeta_set) return usage("--zeta is only valid with --mode regularized");
    if (seg_opt->count() == 0) return usage("constrained mode requires --segments");
  } else {
    if (seg_opt->count() > 0)
      return usage("--segments is only valid with --mode constrained");
    if (!cfg.zeta_set) return usage("regularized mode requires --zeta");
    if (cfg.oracle) return usage("--oracle supports constrained mode only");
  }
  if (cfg.oracle && cfg.stats)
    return usage("--stats requires the dynamic-programming solver");

  try {
    return run(cfg);
  } catch (const pwlfit::parse_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIngest;
  } catch (const pwlfit::infeasible& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const pwlfit::guard_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitGuard;
  } catch (const pwlfit::internal_error& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const pwlfit::invalid_input& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPenalty;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
