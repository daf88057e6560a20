#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "binci/coverage.hpp"
#include "binci/estimators.hpp"
#include "binci/format.hpp"
#include "binci/olc_solver.hpp"
#include "binci/special_functions.hpp"
#include "binci/verification.hpp"

#ifndef BINCI_DATA_DIR
#define BINCI_DATA_DIR "data"
#endif

namespace {

using namespace binci;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

using json = nlohmann::json;

json output_record(const std::string& command, json payload) {
  return json{{"schema_version", 1}, {"command", command}, {"payload", std::move(payload)}};
}

std::string fmt_value(double v, bool round4_flag) {
  return round4_flag ? fmt_fixed4(v) : fmt_sig10(v);
}

void warn_outside_range(method_id m, double alpha) {
  if (m == method_id::olc && !(alpha > 0.0001 && alpha < 0.27)) {
    std::cerr << "warning: alpha=" << alpha
              << " is outside the guaranteed solvable range (0.0001, 0.27); "
                 "attempting anyway\n";
  }
}

struct parsed_range {
  int lo = 0, hi = 0;
};

std::optional<parsed_range> parse_n_range(const std::string& s) {
  const auto colon = s.find(':');
  try {
    if (colon == std::string::npos) {
      const int v = std::stoi(s);
      return parsed_range{v, v};
    }
    const int lo = std::stoi(s.substr(0, colon));
    const int hi = std::stoi(s.substr(colon + 1));
    if (lo < 1 || hi < lo) return std::nullopt;
    return parsed_range{lo, hi};
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

int cmd_interval(method_id m, int n, int x, std::optional<double> conf,
                 std::optional<double> alpha, std::optional<tail_side> tail,
                 const std::string& format) {
  if (x < 0 || x > n) {
    std::cerr << "error: x must lie in [0, n]\n";
    return kExitUsage;
  }
  double lo = 0.0, hi = 1.0;
  double conf_level;
  std::string kind;
  if (conf) {
    const double a = (1.0 - *conf) / 2.0;
    warn_outside_range(m, a);
    const auto iv = two_tail_interval(m, n, x, 1.0 - *conf);
    lo = iv.lower;
    hi = iv.upper;
    conf_level = *conf;
    kind = "two-tail";
  } else {
    warn_outside_range(m, *alpha);
    const auto t = make_endpoint_table(m, n, *alpha, *tail);
    if (*tail == tail_side::upper) {
      hi = t.endpoints[x];
      lo = 0.0;
    } else {
      lo = t.endpoints[x];
      hi = 1.0;
    }
    conf_level = 1.0 - *alpha;
    kind = std::string("one-tail ") + std::string(tail_name(*tail));
  }
  if (hi - lo == 0.0) {
    std::cerr << "warning: degenerate zero-width interval (the method's documented "
                 "behavior at this x)\n";
  }
  if (format == "json") {
    json payload{{"method", std::string(method_name(m))}, {"n", n},     {"x", x},
                 {"kind", kind},                          {"confidence", conf_level},
                 {"lower", lo},                           {"upper", hi}};
    std::cout << output_record("interval", payload).dump(2) << "\n";
  } else {
    std::printf("%s n=%d x=%d %s %g%% interval: (%s, %s)\n",
                std::string(method_name(m)).c_str(), n, x, kind.c_str(),
                100.0 * conf_level, fmt_fixed4(lo).c_str(), fmt_fixed4(hi).c_str());
  }
  return kExitOk;
}

int cmd_table(method_id m, const parsed_range& nr, double conf, const std::string& format,
              bool round4_flag) {
  const double a = (1.0 - conf) / 2.0;
  warn_outside_range(m, a);
  json rows = json::array();
  if (format == "csv") std::printf("n,x,lower,upper\n");
  for (int n = nr.lo; n <= nr.hi; ++n) {
    const auto up = make_endpoint_table(m, n, a, tail_side::upper);
    const auto lo = make_endpoint_table(m, n, a, tail_side::lower);
    for (int x = 0; x <= n; ++x) {
      if (format == "csv") {
        std::printf("%d,%d,%s,%s\n", n, x, fmt_value(lo.endpoints[x], round4_flag).c_str(),
                    fmt_value(up.endpoints[x], round4_flag).c_str());
      } else {
        rows.push_back({{"n", n},
                        {"x", x},
                        {"lower", round4_flag ? round4(lo.endpoints[x]) : lo.endpoints[x]},
                        {"upper", round4_flag ? round4(up.endpoints[x]) : up.endpoints[x]}});
      }
    }
  }
  if (format == "json") {
    json payload{{"method", std::string(method_name(m))}, {"confidence", conf},
                 {"rows", std::move(rows)}};
    std::cout << output_record("table", payload).dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_coverage(method_id m, int n, double alpha, tail_side tail, int samples,
                 const std::string& format) {
  warn_outside_range(m, alpha);
  const auto t = make_endpoint_table(m, n, alpha, tail);
  const auto prof = make_coverage_profile(t);
  if (format == "csv") {
    std::printf("kind,x,p_lo,p_hi,value\n");
    for (int k = 1; k <= samples; ++k) {
      const double p = static_cast<double>(k) / (samples + 1);
      std::printf("sample,,%s,,%s\n", fmt_sig10(p).c_str(),
                  fmt_sig10(coverage_at(t, p)).c_str());
    }
    for (int x = 0; x <= n; ++x) {
      std::printf("spike,%d,%s,,%s\n", x, fmt_sig10(prof.spikes[x]).c_str(),
                  fmt_sig10(prof.drops[x]).c_str());
    }
    for (const auto& g : prof.gaps) {
      std::printf("gap,%d,%s,%s,%s\n", g.index, fmt_sig10(g.lo).c_str(),
                  fmt_sig10(g.hi).c_str(), fmt_sig10(g.average).c_str());
    }
    return kExitOk;
  }
  json samples_j = json::array(), spikes_j = json::array(), gaps_j = json::array();
  for (int k = 1; k <= samples; ++k) {
    const double p = static_cast<double>(k) / (samples + 1);
    samples_j.push_back({{"p", p}, {"coverage", coverage_at(t, p)}});
  }
  for (int x = 0; x <= n; ++x) {
    spikes_j.push_back({{"x", x}, {"location", prof.spikes[x]}, {"drop", prof.drops[x]}});
  }
  for (const auto& g : prof.gaps) {
    gaps_j.push_back(
        {{"index", g.index}, {"lo", g.lo}, {"hi", g.hi}, {"average", g.average}});
  }
  json payload{{"method", std::string(method_name(m))},
               {"n", n},
               {"alpha", alpha},
               {"tail", std::string(tail_name(tail))},
               {"samples", std::move(samples_j)},
               {"spikes", std::move(spikes_j)},
               {"gap_averages", std::move(gaps_j)}};
  std::cout << output_record("coverage", payload).dump(2) << "\n";
  return kExitOk;
}

int cmd_metrics(const std::vector<std::string>& method_names, std::vector<int> ns,
                std::vector<double> alphas, const std::string& format, bool round4_flag) {
  std::vector<method_id> methods;
  for (const auto& name : method_names) {
    const auto m = parse_method(name);
    if (!m) {
      std::cerr << "error: unknown method '" << name << "'\n";
      return kExitUsage;
    }
    methods.push_back(*m);
  }
  if (methods.empty() || ns.empty() || alphas.empty()) {
    std::cerr << "error: --methods, --n and --alpha must be non-empty\n";
    return kExitUsage;
  }
  // fixed output order regardless of flag order
  std::sort(ns.begin(), ns.end());
  std::sort(alphas.begin(), alphas.end());
  std::vector<method_id> ordered;
  for (method_id m : all_methods) {
    if (std::find(methods.begin(), methods.end(), m) != methods.end()) {
      ordered.push_back(m);
    }
  }
  json rows = json::array();
  if (format == "csv") {
    std::printf("method,n,alpha,t_u,u0,avg_full_range,avg_two_tail,rmse,ael\n");
  }
  for (method_id m : ordered) {
    for (int n : ns) {
      for (double a : alphas) {
        warn_outside_range(m, a);
        const auto up = make_endpoint_table(m, n, a, tail_side::upper);
        const auto lo = make_endpoint_table(m, n, a, tail_side::lower);
        const auto trunc = truncated_average_coverage(up);
        const double rmse = coverage_rmse(up);
        double s = 0.0;
        for (int x = 0; x <= n; ++x) {
          s += std::min(up.endpoints[x], 1.0) - std::max(lo.endpoints[x], 0.0);
        }
        const double ael_v = s / (n + 1.0);
        if (format == "csv") {
          std::printf("%s,%d,%s,%s,%s,%s,%s,%s,%s\n",
                      std::string(method_name(m)).c_str(), n, fmt_sig10(a).c_str(),
                      fmt_value(trunc.t_u, round4_flag).c_str(),
                      fmt_value(trunc.u0, round4_flag).c_str(),
                      fmt_value(trunc.full_range_average, round4_flag).c_str(),
                      fmt_value(trunc.two_tail_average, round4_flag).c_str(),
                      fmt_value(rmse, round4_flag).c_str(),
                      fmt_value(ael_v, round4_flag).c_str());
        } else {
          rows.push_back({{"method", std::string(method_name(m))},
                          {"n", n},
                          {"alpha", a},
                          {"t_u", trunc.t_u},
                          {"u0", trunc.u0},
                          {"avg_full_range", trunc.full_range_average},
                          {"avg_two_tail", trunc.two_tail_average},
                          {"rmse", rmse},
                          {"ael", ael_v}});
        }
      }
    }
  }
  if (format == "json") {
    std::cout << output_record("metrics", json{{"rows", std::move(rows)}}).dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_verify(bool full, const std::string& json_path, const std::string& data_dir,
               int n_max_override, bool serial) {
  verify_options opt;
  opt.n_max = n_max_override > 0 ? n_max_override : (full ? 200 : 100);
  opt.data_dir = data_dir;
  opt.parallel = !serial;
  const auto rep = run_verification(opt);
  std::cout << report_to_text(rep);
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    if (!out) {
      std::cerr << "error: cannot write " << json_path << "\n";
      return kExitUsage;
    }
    out << report_to_json(rep) << "\n";
  }
  return rep.all_pass ? kExitOk : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"binomial proportion interval estimation and coverage analysis"};
  app.require_subcommand(1);

  std::string method_str = "olc";
  int n = 0, x = 0;
  std::optional<double> conf, alpha_one;
  std::string tail_str = "upper";
  std::string format = "csv";
  bool round4_flag = false;

  auto* sc_interval = app.add_subcommand("interval", "single interval estimate");
  sc_interval->add_option("--method", method_str, "estimator")->required();
  sc_interval->add_option("--n", n, "trial count")->required()->check(CLI::PositiveNumber);
  sc_interval->add_option("--x", x, "observed successes")->required();
  auto* conf_opt =
      sc_interval->add_option("--conf", conf, "two-tail confidence level 1-2*alpha");
  auto* alpha_opt =
      sc_interval->add_option("--alpha", alpha_one, "one-tail error rate alpha");
  conf_opt->excludes(alpha_opt);
  alpha_opt->excludes(conf_opt);
  sc_interval->add_option("--tail", tail_str, "upper|lower (with --alpha)");
  std::string iv_format = "text";
  sc_interval->add_option("--format", iv_format, "text|json");

  std::string n_range_str;
  auto* sc_table = app.add_subcommand("table", "endpoint tables over a range of n");
  sc_table->add_option("--method", method_str, "estimator")->required();
  sc_table->add_option("--n-range", n_range_str, "n range, e.g. 1:30")->required();
  sc_table->add_option("--conf", conf, "two-tail confidence level")->required();
  sc_table->add_option("--format", format, "csv|json");
  sc_table->add_flag("--round4", round4_flag, "4-decimal half-away-from-zero rounding");

  int samples = 1000;
  auto* sc_coverage = app.add_subcommand("coverage", "coverage profile export");
  sc_coverage->add_option("--method", method_str, "estimator")->required();
  sc_coverage->add_option("--n", n, "trial count")->required()->check(CLI::PositiveNumber);
  sc_coverage->add_option("--alpha", alpha_one, "one-tail error rate")->required();
  sc_coverage->add_option("--tail", tail_str, "upper|lower");
  sc_coverage->add_option("--samples", samples, "number of p samples")
      ->check(CLI::PositiveNumber);
  sc_coverage->add_option("--format", format, "csv|json");

  std::vector<std::string> methods_list;
  std::vector<int> n_list;
  std::vector<double> alpha_list;
  auto* sc_metrics = app.add_subcommand("metrics", "coverage/length metrics grid");
  sc_metrics->add_option("--methods", methods_list, "comma-separated estimators")
      ->delimiter(',');
  sc_metrics->add_option("--n", n_list, "comma-separated trial counts")->delimiter(',');
  sc_metrics->add_option("--alpha", alpha_list, "comma-separated one-tail alphas")
      ->delimiter(',');
  sc_metrics->add_option("--format", format, "csv|json");
  sc_metrics->add_flag("--round4", round4_flag, "4-decimal rounding");

  bool full = false, serial = false;
  std::string json_path, data_dir = BINCI_DATA_DIR;
  int n_max_override = 0;
  auto* sc_verify = app.add_subcommand("verify", "run the verification harness");
  sc_verify->add_flag("--full", full, "extend grid sweeps to n = 200");
  sc_verify->add_option("--json", json_path, "write the JSON report to this path");
  sc_verify->add_option("--data", data_dir, "golden fixture directory");
  sc_verify->add_option("--nmax", n_max_override, "override the sweep upper bound");
  sc_verify->add_flag("--serial", serial, "disable the OpenMP grid parallelism");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sc_interval->parsed()) {
      if (!conf && !alpha_one) {
        std::cerr << "error: one of --conf or --alpha is required\n";
        return kExitUsage;
      }
      std::optional<tail_side> tail;
      if (alpha_one) {
        tail = parse_tail(tail_str);
        if (!tail) {
          std::cerr << "error: --tail must be upper or lower\n";
          return kExitUsage;
        }
      }
      if (conf && !(*conf > 0.0 && *conf < 1.0)) {
        std::cerr << "error: --conf outside (0, 1)\n";
        return kExitUsage;
      }
      if (alpha_one && !(*alpha_one > 0.0 && *alpha_one < 0.5)) {
        std::cerr << "error: --alpha outside (0, 0.5)\n";
        return kExitUsage;
      }
      const auto m = parse_method(method_str);
      if (!m) {
        std::cerr << "error: unknown method '" << method_str << "'\n";
        return kExitUsage;
      }
      return cmd_interval(*m, n, x, conf, alpha_one, tail, iv_format);
    }
    if (sc_table->parsed()) {
      const auto m = parse_method(method_str);
      const auto nr = parse_n_range(n_range_str);
      if (!m || !nr || !(*conf > 0.0 && *conf < 1.0)) {
        std::cerr << "error: invalid table arguments\n";
        return kExitUsage;
      }
      return cmd_table(*m, *nr, *conf, format, round4_flag);
    }
    if (sc_coverage->parsed()) {
      const auto m = parse_method(method_str);
      const auto tail = parse_tail(tail_str);
      if (!m || !tail || !(*alpha_one > 0.0 && *alpha_one < 0.5)) {
        std::cerr << "error: invalid coverage arguments\n";
        return kExitUsage;
      }
      return cmd_coverage(*m, n, *alpha_one, *tail, samples, format);
    }
    if (sc_metrics->parsed()) {
      return cmd_metrics(methods_list, n_list, alpha_list, format, round4_flag);
    }
    if (sc_verify->parsed()) {
      return cmd_verify(full, json_path, data_dir, n_max_override, serial);
    }
  } catch (const binci::bracket_error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const binci::convergence_error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
