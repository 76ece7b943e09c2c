// proxlab command-line runner.
//
// Subcommands:
//   validate      geometry suite for the configured space
//   run           PPA trajectory with trajectory monitors
//   check-family  sampled mapping/family inequality checks
//   certify       rate certification
//
// Exit codes: 0 success, 1 property or rate failure, 2 usage/config error,
// 3 precondition failure.  All outputs are written atomically into --out.

#include <cctype>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "proxlab/proxlab.hpp"

namespace {

using nlohmann::ordered_json;

struct common_args {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
};

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw proxlab::config_error("cannot open config file " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

proxlab::experiment_config load_config(const common_args& args) {
  auto cfg = proxlab::experiment_config::from_json(load_json(args.config_path));
  if (args.seed) {
    cfg.seed = *args.seed;
    cfg.samples.seed = *args.seed;
  }
  return cfg;
}

void write_json(const std::string& out_dir, const std::string& name, const ordered_json& j) {
  proxlab::atomic_write_file(std::filesystem::path(out_dir) / name, j.dump(2) + "\n");
}

int count_violations(const std::vector<proxlab::check_report>& reports) {
  std::int64_t total = 0;
  for (const auto& r : reports) total += r.violations;
  return total > 0 ? 1 : 0;
}

int cmd_validate(const common_args& args, bool expect_violation) {
  const auto cfg = load_config(args);
  const auto reports = proxlab::validate_space(cfg.X, cfg.samples);

  ordered_json out;
  out["space"] = proxlab::space_to_json(cfg.X);
  out["seed"] = cfg.samples.seed;
  out["samples"] = cfg.samples.count;
  auto arr = ordered_json::array();
  for (const auto& r : reports) arr.push_back(r.to_json());
  out["reports"] = arr;
  write_json(args.out_dir, "validate_report.json", out);

  std::int64_t four_point_violations = 0;
  bool all_clean = true;
  for (const auto& r : reports) {
    if (r.inequality == "four-point") four_point_violations = r.violations;
    all_clean = all_clean && r.clean();
    std::cout << r.inequality << ": " << (r.clean() ? "clean" : "VIOLATED") << " ("
              << r.violations << " violations / " << r.samples << " checks)\n";
  }
  if (expect_violation) {
    const bool found = four_point_violations > 0;
    std::cout << (found ? "expected violation found\n" : "expected violation NOT found\n");
    return found ? 0 : 1;
  }
  return all_clean ? 0 : 1;
}

int cmd_run(const common_args& args) {
  const auto cfg = load_config(args);
  if (!cfg.x0) throw proxlab::config_error("run: config needs \"x0\"");
  const auto family = cfg.build_family();

  proxlab::run_options opts;
  if (cfg.p) opts.p = *cfg.p;
  const auto tr = proxlab::run_ppa(family, cfg.X, *cfg.x0, cfg.n_max, opts);

  std::vector<std::string> monitors = cfg.monitors;
  if (monitors.empty()) {
    monitors = {"residual"};
    if (tr.p) {
      monitors.push_back("fejer");
      monitors.push_back("asreg");
    }
  }

  std::vector<proxlab::check_report> reports;
  std::vector<std::int64_t> first_crossing;
  for (const auto& m : monitors) {
    if (m == "fejer") {
      auto rep = proxlab::monitor_fejer(tr);
      reports.push_back(rep.monotone);
      reports.push_back(rep.descent);
      reports.push_back(rep.cumulative);
    } else if (m == "residual") {
      auto rep = proxlab::monitor_residual(tr, static_cast<std::int64_t>(cfg.K));
      reports.push_back(rep.monotone);
      first_crossing = rep.first_crossing;
    } else if (m == "asreg") {
      reports.push_back(
          proxlab::monitor_asymptotic_regularity(family, cfg.X, tr, cfg.probes));
    } else {
      throw proxlab::config_error("run: unknown monitor \"" + m + "\"");
    }
  }

  proxlab::atomic_write_file(std::filesystem::path(args.out_dir) / "trace.csv",
                             proxlab::trace_to_csv(tr));
  ordered_json out;
  out["id"] = cfg.id;
  out["space"] = proxlab::space_to_json(cfg.X);
  out["schedule"] = family.schedule.to_json();
  out["n_max"] = cfg.n_max;
  out["eps_eval"] = tr.eps_eval;
  out["x0"] = proxlab::point_to_json(cfg.X, *cfg.x0);
  if (tr.p) out["p"] = proxlab::point_to_json(cfg.X, *tr.p);
  out["final"] = proxlab::point_to_json(cfg.X, tr.x_final);
  if (tr.p) out["final_dist_to_p"] = tr.rows.back().dist_to_p;
  if (!first_crossing.empty()) out["first_crossing"] = first_crossing;
  auto arr = ordered_json::array();
  for (const auto& r : reports) arr.push_back(r.to_json());
  out["monitors"] = arr;
  write_json(args.out_dir, "run.json", out);

  for (const auto& r : reports)
    std::cout << r.inequality << ": " << (r.clean() ? "clean" : "VIOLATED") << "\n";
  return count_violations(reports);
}

std::string normalize_name(std::string s) {
  for (auto& ch : s) {
    if (ch == '-') ch = '_';
    ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  return s;
}

int cmd_check_family(const common_args& args, std::vector<std::string> ineqs) {
  const auto cfg = load_config(args);
  if (ineqs.empty()) ineqs = cfg.inequalities;
  if (ineqs.empty())
    throw proxlab::config_error("check-family: no inequalities requested");
  const auto family = cfg.build_family();

  // Region for the uniform checks: the ball of radius b around p when both
  // are declared, otherwise the sampling region.
  proxlab::region C = cfg.samples.reg;
  if (cfg.p && cfg.b) C = proxlab::region{*cfg.p, *cfg.b};

  std::vector<proxlab::check_report> reports;
  for (const auto& raw : ineqs) {
    const std::string name = normalize_name(raw);
    if (name == "fne" || name == "p2" || name == "uniform_fne" || name == "uniform_p2") {
      if ((name == "uniform_fne" || name == "uniform_p2") && !cfg.phi)
        throw proxlab::config_error("check-family: uniform checks need a \"modulus\"");
      for (std::int64_t n : cfg.probes) {
        auto T = family.member(n);
        const double gn = family.schedule.gamma(n);
        const std::string tag = "[n=" + std::to_string(n) + "]";
        if (name == "fne") {
          auto r = proxlab::check_firmly_nonexpansive(T, cfg.X, cfg.samples);
          r.inequality += tag;
          reports.push_back(r);
        } else if (name == "p2") {
          auto r = proxlab::check_p2(T, cfg.X, cfg.samples);
          r.inequality += tag;
          reports.push_back(r);
        } else {
          const auto scaled = cfg.phi->scaled(gn);
          auto res = name == "uniform_fne"
                         ? proxlab::check_uniform_fne(T, cfg.X, C, scaled, cfg.samples)
                         : proxlab::check_uniform_p2(T, cfg.X, C, scaled, cfg.samples);
          res.inequality.inequality += tag;
          res.containment.inequality += tag;
          reports.push_back(res.inequality);
          reports.push_back(res.containment);
        }
      }
    } else if (name == "jointly_fne") {
      reports.push_back(
          proxlab::check_jointly_fne(family, cfg.X, cfg.index_pairs, cfg.samples));
    } else if (name == "jointly_p2") {
      auto res = proxlab::check_jointly_p2(family, cfg.X, cfg.index_pairs, cfg.samples);
      reports.push_back(res.p2);
      reports.push_back(res.agreement);
    } else if (name == "c1") {
      reports.push_back(proxlab::check_c1(family, cfg.X, cfg.index_pairs, cfg.samples));
    } else {
      throw proxlab::config_error("check-family: unknown inequality \"" + raw + "\"");
    }
  }

  ordered_json out;
  out["id"] = cfg.id;
  out["space"] = proxlab::space_to_json(cfg.X);
  out["schedule"] = family.schedule.to_json();
  out["seed"] = cfg.samples.seed;
  auto arr = ordered_json::array();
  for (const auto& r : reports) arr.push_back(r.to_json());
  out["reports"] = arr;
  write_json(args.out_dir, "check_family.json", out);

  for (const auto& r : reports)
    std::cout << r.inequality << ": " << (r.clean() ? "clean" : "VIOLATED") << " ("
              << r.violations << " violations / " << r.samples << " checks)\n";
  return count_violations(reports);
}

int cmd_certify(const common_args& args, std::optional<std::uint64_t> k_override) {
  const auto cfg = load_config(args);
  if (!cfg.x0 || !cfg.p || !cfg.b || !cfg.phi)
    throw proxlab::config_error("certify: config needs \"x0\", \"p\", \"b\" and \"modulus\"");

  proxlab::rate_instance inst;
  inst.family = cfg.build_family();
  inst.X = cfg.X;
  inst.x0 = *cfg.x0;
  inst.p = *cfg.p;
  inst.b = *cfg.b;
  inst.phi = *cfg.phi;
  inst.id = cfg.id;
  inst.precheck = cfg.samples;
  inst.probe_members = cfg.probes;

  const std::uint64_t K = k_override ? *k_override : cfg.K;
  const auto cert = proxlab::certify_rate(inst, K);

  write_json(args.out_dir, "certificate.json", cert.to_json());
  proxlab::atomic_write_file(std::filesystem::path(args.out_dir) / "certificate.md",
                             cert.to_markdown());

  std::cout << "certificate verdict: " << proxlab::rate_certificate::verdict_name(cert.verdict)
            << " (K=" << K << ", n_max=" << cert.n_max << ")\n";
  switch (cert.verdict) {
    case proxlab::rate_certificate::verdict_kind::pass: return 0;
    case proxlab::rate_certificate::verdict_kind::rate_failure: return 1;
    case proxlab::rate_certificate::verdict_kind::precondition_violation: return 3;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proximal point experiments over geodesic backends"};
  app.require_subcommand(1);

  common_args args;
  bool expect_violation = false;
  std::vector<std::string> ineqs;
  std::optional<std::uint64_t> k_override;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "experiment config JSON")->required();
    sub->add_option("--out", args.out_dir, "output directory (default: out)");
    sub->add_option("--seed", args.seed, "override the config seed");
  };

  auto* validate = app.add_subcommand("validate", "run the geometry suite");
  add_common(validate);
  validate->add_flag("--expect-violation", expect_violation,
                     "succeed only if the four-point check finds a violation");

  auto* run = app.add_subcommand("run", "run the proximal point iteration");
  add_common(run);

  auto* check = app.add_subcommand("check-family", "sampled inequality checks for a family");
  add_common(check);
  check->add_option("--ineq", ineqs,
                    "inequalities to check (fne, p2, uniform-fne, uniform-p2, jointly-fne, "
                    "jointly-p2, c1); defaults to the config list");

  auto* certify = app.add_subcommand("certify", "certify the convergence rate");
  add_common(certify);
  certify->add_option("--k", k_override, "certify up to precision index K");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (validate->parsed()) return cmd_validate(args, expect_violation);
    if (run->parsed()) return cmd_run(args);
    if (check->parsed()) return cmd_check_family(args, ineqs);
    if (certify->parsed()) return cmd_certify(args, k_override);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
