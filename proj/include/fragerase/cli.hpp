/*
   Copyright 2026 The fragerase Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// Experiment driver: `fragerase <command> [flags]`.
//
// Commands: fragment | bulk | endpoint | rate | walk | verify.
// Exit codes: 0 success, 1 verification failure, 2 invalid input.
//
// Every flag can also come from a JSON file given with --config; keys are
// the flag names without dashes (e.g. {"rule": "const:p=0.5", "n": 100}).
// Flags on the command line override the file. Output goes to --out (plus a
// `<out>.meta.json` sidecar) or to stdout with metadata on stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fragerase/error.hpp"
#include "fragerase/fragmenter.hpp"
#include "fragerase/limits.hpp"
#include "fragerase/proportions.hpp"
#include "fragerase/rule_spec.hpp"
#include "fragerase/verify.hpp"
#include "fragerase/walk.hpp"

namespace fragerase::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kBadInput = 2 };

struct ExperimentConfig {
  std::string command;
  std::string rule = "const:p=0.5";
  int n = 1000;
  std::uint64_t seed = 1;
  int replicas = 0;
  std::string out;
  std::size_t atoms = kDefaultAtomCount;
  bool closed = true;
  std::vector<std::pair<double, double>> pairs;  // bulk grid
  std::vector<double> xs;                        // endpoint grid
  std::vector<double> alphas;                    // rate grid
  bool skip_out_of_range = false;
  bool exact_limit = false;
  double perturb = 0.0;
  int max_enum_n = 14;
  unsigned threads = 1;
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [x, y] : c.pairs) pairs.push_back({x, y});
  return {{"command", c.command},
          {"rule", c.rule},
          {"n", c.n},
          {"seed", c.seed},
          {"replicas", c.replicas},
          {"out", c.out},
          {"atoms", c.atoms},
          {"closed", c.closed},
          {"pairs", pairs},
          {"xs", c.xs},
          {"alphas", c.alphas},
          {"skip_out_of_range", c.skip_out_of_range},
          {"exact_limit", c.exact_limit},
          {"perturb", c.perturb},
          {"max_enum_n", c.max_enum_n},
          {"threads", c.threads}};
}

/// Overlays the keys present in `j` onto `c`.
inline void apply_json(ExperimentConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw Error(Errc::BadRuleSpec, "config must be a JSON object");
  auto take = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  take("rule", c.rule);
  take("n", c.n);
  take("seed", c.seed);
  take("replicas", c.replicas);
  take("out", c.out);
  take("atoms", c.atoms);
  take("closed", c.closed);
  if (j.contains("half_open")) c.closed = !j.at("half_open").get<bool>();
  take("xs", c.xs);
  take("alphas", c.alphas);
  take("skip_out_of_range", c.skip_out_of_range);
  take("exact_limit", c.exact_limit);
  take("perturb", c.perturb);
  take("max_enum_n", c.max_enum_n);
  take("threads", c.threads);
  if (j.contains("pairs")) {
    c.pairs.clear();
    for (const auto& p : j.at("pairs")) {
      if (!p.is_array() || p.size() != 2)
        throw Error(Errc::BadGrid, "pairs entries must be [x, y]");
      c.pairs.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
  }
}

/// "0.25:0.75,0.1:0.9"
inline std::vector<std::pair<double, double>> parse_pairs(std::string_view s) {
  std::vector<std::pair<double, double>> out;
  for (auto item : detail::split(s, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string_view::npos)
      throw Error(Errc::BadGrid, "pair '" + std::string(item) + "' needs x:y");
    out.emplace_back(detail::parse_double(item.substr(0, colon), "x"),
                     detail::parse_double(item.substr(colon + 1), "y"));
  }
  return out;
}

inline std::vector<double> parse_values(std::string_view s) {
  std::vector<double> out;
  for (auto item : detail::split(s, ','))
    out.push_back(detail::parse_double(item, "grid value"));
  return out;
}

inline std::vector<std::pair<double, double>> default_bulk_pairs() {
  return {{0.1, 0.9}, {0.25, 0.75}, {0.4, 0.6}, {0.2, 0.5}, {0.5, 0.8}};
}

inline std::vector<double> default_endpoint_xs() {
  std::vector<double> xs;
  for (int i = 1; i <= 19; ++i) xs.push_back(i / 20.0);
  xs.push_back(0.99);
  return xs;
}

namespace detail {

struct Output {
  std::ofstream file;
  std::ostream* os;
};

inline Output open_output(const ExperimentConfig& cfg, std::ostream& fallback) {
  Output o{{}, &fallback};
  if (!cfg.out.empty()) {
    o.file.open(cfg.out);
    if (!o.file) throw Error(Errc::BadRuleSpec, "cannot write '" + cfg.out + "'");
    o.os = &o.file;
  }
  return o;
}

inline nlohmann::json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  return csv::fmt(v);
}

inline void write_metadata(const ExperimentConfig& cfg, const SplittingRule* rule,
                           nlohmann::json extra, std::ostream& err) {
  nlohmann::json meta = {{"version", kVersion}, {"config", to_json(cfg)}};
  if (rule) meta["rule_description"] = rule->describe();
  if (!extra.is_null()) meta["results"] = std::move(extra);
  if (cfg.out.empty()) {
    err << meta.dump(2) << '\n';
    return;
  }
  std::ofstream side(cfg.out + ".meta.json");
  if (!side) throw Error(Errc::BadRuleSpec, "cannot write sidecar for '" + cfg.out + "'");
  side << meta.dump(2) << '\n';
}

inline void require_n(const ExperimentConfig& cfg) {
  if (cfg.n < 1) throw Error(Errc::IndexOutOfRange, "n must be ≥ 1");
}

}  // namespace detail

inline int cmd_fragment(const ExperimentConfig& cfg, std::ostream& out,
                        std::ostream& err) {
  detail::require_n(cfg);
  const auto rule = parse_rule_spec(cfg.rule);
  const auto env = realize_environment(rule, cfg.n, cfg.seed);
  const auto part = evolve(env, cfg.n);
  const auto lp = evolve_log(env, cfg.n);
  auto o = detail::open_output(cfg, out);
  write_partition_csv(*o.os, part, lp);
  detail::write_metadata(cfg, &rule,
                         {{"n", cfg.n}, {"longest_interval", longest_interval(part)}},
                         err);
  return kOk;
}

inline int cmd_bulk(const ExperimentConfig& cfg, std::ostream& out,
                    std::ostream& err) {
  detail::require_n(cfg);
  const auto rule = parse_rule_spec(cfg.rule);
  const auto pairs = cfg.pairs.empty() ? default_bulk_pairs() : cfg.pairs;
  for (const auto& [x, y] : pairs)
    if (!(x > 0.0 && y < 1.0 && x <= y))
      throw Error(Errc::BadGrid,
                  "bulk pairs must lie strictly inside (0,1) with x <= y");
  const auto sc = make_bulk_scaling(rule, cfg.n);
  const auto env = realize_environment(rule, cfg.n, cfg.seed);
  const auto part = evolve(env, cfg.n);
  const auto rows = bulk_deviation(part, sc, pairs, cfg.closed);
  auto o = detail::open_output(cfg, out);
  write_bulk_csv(*o.os, rows);
  detail::write_metadata(cfg, &rule,
                         {{"center", sc.center}, {"sigma", sc.sigma}}, err);
  return kOk;
}

inline int cmd_endpoint(const ExperimentConfig& cfg, std::ostream& out,
                        std::ostream& err) {
  detail::require_n(cfg);
  const auto rule = parse_rule_spec(cfg.rule);
  const auto xs = cfg.xs.empty() ? default_endpoint_xs() : cfg.xs;
  if (rule.is_fully_random() && cfg.exact_limit)
    throw Error(Errc::UnsupportedRule,
                "the quenched rate of a fully random rule has no closed form; "
                "drop --exact-limit for the annealed envelope");
  const auto env = realize_environment(rule, cfg.n, cfg.seed);
  const auto lp = evolve_log(env, cfg.n);
  auto o = detail::open_output(cfg, out);
  if (rule.is_fully_random()) {
    const double p_bar =
        std::get<SplittingRule::FullyRandom>(rule.variant()).dist.mean();
    const auto rows = endpoint_annealed(lp, p_bar, xs, cfg.closed);
    write_endpoint_annealed_csv(*o.os, rows);
    detail::write_metadata(cfg, &rule,
                           {{"mode", "annealed-envelope"}, {"p_bar", p_bar}}, err);
    return kOk;
  }
  const auto profile = make_rate_profile(limit_measure(rule, cfg.n, cfg.atoms));
  const auto rows = endpoint_deviation(lp, profile, xs, cfg.closed);
  write_endpoint_csv(*o.os, rows);
  detail::write_metadata(cfg, &rule,
                         {{"mode", "limit"},
                          {"p_bar", profile.p_bar},
                          {"I0", detail::number_or_string(profile.I0)},
                          {"x_star", profile.x_star}},
                         err);
  return kOk;
}

inline int cmd_rate(const ExperimentConfig& cfg, std::ostream& out,
                    std::ostream& err) {
  detail::require_n(cfg);
  const auto rule = parse_rule_spec(cfg.rule);
  const auto profile = make_rate_profile(limit_measure(rule, cfg.n, cfg.atoms));
  std::vector<double> alphas = cfg.alphas;
  if (alphas.empty()) {
    for (int i = 1; i <= 50; ++i)
      alphas.push_back(profile.alpha_lo +
                       (profile.p_bar - profile.alpha_lo) * i / 50.0);
  }
  std::vector<RateRow> rows;
  std::vector<double> skipped;
  for (double a : alphas) {
    try {
      rows.push_back(rate_row(profile, a));
    } catch (const Error& e) {
      if (e.code() != Errc::AlphaOutOfRange || !cfg.skip_out_of_range) throw;
      skipped.push_back(a);
    }
  }
  auto o = detail::open_output(cfg, out);
  write_rate_csv(*o.os, rows);
  detail::write_metadata(cfg, &rule,
                         {{"p_bar", profile.p_bar},
                          {"I0", detail::number_or_string(profile.I0)},
                          {"x_star", profile.x_star},
                          {"alpha_floor", profile.alpha_lo},
                          {"skipped_alphas", skipped}},
                         err);
  return kOk;
}

inline int cmd_walk(const ExperimentConfig& cfg, std::ostream& out,
                    std::ostream& err) {
  detail::require_n(cfg);
  const auto rule = parse_rule_spec(cfg.rule);
  const auto env = realize_environment(rule, cfg.n, cfg.seed);
  auto o = detail::open_output(cfg, out);
  if (cfg.replicas > 0) {
    const auto sample = simulate_walk(env, cfg.n, cfg.replicas, cfg.seed, cfg.threads);
    write_walk_sample_csv(*o.os, sample);
    detail::write_metadata(cfg, &rule, {{"mode", "sample"}}, err);
  } else {
    write_walk_distribution_csv(*o.os, walk_distribution(env, cfg.n));
    detail::write_metadata(cfg, &rule, {{"mode", "distribution"}}, err);
  }
  return kOk;
}

inline nlohmann::json to_json(const VerifyReport& rep) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name},
                      {"status", c.passed ? "pass" : "fail"},
                      {"max_err", c.max_err},
                      {"tolerance", c.tolerance}});
  return {{"all_passed", rep.all_passed()}, {"checks", checks}};
}

inline int cmd_verify(const ExperimentConfig& cfg, std::ostream& out,
                      std::ostream& err) {
  if (cfg.max_enum_n < 1 || cfg.max_enum_n > kMaxEnumerationSteps)
    throw Error(Errc::TooLarge, "--max-enum-n must lie in [1, 20]");
  VerifyOptions opt;
  opt.max_enum_n = cfg.max_enum_n;
  opt.perturb = cfg.perturb;
  const auto rep = run_oracle_battery(opt);
  auto o = detail::open_output(cfg, out);
  *o.os << to_json(rep).dump(2) << '\n';
  if (!cfg.out.empty()) detail::write_metadata(cfg, nullptr, nullptr, err);
  return rep.all_passed() ? kOk : kVerifyFailed;
}

/// Parses argv (argv[0] is the program name) and runs the command.
inline int run(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"Fragmentation-with-erasure experiments", "fragerase"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string rule, out_path, config_path, pairs, xs, alphas;
  int n = 0, replicas = 0, max_enum_n = 0;
  std::uint64_t seed = 0;
  std::size_t atoms = 0;
  unsigned threads = 1;
  double perturb = 0.0;
  auto* o_rule = app.add_option("--rule", rule, "splitting rule spec, e.g. const:p=0.5");
  auto* o_n = app.add_option("--n", n, "number of fragmentation steps");
  auto* o_seed = app.add_option("--seed", seed, "environment / simulation seed");
  auto* o_rep = app.add_option("--replicas", replicas, "walk replicas (walk: >0 samples)");
  auto* o_out = app.add_option("--out", out_path, "output CSV/JSON path (default stdout)");
  app.add_option("--config", config_path, "JSON config file; flags override it");
  auto* o_atoms = app.add_option("--atoms", atoms, "atoms used to discretize Uniform(0,1)");
  auto* f_closed = app.add_flag("--closed", "count break points on closed intervals");
  auto* f_half = app.add_flag("--half-open", "count break points on [x,y)");
  auto* o_pairs = app.add_option("--pairs", pairs, "bulk grid x:y,x:y,...");
  auto* o_xs = app.add_option("--xs", xs, "endpoint grid x,x,...");
  auto* o_alphas = app.add_option("--alphas", alphas, "rate grid alpha,alpha,...");
  auto* f_skip = app.add_flag("--skip-out-of-range", "rate: skip unattainable alphas");
  auto* f_exact = app.add_flag("--exact-limit", "endpoint: demand the exact limit law");
  auto* o_perturb = app.add_option("--perturb", perturb, "verify: perturb break points");
  auto* o_enum = app.add_option("--max-enum-n", max_enum_n, "verify: largest enumerated n");
  auto* o_threads = app.add_option("--threads", threads, "walk sampling threads");
  f_closed->excludes(f_half);

  for (const char* name : {"fragment", "bulk", "endpoint", "rate", "walk", "verify"})
    app.add_subcommand(name, std::string(name) + " experiment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  }

  try {
    ExperimentConfig cfg;
    cfg.command = app.get_subcommands().front()->get_name();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw Error(Errc::BadRuleSpec, "cannot open config '" + config_path + "'");
      apply_json(cfg, nlohmann::json::parse(in));
    }
    if (o_rule->count()) cfg.rule = rule;
    if (o_n->count()) cfg.n = n;
    if (o_seed->count()) cfg.seed = seed;
    if (o_rep->count()) cfg.replicas = replicas;
    if (o_out->count()) cfg.out = out_path;
    if (o_atoms->count()) cfg.atoms = atoms;
    if (f_closed->count()) cfg.closed = true;
    if (f_half->count()) cfg.closed = false;
    if (o_pairs->count()) cfg.pairs = parse_pairs(pairs);
    if (o_xs->count()) cfg.xs = parse_values(xs);
    if (o_alphas->count()) cfg.alphas = parse_values(alphas);
    if (f_skip->count()) cfg.skip_out_of_range = true;
    if (f_exact->count()) cfg.exact_limit = true;
    if (o_perturb->count()) cfg.perturb = perturb;
    if (o_enum->count()) cfg.max_enum_n = max_enum_n;
    if (o_threads->count()) cfg.threads = threads;

    if (cfg.command == "fragment") return cmd_fragment(cfg, out, err);
    if (cfg.command == "bulk") return cmd_bulk(cfg, out, err);
    if (cfg.command == "endpoint") return cmd_endpoint(cfg, out, err);
    if (cfg.command == "rate") return cmd_rate(cfg, out, err);
    if (cfg.command == "walk") return cmd_walk(cfg, out, err);
    return cmd_verify(cfg, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const nlohmann::json::exception& e) {
    err << "error: bad config: " << e.what() << '\n';
    return kBadInput;
  }
}

}  // namespace fragerase::cli
