// Copyright 2026 The bmlab Authors.
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

// bmlab command line: module operations and the experiment harness.
// Every command prints one JSON document on stdout.

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bmlab/bmdist.hpp"
#include "bmlab/bounds.hpp"
#include "bmlab/common.hpp"
#include "bmlab/harness.hpp"
#include "bmlab/qexpander.hpp"
#include "bmlab/rng.hpp"
#include "bmlab/signset.hpp"
#include "bmlab/spaces.hpp"

using bmlab::Json;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kChecksFailed = 1;
constexpr int kUsage = 2;

int emit(const Json& j, int code = kOk) {
  std::cout << j.dump(2) << '\n';
  return code;
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  bmlab::require(static_cast<bool>(in), "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw bmlab::PreconditionError(path + ": " + e.what());
  }
}

// "l1", "l2", "linf", inline JSON, or @file.json.
bmlab::PolytopalSpace parse_space(const std::string& text, int dim) {
  if (!text.empty() && text[0] == '@') return bmlab::space_from_json(load_json(text.substr(1)));
  if (!text.empty() && text[0] == '{') return bmlab::space_from_json(Json::parse(text));
  return bmlab::space_from_json(Json{{"name", text}, {"dim", dim}});
}

std::vector<int> parse_indices(const std::string& text) {
  std::vector<int> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

Json level_json(const bmlab::LogLevelNumber& x) {
  return {{"level", x.level()}, {"value", bmlab::number(x.value())}, {"log", bmlab::number(x.log_value())},
          {"text", x.to_string()}};
}

// One harness experiment, run in memory; prints its result block.
int run_kind(const std::string& kind, const Json& params, std::uint64_t seed) {
  Json cfg = {{"name", kind}, {"seed", seed}, {"experiments", Json::array({{{"kind", kind}, {"params", params}}})}};
  auto outcome = bmlab::run_experiment(bmlab::config_from_json(cfg), false);
  return emit(outcome.report.at("results").at(0), outcome.passed ? kOk : kChecksFailed);
}

bmlab::UnitaryTuple tuple_arg(const std::string& file, int n, int N, std::uint64_t seed) {
  if (!file.empty()) return bmlab::tuple_from_json(load_json(file));
  return bmlab::haar_tuple(n, N, seed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bmlab: Banach-Mazur distance and covering experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bmlab::kVersion));
  std::function<int()> action;

  std::uint64_t seed = 0;
  auto seed_opt = [&seed](CLI::App* cmd) { cmd->add_option("--seed", seed, "master seed")->capture_default_str(); };

  // ---- signset
  int n = 16;
  int N = 4;
  double theta = 0.5;
  std::int64_t samples = 0;
  auto* ss = app.add_subcommand("signset", "greedy theta-separated sign set");
  ss->add_option("-n", n, "dimension")->capture_default_str();
  ss->add_option("--theta", theta)->capture_default_str();
  ss->add_option("--samples", samples, "0 = exhaustive scan")->capture_default_str();
  bool with_vectors = false;
  ss->add_flag("--vectors", with_vectors, "print the sign vectors");
  seed_opt(ss);
  ss->callback([&] {
    action = [&] {
      auto mode = samples > 0 ? bmlab::SamplingMode::Sampled(samples) : bmlab::SamplingMode::Exhaustive();
      bmlab::SignSet T = bmlab::greedy_sign_set(n, theta, mode, seed);
      Json out = {{"n", n}, {"theta", theta}, {"size", T.size()}, {"correlation_limit", T.correlation_limit()},
                  {"separated", bmlab::is_separated(T)}, {"hoeffding_tail", bmlab::hoeffding_tail(theta, n)},
                  {"exact_tail", bmlab::exact_rademacher_tail(theta, n)}};
      if (samples == 0 && n <= 25) out["maximal"] = bmlab::is_maximal(T);
      if (with_vectors) out["vectors"] = bmlab::sign_rows_to_json(T.vectors);
      return emit(out);
    };
  });

  // ---- space
  auto* sp = app.add_subcommand("space", "normed spaces");
  sp->require_subcommand(1);
  std::string members;
  auto* mk = sp->add_subcommand("make-ex", "E_x from a greedy sign set and a subset x");
  mk->add_option("-n", n)->capture_default_str();
  mk->add_option("--theta", theta)->capture_default_str();
  mk->add_option("--subset", members, "comma separated indices into the sign set")->required();
  seed_opt(mk);
  mk->callback([&] {
    action = [&] {
      bmlab::SignSet T = bmlab::greedy_sign_set(n, theta, bmlab::SamplingMode::Exhaustive(), seed);
      bmlab::PolytopalSpace E = bmlab::make_Ex(T, parse_indices(members));
      return emit({{"space", bmlab::space_to_json(E)}, {"unit_sandwich", bmlab::satisfies_unit_sandwich(E)}});
    };
  });
  std::string space_name = "l2";
  int dim = 2;
  double delta = 0.5;
  int count = 10000;
  auto* emb = sp->add_subcommand("embed-linf", "l_inf^m embedding from a dual delta-net");
  emb->add_option("--space", space_name, "l1, l2 or linf")->capture_default_str();
  emb->add_option("--dim", dim)->capture_default_str();
  emb->add_option("--delta", delta)->capture_default_str();
  emb->add_option("--samples", count)->capture_default_str();
  seed_opt(emb);
  emb->callback([&] {
    action = [&] {
      return run_kind("embed-linf", {{"space", space_name}, {"dim", dim}, {"delta", delta}, {"samples", count}}, seed);
    };
  });
  int m = 3;
  double xi = 0.2;
  auto* sn = sp->add_subcommand("subspace-net", "net of n-dimensional subspaces of l_inf^m");
  sn->add_option("-n", n)->capture_default_str();
  sn->add_option("-m", m)->capture_default_str();
  sn->add_option("--xi", xi)->capture_default_str();
  sn->add_option("--samples", count)->capture_default_str();
  seed_opt(sn);
  sn->callback([&] {
    action = [&] { return run_kind("subspace-net", {{"n", n}, {"m", m}, {"xi", xi}, {"samples", count}}, seed); };
  });

  // ---- bmdist
  auto* bd = app.add_subcommand("bmdist", "Banach-Mazur distance");
  bd->require_subcommand(1);
  std::string a_text = "l1";
  std::string b_text = "linf";
  int effort = 32;
  double tol = 1e-3;
  auto pair_opts = [&](CLI::App* cmd) {
    cmd->add_option("-a", a_text, "space: l1|l2|linf, inline JSON or @file")->capture_default_str();
    cmd->add_option("-b", b_text, "space: l1|l2|linf, inline JSON or @file")->capture_default_str();
    cmd->add_option("--dim", dim, "dimension for named spaces")->capture_default_str();
  };
  auto* up = bd->add_subcommand("upper", "certified upper bound via explicit maps");
  pair_opts(up);
  up->add_option("--effort", effort)->capture_default_str();
  seed_opt(up);
  up->callback([&] {
    action = [&] {
      bmlab::UpperBoundOptions opts;
      opts.effort = effort;
      opts.seed = seed;
      auto r = bmlab::bm_upper(parse_space(a_text, dim), parse_space(b_text, dim), opts);
      return emit({{"value", bmlab::number(r.value)}, {"route", r.route}, {"john_bound", bmlab::number(r.john_bound)},
                   {"evaluations", r.evaluations}, {"map", bmlab::matrix_to_json(r.map)}});
    };
  });
  long max_cells = 2000000;
  auto* ex = bd->add_subcommand("exact2d", "branch and bound distance in dimension 2");
  pair_opts(ex);
  ex->add_option("--tol", tol)->capture_default_str();
  ex->add_option("--max-cells", max_cells)->capture_default_str();
  ex->callback([&] {
    action = [&] {
      auto r = bmlab::bm_exact_2d(parse_space(a_text, 2), parse_space(b_text, 2), tol, max_cells);
      return emit({{"value", r.value}, {"lower", r.lower}, {"certified", r.certified}, {"tolerance", r.tolerance},
                   {"cells", r.cells}, {"map", bmlab::matrix_to_json(r.map)}},
                  r.certified ? kOk : kChecksFailed);
    };
  });
  double r_sep = 1.5;
  int nmembers = 50;
  auto* pk = bd->add_subcommand("pack", "greedy r-packing of E_x spaces with identity certificates");
  pk->add_option("-n", n)->capture_default_str();
  pk->add_option("--theta", theta)->capture_default_str();
  pk->add_option("-r", r_sep)->capture_default_str();
  pk->add_option("--members", nmembers)->capture_default_str();
  pk->add_option("--effort", effort)->default_val(0);
  seed_opt(pk);
  pk->callback([&] {
    action = [&] {
      return run_kind("ex-packing", {{"n", n}, {"theta", theta}, {"r", r_sep}, {"members", nmembers}, {"effort", effort}},
                      seed);
    };
  });
  auto* cl = bd->add_subcommand("claim", "(1 + 4n/eta)^(n^2) counter");
  cl->add_option("-n", n)->capture_default_str();
  cl->add_option("-r", r_sep)->capture_default_str();
  cl->add_option("--theta", theta)->capture_default_str();
  cl->callback([&] {
    action = [&] {
      auto c = bmlab::claim_counter(n, r_sep, theta);
      return emit({{"eta", c.eta}, {"bound", level_json(c.bound)}});
    };
  });

  // ---- qx
  auto* qx = app.add_subcommand("qx", "unitary tuples and quantum expanders");
  qx->require_subcommand(1);
  std::string tuple_file;
  std::string tuple_file2;
  std::uint64_t seed2 = 1;
  bool with_matrices = false;
  auto tuple_opts = [&](CLI::App* cmd) {
    cmd->add_option("-n", n)->default_val(8);
    cmd->add_option("-N", N)->default_val(4);
    seed_opt(cmd);
  };
  auto* qs = qx->add_subcommand("sample", "Haar random tuple");
  tuple_opts(qs);
  qs->add_flag("--matrices", with_matrices, "include the matrices");
  qs->callback([&] {
    action = [&] {
      auto u = bmlab::haar_tuple(n, N, seed);
      bmlab::cache_defect(u);
      Json out = bmlab::tuple_to_json(u);
      out["unitarity_residual"] = u.unitarity_residual();
      if (!with_matrices) out.erase("matrices");
      return emit(out);
    };
  });
  bool dense = false;
  auto* qd = qx->add_subcommand("defect", "defect of a tuple");
  tuple_opts(qd);
  qd->add_option("--tuple", tuple_file, "tuple JSON file (default: Haar sample from --seed)");
  qd->add_flag("--dense", dense, "also compute the Kronecker route");
  qd->callback([&] {
    action = [&] {
      auto u = tuple_arg(tuple_file, n, N, seed);
      auto d = bmlab::defect(u);
      Json out = {{"n", u.n}, {"N", u.N}, {"defect", d.value}, {"iterations", d.iterations}, {"converged", d.converged}};
      if (dense) out["defect_dense"] = bmlab::defect_dense(u);
      return emit(out);
    };
  });
  auto* qo = qx->add_subcommand("overlap", "||sum s_j (x) conj(t_j)||");
  tuple_opts(qo);
  qo->add_option("--seed2", seed2, "seed of the second tuple")->capture_default_str();
  qo->add_option("--tuple", tuple_file, "first tuple JSON file");
  qo->add_option("--tuple2", tuple_file2, "second tuple JSON file");
  qo->callback([&] {
    action = [&] {
      auto s = tuple_arg(tuple_file, n, N, seed);
      auto t = tuple_arg(tuple_file2, n, N, seed2);
      return emit({{"overlap", bmlab::overlap_norm(s, t)}, {"n", s.n}});
    };
  });
  double epsilon = 0.85;
  int subfamily = 4;
  auto* qf = qx->add_subcommand("family", "delta-separated family inside S_eps");
  tuple_opts(qf);
  qf->add_option("--epsilon", epsilon)->capture_default_str();
  qf->add_option("--delta", delta)->default_val(0.15);
  qf->add_option("--samples", count)->default_val(500);
  qf->add_option("--subfamily", subfamily, "members used for d_N certificates")->capture_default_str();
  qf->callback([&] {
    action = [&] {
      return run_kind("separated-family", {{"n", n}, {"N", N}, {"epsilon", epsilon}, {"delta", delta},
                                           {"max_samples", count}, {"subfamily", subfamily}, {"min_size", 0}},
                      seed);
    };
  });
  double s_level = 0.5;
  auto* qt = qx->add_subcommand("tail", "trace tail frequency");
  tuple_opts(qt);
  qt->add_option("-s", s_level)->capture_default_str();
  qt->add_option("--samples", count)->default_val(10000);
  qt->callback([&] {
    action = [&] {
      return run_kind("tail", {{"n", n}, {"N", N}, {"s", s_level}, {"samples", count}, {"max_frequency", 1.0}}, seed);
    };
  });
  std::vector<int> n_list = {2, 4, 8, 16};
  auto* qa = qx->add_subcommand("avgdefect", "mean defect norm against sqrt(n)");
  qa->add_option("--n-list", n_list)->capture_default_str();
  qa->add_option("-N", N)->default_val(8);
  qa->add_option("--samples", count)->default_val(50);
  qa->add_option("--epsilon", epsilon)->capture_default_str();
  seed_opt(qa);
  qa->callback([&] {
    action = [&] {
      return run_kind("avgdefect", {{"n_list", n_list}, {"N", N}, {"samples", count}, {"epsilon", epsilon}}, seed);
    };
  });
  auto* qc = qx->add_subcommand("counterexample", "identity tuple overlap frequency");
  qc->add_option("-n", n)->default_val(2);
  qc->add_option("-N", N)->default_val(2);
  qc->add_option("--delta", delta)->default_val(0.5);
  qc->add_option("--samples", count)->default_val(10000);
  seed_opt(qc);
  qc->callback([&] {
    action = [&] { return run_kind("counterexample", {{"n", n}, {"N", N}, {"delta", delta}, {"samples", count}}, seed); };
  });

  // ---- bounds
  auto* bo = app.add_subcommand("bounds", "arithmetic chains");
  bo->require_subcommand(1);
  double r_val = 1.9;
  auto* bl = bo->add_subcommand("lower", "lower chain");
  bl->add_option("-n", n)->default_val(400);
  bl->add_option("--theta", theta)->capture_default_str();
  bl->add_option("-r", r_val)->capture_default_str();
  bl->callback([&] {
    action = [&] {
      auto c = bmlab::lower_chain(n, theta, r_val);
      return emit({{"eta", c.eta}, {"log_K", c.log_K}, {"half_K", bmlab::number(c.half_K)}, {"penalty", c.penalty},
                   {"log_target", c.log_target}, {"target", bmlab::number(c.target)}, {"X_lower", level_json(c.X_lower)},
                   {"passes", c.passes}, {"n0_hint", c.n0_hint}});
    };
  });
  double eps = 0.5;
  auto* bu = bo->add_subcommand("upper", "upper chain");
  bu->add_option("-n", n)->default_val(10);
  bu->add_option("--eps", eps)->capture_default_str();
  bu->callback([&] {
    action = [&] {
      auto c = bmlab::upper_chain(n, eps);
      return emit({{"m", c.m}, {"log_m", c.log_m}, {"log_N", level_json(c.log_N)}, {"N", level_json(c.N_bound)}});
    };
  });
  auto* bc = bo->add_subcommand("claim", "operator-space claim counter");
  bc->add_option("-n", n)->capture_default_str();
  bc->add_option("-r", r_val)->default_val(1.5);
  bc->add_option("--delta", delta)->capture_default_str();
  bc->callback([&] {
    action = [&] {
      auto c = bmlab::os_claim_counter(n, r_val, delta);
      return emit({{"eta", c.eta}, {"log_bound", c.log_bound}, {"bound", level_json(c.bound)}});
    };
  });
  double c_assumed = 0.5;
  double gamma = 6.0;
  auto* bm = bo->add_subcommand("measure", "measure chain for S_eps");
  bm->add_option("-n", n)->default_val(1000);
  bm->add_option("-N", N)->capture_default_str();
  bm->add_option("--delta", delta)->default_val(0.4);
  bm->add_option("-c", c_assumed)->capture_default_str();
  bm->add_option("--gamma", gamma)->capture_default_str();
  bm->callback([&] {
    action = [&] {
      auto c = bmlab::measure_chain(n, N, delta, c_assumed, gamma);
      return emit({{"epsilon", c.epsilon}, {"epsilon_prime", c.epsilon_prime}, {"log_net_factor", c.log_net_factor},
                   {"exponent", c.exponent}, {"log_bound", c.log_bound}, {"bound", level_json(c.bound)},
                   {"c_delta", c.c_delta}, {"n_delta_hint", c.n_delta_hint}, {"below_target", c.below_target}});
    };
  });
  auto* bh = bo->add_subcommand("hh", "iterated packing bound");
  bh->add_option("-n", n)->default_val(32);
  bh->add_option("-N", N)->default_val(2);
  bh->add_option("-r", r_val)->default_val(8);
  bh->callback([&] {
    action = [&] {
      auto c = bmlab::hh_iteration(n, N, r_val);
      return emit({{"r_input", c.r_input}, {"r", c.r}, {"k", c.k}, {"rounded", c.rounded}, {"log_bound", c.log_bound},
                   {"bound", level_json(c.bound)}, {"condition_holds", c.condition_holds},
                   {"log_headline", c.log_headline}});
    };
  });
  double K_theta = 1e4;
  auto* bs = bo->add_subcommand("spherical", "spherical-code variant bound");
  bs->add_option("-n", n)->default_val(10);
  bs->add_option("--theta", theta)->capture_default_str();
  bs->add_option("-K", K_theta)->capture_default_str();
  bs->callback([&] {
    action = [&] {
      auto c = bmlab::spherical_variant_bound(n, theta, K_theta);
      return emit({{"gamma", c.gamma}, {"log_bound", c.log_bound}, {"bound", level_json(c.bound)},
                   {"threshold", c.threshold}, {"significant", c.significant}});
    };
  });

  // ---- harness
  std::string path;
  bool csv = false;
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", path, "CONFIG.json")->required();
  run->add_flag("--csv", csv, "also write CSV tables");
  run->callback([&] {
    action = [&] {
      auto config = bmlab::config_from_json(load_json(path));
      config.csv = config.csv || csv;
      auto outcome = bmlab::run_experiment(config);
      Json out = outcome.report.at("summary");
      out["passed"] = outcome.passed;
      out["files"] = outcome.files;
      return emit(out, outcome.passed ? kOk : kChecksFailed);
    };
  });
  auto* ver = app.add_subcommand("verify", "re-evaluate the certificates of a report");
  ver->add_option("report", path, "REPORT.json")->required();
  ver->callback([&] {
    action = [&] {
      auto v = bmlab::verify_report_file(path);
      return emit({{"ok", v.ok}, {"certificates", v.certificates}, {"failures", v.failures}}, v.ok ? kOk : kChecksFailed);
    };
  });
  std::string preset_name;
  bool run_preset = false;
  auto* pre = app.add_subcommand("preset", "print a preset config (or run it with --run)");
  pre->add_option("name", preset_name)->required();
  pre->add_flag("--run", run_preset, "run it and write the report");
  pre->add_flag("--csv", csv, "with --run: also write CSV tables");
  pre->callback([&] {
    action = [&] {
      auto config = bmlab::preset(preset_name);
      if (!run_preset) return emit(bmlab::config_to_json(config));
      config.csv = csv;
      auto outcome = bmlab::run_experiment(config);
      Json out = outcome.report.at("summary");
      out["passed"] = outcome.passed;
      out["files"] = outcome.files;
      return emit(out, outcome.passed ? kOk : kChecksFailed);
    };
  });
  app.add_subcommand("kinds", "list experiment kinds with default params")->callback([&] {
    action = [&] {
      Json out = Json::object();
      for (const auto& k : bmlab::experiment_kinds()) out[k] = bmlab::default_params(k);
      return emit({{"kinds", out}, {"presets", bmlab::preset_names()}});
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  try {
    return action ? action() : kOk;
  } catch (const bmlab::PreconditionError& e) {
    std::cerr << "bmlab: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "bmlab: " << e.what() << '\n';
    return kChecksFailed;
  }
}
