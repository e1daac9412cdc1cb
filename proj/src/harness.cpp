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

#include "bmlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "bmlab/bmdist.hpp"
#include "bmlab/bounds.hpp"
#include "bmlab/common.hpp"
#include "bmlab/rng.hpp"
#include "bmlab/signset.hpp"

namespace bmlab {

// ---------------------------------------------------------------- serialization

Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

namespace {

double to_number(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw PreconditionError("expected a number, got " + j.dump());
}

}  // namespace

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  require(j.is_array(), "matrix: expected an array of rows");
  if (j.empty()) return Eigen::MatrixXd(0, 0);
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    require(j.at(i).is_array() && static_cast<Eigen::Index>(j.at(i).size()) == cols, "matrix: ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = to_number(j.at(i).at(c));
  }
  return m;
}

Json complex_matrix_to_json(const MatrixXc& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out.push_back(m(i, j).real());
      out.push_back(m(i, j).imag());
    }
  }
  return out;
}

MatrixXc complex_matrix_from_json(const Json& j, int N) {
  require(j.is_array() && static_cast<int>(j.size()) == 2 * N * N, "complex matrix: expected 2 N^2 numbers");
  MatrixXc m(N, N);
  std::size_t k = 0;
  for (int r = 0; r < N; ++r) {
    for (int c = 0; c < N; ++c) {
      const double re = to_number(j.at(k++));
      const double im = to_number(j.at(k++));
      m(r, c) = Complex(re, im);
    }
  }
  return m;
}

Json tuple_to_json(const UnitaryTuple& u) {
  Json mats = Json::array();
  for (const auto& m : u.matrices) mats.push_back(complex_matrix_to_json(m));
  return {{"n", u.n}, {"N", u.N}, {"seed", u.seed}, {"defect", number(u.defect)}, {"matrices", mats}};
}

UnitaryTuple tuple_from_json(const Json& j) {
  UnitaryTuple u;
  u.n = j.at("n").get<int>();
  u.N = j.at("N").get<int>();
  u.seed = j.value("seed", std::uint64_t{0});
  u.defect = j.contains("defect") ? to_number(j.at("defect")) : -1.0;
  require(u.n >= 1 && u.N >= 1, "tuple: n and N must be positive");
  require(j.at("matrices").is_array() && static_cast<int>(j.at("matrices").size()) == u.n, "tuple: expected n matrices");
  for (const auto& m : j.at("matrices")) u.matrices.push_back(complex_matrix_from_json(m, u.N));
  return u;
}

Json sign_rows_to_json(const Eigen::MatrixXi& rows) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    std::string s;
    for (Eigen::Index j = 0; j < rows.cols(); ++j) s.push_back(rows(i, j) > 0 ? '+' : '-');
    out.push_back(s);
  }
  return out;
}

Eigen::MatrixXi sign_rows_from_json(const Json& j) {
  require(j.is_array() && !j.empty(), "sign rows: expected a nonempty array of strings");
  const auto n = static_cast<Eigen::Index>(j.at(0).get<std::string>().size());
  Eigen::MatrixXi out(static_cast<Eigen::Index>(j.size()), n);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const auto s = j.at(static_cast<std::size_t>(i)).get<std::string>();
    require(static_cast<Eigen::Index>(s.size()) == n, "sign rows: rows of different length");
    for (Eigen::Index c = 0; c < n; ++c) {
      require(s[static_cast<std::size_t>(c)] == '+' || s[static_cast<std::size_t>(c)] == '-', "sign rows: only '+' and '-'");
      out(i, c) = s[static_cast<std::size_t>(c)] == '+' ? 1 : -1;
    }
  }
  return out;
}

PolytopalSpace space_from_json(const Json& j) {
  if (j.is_string()) return space_from_json(Json{{"name", j}, {"dim", 2}});
  require(j.is_object(), "space: expected an object");
  if (j.contains("name")) {
    const auto name = j.at("name").get<std::string>();
    const int dim = j.value("dim", 2);
    if (name == "l1") return l1_space(dim);
    if (name == "l2") return l2_space(dim);
    if (name == "linf") return linf_space(dim);
    throw PreconditionError("space: unknown name '" + name + "' (expected l1, l2 or linf)");
  }
  Eigen::MatrixXd phi = j.contains("functionals") ? matrix_from_json(j.at("functionals")) : Eigen::MatrixXd();
  Eigen::MatrixXd euc = j.contains("euclidean") ? matrix_from_json(j.at("euclidean")) : Eigen::MatrixXd();
  require(phi.size() > 0 || euc.size() > 0, "space: needs a name, functionals or a euclidean part");
  const Eigen::Index n = phi.size() > 0 ? phi.cols() : euc.cols();
  if (phi.size() == 0) phi.resize(0, n);
  if (euc.size() == 0) euc.resize(0, n);
  return PolytopalSpace(phi, euc, j.value("label", std::string{}));
}

Json space_to_json(const PolytopalSpace& space) {
  Json out = {{"dim", space.dim()}, {"label", space.label()}};
  if (space.has_functionals()) out["functionals"] = matrix_to_json(space.functionals());
  if (space.has_euclidean()) out["euclidean"] = matrix_to_json(space.euclidean());
  return out;
}

// ---------------------------------------------------------------- parameters

namespace {

using Clock = std::chrono::steady_clock;

struct Output {
  Json result = Json::object();
  Json certificates = Json::array();
  Json checks = Json::array();
  std::vector<std::string> operations;
  /// (table name, csv text)
  std::vector<std::pair<std::string, std::string>> tables;

  void check(const std::string& name, bool passed, const std::string& detail = {}) {
    checks.push_back({{"name", name}, {"passed", passed}, {"detail", detail}});
  }
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(12);
  s << x;
  return s.str();
}

long get_int(const Json& p, const char* key, long lo, long hi) {
  const Json& v = p.at(key);
  require(v.is_number_integer(), std::string("parameter '") + key + "' must be an integer");
  const long x = v.get<long>();
  if (x < lo || x > hi) {
    throw PreconditionError(std::string("parameter '") + key + "' = " + std::to_string(x) + " outside [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return x;
}

// Interval with optional open ends: lo < x (open_lo) or lo <= x.
double get_num(const Json& p, const char* key, double lo, double hi, bool open_lo = false, bool open_hi = false) {
  const Json& v = p.at(key);
  require(v.is_number(), std::string("parameter '") + key + "' must be a number");
  const double x = v.get<double>();
  const bool ok = (open_lo ? x > lo : x >= lo) && (open_hi ? x < hi : x <= hi);
  if (!ok) {
    throw PreconditionError(std::string("parameter '") + key + "' = " + fmt(x) + " outside " + (open_lo ? "(" : "[") +
                            fmt(lo) + ", " + fmt(hi) + (open_hi ? ")" : "]"));
  }
  return x;
}

bool get_bool(const Json& p, const char* key) {
  require(p.at(key).is_boolean(), std::string("parameter '") + key + "' must be a boolean");
  return p.at(key).get<bool>();
}

std::string get_space_name(const Json& p, const char* key) {
  require(p.at(key).is_string(), std::string("parameter '") + key + "' must be a space name");
  const auto s = p.at(key).get<std::string>();
  require(s == "l1" || s == "l2" || s == "linf", std::string("parameter '") + key + "' must be l1, l2 or linf");
  return s;
}

constexpr long kBig = 100000000;

// ---------------------------------------------------------------- kinds

// hoeffding ------------------------------------------------------------------

Json hoeffding_defaults() { return {{"n", 20}, {"theta", 0.5}, {"samples", 100000}}; }

void hoeffding_validate(const Json& p) {
  get_int(p, "n", 1, 64);
  get_num(p, "theta", 0.0, 1.0, true, false);
  get_int(p, "samples", 1, kBig);
}

Output hoeffding_run(const Json& p, std::uint64_t seed) {
  const int n = static_cast<int>(get_int(p, "n", 1, 64));
  const double theta = get_num(p, "theta", 0.0, 1.0, true);
  const long samples = get_int(p, "samples", 1, kBig);
  Output out;
  out.operations = {"signset.hoeffding_tail", "signset.exact_rademacher_tail"};
  const double bound = hoeffding_tail(theta, n);
  const double exact = exact_rademacher_tail(theta, n);
  Rng rng(seed);
  long hits = 0;
  for (long s = 0; s < samples; ++s) {
    const std::uint64_t bits = rng();
    int sum = 0;
    for (int j = 0; j < n; ++j) sum += ((bits >> j) & 1ULL) ? 1 : -1;
    if (std::abs(sum) > theta * n) ++hits;
  }
  const double empirical = static_cast<double>(hits) / samples;
  out.result = {{"hoeffding_bound", bound}, {"exact_tail", exact}, {"empirical_frequency", empirical},
                {"samples", samples}};
  out.check("exact tail below the Hoeffding bound", exact < bound, fmt(exact) + " < " + fmt(bound));
  out.check("empirical frequency below the Hoeffding bound", empirical < bound, fmt(empirical) + " < " + fmt(bound));
  return out;
}

// signset --------------------------------------------------------------------

Json signset_defaults() { return {{"n", 16}, {"theta", 0.5}, {"exhaustive", true}, {"samples", 0}}; }

void signset_validate(const Json& p) {
  const bool exhaustive = get_bool(p, "exhaustive");
  get_int(p, "n", 1, exhaustive ? 25 : 64);
  get_num(p, "theta", 0.0, 1.0, true, true);
  get_int(p, "samples", exhaustive ? 0 : 1, kBig);
}

Output signset_run(const Json& p, std::uint64_t seed) {
  const int n = static_cast<int>(get_int(p, "n", 1, 64));
  const double theta = get_num(p, "theta", 0.0, 1.0, true, true);
  const bool exhaustive = get_bool(p, "exhaustive");
  const long samples = get_int(p, "samples", 0, kBig);
  Output out;
  out.operations = {"signset.greedy_sign_set", "signset.is_separated"};
  SignSet T = greedy_sign_set(n, theta, exhaustive ? SamplingMode::Exhaustive() : SamplingMode::Sampled(samples), seed);
  int max_corr = 0;
  for (Eigen::Index i = 0; i < T.size(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) max_corr = std::max(max_corr, std::abs(T.inner(i, j)));
  }
  const double size_bound = 0.5 * std::exp(theta * theta * n / 2.0);
  out.result = {{"n", n},
                {"theta", theta},
                {"size", T.size()},
                {"pool_size", T.pool_size},
                {"correlation_limit", T.correlation_limit()},
                {"max_abs_correlation", max_corr},
                {"size_lower_bound", size_bound},
                {"vectors", sign_rows_to_json(T.vectors)}};
  out.check("pairwise |<s,t>| <= theta n", is_separated(T), fmt(max_corr) + " <= " + fmt(T.correlation_limit()));
  out.check("|T| >= exp(theta^2 n / 2) / 2", T.size() >= size_bound, fmt(static_cast<double>(T.size())) + " >= " + fmt(size_bound));
  if (exhaustive) {
    out.operations.push_back("signset.is_maximal");
    const bool maximal = is_maximal(T);
    out.result["maximal"] = maximal;
    out.check("maximal over the full cube", maximal);
  }
  out.certificates.push_back({{"id", "separation"}, {"type", "separation"}, {"limit", T.correlation_limit()}});
  return out;
}

// ex-packing -----------------------------------------------------------------

Json ex_packing_defaults() {
  return {{"n", 16}, {"theta", 0.5}, {"r", 1.5}, {"members", 50}, {"effort", 0}};
}

void ex_packing_validate(const Json& p) {
  get_int(p, "n", 2, 25);
  const double theta = get_num(p, "theta", 0.0, 1.0, true, true);
  const double r = get_num(p, "r", 1.0, 1e9, true);
  require(r * theta < 1.0, "parameter 'r': need r theta < 1");
  require(theta * p.at("n").get<double>() >= 1.0, "parameters 'theta', 'n': need theta n >= 1");
  get_int(p, "members", 1, 100000);
  get_int(p, "effort", 0, 1000);
}

Output ex_packing_run(const Json& p, std::uint64_t seed) {
  const int n = static_cast<int>(get_int(p, "n", 2, 25));
  const double theta = get_num(p, "theta", 0.0, 1.0, true, true);
  const double r = get_num(p, "r", 1.0, 1e9, true);
  const int members = static_cast<int>(get_int(p, "members", 1, 100000));
  const int effort = static_cast<int>(get_int(p, "effort", 0, 1000));
  Output out;
  out.operations = {"signset.greedy_sign_set", "signset.antichain_half_subsets", "bmdist.greedy_packing",
                    "bmdist.identity_certificate", "bmdist.claim_counter"};
  SignSet T = drop_to_even(greedy_sign_set(n, theta, SamplingMode::Exhaustive(), seed));
  const int K = static_cast<int>(T.size());
  require(K >= 2, "ex-packing: sign set too small for an antichain");
  Antichain family = antichain_half_subsets(K, SamplingMode::Sampled(members), derive_seed(seed, "signset", "antichain"));
  PackingResult packing = greedy_packing_Ex(T, family.subsets, r, effort, derive_seed(seed, "bmdist", "greedy_packing"));
  ClaimCount claim = claim_counter(n, r, theta);

  Json rejected = Json::array();
  for (const auto& rej : packing.rejected) {
    rejected.push_back({{"index", rej.index}, {"close_to", rej.close_to}, {"distance_upper", number(rej.distance_upper)}});
  }
  double min_ratio = std::numeric_limits<double>::infinity();
  bool sources_exact = true;
  bool targets_ok = true;
  std::ostringstream csv;
  csv << "i,j,witness_row,source_norm,target_norm,implied_ratio\n";
  for (const auto& pair : packing.pairs) {
    const Certificate& c = pair.certificate;
    min_ratio = std::min(min_ratio, c.implied_ratio);
    sources_exact = sources_exact && c.source_norm == static_cast<double>(n);
    targets_ok = targets_ok && c.target_norm <= T.correlation_limit();
    // Row of T holding the witness.
    int row = -1;
    for (Eigen::Index t = 0; t < T.size() && row < 0; ++t) {
      if (T.vectors.row(t).transpose().cast<double>() == c.witness) row = static_cast<int>(t);
    }
    out.certificates.push_back({{"id", "pair[" + std::to_string(pair.i) + "," + std::to_string(pair.j) + "]"},
                                {"type", "identity-witness"},
                                {"x", pair.i},
                                {"y", pair.j},
                                {"witness_row", row},
                                {"witness", std::vector<double>(c.witness.data(), c.witness.data() + c.witness.size())},
                                {"source_norm", c.source_norm},
                                {"target_norm", c.target_norm},
                                {"implied_ratio", c.implied_ratio}});
    csv << pair.i << ',' << pair.j << ',' << row << ',' << c.source_norm << ',' << c.target_norm << ','
        << fmt(c.implied_ratio) << '\n';
  }
  out.tables.emplace_back("pairs", csv.str());
  out.result = {{"n", n},
                {"theta", theta},
                {"r", r},
                {"effort", effort},
                {"sign_set_size", K},
                {"antichain_log_full_cardinality", family.log_full_cardinality},
                {"sign_set", sign_rows_to_json(T.vectors)},
                {"members", family.subsets},
                {"accepted", packing.accepted},
                {"rejected", rejected},
                {"acceptance_heuristic", packing.acceptance_heuristic},
                {"pairs", packing.pairs.size()},
                {"min_identity_ratio", number(min_ratio)},
                {"claim", {{"eta", claim.eta}, {"log_bound", claim.bound.log_value()}, {"bound", claim.bound.to_string()}}}};
  if (!packing.pairs.empty()) {
    out.check("identity ratios >= 1/theta", min_ratio >= 1.0 / theta - 1e-12, fmt(min_ratio) + " >= " + fmt(1.0 / theta));
  }
  out.check("witness norms in E_x equal n", sources_exact);
  out.check("witness norms in E_y at most theta n", targets_ok);
  return out;
}

// sandwich -------------------------------------------------------------------

Json sandwich_defaults() { return {{"n", 16}, {"theta", 0.5}, {"spaces", 20}, {"vectors", 1000}}; }

void sandwich_validate(const Json& p) {
  get_int(p, "n", 2, 25);
  get_num(p, "theta", 0.0, 1.0, true, true);
  get_int(p, "spaces", 1, 10000);
  get_int(p, "vectors", 1, kBig);
}

Output sandwich_run(const Json& p, std::uint64_t seed) {
  const int n = static_cast<int>(get_int(p, "n", 2, 25));
  const double theta = get_num(p, "theta", 0.0, 1.0, true, true);
  const int spaces = static_cast<int>(get_int(p, "spaces", 1, 10000));
  const long vectors = get_int(p, "vectors", 1, kBig);
  Output out;
  out.operations = {"spaces.make_Ex", "spaces.norm"};
  SignSet T = drop_to_even(greedy_sign_set(n, theta, SamplingMode::Exhaustive(), seed));
  const int K = static_cast<int>(T.size());
  Antichain family = antichain_half_subsets(K, SamplingMode::Sampled(spaces), derive_seed(seed, "signset", "antichain"));
  Rng rng(derive_seed(seed, "spaces", "sandwich"));
  long violations = 0;
  double worst_low = 0.0;
  double worst_high = 0.0;
  for (const auto& x : family.subsets) {
    PolytopalSpace E = make_Ex(T, x);
    for (long v = 0; v < vectors; ++v) {
      Eigen::VectorXd a = gaussian_vector(n, rng);
      const double norm = E.evaluate(a);
      const double lo = a.cwiseAbs().maxCoeff();
      const double hi = a.cwiseAbs().sum();
      worst_low = std::max(worst_low, lo - norm);
      worst_high = std::max(worst_high, norm - hi);
      if (norm < lo - 1e-12 * hi || norm > hi * (1.0 + 1e-12)) ++violations;
    }
  }
  out.result = {{"spaces", family.size()}, {"vectors_per_space", vectors}, {"violations", violations},
                {"max_lower_excess", worst_low}, {"max_upper_excess", worst_high}};
  out.check("sup|a_j| <= ||a|| <= sum|a_j| on every sample", violations == 0, std::to_string(violations) + " violations");
  return out;
}

// oracles-2d -----------------------------------------------------------------

Json oracles_defaults() {
  return {{"pairs", Json::array({Json::array({"l1", "linf"}), Json::array({"l2", "linf"})})},
          {"tol", 1e-3},
          {"effort", 32},
          {"max_cells", 2000000},
          {"symmetric", true}};
}

void oracles_validate(const Json& p) {
  require(p.at("pairs").is_array(), "parameter 'pairs' must be an array of [space, space]");
  for (const auto& pair : p.at("pairs")) {
    require(pair.is_array() && pair.size() == 2, "parameter 'pairs': each entry must be [space, space]");
    Json tmp = {{"a", pair.at(0)}, {"b", pair.at(1)}};
    get_space_name(tmp, "a");
    get_space_name(tmp, "b");
  }
  get_num(p, "tol", 1e-9, 1.0);
  get_int(p, "effort", 0, 1000);
  get_int(p, "max_cells", 1, 100000000);
  get_bool(p, "symmetric");
}

Output oracles_run(const Json& p, std::uint64_t seed) {
  const double tol = get_num(p, "tol", 1e-9, 1.0);
  const int effort = static_cast<int>(get_int(p, "effort", 0, 1000));
  const long max_cells = get_int(p, "max_cells", 1, 100000000);
  const bool symmetric = get_bool(p, "symmetric");
  Output out;
  out.operations = {"bmdist.bm_exact_2d", "bmdist.bm_upper", "bmdist.john_ellipsoid"};
  Json rows = Json::array();
  std::map<std::string, Json> johns;
  int index = 0;
  for (const auto& pair : p.at("pairs")) {
    const auto a = pair.at(0).get<std::string>();
    const auto b = pair.at(1).get<std::string>();
    const Json spec_a = {{"name", a}, {"dim", 2}};
    const Json spec_b = {{"name", b}, {"dim", 2}};
    PolytopalSpace E = space_from_json(spec_a);
    PolytopalSpace F = space_from_json(spec_b);
    Exact2dResult exact = bm_exact_2d(E, F, tol, max_cells);
    UpperBoundOptions opts;
    opts.effort = effort;
    opts.seed = stream_seed(seed, static_cast<std::uint64_t>(index));
    UpperBound upper = bm_upper(E, F, opts);
    Json row = {{"a", a},
                {"b", b},
                {"exact",
                 {{"value", exact.value},
                  {"lower", exact.lower},
                  {"certified", exact.certified},
                  {"tolerance", exact.tolerance},
                  {"cells", exact.cells},
                  {"c_source", exact.c_source},
                  {"c_target", exact.c_target},
                  {"sigma_min", exact.sigma_min},
                  {"map", matrix_to_json(exact.map)}}},
                {"upper",
                 {{"value", number(upper.value)},
                  {"route", upper.route},
                  {"john_bound", number(upper.john_bound)},
                  {"evaluations", upper.evaluations},
                  {"map", matrix_to_json(upper.map)}}}};
    const std::string tag = a + "," + b;
    out.certificates.push_back({{"id", "exact-map[" + tag + "]"}, {"type", "distance-upper"}, {"space_a", spec_a},
                                {"space_b", spec_b}, {"map", matrix_to_json(exact.map)}, {"value", exact.value}});
    if (std::isfinite(upper.value)) {
      out.certificates.push_back({{"id", "upper-map[" + tag + "]"}, {"type", "distance-upper"}, {"space_a", spec_a},
                                  {"space_b", spec_b}, {"map", matrix_to_json(upper.map)}, {"value", upper.value}});
    }
    out.check("d(" + tag + ") >= 1", exact.lower >= 1.0 && exact.value >= 1.0);
    out.check("bm_upper >= exact lower - tol (" + tag + ")", upper.value >= exact.lower - tol,
              fmt(upper.value) + " >= " + fmt(exact.lower) + " - " + fmt(tol));
    if (symmetric) {
      Exact2dResult back = bm_exact_2d(F, E, tol, max_cells);
      row["exact_reversed"] = {{"value", back.value}, {"lower", back.lower}, {"certified", back.certified}};
      if (exact.certified && back.certified) {
        out.check("d(E,F) = d(F,E) to tol (" + tag + ")", std::abs(back.value - exact.value) <= tol,
                  fmt(exact.value) + " vs " + fmt(back.value));
      }
    }
    for (const auto& [name, spec] : {std::pair{a, spec_a}, std::pair{b, spec_b}}) {
      if (johns.count(name)) continue;
      JohnEllipsoid j = john_ellipsoid(space_from_json(spec));
      johns[name] = {{"inner", j.inner_radius_factor}, {"outer", j.outer_radius_factor}, {"duality_gap", j.duality_gap}};
      out.certificates.push_back({{"id", "john[" + name + "]"}, {"type", "john"}, {"space", spec},
                                  {"shape", matrix_to_json(j.shape)}, {"inner", j.inner_radius_factor},
                                  {"outer", j.outer_radius_factor}});
      out.check("John factors: inner <= 1, outer <= sqrt(2) + 1e-6 (" + name + ")",
                j.inner_radius_factor <= 1.0 + 1e-9 && j.outer_radius_factor <= std::sqrt(2.0) + 1e-6,
                fmt(j.inner_radius_factor) + ", " + fmt(j.outer_radius_factor));
    }
    rows.push_back(row);
    ++index;
  }
  Json john_json = Json::object();
  for (const auto& [k, v] : johns) john_json[k] = v;
  out.result = {{"pairs", rows}, {"john", john_json}};
  return out;
}

// embed-linf -----------------------------------------------------------------

Json embed_defaults() { return {{"space", "l2"}, {"dim", 2}, {"delta", 0.5}, {"samples", 10000}}; }

void embed_validate(const Json& p) {
  get_space_name(p, "space");
  get_int(p, "dim", 1, 6);
  get_num(p, "delta", 0.0, 1.0, true, true);
  get_int(p, "samples", 1, kBig);
  const double bound = std::pow(1.0 + 2.0 / p.at("delta").get<double>(), p.at("dim").get<double>());
  require(bound <= 1e6, "parameters 'delta', 'dim': (1 + 2/delta)^dim exceeds 1e6");
}

Output embed_run(const Json& p, std::uint64_t seed) {
  const auto name = get_space_name(p, "space");
  const int dim = static_cast<int>(get_int(p, "dim", 1, 6));
  const double delta = get_num(p, "delta", 0.0, 1.0, true, true);
  const long samples = get_int(p, "samples", 1, kBig);
  Output out;
  out.operations = {"spaces.embed_linf", "spaces.sample_distortion"};
  PolytopalSpace E = space_from_json({{"name", name}, {"dim", dim}});
  LinfEmbedding emb = embed_linf(E, delta, seed);
  DistortionSample d = sample_distortion(E, emb.image, static_cast<int>(samples), derive_seed(seed, "spaces", "distortion"));
  out.result = {{"m", emb.m},
                {"m_bound", emb.m_bound},
                {"distortion", d.distortion},
                {"forward", d.forward},
                {"backward", d.backward},
                {"distortion_bound", emb.distortion_bound},
                {"samples", samples}};
  out.check("m <= floor((1 + 2/delta)^n)", emb.m <= emb.m_bound, fmt(emb.m) + " <= " + fmt(emb.m_bound));
  out.check("sampled distortion <= 1/(1 - delta)", d.distortion <= emb.distortion_bound + 1e-9,
            fmt(d.distortion) + " <= " + fmt(emb.distortion_bound));
  return out;
}

// subspace-net ---------------------------------------------------------------

Json subnet_defaults() { return {{"n", 2}, {"m", 3}, {"xi", 0.2}, {"samples", 10000}}; }

void subnet_validate(const Json& p) {
  const long n = get_int(p, "n", 1, 6);
  const long m = get_int(p, "m", n, 6);
  const double xi = get_num(p, "xi", 0.0, 1.0 / static_cast<double>(n), true, true);
  get_int(p, "samples", 1, kBig);
  require(std::pow(1.0 + 2.0 / xi, static_cast<double>(m)) <= 1e6, "parameters 'xi', 'm': (1 + 2/xi)^m exceeds 1e6");
}

Output subnet_run(const Json& p, std::uint64_t seed) {
  const int n = static_cast<int>(get_int(p, "n", 1, 6));
  const int m = static_cast<int>(get_int(p, "m", n, 6));
  const double xi = get_num(p, "xi", 0.0, 1.0 / n, true, true);
  const long samples = get_int(p, "samples", 1, kBig);
  Output out;
  out.operations = {"spaces.subspace_net", "spaces.verify_subspace_net"};
  PolytopalSpace X = linf_space(m);
  SubspaceNet net = subspace_net(n, X, xi, seed);
  Rng rng(derive_seed(seed, "spaces", "test_subspace"));
  Eigen::VectorXd g = gaussian_vector(static_cast<Eigen::Index>(m) * n, rng);
  Eigen::MatrixXd basis = Eigen::Map<Eigen::MatrixXd>(g.data(), m, n);
  SubspaceNetCheck check = verify_subspace_net(net, basis, static_cast<int>(samples), derive_seed(seed, "spaces", "verify"));
  out.result = {{"ball_net_size", net.ball.size()},
                {"ball_net_bound", net.ball.cardinality_bound},
                {"tuple_count", net.tuple_count},
                {"cardinality_bound", net.cardinality_bound},
                {"degenerate_tuples", net.degenerate},
                {"radius", net.radius},
                {"test_basis", matrix_to_json(basis)},
                {"tuple", check.tuple},
                {"snap_distance", check.snap_distance},
                {"ratio_min", check.ratio_min},
                {"ratio_max", check.ratio_max},
                {"observed_distance", check.observed_distance},
                {"samples", samples}};
  out.check("|net|^n <= (1 + 2/xi)^(n m)", net.tuple_count <= net.cardinality_bound,
            fmt(net.tuple_count) + " <= " + fmt(net.cardinality_bound));
  out.check("test subspace within R of a net member", check.within_radius,
            fmt(check.observed_distance) + " <= " + fmt(net.radius));
  out.check("sampled ratios within [1 - xi n, 1 + xi n]", check.within_factors);
  return out;
}

// expander-identities --------------------------------------------------------

Json identities_defaults() { return {{"n", 8}, {"N", 4}, {"tuples", 20}}; }

void identities_validate(const Json& p) {
  get_int(p, "n", 1, 256);
  get_int(p, "N", 1, 16);
  get_int(p, "tuples", 1, 100000);
}

Output identities_run(const Json& p, std::uint64_t seed) {
  const int n = static_cast<int>(get_int(p, "n", 1, 256));
  const int N = static_cast<int>(get_int(p, "N", 1, 16));
  const int tuples = static_cast<int>(get_int(p, "tuples", 1, 100000));
  Output out;
  out.operations = {"qexpander.haar_tuple", "qexpander.defect", "qexpander.defect_dense", "qexpander.overlap_norm"};
  double self_err = 0.0;
  double route_gap = 0.0;
  double unitarity = 0.0;
  double sym_gap = 0.0;
  bool in_range = true;
  Json defects = Json::array();
  UnitaryTuple previous;
  for (int k = 0; k < tuples; ++k) {
    UnitaryTuple u = haar_tuple(n, N, stream_seed(seed, static_cast<std::uint64_t>(k)));
    const double d = defect(u).value;
    const double dd = defect_dense(u);
    defects.push_back(d);
    in_range = in_range && d >= 0.0 && d <= 1.0 && dd >= 0.0 && dd <= 1.0;
    route_gap = std::max(route_gap, std::abs(d - dd));
    self_err = std::max(self_err, std::abs(overlap_norm(u, u) - n));
    unitarity = std::max(unitarity, u.unitarity_residual());
    if (k > 0) sym_gap = std::max(sym_gap, std::abs(overlap_norm(u, previous) - overlap_norm(previous, u)));
    previous = std::move(u);
  }
  const double id_defect = defect(identity_tuple(n, N)).value;
  out.result = {{"n", n},
                {"N", N},
                {"tuples", tuples},
                {"defects", defects},
                {"max_self_overlap_error", self_err},
                {"max_defect_route_gap", route_gap},
                {"max_overlap_asymmetry", sym_gap},
                {"max_unitarity_residual", unitarity},
                {"identity_tuple_defect", id_defect}};
  out.check("overlap(s,s) = n to 1e-8", self_err <= 1e-8, fmt(self_err));
  out.check("defect of the constant identity tuple is 1", id_defect == 1.0 || N == 1, fmt(id_defect));
  out.check("defects in [0,1]", in_range);
  out.check("defect routes agree to 1e-8", route_gap <= 1e-8, fmt(route_gap));
  out.check("overlap symmetric to 1e-8", sym_gap <= 1e-8, fmt(sym_gap));
  out.check("unitarity residual <= 1e-10", unitarity <= 1e-10, fmt(unitarity));
  return out;
}

// separated-family -----------------------------------------------------------

Json family_defaults() {
  return {{"n", 8}, {"N", 4}, {"epsilon", 0.85}, {"delta", 0.15}, {"max_samples", 500}, {"subfamily", 4}, {"min_size", 8}};
}

void family_validate(const Json& p) {
  const long n = get_int(p, "n", 1, 256);
  get_int(p, "N", 1, 32);
  get_num(p, "epsilon", 0.0, 1.0, true, true);
  const double delta = get_num(p, "delta", 0.0, 1.0, true, true);
  get_int(p, "max_samples", 0, kBig);
  const long sub = get_int(p, "subfamily", 0, 20);
  require(sub % 2 == 0, "parameter 'subfamily' must be even (half-subsets)");
  get_int(p, "min_size", 0, kBig);
  require(sub == 0 || (1.0 - delta) * n >= 1.0, "parameters 'delta', 'n': need (1 - delta) n >= 1");
}

Output family_run(const Json& p, std::uint64_t seed) {
  const int n = static_cast<int>(get_int(p, "n", 1, 256));
  const int N = static_cast<int>(get_int(p, "N", 1, 32));
  const double epsilon = get_num(p, "epsilon", 0.0, 1.0, true, true);
  const double delta = get_num(p, "delta", 0.0, 1.0, true, true);
  const int max_samples = static_cast<int>(get_int(p, "max_samples", 0, kBig));
  const int sub = static_cast<int>(get_int(p, "subfamily", 0, 20));
  const long min_size = get_int(p, "min_size", 0, kBig);
  Output out;
  out.operations = {"qexpander.separated_family", "qexpander.reverify_family", "qexpander.dn_identity_certificate"};
  SeparatedUnitaryFamily fam = separated_family(n, N, epsilon, delta, max_samples, seed);
  FamilyCheck check = reverify_family(fam);

  std::ostringstream csv;
  csv << "member,seed,defect,max_overlap\n";
  for (std::size_t i = 0; i < fam.size(); ++i) {
    double mo = 0.0;
    for (std::size_t j = 0; j < fam.size(); ++j) {
      if (i != j) mo = std::max(mo, fam.pairwise_overlaps(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    csv << i << ',' << fam.members[i].seed << ',' << fmt(fam.members[i].defect) << ',' << fmt(mo) << '\n';
  }
  out.tables.emplace_back("family", csv.str());

  Json stored = Json::array();
  const int used = std::min<int>(sub, static_cast<int>(fam.size()));
  for (int i = 0; i < used; ++i) stored.push_back(tuple_to_json(fam.members[static_cast<std::size_t>(i)]));
  double min_ratio = std::numeric_limits<double>::infinity();
  double source_err = 0.0;
  if (sub > 0 && used == sub) {
    Antichain halves = antichain_half_subsets(sub, SamplingMode::Exhaustive());
    for (const auto& x : halves.subsets) {
      for (const auto& y : halves.subsets) {
        if (x == y) continue;
        DnCertificate c = dn_identity_certificate(fam, x, y);
        min_ratio = std::min(min_ratio, c.implied_ratio);
        source_err = std::max(source_err, std::abs(c.source_norm - n));
        std::ostringstream id;
        id << "dn[";
        for (int v : x) id << v;
        id << "|";
        for (int v : y) id << v;
        id << "]";
        out.certificates.push_back({{"id", id.str()},
                                    {"type", "dn-identity"},
                                    {"x", x},
                                    {"y", y},
                                    {"witness", c.witness},
                                    {"source_norm", c.source_norm},
                                    {"target_norm", c.target_norm},
                                    {"implied_ratio", c.implied_ratio}});
      }
    }
  }
  Json overlaps = Json::array();
  for (int i = 0; i < used; ++i) {
    Json row = Json::array();
    for (int j = 0; j < used; ++j) row.push_back(fam.pairwise_overlaps(i, j));
    overlaps.push_back(row);
  }
  out.result = {{"n", n},
                {"N", N},
                {"epsilon", epsilon},
                {"delta", delta},
                {"size", fam.size()},
                {"sampled", fam.sampled},
                {"in_s_eps", fam.in_s_eps},
                {"threshold", (1.0 - delta) * n},
                {"max_offdiagonal_overlap", check.max_overlap},
                {"max_defect", check.max_defect},
                {"max_self_overlap_error", check.max_self_overlap_error},
                {"target", {{"beta", fam.beta}, {"log", fam.target.log_value()}, {"note", "beta is a placeholder for an unnamed constant"}}},
                {"members", stored},
                {"member_overlaps", overlaps},
                {"min_dn_ratio", number(min_ratio)},
                {"max_source_error", source_err}};
  out.check("family size >= " + std::to_string(min_size), static_cast<long>(fam.size()) >= min_size,
            std::to_string(fam.size()));
  out.check("re-verification: defects <= epsilon, overlaps <= (1 - delta) n", check.ok,
            "max defect " + fmt(check.max_defect) + ", max overlap " + fmt(check.max_overlap));
  if (!out.certificates.empty()) {
    out.check("level-N identity ratios >= 1/(1 - delta)", min_ratio >= 1.0 / (1.0 - delta) - 1e-9,
              fmt(min_ratio) + " >= " + fmt(1.0 / (1.0 - delta)));
    out.check("witness norm in F_x equals n to 1e-8", source_err <= 1e-8, fmt(source_err));
  }
  return out;
}

// tail / avgdefect / counterexample ---------------------------------------------

Json tail_defaults() { return {{"n", 8}, {"N", 8}, {"s", 0.5}, {"samples", 10000}, {"max_frequency", 0.05}}; }

void tail_validate(const Json& p) {
  get_int(p, "n", 1, 1024);
  get_int(p, "N", 1, 64);
  get_num(p, "s", -1e9, 1e9);
  get_int(p, "samples", 100, kBig);
  get_num(p, "max_frequency", 0.0, 1.0);
}

Output tail_run(const Json& p, std::uint64_t seed) {
  Output out;
  out.operations = {"qexpander.trace_tail_experiment"};
  TailExperiment t = trace_tail_experiment(static_cast<int>(get_int(p, "n", 1, 1024)), static_cast<int>(get_int(p, "N", 1, 64)),
                                           get_num(p, "s", -1e9, 1e9), static_cast<int>(get_int(p, "samples", 100, kBig)), seed);
  const double limit = get_num(p, "max_frequency", 0.0, 1.0);
  Json ref = Json::array();
  for (const auto& [c, v] : t.reference) ref.push_back({{"c", c}, {"value", v}});
  out.result = {{"frequency", t.frequency}, {"standard_error", t.standard_error}, {"reference", ref},
                {"fitted_c", number(t.fitted_c)}, {"gaussian_prediction", t.gaussian_prediction}, {"samples", t.samples}};
  out.check("tail frequency <= " + fmt(limit), t.frequency <= limit, fmt(t.frequency));
  return out;
}

Json avg_defaults() { return {{"n_list", {2, 4, 8, 16}}, {"N", 8}, {"samples", 50}, {"epsilon", 0.85}}; }

void avg_validate(const Json& p) {
  require(p.at("n_list").is_array() && !p.at("n_list").empty(), "parameter 'n_list' must be a nonempty array");
  for (const auto& v : p.at("n_list")) require(v.is_number_integer() && v.get<int>() >= 1 && v.get<int>() <= 1024, "parameter 'n_list': entries must be integers in [1, 1024]");
  get_int(p, "N", 1, 64);
  get_int(p, "samples", 1, kBig);
  get_num(p, "epsilon", 0.0, 1.0, true, true);
}

Output avg_run(const Json& p, std::uint64_t seed) {
  Output out;
  out.operations = {"qexpander.average_defect_constant"};
  const auto n_list = p.at("n_list").get<std::vector<int>>();
  AverageDefectTable t = average_defect_constant(n_list, static_cast<int>(get_int(p, "N", 1, 64)),
                                                 static_cast<int>(get_int(p, "samples", 1, kBig)), seed,
                                                 get_num(p, "epsilon", 0.0, 1.0, true, true));
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "n,mean_norm,ratio,membership,membership_bound\n";
  for (const auto& r : t.rows) {
    rows.push_back({{"n", r.n}, {"mean_norm", r.mean_norm}, {"ratio", r.ratio}, {"membership", r.membership},
                    {"membership_bound", r.membership_bound}});
    csv << r.n << ',' << fmt(r.mean_norm) << ',' << fmt(r.ratio) << ',' << fmt(r.membership) << ',' << fmt(r.membership_bound) << '\n';
  }
  out.tables.emplace_back("avgdefect", csv.str());
  out.result = {{"rows", rows}, {"fitted_constant", t.fitted_constant}, {"envelope", t.envelope},
                {"non_increasing", t.non_increasing}};
  out.check("mean defect norm / sqrt(n) <= 3", t.within_envelope, fmt(t.fitted_constant));
  bool corollary = true;
  for (const auto& r : t.rows) corollary = corollary && r.membership >= r.membership_bound;
  out.check("membership >= 1 - (C/eps) n^-1/2 with the fitted C", corollary);
  return out;
}

Json counter_defaults() { return {{"n", 2}, {"N", 2}, {"delta", 0.5}, {"samples", 10000}}; }

void counter_validate(const Json& p) {
  get_int(p, "n", 1, 1024);
  get_int(p, "N", 1, 64);
  get_num(p, "delta", 0.0, 1.0);
  get_int(p, "samples", 1, kBig);
}

Output counter_run(const Json& p, std::uint64_t seed) {
  Output out;
  out.operations = {"qexpander.identity_counterexample"};
  CounterexampleResult c = identity_counterexample(static_cast<int>(get_int(p, "n", 1, 1024)), static_cast<int>(get_int(p, "N", 1, 64)),
                                                   get_num(p, "delta", 0.0, 1.0), static_cast<int>(get_int(p, "samples", 1, kBig)), seed);
  out.result = {{"frequency", c.frequency}, {"reference_exp_minus_nN", c.reference_nN},
                {"reference_exp_minus_nN2", c.reference_nN2}, {"samples", c.samples}};
  out.check("frequency >= 10 exp(-n N^2)", c.frequency >= 10.0 * c.reference_nN2,
            fmt(c.frequency) + " >= " + fmt(10.0 * c.reference_nN2));
  return out;
}

// chains ---------------------------------------------------------------------

Json chains_defaults() {
  return {{"lower", {{"n", 400}, {"theta", 0.5}, {"r", 1.9}}},
          {"upper", {{"n", 10}, {"eps", 0.5}}},
          {"hh", {{"n", 32}, {"N", 2}, {"r", 8}}},
          {"liminf", {{"r", 2.0}}},
          {"claim", {{"n", 16}, {"r", 1.5}, {"theta", 0.5}}},
          {"os_claim", {{"n", 16}, {"r", 1.5}, {"delta", 0.5}}},
          {"measure", {{"n", 1000}, {"N", 4}, {"delta", 0.4}, {"c", 0.5}, {"gamma", 6.0}}},
          {"spherical", {{"n", 10}, {"theta", 0.5}, {"K", 10000.0}}}};
}

void chains_validate(const Json& p) {
  const Json& lo = p.at("lower");
  get_int(lo, "n", 1, 1 << 29);
  const double th = get_num(lo, "theta", 0.0, 1.0, true, true);
  const double r = get_num(lo, "r", 1.0, 1e9, true);
  require(r * th < 1.0, "parameter 'lower.r': need r < 1/theta");
  get_int(p.at("upper"), "n", 1, 1 << 29);
  get_num(p.at("upper"), "eps", 0.0, 1.0, true, true);
  get_int(p.at("hh"), "n", 1, 1 << 29);
  get_int(p.at("hh"), "N", 1, 1 << 20);
  get_num(p.at("hh"), "r", 1.0, 1e300);
  get_num(p.at("liminf"), "r", 1.0, 1e300);
  get_int(p.at("claim"), "n", 1, 1 << 29);
  const double cth = get_num(p.at("claim"), "theta", 0.0, 1.0, true, true);
  const double cr = get_num(p.at("claim"), "r", 1.0, 1e9);
  require(cr * cth < 1.0, "parameter 'claim.r': need r theta < 1");
  get_int(p.at("os_claim"), "n", 1, 1 << 29);
  const double od = get_num(p.at("os_claim"), "delta", 0.0, 1.0, true, true);
  const double orr = get_num(p.at("os_claim"), "r", 1.0, 1e9);
  require(orr * (1.0 - od) < 1.0, "parameter 'os_claim.r': need r (1 - delta) < 1");
  get_int(p.at("measure"), "n", 1, kBig);
  get_int(p.at("measure"), "N", 1, 1 << 20);
  get_num(p.at("measure"), "delta", 0.0, 1.0, true, true);
  get_num(p.at("measure"), "c", 0.0, 1e9, true);
  get_num(p.at("measure"), "gamma", 0.0, 1e9, true);
  get_int(p.at("spherical"), "n", 1, 1 << 29);
  get_num(p.at("spherical"), "theta", 0.0, 1.0, true, true);
  get_num(p.at("spherical"), "K", 2.0, 1e300);
}

Json level_json(const LogLevelNumber& x) { return {{"level", x.level()}, {"value", number(x.value())}}; }

Output chains_run(const Json& p, std::uint64_t) {
  Output out;
  out.operations = {"bounds.lower_chain", "bounds.upper_chain", "bounds.hh_iteration", "bounds.liminf_constant",
                    "bmdist.claim_counter", "bounds.os_claim_counter", "bounds.measure_chain",
                    "bounds.spherical_variant_bound"};
  const Json& lp = p.at("lower");
  LowerChain lc = lower_chain(lp.at("n").get<int>(), lp.at("theta").get<double>(), lp.at("r").get<double>());
  const Json& up = p.at("upper");
  UpperChain uc = upper_chain(up.at("n").get<int>(), up.at("eps").get<double>());
  const Json& hp = p.at("hh");
  HHIteration hh = hh_iteration(hp.at("n").get<int>(), hp.at("N").get<int>(), hp.at("r").get<double>());
  HHIteration hh0 = hh_iteration(hp.at("n").get<int>(), hp.at("N").get<int>(), 2.0);
  LiminfConstants li = liminf_constant(p.at("liminf").at("r").get<double>());
  const Json& cp = p.at("claim");
  ClaimCount cc = claim_counter(cp.at("n").get<int>(), cp.at("r").get<double>(), cp.at("theta").get<double>());
  const Json& op = p.at("os_claim");
  ClaimBound oc = os_claim_counter(op.at("n").get<int>(), op.at("r").get<double>(), op.at("delta").get<double>());
  const Json& mp = p.at("measure");
  MeasureChain mc = measure_chain(mp.at("n").get<int>(), mp.at("N").get<int>(), mp.at("delta").get<double>(),
                                  mp.at("c").get<double>(), mp.at("gamma").get<double>());
  const Json& sp = p.at("spherical");
  SphericalBound sb = spherical_variant_bound(sp.at("n").get<int>(), sp.at("theta").get<double>(), sp.at("K").get<double>());

  out.result = {
      {"lower",
       {{"inputs", lp},
        {"intermediate", {{"eta", lc.eta}, {"log_K", lc.log_K}, {"half_K", number(lc.half_K)}, {"penalty", lc.penalty},
                          {"target", number(lc.target)}}},
        {"result", level_json(lc.X_lower)},
        {"flags", {{"passes", lc.passes}, {"n0_hint", lc.n0_hint}}}}},
      {"upper",
       {{"inputs", up},
        {"intermediate", {{"m", uc.m}, {"log_m", uc.log_m}, {"log_N", number(uc.log_N.to_double())}}},
        {"result", level_json(uc.N_bound)}}},
      {"hh",
       {{"inputs", hp},
        {"intermediate", {{"k", hh.k}, {"r", hh.r}, {"rounded", hh.rounded}, {"log_headline", hh.log_headline}}},
        {"result", level_json(hh.bound)},
        {"flags", {{"condition_holds", hh.condition_holds}}},
        {"k0_log_bound", hh0.log_bound}}},
      {"liminf",
       {{"inputs", p.at("liminf")},
        {"result", {{"level", 0}, {"value", li.remark}}},
        {"intermediate", {{"chain_exponent", li.chain}, {"identity_residual", li.identity_residual}}}}},
      {"claim", {{"inputs", cp}, {"intermediate", {{"eta", cc.eta}}}, {"result", level_json(cc.bound)}}},
      {"os_claim", {{"inputs", op}, {"intermediate", {{"eta", oc.eta}, {"log_bound", oc.log_bound}}}, {"result", level_json(oc.bound)}}},
      {"measure",
       {{"inputs", mp},
        {"intermediate", {{"epsilon", mc.epsilon}, {"epsilon_prime", mc.epsilon_prime}, {"log_net_factor", mc.log_net_factor},
                          {"exponent", mc.exponent}, {"c_delta", mc.c_delta}, {"log_bound", mc.log_bound}}},
        {"result", level_json(mc.bound)},
        {"flags", {{"n_delta_hint", mc.n_delta_hint}, {"below_target", mc.below_target}}}}},
      {"spherical",
       {{"inputs", sp},
        {"intermediate", {{"gamma", sb.gamma}, {"threshold", sb.threshold}, {"log_bound", sb.log_bound}}},
        {"result", level_json(sb.bound)},
        {"flags", {{"significant", sb.significant}}}}}};
  const double nn = hp.at("n").get<double>() * hp.at("N").get<double>() * hp.at("N").get<double>();
  out.check("hh_iteration at k = 0 gives exp(4 n N^2)", std::abs(hh0.log_bound - 4.0 * nn) <= 1e-12 * 4.0 * nn,
            fmt(hh0.log_bound));
  out.check("theta^2/2 at theta = 1/r equals 1/(2 r^2)", li.identity_residual <= 1e-15, fmt(li.identity_residual));
  const double claim_log = cc.bound.log_value();
  out.check("operator-space claim is the square of the scalar claim when r(1-delta) = r theta",
            std::abs(op.at("delta").get<double>() - (1.0 - cp.at("theta").get<double>())) > 1e-15 ||
                op.at("r") != cp.at("r") || op.at("n") != cp.at("n") ||
                std::abs(oc.log_bound - 2.0 * claim_log) <= 1e-9 * oc.log_bound,
            fmt(oc.log_bound) + " vs 2 x " + fmt(claim_log));
  return out;
}

// ---------------------------------------------------------------- registry

struct KindInfo {
  const char* name;
  const char* module;
  Json (*defaults)();
  void (*validate)(const Json&);
  Output (*run)(const Json&, std::uint64_t);
};

const std::vector<KindInfo>& kinds() {
  static const std::vector<KindInfo> table = {
      {"hoeffding", "signset", hoeffding_defaults, hoeffding_validate, hoeffding_run},
      {"signset", "signset", signset_defaults, signset_validate, signset_run},
      {"ex-packing", "bmdist", ex_packing_defaults, ex_packing_validate, ex_packing_run},
      {"sandwich", "spaces", sandwich_defaults, sandwich_validate, sandwich_run},
      {"oracles-2d", "bmdist", oracles_defaults, oracles_validate, oracles_run},
      {"embed-linf", "spaces", embed_defaults, embed_validate, embed_run},
      {"subspace-net", "spaces", subnet_defaults, subnet_validate, subnet_run},
      {"expander-identities", "qexpander", identities_defaults, identities_validate, identities_run},
      {"separated-family", "qexpander", family_defaults, family_validate, family_run},
      {"tail", "qexpander", tail_defaults, tail_validate, tail_run},
      {"avgdefect", "qexpander", avg_defaults, avg_validate, avg_run},
      {"counterexample", "qexpander", counter_defaults, counter_validate, counter_run},
      {"chains", "bounds", chains_defaults, chains_validate, chains_run},
  };
  return table;
}

const KindInfo& find_kind(const std::string& name) {
  for (const auto& k : kinds()) {
    if (name == k.name) return k;
  }
  std::string known;
  for (const auto& k : kinds()) known += std::string(known.empty() ? "" : ", ") + k.name;
  throw PreconditionError("unknown experiment kind '" + name + "' (known: " + known + ")");
}

// Overlays `given` on `defaults`; nested objects merge one level deep.
Json merge_params(const Json& defaults, const Json& given, const std::string& where) {
  require(given.is_object(), where + ": params must be an object");
  Json out = defaults;
  for (const auto& [key, value] : given.items()) {
    if (!defaults.contains(key)) throw PreconditionError(where + ": unknown parameter '" + key + "'");
    if (defaults.at(key).is_object()) {
      out[key] = merge_params(defaults.at(key), value, where + "." + key);
    } else {
      out[key] = value;
    }
  }
  return out;
}

// ---------------------------------------------------------------- verification

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

std::string verify_certificate(const Json& cert, const Json& result, const Json& inputs,
                               std::map<int, PolytopalSpace>& ex_cache, const Eigen::MatrixXi* sign_rows) {
  const auto type = cert.at("type").get<std::string>();
  if (type == "separation") {
    require(sign_rows != nullptr, "separation certificate without sign vectors");
    const int limit = cert.at("limit").get<int>();
    const Eigen::MatrixXi& v = *sign_rows;
    if (limit != static_cast<int>(std::floor(inputs.at("theta").get<double>() * v.cols() + 1e-9))) return "limit differs from floor(theta n)";
    Eigen::MatrixXi gram = v * v.transpose();
    for (Eigen::Index i = 0; i < gram.rows(); ++i) {
      for (Eigen::Index j = 0; j < i; ++j) {
        if (std::abs(gram(i, j)) > limit) return "rows " + std::to_string(j) + " and " + std::to_string(i) + " correlate above the limit";
      }
    }
    return {};
  }
  if (type == "identity-witness") {
    require(sign_rows != nullptr, "identity-witness certificate without a sign set");
    SignSet T;
    T.n = static_cast<int>(sign_rows->cols());
    T.theta = inputs.at("theta").get<double>();
    T.vectors = *sign_rows;
    const auto& members = result.at("members");
    auto space_for = [&](int idx) -> const PolytopalSpace& {
      auto it = ex_cache.find(idx);
      if (it == ex_cache.end()) {
        require(idx >= 0 && idx < static_cast<int>(members.size()), "member index out of range");
        it = ex_cache.emplace(idx, make_Ex(T, members.at(static_cast<std::size_t>(idx)).get<std::vector<int>>())).first;
      }
      return it->second;
    };
    const PolytopalSpace& Ex = space_for(cert.at("x").get<int>());
    const PolytopalSpace& Ey = space_for(cert.at("y").get<int>());
    const auto w = cert.at("witness").get<std::vector<double>>();
    if (static_cast<int>(w.size()) != T.n) return "witness has the wrong length";
    Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(w.data(), T.n);
    const double s = Ex.evaluate(wv);
    const double t = Ey.evaluate(wv);
    if (!close_rel(s, to_number(cert.at("source_norm")), 1e-12)) return "source norm re-evaluates to " + fmt(s);
    if (!close_rel(t, to_number(cert.at("target_norm")), 1e-12)) return "target norm re-evaluates to " + fmt(t);
    if (!close_rel(s / t, to_number(cert.at("implied_ratio")), 1e-12)) return "ratio re-evaluates to " + fmt(s / t);
    return {};
  }
  if (type == "distance-upper") {
    PolytopalSpace A = space_from_json(cert.at("space_a"));
    PolytopalSpace B = space_from_json(cert.at("space_b"));
    const double value = map_distortion(matrix_from_json(cert.at("map")), A, B);
    if (!close_rel(value, to_number(cert.at("value")), 1e-9)) return "distortion re-evaluates to " + fmt(value);
    return {};
  }
  if (type == "john") {
    PolytopalSpace S = space_from_json(cert.at("space"));
    Eigen::MatrixXd shape = matrix_from_json(cert.at("shape"));
    if (shape.rows() != S.dim() || shape.cols() != S.dim()) return "shape has the wrong size";
    Eigen::MatrixXd inv = shape.inverse();
    double inner = 0.0;
    double outer = 0.0;
    if (S.is_polytopal()) {
      inner = (S.functionals() * inv).rowwise().norm().maxCoeff();
      outer = (S.vertices() * shape.transpose()).rowwise().norm().maxCoeff();
    } else {
      inner = operator_norm(inv, l2_space(S.dim()), S);
      outer = operator_norm(shape, S, l2_space(S.dim()));
    }
    if (!close_rel(inner, to_number(cert.at("inner")), 1e-9)) return "inner factor re-evaluates to " + fmt(inner);
    if (!close_rel(outer, to_number(cert.at("outer")), 1e-9)) return "outer factor re-evaluates to " + fmt(outer);
    if (inner > 1.0 + 1e-9) return "ellipsoid is not inside the ball";
    return {};
  }
  if (type == "dn-identity") {
    SeparatedUnitaryFamily fam;
    fam.n = result.at("n").get<int>();
    fam.N = result.at("N").get<int>();
    fam.delta = result.at("delta").get<double>();
    for (const auto& m : result.at("members")) fam.members.push_back(tuple_from_json(m));
    const auto x = cert.at("x").get<std::vector<int>>();
    const auto y = cert.at("y").get<std::vector<int>>();
    const int witness = cert.at("witness").get<int>();
    if (witness < 0 || witness >= static_cast<int>(fam.size())) return "witness index out of range";
    if (std::find(x.begin(), x.end(), witness) == x.end() || std::find(y.begin(), y.end(), witness) != y.end()) {
      return "witness is not in x \\ y";
    }
    for (const auto& u : fam.members) {
      if (u.unitarity_residual() > 1e-10) return "stored member is not unitary";
    }
    const auto coeffs = conjugate_coefficients(fam.members[static_cast<std::size_t>(witness)]);
    const double s = fx_norm_levelN(make_Fx(fam, x), coeffs);
    const double t = fx_norm_levelN(make_Fx(fam, y), coeffs);
    if (!close_rel(s, to_number(cert.at("source_norm")), 1e-8)) return "source norm re-evaluates to " + fmt(s);
    if (!close_rel(t, to_number(cert.at("target_norm")), 1e-8)) return "target norm re-evaluates to " + fmt(t);
    if (!close_rel(s / t, to_number(cert.at("implied_ratio")), 1e-8)) return "ratio re-evaluates to " + fmt(s / t);
    return {};
  }
  return "unknown certificate type '" + type + "'";
}

}  // namespace

// ---------------------------------------------------------------- public API

std::vector<std::string> experiment_kinds() {
  std::vector<std::string> out;
  for (const auto& k : kinds()) out.emplace_back(k.name);
  return out;
}

Json default_params(const std::string& kind) { return find_kind(kind).defaults(); }

void validate_config(const ExperimentConfig& config) {
  require(!config.name.empty(), "config: name must not be empty");
  for (std::size_t i = 0; i < config.experiments.size(); ++i) {
    const auto& e = config.experiments[i];
    const KindInfo& k = find_kind(e.kind);
    try {
      k.validate(e.params);
    } catch (const PreconditionError& err) {
      throw PreconditionError("experiments[" + std::to_string(i) + "] (" + e.kind + "): " + err.what());
    } catch (const Json::exception& err) {
      throw PreconditionError("experiments[" + std::to_string(i) + "] (" + e.kind + "): " + err.what());
    }
  }
}

ExperimentConfig config_from_json(const Json& j) {
  require(j.is_object(), "config: expected a JSON object");
  static const std::set<std::string> allowed = {"name", "seed", "output_dir", "csv", "experiments"};
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw PreconditionError("config: unknown field '" + key + "'");
  }
  ExperimentConfig c;
  try {
    c.name = j.value("name", c.name);
    if (j.contains("seed")) {
      require(j.at("seed").is_number_unsigned() || (j.at("seed").is_number_integer() && j.at("seed").get<long long>() >= 0),
              "config: seed must be a nonnegative integer");
      c.seed = j.at("seed").get<std::uint64_t>();
    }
    c.output_dir = j.value("output_dir", std::string{});
    c.csv = j.value("csv", false);
    if (j.contains("experiments")) {
      require(j.at("experiments").is_array(), "config: experiments must be an array");
      std::size_t i = 0;
      for (const auto& e : j.at("experiments")) {
        const std::string where = "experiments[" + std::to_string(i++) + "]";
        require(e.is_object() && e.contains("kind") && e.at("kind").is_string(), where + ": needs a string 'kind'");
        for (const auto& [key, _] : e.items()) {
          if (key != "kind" && key != "params") throw PreconditionError(where + ": unknown field '" + key + "'");
        }
        ExperimentSpec spec;
        spec.kind = e.at("kind").get<std::string>();
        spec.params = merge_params(find_kind(spec.kind).defaults(), e.value("params", Json::object()), where);
        c.experiments.push_back(std::move(spec));
      }
    }
  } catch (const Json::exception& err) {
    throw PreconditionError(std::string("config: ") + err.what());
  }
  validate_config(c);
  return c;
}

Json config_to_json(const ExperimentConfig& config) {
  Json experiments = Json::array();
  for (const auto& e : config.experiments) experiments.push_back({{"kind", e.kind}, {"params", e.params}});
  Json out = {{"name", config.name}, {"seed", config.seed}, {"csv", config.csv}, {"experiments", experiments}};
  if (!config.output_dir.empty()) out["output_dir"] = config.output_dir;
  return out;
}

std::vector<std::string> preset_names() {
  return {"t1-lower-desk", "t2-desk", "oracles-2d", "concentration-desk", "chains"};
}

ExperimentConfig preset(const std::string& name) {
  Json j = {{"name", name}, {"seed", 20260101}};
  auto exp = [](const std::string& kind, Json params = Json::object()) { return Json{{"kind", kind}, {"params", params}}; };
  if (name == "t1-lower-desk") {
    j["experiments"] = {exp("signset"), exp("ex-packing"), exp("sandwich")};
  } else if (name == "t2-desk") {
    j["experiments"] = {exp("expander-identities"), exp("separated-family")};
  } else if (name == "oracles-2d") {
    j["experiments"] = {exp("oracles-2d"), exp("embed-linf"), exp("subspace-net")};
  } else if (name == "concentration-desk") {
    j["experiments"] = {exp("hoeffding"), exp("tail"), exp("avgdefect"), exp("counterexample")};
  } else if (name == "chains") {
    j["experiments"] = {exp("chains")};
  } else {
    std::string known;
    for (const auto& p : preset_names()) known += (known.empty() ? "" : ", ") + p;
    throw PreconditionError("unknown preset '" + name + "' (known: " + known + ")");
  }
  return config_from_json(j);
}

std::string output_directory(const ExperimentConfig& config) {
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return ".";
}

RunOutcome run_experiment(const ExperimentConfig& config, bool write) {
  validate_config(config);
  RunOutcome outcome;
  const auto start = Clock::now();
  Json results = Json::array();
  Json timings = Json::array();
  int checks = 0;
  int failed = 0;
  int certificates = 0;
  std::vector<std::pair<std::string, std::string>> tables;
  for (std::size_t i = 0; i < config.experiments.size(); ++i) {
    const auto& spec = config.experiments[i];
    const KindInfo& kind = find_kind(spec.kind);
    const std::uint64_t seed = derive_seed(config.seed, kind.module, kind.name, i);
    const auto t0 = Clock::now();
    Output out;
    try {
      out = kind.run(spec.params, seed);
    } catch (const std::exception& err) {
      out = Output{};
      out.check("completed without error", false, err.what());
    }
    timings.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
    bool passed = true;
    for (const auto& c : out.checks) {
      ++checks;
      if (!c.at("passed").get<bool>()) {
        passed = false;
        ++failed;
      }
    }
    certificates += static_cast<int>(out.certificates.size());
    results.push_back({{"index", i},
                       {"kind", spec.kind},
                       {"module", kind.module},
                       {"operations", out.operations},
                       {"inputs", spec.params},
                       {"seed", seed},
                       {"result", out.result},
                       {"certificates", out.certificates},
                       {"checks", out.checks},
                       {"passed", passed}});
    for (auto& [table, text] : out.tables) {
      tables.emplace_back(spec.kind + std::to_string(i) + "." + table, std::move(text));
    }
    outcome.passed = outcome.passed && passed;
  }
  outcome.report = {{"schema", kReportSchema},
                    {"config", config_to_json(config)},
                    {"versions",
                     {{"bmlab", kVersion},
                      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                    std::to_string(EIGEN_MINOR_VERSION)},
                      {"compiler", __VERSION__}}},
                    {"results", results},
                    {"summary", {{"experiments", config.experiments.size()}, {"checks", checks}, {"failed_checks", failed},
                                 {"certificates", certificates}}},
                    {"passed", outcome.passed},
                    {"timing", {{"wall_seconds", std::chrono::duration<double>(Clock::now() - start).count()},
                                {"experiments", timings}}}};
  if (write) {
    const std::filesystem::path dir = output_directory(config);
    std::filesystem::create_directories(dir);
    const auto report_path = dir / (config.name + ".report.json");
    std::ofstream(report_path) << outcome.report.dump(2) << '\n';
    outcome.files.push_back(report_path.string());
    if (config.csv) {
      for (const auto& [table, text] : tables) {
        const auto path = dir / (config.name + "." + table + ".csv");
        std::ofstream(path) << text;
        outcome.files.push_back(path.string());
      }
    }
  }
  return outcome;
}

Json strip_timing(const Json& report) {
  Json out = report;
  out.erase("timing");
  return out;
}

VerifyOutcome verify_report(const Json& report) {
  VerifyOutcome out;
  require(report.is_object() && report.contains("results"), "report: missing results");
  require(report.value("schema", std::string{}) == kReportSchema, "report: unknown schema");
  for (const auto& res : report.at("results")) {
    const std::string where = res.at("kind").get<std::string>() + "#" + std::to_string(res.at("index").get<int>());
    std::map<int, PolytopalSpace> ex_cache;
    std::optional<Eigen::MatrixXi> rows;
    const Json& result = res.at("result");
    if (result.contains("sign_set")) rows = sign_rows_from_json(result.at("sign_set"));
    else if (result.contains("vectors")) rows = sign_rows_from_json(result.at("vectors"));
    for (const auto& cert : res.at("certificates")) {
      ++out.certificates;
      const std::string id = where + "/" + cert.value("id", std::string{"?"});
      std::string failure;
      try {
        failure = verify_certificate(cert, result, res.at("inputs"), ex_cache, rows ? &*rows : nullptr);
      } catch (const std::exception& err) {
        failure = err.what();
      }
      if (!failure.empty()) {
        out.ok = false;
        out.failures.push_back(id + ": " + failure);
      }
    }
  }
  return out;
}

VerifyOutcome verify_report_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "verify: cannot open " + path);
  Json report;
  try {
    report = Json::parse(in);
  } catch (const Json::exception& err) {
    throw PreconditionError("verify: " + path + " does not parse: " + err.what());
  }
  return verify_report(report);
}

}  // namespace bmlab
