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

// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria (capped at 1 for ctest).

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "bmlab/bmdist.hpp"
#include "bmlab/bounds.hpp"
#include "bmlab/common.hpp"
#include "bmlab/harness.hpp"
#include "bmlab/qexpander.hpp"
#include "bmlab/rng.hpp"
#include "bmlab/signset.hpp"
#include "bmlab/spaces.hpp"

using namespace bmlab;

namespace {

constexpr std::uint64_t kMaster = 20260101;

struct Verdict {
  bool passed = true;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Criterion = std::function<void(Verdict&)>;

struct Entry {
  int id;
  const char* name;
  double time_limit;  // seconds; 0 = none
  Criterion run;
};

std::uint64_t seed_for(const char* op) { return derive_seed(kMaster, "acceptance", op); }

// ---------------------------------------------------------------------------

void c01_hoeffding(Verdict& v) {
  // Oracle: count the cube directly.
  std::uint64_t hits = 0;
  for (std::uint32_t w = 0; w < (1u << 20); ++w) {
    if (std::abs(2 * std::popcount(w) - 20) > 10) ++hits;
  }
  const double cube = static_cast<double>(hits) / (1u << 20);
  const double exact = exact_rademacher_tail(0.5, 20);
  const double bound = hoeffding_tail(0.5, 20);
  Json cfg = {{"seed", kMaster}, {"experiments", {{{"kind", "hoeffding"}, {"params", {{"samples", 100000}}}}}}};
  const Json res = run_experiment(config_from_json(cfg), false).report["results"][0]["result"];
  const double freq = res["empirical_frequency"].get<double>();
  v.detail << "exact=" << exact << " (6196/2^19=" << 6196.0 / 524288.0 << ") empirical=" << freq
           << " bound=" << bound;
  v.expect(exact == 6196.0 / 524288.0 && cube == exact, "exact tail equals 6196/2^19 and the cube count");
  v.expect(std::abs(bound - 2.0 * std::exp(-2.5)) < 1e-15, "bound = 2 e^-2.5");
  v.expect(exact < bound && freq < bound, "tail and frequency below bound");
}

void c02_signset(Verdict& v) {
  SignSet T = greedy_sign_set(16, 0.5, SamplingMode::Exhaustive(), 0);
  // Pack rows as bit masks: '+' = 1.
  std::vector<std::uint32_t> rows;
  for (Eigen::Index i = 0; i < T.size(); ++i) {
    std::uint32_t m = 0;
    for (int k = 0; k < 16; ++k) m |= (T.vectors(i, k) > 0 ? 1u : 0u) << k;
    rows.push_back(m);
  }
  auto dot = [](std::uint32_t a, std::uint32_t b) { return 16 - 2 * std::popcount(a ^ b); };
  int worst = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) worst = std::max(worst, std::abs(dot(rows[i], rows[j])));
  }
  // Maximality by a full scan of the cube.
  std::vector<bool> in(1u << 16, false);
  for (auto r : rows) in[r] = true;
  bool maximal = true;
  for (std::uint32_t w = 0; w < (1u << 16) && maximal; ++w) {
    if (in[w]) continue;
    bool blocked = false;
    for (auto r : rows) {
      if (std::abs(dot(w, r)) > 8) {
        blocked = true;
        break;
      }
    }
    maximal = blocked;
  }
  v.detail << "|T|=" << T.size() << " max|<s,t>|=" << worst << " maximal=" << maximal;
  v.expect(worst <= 8, "pairwise |<s,t>| <= 8");
  v.expect(T.size() >= 4, "|T| >= 4");
  v.expect(maximal && is_maximal(T), "maximal");
}

// ||a||_{E_x} straight from the definition.
double ex_norm(const SignSet& T, const std::vector<int>& x, const Eigen::VectorXd& a) {
  double out = a.cwiseAbs().maxCoeff();
  for (int t : x) out = std::max(out, std::abs(a.dot(T.vectors.row(t).transpose().cast<double>())));
  return out;
}

void c03_ex_certificates(Verdict& v) {
  SignSet T = drop_to_even(greedy_sign_set(16, 0.5, SamplingMode::Exhaustive(), 0));
  Antichain family = antichain_half_subsets(static_cast<int>(T.size()), SamplingMode::Sampled(200), seed_for("antichain"));
  double min_ratio = 1e300;
  bool exact = true;
  int pairs = 0;
  for (std::size_t k = 0; k + 1 < family.size() && pairs < 100; k += 2, ++pairs) {
    const auto& x = family.subsets[k];
    const auto& y = family.subsets[k + 1];
    Certificate c = identity_certificate(x, y, T);
    const double s = ex_norm(T, x, c.witness), t = ex_norm(T, y, c.witness);
    exact = exact && s == 16.0 && c.source_norm == s && c.target_norm == t && t <= 8.0 &&
            make_Ex(T, x).evaluate(c.witness) == s && make_Ex(T, y).evaluate(c.witness) == t;
    min_ratio = std::min(min_ratio, s / t);
  }
  v.detail << "pairs=" << pairs << " min ratio=" << min_ratio;
  v.expect(pairs == 100, "100 pairs");
  v.expect(min_ratio >= 2.0, "ratio >= 2");
  v.expect(exact, "source = 16, target <= 8, re-evaluated exactly");
}

void c04_sandwich(Verdict& v) {
  SignSet T = drop_to_even(greedy_sign_set(16, 0.5, SamplingMode::Exhaustive(), 0));
  Antichain family = antichain_half_subsets(static_cast<int>(T.size()), SamplingMode::Sampled(20), seed_for("sandwich"));
  Rng rng(seed_for("sandwich-vectors"));
  long violations = 0;
  for (const auto& x : family.subsets) {
    PolytopalSpace E = make_Ex(T, x);
    for (int k = 0; k < 1000; ++k) {
      Eigen::VectorXd a = gaussian_vector(16, rng);
      // Equality on the right when sign(a) = +-t; compare at norm-arithmetic precision.
      const double nrm = E.evaluate(a);
      const double hi = a.cwiseAbs().sum();
      if (nrm < a.cwiseAbs().maxCoeff() || nrm > hi * (1.0 + tol::kNormArithmetic)) ++violations;
    }
  }
  v.detail << "spaces=" << family.size() << " vectors=20000 violations=" << violations << " (rel tol 1e-12)";
  v.expect(violations == 0, "zero violations");
}

void c05_oracles(Verdict& v) {
  const double s2 = std::numbers::sqrt2;
  Exact2dResult a = bm_exact_2d(l1_space(2), linf_space(2), 1e-3);
  Exact2dResult b = bm_exact_2d(l2_space(2), linf_space(2), 1e-3);
  UpperBound u = bm_upper(l2_space(2), linf_space(2));
  JohnEllipsoid j = john_ellipsoid(linf_space(2));
  v.detail << "d(l1,linf)=" << a.value << " d(l2,linf)=" << b.value << " [" << b.lower << "] upper=" << u.value
           << " john=(" << j.inner_radius_factor << "," << j.outer_radius_factor << ")";
  v.expect(std::abs(a.value - 1.0) <= 1e-3 && a.certified, "d(l1,linf) = 1 +- 1e-3");
  v.expect(std::abs(b.value - s2) <= 1e-3 && b.certified, "d(l2,linf) = sqrt2 +- 1e-3");
  v.expect(u.value <= s2 + 1e-3, "bm_upper <= sqrt2 + 1e-3");
  v.expect(std::abs(j.inner_radius_factor - 1.0) <= 1e-6 && std::abs(j.outer_radius_factor - s2) <= 1e-6,
           "John factors (1, sqrt2) +- 1e-6");
}

void c06_embedding(Verdict& v) {
  LinfEmbedding e = embed_linf(l2_space(2), 0.5, seed_for("embed"));
  DistortionSample d = sample_distortion(l2_space(2), e.image, 10000, seed_for("embed-distortion"));
  v.detail << "m=" << e.m << " distortion=" << d.distortion;
  v.expect(e.m <= 25, "m <= 25");
  v.expect(d.distortion <= 2.0, "distortion <= 2");
}

void c07_subspace_net(Verdict& v) {
  SubspaceNet net = subspace_net(2, linf_space(3), 0.2, seed_for("subspace-net"));
  Rng rng(seed_for("subspace-basis"));
  Eigen::VectorXd g = gaussian_vector(6, rng);
  Eigen::MatrixXd basis = Eigen::Map<Eigen::MatrixXd>(g.data(), 3, 2);
  SubspaceNetCheck c = verify_subspace_net(net, basis, 10000, seed_for("subspace-verify"));
  const double bound = std::pow(11.0, 6);
  const double R = 1.4 / 0.6;
  v.detail << "|net|^n=" << net.tuple_count << " bound=" << bound << " observed=" << c.observed_distance << " R=" << R;
  v.expect(net.tuple_count <= bound, "cardinality bound");
  v.expect(c.observed_distance <= R && std::abs(net.radius - R) < 1e-12, "within R");
}

void c08_identities(Verdict& v) {
  double self = 0.0, gap = 0.0;
  bool range = true;
  for (int k = 0; k < 20; ++k) {
    UnitaryTuple u = haar_tuple(8, 4, stream_seed(seed_for("identities"), k));
    self = std::max(self, std::abs(overlap_norm(u, u) - 8.0));
    const double d = defect(u).value, dd = defect_dense(u);
    range = range && d >= 0 && d <= 1 && dd >= 0 && dd <= 1;
    gap = std::max(gap, std::abs(d - dd));
  }
  const double id = defect(identity_tuple(8, 4)).value;
  v.detail << "max|overlap(s,s)-n|=" << self << " defect(id)=" << id << " route gap=" << gap;
  v.expect(self <= 1e-8, "overlap(s,s) = n");
  v.expect(id == 1.0, "identity defect exactly 1");
  v.expect(range, "defect in [0,1]");
  v.expect(gap <= 1e-8, "routes agree");
}

SeparatedUnitaryFamily& desk_family() {
  static SeparatedUnitaryFamily f = separated_family(8, 4, 0.85, 0.15, 500, seed_for("family"));
  return f;
}

void c09_family(Verdict& v) {
  SeparatedUnitaryFamily& f = desk_family();
  double max_overlap = 0.0, max_defect = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    max_defect = std::max(max_defect, f.members[i].defect);
    for (std::size_t j = 0; j < i; ++j) max_overlap = std::max(max_overlap, f.pairwise_overlaps(i, j));
  }
  FamilyCheck c = reverify_family(f);
  v.detail << "size=" << f.size() << " max overlap=" << c.max_overlap << " max defect=" << c.max_defect;
  v.expect(f.size() >= 8, "size >= 8");
  v.expect(max_overlap <= 6.8 && c.max_overlap <= 6.8, "overlaps <= 6.8");
  v.expect(max_defect <= 0.85 && c.max_defect <= 0.85, "defects <= 0.85");
  v.expect(c.ok, "re-verification");
}

void c10_dn(Verdict& v) {
  SeparatedUnitaryFamily f = desk_family();
  f.members.resize(std::min<std::size_t>(4, f.size()));
  f.pairwise_overlaps = f.pairwise_overlaps.topLeftCorner(f.size(), f.size()).eval();
  Antichain halves = antichain_half_subsets(4, SamplingMode::Exhaustive());
  double min_ratio = 1e300, source_err = 0.0;
  int pairs = 0;
  for (const auto& x : halves.subsets) {
    for (const auto& y : halves.subsets) {
      if (x == y) continue;
      DnCertificate c = dn_identity_certificate(f, x, y);
      // Re-evaluate from the coefficients.
      auto coeffs = conjugate_coefficients(f.members[static_cast<std::size_t>(c.witness)]);
      const double s = fx_norm_levelN(make_Fx(f, x), coeffs);
      const double t = fx_norm_levelN(make_Fx(f, y), coeffs);
      min_ratio = std::min(min_ratio, s / t);
      source_err = std::max(source_err, std::abs(s - 8.0));
      ++pairs;
    }
  }
  v.detail << "pairs=" << pairs << " min ratio=" << min_ratio << " |source-n|=" << source_err;
  v.expect(pairs == 30, "30 ordered pairs");
  v.expect(min_ratio >= 1.0 / 0.85, "ratio >= 1/0.85");
  v.expect(source_err <= 1e-8, "source norm = n");
}

void c11_concentration(Verdict& v) {
  TailExperiment t = trace_tail_experiment(8, 8, 0.5, 10000, seed_for("tail"));
  AverageDefectTable a = average_defect_constant({2, 4, 8, 16}, 8, 50, seed_for("avgdefect"));
  CounterexampleResult c = identity_counterexample(2, 2, 0.5, 10000, seed_for("counterexample"));
  v.detail << "tail=" << t.frequency << " (gaussian " << t.gaussian_prediction << ") ratios=";
  double worst = 0.0;
  for (const auto& r : a.rows) {
    v.detail << r.ratio << (&r == &a.rows.back() ? "" : ",");
    worst = std::max(worst, r.ratio);
  }
  v.detail << " counterexample=" << c.frequency;
  v.expect(t.frequency <= 0.05, "tail <= 0.05");
  v.expect(a.rows.size() == 4 && worst <= 3.0, "ratios <= 3");
  v.expect(c.frequency >= 10.0 * std::exp(-8.0), "counterexample >= 10 e^-8");
}

void c12_chains(Verdict& v) {
  LowerChain lo = lower_chain(400, 0.5, 1.9);
  UpperChain up = upper_chain(10, 0.5);
  HHIteration hh = hh_iteration(16, 3, 2.0);
  LiminfConstants li = liminf_constant(1.9);
  const double logN = up.log_N.to_double();
  const double ref = 10.0 * std::pow(5.0, 10) * std::log(60.0);
  v.detail << "K/2=" << lo.half_K << " penalty=" << lo.penalty << " target=" << lo.target << " logN=" << logN
           << " hh(k=0)=" << hh.log_bound;
  v.expect(lo.passes, "lower chain passes");
  v.expect(std::abs(lo.half_K / 1.30e21 - 1) < 5e-3 && std::abs(lo.penalty / 4.87e9 - 1) < 5e-3 &&
               std::abs(lo.target / 7.2e10 - 1) < 5e-3,
           "intermediate values");
  v.expect(std::abs(logN - ref) <= 1e-9 * ref && std::abs(logN / 4.00e8 - 1) < 5e-3, "log N = 10 5^10 log 60");
  v.expect(hh.k == 0 && hh.log_bound == 4.0 * 16 * 9, "m(n,N,2) <= exp(4nN^2)");
  v.expect(li.identity_residual <= 1e-15, "theta^2/2 at 1/r = 1/(2r^2)");
}

void c13_reproducibility(Verdict& v) {
  bool identical = true, verified = true, tamper = true;
  for (const auto& name : preset_names()) {
    ExperimentConfig cfg = preset(name);
    RunOutcome a = run_experiment(cfg, false);
    // Re-run from the embedded config.
    RunOutcome b = run_experiment(config_from_json(a.report.at("config")), false);
    const bool same = strip_timing(a.report).dump() == strip_timing(b.report).dump();
    VerifyOutcome ver = verify_report(a.report);
    identical = identical && same;
    verified = verified && ver.ok;
    v.detail << name << ":" << (same ? "same" : "DIFF") << "/" << ver.certificates << "certs ";
    if (name == "t1-lower-desk") {
      Json bad = a.report;
      auto& cert = bad["results"][1]["certificates"][0];
      cert["witness"][3] = cert["witness"][3].get<double>() * 1.1;
      VerifyOutcome t = verify_report(bad);
      tamper = !t.ok && t.failures.size() == 1 && t.failures[0].find(cert["id"].get<std::string>()) != std::string::npos;
    }
  }
  v.expect(identical, "bit-identical non-timing fields");
  v.expect(verified, "verify_report true on presets");
  v.expect(tamper, "tampered witness rejected and named");
}

}  // namespace

int main() {
  const std::vector<Entry> entries = {
      {1, "Hoeffding consistency", 1.0, c01_hoeffding},
      {2, "Separated sign set", 5.0, c02_signset},
      {3, "E_x identity certificates", 10.0, c03_ex_certificates},
      {4, "Unit sandwich", 0.0, c04_sandwich},
      {5, "Distance oracle agreement", 30.0, c05_oracles},
      {6, "l_inf embedding", 0.0, c06_embedding},
      {7, "Subspace nets", 0.0, c07_subspace_net},
      {8, "Expander identities", 0.0, c08_identities},
      {9, "Separated unitary family", 300.0, c09_family},
      {10, "Level-N identity certificates", 0.0, c10_dn},
      {11, "Concentration experiments", 600.0, c11_concentration},
      {12, "Arithmetic chains", 1.0, c12_chains},
      {13, "Reproducibility and verification", 0.0, c13_reproducibility},
  };
  int failed = 0;
  for (const auto& e : entries) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      e.run(v);
    } catch (const std::exception& err) {
      v.passed = false;
      v.detail << " [exception: " << err.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (e.time_limit > 0 && secs > e.time_limit) {
      v.passed = false;
      v.detail << " [over time limit " << e.time_limit << " s]";
    }
    if (!v.passed) ++failed;
    std::printf("%s %2d %-34s %7.2fs  %s\n", v.passed ? "PASS" : "FAIL", e.id, e.name, secs, v.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(entries.size()) - failed, entries.size());
  return failed == 0 ? 0 : 1;
}
