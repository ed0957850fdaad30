// Copyright 2026 The meshgnn Authors. All Rights Reserved.
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
// =============================================================================

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "meshgnn/optimizer.hpp"

namespace meshgnn {
namespace {

const SearchBounds kToyBounds{2, 4, 30, 70};

Real toy_objective(GridPoint p) {
  const Real dl = (p.l - 50) / 10.0;
  return (p.k - 3) * (p.k - 3) + dl * dl;
}

Real median(std::vector<Real> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

EvalHistory random_history(int n, const SearchBounds& b, std::uint64_t seed) {
  Rng rng(seed);
  std::set<GridPoint> seen;
  EvalHistory h;
  while (static_cast<int>(h.size()) < n) {
    GridPoint p{static_cast<int>(uniform_int(rng, b.k_min, b.k_max)),
                static_cast<int>(uniform_int(rng, b.l_min, b.l_max))};
    if (!seen.insert(p).second) continue;
    h.push_back({p, uniform_real(rng, 0.0, 5.0)});
  }
  return h;
}

TEST(SearchBounds, Basics) {
  EXPECT_EQ(kToyBounds.grid_size(), 3 * 41);
  EXPECT_TRUE(kToyBounds.contains({3, 30}));
  EXPECT_FALSE(kToyBounds.contains({5, 30}));
  EXPECT_THROW((SearchBounds{3, 2, 0, 1}.validate()), ValidationError);
  const SearchBounds full;
  EXPECT_EQ(full.grid_size(), 3 * 2001);
}

TEST(Matern52, Values) {
  EXPECT_EQ(matern52(0.0), 1.0);
  const Real r = 0.7, s = std::sqrt(5.0) * r;
  EXPECT_NEAR(matern52(r), (1 + s + 5 * r * r / 3) * std::exp(-s), 1e-15);
  EXPECT_LT(matern52(2.0), matern52(1.0));
}

TEST(GpFit, SinglePointInterpolates) {
  const EvalHistory h = {{{3, 40}, 2.5}};
  const GPModel gp = gp_fit(h, kToyBounds, 0.0);
  const Prediction p = gp_predict(gp, {3, 40});
  EXPECT_NEAR(p.mean, 2.5, 1e-6);
  EXPECT_LE(p.stdev, 1e-3);
  EXPECT_GT(gp_predict(gp, {2, 70}).stdev, 0.1);
}

TEST(GpFit, SymmetricPairMidpoint) {
  const EvalHistory h = {{{3, 30}, 1.0}, {{3, 70}, 4.0}};
  const GPModel gp = gp_fit(h, kToyBounds, 1e-6);
  EXPECT_NEAR(gp_predict(gp, {3, 50}).mean, 2.5, 1e-12);
}

TEST(GpFit, TwoPointClosedFormConditional) {
  const EvalHistory h = {{{2, 35}, 1.0}, {{4, 60}, 3.0}};
  const GpHyper hyper{0.4, 0.8, 2.0};
  const Real noise = 1e-3;
  const GPModel gp = gp_fit_fixed(h, kToyBounds, noise, hyper);
  // by hand: normalized inputs, standardized targets (mean 2, sd 1)
  const Real x1[2] = {0.0, 5.0 / 40}, x2[2] = {1.0, 30.0 / 40}, q[2] = {0.5, 20.0 / 40};
  auto kern = [&](const Real* a, const Real* b) {
    const Real u = (a[0] - b[0]) / hyper.lengthscale_k, v = (a[1] - b[1]) / hyper.lengthscale_l;
    return hyper.signal_variance * matern52(std::sqrt(u * u + v * v));
  };
  const Real d = hyper.signal_variance + noise + gp.jitter;
  const Real off = kern(x1, x2);
  const Real det = d * d - off * off;
  const Real y1 = -1, y2 = 1;
  const Real a1 = (d * y1 - off * y2) / det, a2 = (-off * y1 + d * y2) / det;
  const Real k1 = kern(x1, q), k2 = kern(x2, q);
  const Real mean = 2 + (k1 * a1 + k2 * a2);
  const Real quad = (d * k1 * k1 - 2 * off * k1 * k2 + d * k2 * k2) / det;
  const Real sd = std::sqrt(hyper.signal_variance - quad);
  const Prediction p = gp_predict(gp, {3, 50});
  EXPECT_NEAR(p.mean, mean, 1e-12);
  EXPECT_NEAR(p.stdev, sd, 1e-12);
}

TEST(GpFit, NoiseFreeInterpolationRandomHistories) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const EvalHistory h = random_history(12, kToyBounds, seed);
    const GPModel gp = gp_fit(h, kToyBounds, 0.0);
    for (const auto& r : h) {
      const Prediction p = gp_predict(gp, r.point);
      EXPECT_LE(std::abs(p.mean - r.mse), 1e-6);
      EXPECT_LE(p.stdev, 1e-3);
    }
  }
}

TEST(GpFit, SelectsMaximumLikelihoodOnGrid) {
  const EvalHistory h = random_history(8, kToyBounds, 77);
  const GPModel gp = gp_fit(h, kToyBounds, 1e-6);
  for (Real lk : gp_lengthscale_grid()) {
    for (Real ll : gp_lengthscale_grid()) {
      for (Real s2 : gp_signal_variance_grid()) {
        const GPModel other = gp_fit_fixed(h, kToyBounds, 1e-6, {lk, ll, s2});
        EXPECT_GE(gp.log_marginal_likelihood, other.log_marginal_likelihood);
      }
    }
  }
  EXPECT_EQ(gp_lengthscale_grid().size(), 5u);
  EXPECT_EQ(gp_signal_variance_grid().size(), 5u);
}

TEST(GpFit, SkipsFailedRecordsAndRejectsEmpty) {
  const Real inf = std::numeric_limits<Real>::infinity();
  const EvalHistory h = {{{2, 30}, inf}, {{3, 50}, 1.0}};
  const GPModel gp = gp_fit(h, kToyBounds, 0.0);
  EXPECT_EQ(gp.inputs.rows(), 1);
  EXPECT_THROW(gp_fit({{{2, 30}, inf}}, kToyBounds), ValidationError);
  EXPECT_THROW(gp_fit({}, kToyBounds), ValidationError);
}

TEST(GpFit, FactorizationFailureIsAnError) {
  const EvalHistory h = {{{2, 30}, 1.0}, {{3, 50}, 2.0}};
  EXPECT_THROW(gp_fit_fixed(h, kToyBounds, 0.0, {0.5, 0.5, std::nan("")}), Error);
  EXPECT_THROW(gp_predict(gp_fit(h, kToyBounds), {9, 50}), ValidationError);
}

TEST(ExpectedImprovement, DegenerateCases) {
  EXPECT_EQ(expected_improvement(1.0, 0.0, 0.5), 0.0);
  EXPECT_EQ(expected_improvement(0.5, 0.0, 0.5), 0.0);
  EXPECT_NEAR(expected_improvement(0.2, 0.0, 0.5), 0.3, 1e-15);
  EXPECT_THROW(expected_improvement(0.0, -1.0, 0.0), ValidationError);
}

Real monte_carlo_ei(Real mean, Real sd, Real best, std::uint64_t seed) {
  Rng rng(seed);
  Real acc = 0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) acc += std::max(best - (mean + sd * standard_normal(rng)), 0.0);
  return acc / n;
}

TEST(ExpectedImprovement, MatchesMonteCarlo) {
  EXPECT_NEAR(expected_improvement(0.5, 0.2, 0.4), monte_carlo_ei(0.5, 0.2, 0.4, 1), 1e-3);
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const Real mean = uniform_real(rng, -1, 1);
    const Real sd = uniform_real(rng, 0.01, 1);
    const Real best = uniform_real(rng, -1, 1);
    EXPECT_NEAR(expected_improvement(mean, sd, best), monte_carlo_ei(mean, sd, best, 100 + i), 1e-3);
  }
}

TEST(ExpectedImprovement, NonNegativeAndMonotoneInStdev) {
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    const Real mean = uniform_real(rng, -2, 2), best = uniform_real(rng, -2, 2);
    Real prev = expected_improvement(mean, 0.0, best);
    EXPECT_GE(prev, 0.0);
    for (Real sd = 0.05; sd < 3; sd += 0.05) {
      const Real ei = expected_improvement(mean, sd, best);
      EXPECT_GE(ei, 0.0);
      EXPECT_GE(ei, prev - 1e-15);
      prev = ei;
    }
  }
}

TEST(Ucb, Cases) {
  EXPECT_NEAR(ucb_score(0.5, 0.2, 2.0), 0.1, 1e-15);
  EXPECT_EQ(ucb_score(0.7, 0.0, 3.0), 0.7);
  EXPECT_EQ(ucb_score(0.7, 0.4, 0.0), 0.7);
  EXPECT_THROW(ucb_score(0.0, 0.1, -1.0), ValidationError);
}

TEST(ArgmaxOverGrid, TieGoesToLexicographicallySmallest) {
  const SearchBounds b{2, 3, 5, 10};
  const GridPoint p = argmax_over_grid(b, {}, [](GridPoint q) {
    return (q == GridPoint{2, 10} || q == GridPoint{3, 5}) ? 1.0 : 0.0;
  });
  EXPECT_EQ(p, (GridPoint{2, 10}));
}

TEST(ArgmaxOverGrid, SingleRemainingAndExhausted) {
  const SearchBounds b{0, 1, 0, 1};
  EvalHistory h = {{{0, 0}, 1}, {{0, 1}, 1}, {{1, 1}, 1}};
  EXPECT_EQ(argmax_over_grid(b, h, [](GridPoint) { return 0.0; }), (GridPoint{1, 0}));
  h.push_back({{1, 0}, 1});
  EXPECT_THROW(argmax_over_grid(b, h, [](GridPoint) { return 0.0; }), ValidationError);
}

TEST(ProposeNext, MatchesBruteForceScan) {
  const SearchBounds b{0, 2, 10, 14};
  const EvalHistory h = {{{0, 10}, 3.0}, {{2, 14}, 1.0}, {{1, 12}, 2.0}};
  const GPModel gp = gp_fit(h, b);
  for (Acquisition a : {Acquisition::ExpectedImprovement, Acquisition::Ucb}) {
    GridPoint want{};
    Real want_score = -1e300;
    for (int k = 0; k <= 2; ++k) {
      for (int l = 10; l <= 14; ++l) {
        const GridPoint p{k, l};
        if (std::any_of(h.begin(), h.end(), [&](const EvalRecord& r) { return r.point == p; })) {
          continue;
        }
        const Prediction pr = gp_predict(gp, p);
        const Real s = a == Acquisition::ExpectedImprovement ? expected_improvement(pr.mean, pr.stdev, 1.0)
                                                           : -ucb_score(pr.mean, pr.stdev, 2.0);
        if (s > want_score) {
          want_score = s;
          want = p;
        }
      }
    }
    EXPECT_EQ(propose_next(gp, b, {a, 2.0}, h), want);
  }
}

TEST(BoLoop, SingleIteration) {
  BoConfig c;
  c.bounds = kToyBounds;
  c.t_max = 1;
  int calls = 0;
  const SearchResult r = bo_loop([&](GridPoint p) { ++calls; return toy_objective(p); }, c);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(r.history.size(), 1u);
  EXPECT_EQ(r.best.point, r.history[0].point);
}

TEST(BoLoop, ConstantObjectiveExhaustsPatience) {
  for (int p_max : {1, 3, 5}) {
    BoConfig c;
    c.bounds = kToyBounds;
    c.t_max = 100;
    c.p_max = p_max;
    const SearchResult r = bo_loop([](GridPoint) { return 1.0; }, c);
    EXPECT_EQ(static_cast<int>(r.history.size()), 1 + p_max);
  }
}

TEST(BoLoop, HistoryInvariants) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    BoConfig c;
    c.bounds = kToyBounds;
    c.t_max = 20;
    c.p_max = 4;
    c.seed = seed;
    const SearchResult r = bo_loop(toy_objective, c);
    std::set<GridPoint> seen;
    int streak = 0;
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      EXPECT_TRUE(seen.insert(r.trace[i].point).second);
      if (i > 0) {
        EXPECT_LE(r.trace[i].best_so_far, r.trace[i - 1].best_so_far);
        streak = r.trace[i].best_so_far < r.trace[i - 1].best_so_far ? 0 : streak + 1;
      }
      EXPECT_LE(streak, c.p_max);
    }
    EXPECT_EQ(r.best.mse, r.trace.back().best_so_far);
  }
}

TEST(BoLoop, FindsToyMinimumWithinBudget) {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    BoConfig c;
    c.bounds = kToyBounds;
    c.t_max = 25;
    c.p_max = 25;
    c.seed = seed;
    const SearchResult r = bo_loop(toy_objective, c);
    if (r.best.point == GridPoint{3, 50}) ++hits;
  }
  EXPECT_GE(hits, 9);
}

TEST(BoLoop, FailedEvaluationsRecordedAsInfinite) {
  BoConfig c;
  c.bounds = kToyBounds;
  c.t_max = 12;
  c.p_max = 12;
  c.seed = 2;
  const SearchResult r = bo_loop(
      [](GridPoint p) {
        if (p.k == 2) throw Error("solver diverged");
        return toy_objective(p);
      },
      c);
  std::set<GridPoint> seen;
  for (const auto& h : r.history) {
    EXPECT_TRUE(seen.insert(h.point).second);
    if (h.point.k == 2) EXPECT_TRUE(std::isinf(h.mse));
  }
  EXPECT_NE(r.best.point.k, 2);
  EXPECT_TRUE(std::isfinite(r.best.mse));
  EXPECT_THROW(bo_loop([](GridPoint) -> Real { throw Error("down"); }, c), Error);
}

TEST(BoLoop, StopsWhenGridExhausted) {
  BoConfig c;
  c.bounds = {0, 1, 0, 1};
  c.t_max = 50;
  c.p_max = 50;
  const SearchResult r = bo_loop(toy_objective, c);
  EXPECT_EQ(r.history.size(), 4u);
}

TEST(BoLoop, RejectsBadLimits) {
  BoConfig c;
  c.t_max = 0;
  EXPECT_THROW(bo_loop(toy_objective, c), ValidationError);
  c.t_max = 1;
  c.p_max = 0;
  EXPECT_THROW(bo_loop(toy_objective, c), ValidationError);
}

TEST(Reflect, FoldsAtHalfIntegers) {
  EXPECT_EQ(reflect_into(5, 0, 9), 5);
  EXPECT_EQ(reflect_into(-1, 0, 9), 0);
  EXPECT_EQ(reflect_into(-2, 0, 9), 1);
  EXPECT_EQ(reflect_into(10, 0, 9), 9);
  EXPECT_EQ(reflect_into(11, 0, 9), 8);
  EXPECT_EQ(reflect_into(25, 0, 9), 5);
  EXPECT_EQ(reflect_into(3, 2, 2), 2);
  for (long x = -50; x < 50; ++x) {
    const int y = reflect_into(x, 3, 7);
    EXPECT_GE(y, 3);
    EXPECT_LE(y, 7);
  }
}

TEST(Reflect, ProposalKernelIsSymmetric) {
  // q(x -> y) for a two-sided step distribution folded onto [0, 4]
  const int lo = 0, hi = 4;
  const Real sigma = 2.5;
  auto weight = [&](long d) { return std::exp(-0.5 * d * d / (sigma * sigma)); };
  for (int x = lo; x <= hi; ++x) {
    for (int y = lo; y <= hi; ++y) {
      Real qxy = 0, qyx = 0;
      for (long d = -60; d <= 60; ++d) {
        if (reflect_into(x + d, lo, hi) == y) qxy += weight(d);
        if (reflect_into(y + d, lo, hi) == x) qyx += weight(d);
      }
      EXPECT_NEAR(qxy, qyx, 1e-12);
    }
  }
}

TEST(Mcmc, FlatObjectiveAcceptsEverything) {
  McmcConfig c;
  c.bounds = kToyBounds;
  c.max_evaluations = 40;
  c.seed = 3;
  const McmcResult r = mcmc_search([](GridPoint) { return 2.0; }, c);
  ASSERT_GT(r.chain.size(), 1u);
  for (const auto& s : r.chain) EXPECT_TRUE(s.accepted);
}

TEST(Mcmc, ImprovingProposalsAlwaysAccepted) {
  McmcConfig c;
  c.bounds = kToyBounds;
  c.max_evaluations = 30;
  c.temperature = 1e-9;
  c.seed = 4;
  const McmcResult r = mcmc_search(toy_objective, c);
  for (std::size_t i = 1; i < r.chain.size(); ++i) {
    if (r.chain[i].accepted) {
      EXPECT_LE(r.chain[i].mse, r.chain[i - 1].mse);
    } else {
      EXPECT_EQ(r.chain[i].state, r.chain[i - 1].state);
    }
  }
}

TEST(Mcmc, ChainRespectsBoundsAndBudget) {
  McmcConfig c;
  c.bounds = kToyBounds;
  c.max_evaluations = 15;
  c.seed = 9;
  int calls = 0;
  const McmcResult r = mcmc_search([&](GridPoint p) { ++calls; return toy_objective(p); }, c);
  EXPECT_EQ(calls, 15);
  EXPECT_EQ(r.search.history.size(), 15u);
  for (const auto& s : r.chain) EXPECT_TRUE(c.bounds.contains(s.state));
  EXPECT_NEAR(r.temperature, std::max(0.1 * r.search.history[0].mse, 1e-12), 1e-15);
  EXPECT_NEAR(r.sigma_l, 2.0, 1e-15);
}

TEST(Mcmc, TwoPointBoltzmannOccupancy) {
  const Real gap = 0.7, temperature = 0.5;
  McmcConfig c;
  c.bounds = {0, 0, 0, 1};
  c.temperature = temperature;
  c.sigma_l = 1.0;
  c.k_step_probability = 0.0;
  c.max_evaluations = 10;
  c.max_steps = 100000;
  c.seed = 12;
  const McmcResult r = mcmc_search([&](GridPoint p) { return p.l == 0 ? 0.0 : gap; }, c);
  ASSERT_EQ(r.chain.size(), 100000u);
  const int batches = 100;
  const std::size_t per = r.chain.size() / batches;
  std::vector<Real> means;
  for (int b = 0; b < batches; ++b) {
    Real ones = 0;
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) ones += r.chain[i].state.l;
    means.push_back(ones / per);
  }
  Real mean = 0;
  for (Real m : means) mean += m / batches;
  Real var = 0;
  for (Real m : means) var += (m - mean) * (m - mean) / (batches - 1);
  const Real se = std::sqrt(var / batches);
  const Real ratio = std::exp(-gap / temperature);
  const Real expected = ratio / (1 + ratio);
  EXPECT_LE(std::abs(mean - expected), 3 * se) << "mean " << mean << " expected " << expected;
}

TEST(Mcmc, DeterministicPerSeed) {
  McmcConfig c;
  c.bounds = kToyBounds;
  c.max_evaluations = 20;
  c.seed = 21;
  const McmcResult a = mcmc_search(toy_objective, c);
  const McmcResult b = mcmc_search(toy_objective, c);
  ASSERT_EQ(a.chain.size(), b.chain.size());
  for (std::size_t i = 0; i < a.chain.size(); ++i) {
    EXPECT_EQ(a.chain[i].state, b.chain[i].state);
    EXPECT_EQ(a.chain[i].accepted, b.chain[i].accepted);
  }
}

TEST(Mcmc, RejectsBadConfig) {
  McmcConfig c;
  c.temperature = 0.0;
  EXPECT_THROW(mcmc_search(toy_objective, c), ValidationError);
  c = {};
  c.sigma_l = -1.0;
  EXPECT_THROW(mcmc_search(toy_objective, c), ValidationError);
}

TEST(CompareStrategies, BudgetOneCurvesAreFirstEvaluations) {
  const ComparisonReport rep = compare_strategies(toy_objective, kToyBounds, 1, {0, 1}, 3);
  EXPECT_EQ(rep.curves.size(), 6u);
  for (const auto& c : rep.curves) ASSERT_EQ(c.best_so_far.size(), 1u);
  for (const auto& run : rep.runs) {
    ASSERT_EQ(run.trace.size(), 1u);
    EXPECT_EQ(run.trace[0].best_so_far, run.history[0].mse);
  }
}

TEST(CompareStrategies, BoBeatsMcmcOnToy) {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 10; ++s) seeds.push_back(s);
  const ComparisonReport rep = compare_strategies(toy_objective, kToyBounds, 25, seeds);
  for (const auto& c : rep.curves) {
    ASSERT_EQ(c.best_so_far.size(), 25u);
    for (std::size_t i = 1; i < c.best_so_far.size(); ++i) {
      EXPECT_LE(c.best_so_far[i], c.best_so_far[i - 1]);
    }
  }
  EXPECT_EQ(rep.final_bests("bo-ei").size(), 10u);
  EXPECT_EQ(rep.final_bests("mcmc").size(), 10u);
  EXPECT_LE(median(rep.final_bests("bo-ei")), median(rep.final_bests("mcmc")));
}

TEST(HistoryCsv, Layout) {
  BoConfig c;
  c.bounds = kToyBounds;
  c.t_max = 4;
  c.p_max = 4;
  const SearchResult r = bo_loop(toy_objective, c);
  const auto path = std::filesystem::temp_directory_path() / "meshgnn_history.csv";
  write_history_csv({r}, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "strategy,seed,t,k,l,mse,best_so_far,wall_seconds");
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line.rfind("bo-ei,0,", 0), 0u);
    ++rows;
  }
  EXPECT_EQ(rows, 4);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace meshgnn
