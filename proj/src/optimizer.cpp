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

#include "meshgnn/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

namespace meshgnn {

namespace {

constexpr Real kInf = std::numeric_limits<Real>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Real safe_evaluate(const Objective& objective, GridPoint p) {
  try {
    const Real v = objective(p);
    return std::isnan(v) ? kInf : v;
  } catch (const std::exception&) {
    return kInf;
  }
}

GridPoint grid_at(const SearchBounds& b, long index) {
  const long nl = b.l_max - b.l_min + 1;
  return {b.k_min + static_cast<int>(index / nl), b.l_min + static_cast<int>(index % nl)};
}

long grid_index(const SearchBounds& b, GridPoint p) {
  const long nl = b.l_max - b.l_min + 1;
  return static_cast<long>(p.k - b.k_min) * nl + (p.l - b.l_min);
}

EvalRecord best_of(const EvalHistory& history) {
  const EvalRecord* best = nullptr;
  for (const auto& r : history) {
    if (std::isfinite(r.mse) && (!best || r.mse < best->mse)) best = &r;
  }
  if (!best) throw Error("every objective evaluation failed");
  return *best;
}

}  // namespace

std::string to_string(Acquisition a) {
  return a == Acquisition::ExpectedImprovement ? "ei" : "ucb";
}

GridPoint argmax_over_grid(const SearchBounds& bounds, const EvalHistory& evaluated,
                           const std::function<Real(GridPoint)>& score) {
  bounds.validate();
  std::vector<char> taken(static_cast<std::size_t>(bounds.grid_size()), 0);
  for (const auto& r : evaluated) {
    if (bounds.contains(r.point)) taken[grid_index(bounds, r.point)] = 1;
  }
  bool found = false;
  GridPoint best_point;
  Real best_score = -kInf;
  for (long i = 0; i < bounds.grid_size(); ++i) {
    if (taken[i]) continue;
    const GridPoint p = grid_at(bounds, i);
    Real s = score(p);
    if (std::isnan(s)) s = -kInf;
    if (!found || s > best_score) {
      best_point = p;
      best_score = s;
      found = true;
    }
  }
  if (!found) throw ValidationError("search grid exhausted");
  return best_point;
}

GridPoint propose_next(const GPModel& gp, const SearchBounds& bounds,
                       const AcquisitionConfig& acquisition, const EvalHistory& history) {
  const Real best = best_of(history).mse;
  if (acquisition.kind == Acquisition::ExpectedImprovement) {
    return argmax_over_grid(bounds, history, [&](GridPoint p) {
      const Prediction pr = gp_predict(gp, p);
      return expected_improvement(pr.mean, pr.stdev, best);
    });
  }
  return argmax_over_grid(bounds, history, [&](GridPoint p) {
    const Prediction pr = gp_predict(gp, p);
    return -ucb_score(pr.mean, pr.stdev, acquisition.kappa);
  });
}

void BoConfig::validate() const {
  bounds.validate();
  if (t_max < 1) throw ValidationError("t_max must be at least 1");
  if (p_max < 1) throw ValidationError("p_max must be at least 1");
  if (!(noise >= 0)) throw ValidationError("GP noise must be non-negative");
  if (acquisition.kappa < 0) throw ValidationError("UCB kappa must be non-negative");
}

SearchResult bo_loop(const Objective& objective, const BoConfig& config) {
  config.validate();
  const SearchBounds& b = config.bounds;
  SearchResult out;
  out.strategy = "bo-" + to_string(config.acquisition.kind);
  out.seed = config.seed;
  Rng rng(derive_seed(config.seed, "bo-init"));
  const auto t0 = Clock::now();

  int t = 1;
  int p = 1;
  Real best = kInf;
  bool have_finite = false;
  while (t <= config.t_max && p <= config.p_max) {
    if (static_cast<long>(out.history.size()) >= b.grid_size()) break;
    GridPoint next;
    if (!have_finite) {
      // seeded-random pick among the unevaluated points
      std::vector<char> taken(static_cast<std::size_t>(b.grid_size()), 0);
      for (const auto& r : out.history) taken[grid_index(b, r.point)] = 1;
      const long remaining = b.grid_size() - static_cast<long>(out.history.size());
      long pick = static_cast<long>(uniform_int(rng, 0, remaining - 1));
      long i = 0;
      for (;; ++i) {
        if (taken[i]) continue;
        if (pick-- == 0) break;
      }
      next = grid_at(b, i);
    } else {
      const GPModel gp = gp_fit(out.history, b, config.noise);
      next = propose_next(gp, b, config.acquisition, out.history);
    }

    const Real mse = safe_evaluate(objective, next);
    if (mse < best) {
      best = mse;
      p = 1;
    } else {
      ++p;
    }
    have_finite = have_finite || std::isfinite(mse);
    out.history.push_back({next, mse});
    out.trace.push_back({t, next, mse, best, seconds_since(t0)});
    ++t;
  }
  out.best = best_of(out.history);
  return out;
}

void McmcConfig::validate() const {
  bounds.validate();
  if (temperature && !(*temperature > 0)) throw ValidationError("MCMC temperature must be > 0");
  if (sigma_l && !(*sigma_l > 0)) throw ValidationError("MCMC sigma_l must be > 0");
  if (!(k_step_probability >= 0 && k_step_probability <= 1)) {
    throw ValidationError("MCMC k-step probability must lie in [0, 1]");
  }
  if (max_evaluations < 1) throw ValidationError("MCMC needs at least one evaluation");
  if (max_steps < 0) throw ValidationError("MCMC max_steps must be non-negative");
}

int reflect_into(long x, int lo, int hi) {
  const long n = static_cast<long>(hi) - lo + 1;
  long y = (x - lo) % (2 * n);
  if (y < 0) y += 2 * n;
  if (y >= n) y = 2 * n - 1 - y;
  return static_cast<int>(lo + y);
}

McmcResult mcmc_search(const Objective& objective, const McmcConfig& config) {
  config.validate();
  const SearchBounds& b = config.bounds;
  McmcResult out;
  out.search.strategy = "mcmc";
  out.search.seed = config.seed;
  Rng rng(derive_seed(config.seed, "mcmc"));
  const auto t0 = Clock::now();
  std::map<GridPoint, Real> cache;
  Real best = kInf;

  auto evaluate = [&](GridPoint p) {
    if (auto it = cache.find(p); it != cache.end()) return it->second;
    const Real v = safe_evaluate(objective, p);
    cache.emplace(p, v);
    best = std::min(best, v);
    out.search.history.push_back({p, v});
    out.search.trace.push_back({static_cast<int>(out.search.history.size()), p, v, best,
                                seconds_since(t0)});
    return v;
  };

  GridPoint state{static_cast<int>(uniform_int(rng, b.k_min, b.k_max)),
                  static_cast<int>(uniform_int(rng, b.l_min, b.l_max))};
  Real current = evaluate(state);

  const Real l_range = b.l_max - b.l_min;
  out.temperature = config.temperature.value_or(std::isfinite(current) ? std::max(0.1 * current, 1e-12)
                                                                       : 1.0);
  out.sigma_l = config.sigma_l.value_or(l_range > 0 ? 0.05 * l_range : 1.0);
  const long max_steps = config.max_steps > 0 ? config.max_steps : 1000L * config.max_evaluations;

  out.chain.push_back({state, current, true});
  for (long step = 1; step < max_steps; ++step) {
    GridPoint proposal = state;
    if (uniform01(rng) < config.k_step_probability) {
      const int dk = uniform01(rng) < 0.5 ? -1 : 1;
      proposal.k = reflect_into(static_cast<long>(state.k) + dk, b.k_min, b.k_max);
    } else {
      const long dl = std::lround(out.sigma_l * standard_normal(rng));
      proposal.l = reflect_into(static_cast<long>(state.l) + dl, b.l_min, b.l_max);
    }
    const bool fresh = cache.find(proposal) == cache.end();
    if (fresh && static_cast<int>(cache.size()) >= config.max_evaluations) break;
    const Real candidate = evaluate(proposal);
    const Real u = uniform01(rng);
    const bool accept = candidate <= current || u < std::exp(-(candidate - current) / out.temperature);
    if (accept) {
      state = proposal;
      current = candidate;
    }
    out.chain.push_back({state, current, accept});
  }
  out.search.best = best_of(out.search.history);
  return out;
}

std::vector<Real> ComparisonReport::final_bests(const std::string& strategy) const {
  std::vector<Real> out;
  for (const auto& c : curves) {
    if (c.strategy == strategy && !c.best_so_far.empty()) out.push_back(c.best_so_far.back());
  }
  return out;
}

namespace {

std::vector<Real> padded_curve(const SearchResult& run, int budget) {
  std::vector<Real> curve;
  for (const auto& row : run.trace) {
    if (static_cast<int>(curve.size()) == budget) break;
    curve.push_back(row.best_so_far);
  }
  const Real last = curve.empty() ? kInf : curve.back();
  curve.resize(static_cast<std::size_t>(budget), last);
  return curve;
}

}  // namespace

ComparisonReport compare_strategies(const Objective& objective, const SearchBounds& bounds,
                                    int budget, const std::vector<std::uint64_t>& seeds,
                                    int mcmc_repeats, Real noise, Real kappa) {
  if (budget < 1) throw ValidationError("comparison budget must be at least 1");
  if (mcmc_repeats < 1) throw ValidationError("MCMC repeats must be at least 1");
  bounds.validate();
  ComparisonReport report;
  report.budget = budget;
  for (std::uint64_t seed : seeds) {
    for (Acquisition a : {Acquisition::ExpectedImprovement, Acquisition::Ucb}) {
      BoConfig bc;
      bc.bounds = bounds;
      bc.t_max = budget;
      bc.p_max = budget;  // patience off: equal budgets
      bc.acquisition = {a, kappa};
      bc.noise = noise;
      bc.seed = seed;
      SearchResult r = bo_loop(objective, bc);
      report.curves.push_back({r.strategy, seed, padded_curve(r, budget),
                               r.trace.empty() ? 0.0 : r.trace.back().wall_seconds, r.best});
      report.runs.push_back(std::move(r));
    }
    StrategyCurve mc{"mcmc", seed, std::vector<Real>(static_cast<std::size_t>(budget), 0.0), 0.0,
                     {}};
    bool first = true;
    for (int rep = 0; rep < mcmc_repeats; ++rep) {
      McmcConfig cfg;
      cfg.bounds = bounds;
      cfg.max_evaluations = budget;
      cfg.seed = derive_seed(seed, "mcmc-repeat", static_cast<std::uint64_t>(rep));
      McmcResult m = mcmc_search(objective, cfg);
      const auto curve = padded_curve(m.search, budget);
      for (int i = 0; i < budget; ++i) mc.best_so_far[i] += curve[i] / mcmc_repeats;
      mc.wall_seconds +=
          (m.search.trace.empty() ? 0.0 : m.search.trace.back().wall_seconds) / mcmc_repeats;
      if (first || m.search.best.mse < mc.best.mse) mc.best = m.search.best;
      first = false;
      report.runs.push_back(std::move(m.search));
    }
    report.curves.push_back(std::move(mc));
  }
  return report;
}

namespace {

std::string fmt(Real v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::string history_csv_header() { return "strategy,seed,t,k,l,mse,best_so_far,wall_seconds\n"; }

std::string history_csv_rows(const SearchResult& run) {
  std::string out;
  for (const auto& r : run.trace) {
    out += run.strategy + "," + std::to_string(run.seed) + "," + std::to_string(r.t) + "," +
           std::to_string(r.point.k) + "," + std::to_string(r.point.l) + "," + fmt(r.mse) + "," +
           fmt(r.best_so_far) + "," + fmt(r.wall_seconds) + "\n";
  }
  return out;
}

void write_history_csv(const std::vector<SearchResult>& runs, const std::filesystem::path& path) {
  std::string text = history_csv_header();
  for (const auto& r : runs) text += history_csv_rows(r);
  write_text(path, text);
}

void write_comparison_csv(const ComparisonReport& report, const std::filesystem::path& path) {
  std::string text = "strategy,seed,evaluation,best_so_far,wall_seconds\n";
  for (const auto& c : report.curves) {
    for (std::size_t i = 0; i < c.best_so_far.size(); ++i) {
      text += c.strategy + "," + std::to_string(c.seed) + "," + std::to_string(i + 1) + "," +
              fmt(c.best_so_far[i]) + "," + fmt(c.wall_seconds) + "\n";
    }
  }
  write_text(path, text);
}

}  // namespace meshgnn
