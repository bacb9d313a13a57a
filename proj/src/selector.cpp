// Copyright 2026 The ebfl Authors
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

#include "ebfl/selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <fmt/format.h>

#include "ebfl/error.hpp"

namespace ebfl {
namespace {

bool energy_less(double a, double b) {
  return a < b - kObjectiveTolerance * std::max(1.0, std::abs(b));
}

struct Scored {
  bool found = false;
  double objective = 0.0;
  double energy = 0.0;
  double time = 0.0;
  std::vector<std::size_t> ids;
};

// Strict preference: objective, then energy, then time, then ids.
bool preferred(const Scored& a, const Scored& b) {
  if (!b.found) return true;
  if (a.objective < b.objective - kObjectiveTolerance) return true;
  if (a.objective > b.objective + kObjectiveTolerance) return false;
  if (energy_less(a.energy, b.energy)) return true;
  if (energy_less(b.energy, a.energy)) return false;
  if (a.time != b.time) return a.time < b.time;
  return a.ids < b.ids;
}

struct Item {
  std::size_t cand = 0;
  double phi = 0.0;
  double energy = 0.0;
};

class Search {
 public:
  Search(const SelectionProblem& p, const std::vector<std::size_t>& eligible,
         double tau_max, const SolveOptions& options)
      : p_(p), eligible_(eligible), tau_max_(tau_max), options_(options) {}

  void run() {
    // Tier j: eligible_[j] is the slowest member; the rest come from
    // eligible_[0..j).
    for (std::size_t j = 0; j < eligible_.size(); ++j) {
      const SelectionCandidate& anchor = p_.candidates[eligible_[j]];
      if (anchor.maxn_energy_j > p_.remaining_budget_j) continue;
      anchor_ = eligible_[j];
      time_term_ = p_.alpha * (anchor.maxn_time_s / tau_max_);
      cap_ = p_.remaining_budget_j;
      slots_ = p_.max_cohort;

      items_.clear();
      if (p_.alpha < 1.0) {
        for (std::size_t k = 0; k < j; ++k) {
          const auto& c = p_.candidates[eligible_[k]];
          if (c.surrogate > 0.0 && c.maxn_energy_j <= cap_) {
            items_.push_back({eligible_[k], c.surrogate, c.maxn_energy_j});
          }
        }
      }
      std::sort(items_.begin(), items_.end(), [&](const Item& a, const Item& b) {
        if (a.phi != b.phi) return a.phi > b.phi;
        if (a.energy != b.energy) return a.energy < b.energy;
        return p_.candidates[a.cand].client < p_.candidates[b.cand].client;
      });
      by_ratio_.resize(items_.size());
      for (std::size_t k = 0; k < items_.size(); ++k) by_ratio_[k] = k;
      std::sort(by_ratio_.begin(), by_ratio_.end(),
                [&](std::size_t a, std::size_t b) {
                  const double ra = items_[a].phi / items_[a].energy;
                  const double rb = items_[b].phi / items_[b].energy;
                  if (ra != rb) return ra > rb;
                  return a < b;
                });
      chosen_.clear();
      dfs(0, anchor.surrogate, anchor.maxn_energy_j);
    }
  }

  const Scored& best() const { return best_; }
  std::size_t nodes() const { return nodes_; }

 private:
  Scored score() const {
    std::vector<std::size_t> members{anchor_};
    for (const std::size_t k : chosen_) members.push_back(items_[k].cand);
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return p_.candidates[a].client < p_.candidates[b].client;
    });
    Scored s;
    s.found = true;
    double phi = 0.0;
    for (const std::size_t m : members) {
      const auto& c = p_.candidates[m];
      phi += c.surrogate;
      s.energy += c.maxn_energy_j;
      s.ids.push_back(c.client);
    }
    s.time = p_.candidates[anchor_].maxn_time_s;
    s.objective = time_term_ - (1.0 - p_.alpha) * phi;
    return s;
  }

  // Upper bound on the surrogate mass addable from items_[start..).
  double bound(std::size_t start, double capacity, std::size_t slots) const {
    double top = 0.0;
    std::size_t taken = 0;
    for (std::size_t k = start; k < items_.size() && taken < slots; ++k) {
      if (items_[k].energy <= capacity) {
        top += items_[k].phi;
        ++taken;
      }
    }
    double frac = 0.0;
    double room = capacity;
    for (const std::size_t k : by_ratio_) {
      if (k < start || items_[k].energy > capacity) continue;
      if (items_[k].energy <= room) {
        frac += items_[k].phi;
        room -= items_[k].energy;
      } else {
        frac += items_[k].phi * room / items_[k].energy;
        break;
      }
    }
    return std::min(top, frac);
  }

  void dfs(std::size_t start, double phi, double energy) {
    ++nodes_;
    if (options_.deadline && (nodes_ & 255) == 0 &&
        std::chrono::steady_clock::now() > *options_.deadline) {
      throw TimeoutError(
          fmt::format("cohort selection exceeded its deadline after {} nodes",
                      nodes_));
    }
    Scored here = score();
    if (preferred(here, best_)) best_ = std::move(here);

    const std::size_t used = chosen_.size() + 1;
    if (used >= slots_ || start >= items_.size()) return;
    const double ub = bound(start, cap_ - energy, slots_ - used);
    const double lower = time_term_ - (1.0 - p_.alpha) * (phi + ub);
    if (lower > best_.objective + kObjectiveTolerance) return;
    if (lower >= best_.objective - kObjectiveTolerance &&
        energy_less(best_.energy, energy)) {
      return;
    }
    for (std::size_t k = start; k < items_.size(); ++k) {
      if (energy + items_[k].energy > cap_) continue;
      chosen_.push_back(k);
      dfs(k + 1, phi + items_[k].phi, energy + items_[k].energy);
      chosen_.pop_back();
    }
  }

  const SelectionProblem& p_;
  const std::vector<std::size_t>& eligible_;
  double tau_max_;
  const SolveOptions& options_;

  std::size_t anchor_ = 0;
  double time_term_ = 0.0;
  double cap_ = 0.0;
  std::size_t slots_ = 1;
  std::vector<Item> items_;
  std::vector<std::size_t> by_ratio_;
  std::vector<std::size_t> chosen_;
  Scored best_;
  std::size_t nodes_ = 0;
};

const SelectionCandidate& find_candidate(const SelectionProblem& problem,
                                         std::size_t client) {
  for (const auto& c : problem.candidates) {
    if (c.client == client) return c;
  }
  throw ValidationError(fmt::format("client {} is not a candidate", client));
}

}  // namespace

void SelectionProblem::validate() const {
  if (!(remaining_budget_j >= 0.0)) {
    throw ValidationError("remaining budget must be non-negative");
  }
  if (max_cohort == 0) throw ValidationError("max cohort size must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValidationError("alpha must lie in [0, 1]");
  }
  std::set<std::size_t> seen;
  for (const auto& c : candidates) {
    if (!seen.insert(c.client).second) {
      throw DuplicateKeyError(fmt::format("client {} listed twice", c.client));
    }
    if (!(c.maxn_time_s > 0.0) || !(c.maxn_energy_j > 0.0)) {
      throw ValidationError(
          fmt::format("client {} needs positive MAXN time and energy", c.client));
    }
    if (!(c.surrogate >= 0.0)) {
      throw ValidationError(
          fmt::format("client {} has a negative surrogate value", c.client));
    }
    if (c.cooldown < 0) {
      throw ValidationError(
          fmt::format("client {} has a negative cooldown", c.client));
    }
  }
}

double cohort_objective(const SelectionProblem& problem,
                        std::span<const std::size_t> cohort) {
  double tau_max = 0.0;
  for (const auto& c : problem.candidates) {
    if (c.cooldown == 0) tau_max = std::max(tau_max, c.maxn_time_s);
  }
  std::vector<std::size_t> ids(cohort.begin(), cohort.end());
  std::sort(ids.begin(), ids.end());
  double phi = 0.0;
  double t = 0.0;
  for (const std::size_t id : ids) {
    const auto& c = find_candidate(problem, id);
    phi += c.surrogate;
    t = std::max(t, c.maxn_time_s);
  }
  return problem.alpha * (t / tau_max) - (1.0 - problem.alpha) * phi;
}

std::optional<CohortSolution> ilp_cs(const SelectionProblem& problem,
                                     const SolveOptions& options) {
  problem.validate();
  std::vector<std::size_t> eligible;
  double tau_max = 0.0;
  for (std::size_t k = 0; k < problem.candidates.size(); ++k) {
    if (problem.candidates[k].cooldown == 0) {
      eligible.push_back(k);
      tau_max = std::max(tau_max, problem.candidates[k].maxn_time_s);
    }
  }
  if (eligible.empty()) throw ValidationError("no eligible clients");
  std::sort(eligible.begin(), eligible.end(), [&](std::size_t a, std::size_t b) {
    const auto& ca = problem.candidates[a];
    const auto& cb = problem.candidates[b];
    if (ca.maxn_time_s != cb.maxn_time_s) return ca.maxn_time_s < cb.maxn_time_s;
    return ca.client < cb.client;
  });

  Search search(problem, eligible, tau_max, options);
  search.run();
  const Scored& best = search.best();
  if (!best.found) return std::nullopt;
  CohortSolution out;
  out.cohort = best.ids;
  out.objective = best.objective;
  out.maxn_time_s = best.time;
  out.maxn_energy_j = best.energy;
  out.nodes = search.nodes();
  return out;
}

ModeAssignment assign_mode(std::size_t client, const ParetoFront& front,
                           double round_time_s) {
  if (front.points.empty()) {
    throw ValidationError(fmt::format("client {} has an empty front", client));
  }
  const ParetoPoint* pick = nullptr;
  for (const auto& pt : front.points) {
    if (pt.round_time_s > round_time_s) continue;
    if (pick == nullptr || pt.energy_j < pick->energy_j ||
        (pt.energy_j == pick->energy_j &&
         (pt.round_time_s < pick->round_time_s ||
          (pt.round_time_s == pick->round_time_s &&
           pt.mode_id < pick->mode_id)))) {
      pick = &pt;
    }
  }
  if (pick == nullptr) {
    throw InfeasibleError(fmt::format(
        "client {} has no power mode within {:.6g} s", client, round_time_s));
  }
  return {client, pick->mode_id, pick->round_time_s, pick->energy_j,
          front.fastest().energy_j};
}

std::vector<ModeAssignment> ilp_pm(const SelectionProblem& problem,
                                   std::span<const std::size_t> cohort,
                                   double round_time_s) {
  std::vector<std::size_t> ids(cohort.begin(), cohort.end());
  std::sort(ids.begin(), ids.end());
  std::vector<ModeAssignment> out;
  out.reserve(ids.size());
  for (const std::size_t id : ids) {
    const auto& c = find_candidate(problem, id);
    if (c.front == nullptr) {
      throw ValidationError(fmt::format("client {} has no Pareto front", id));
    }
    ModeAssignment a = assign_mode(id, *c.front, round_time_s);
    a.maxn_energy_j = c.maxn_energy_j;
    out.push_back(std::move(a));
  }
  return out;
}

std::optional<SelectionPlan> solve_bilevel(const SelectionProblem& problem,
                                           const SolveOptions& options) {
  const auto cohort = ilp_cs(problem, options);
  if (!cohort) return std::nullopt;
  SelectionPlan plan;
  plan.cohort = cohort->cohort;
  plan.objective = cohort->objective;
  plan.predicted_time_s = cohort->maxn_time_s;
  plan.maxn_energy_j = cohort->maxn_energy_j;
  plan.nodes = cohort->nodes;
  plan.modes = ilp_pm(problem, plan.cohort, plan.predicted_time_s);
  for (const auto& m : plan.modes) {
    plan.round_time_s = std::max(plan.round_time_s, m.round_time_s);
    plan.energy_j += m.energy_j;
  }
  return plan;
}

std::vector<int> cooldown_update(
    std::span<const int> counters,
    std::span<const std::pair<std::size_t, double>> selected, double rho) {
  if (!(rho >= 0.0)) throw ValidationError("rho must be non-negative");
  std::vector<int> out(counters.begin(), counters.end());
  for (int& c : out) {
    if (c > 0) --c;
  }
  for (const auto& [client, acc] : selected) {
    if (client >= out.size()) {
      throw ValidationError(fmt::format("unknown client {}", client));
    }
    out[client] = static_cast<int>(std::ceil(rho * acc - 1e-9));
    out[client] = std::max(out[client], 0);
  }
  return out;
}

}  // namespace ebfl
