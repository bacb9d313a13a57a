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

#include "ebfl/shapley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <set>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "ebfl/error.hpp"
#include "ebfl/parallel.hpp"
#include "ebfl/random.hpp"

namespace ebfl {
namespace {

constexpr double kRidge = 1e-9;

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(r);
}

void check_cohort_size(std::size_t n) {
  if (n == 0) throw ValidationError("cohort must not be empty");
  if (n > kMaxCohortBits) {
    throw SizeError(fmt::format("cohort of {} exceeds {} members", n,
                                kMaxCohortBits));
  }
}

// Uniform random k-subset of {0..n-1}.
Coalition random_subset(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Coalition s = 0;
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
    s |= Coalition{1} << idx[i];
  }
  return s;
}

}  // namespace

double CohortUtility::operator()(Coalition s) {
  {
    std::lock_guard lock(mu_);
    if (const auto it = cache_.find(s); it != cache_.end()) return it->second;
  }
  const double v = fn_(s);
  std::lock_guard lock(mu_);
  return cache_.emplace(s, v).first->second;
}

void CohortUtility::prefetch(std::span<const Coalition> coalitions,
                             std::size_t workers) {
  std::vector<Coalition> missing;
  {
    std::lock_guard lock(mu_);
    for (const Coalition s : coalitions) {
      if (!cache_.contains(s)) missing.push_back(s);
    }
  }
  std::sort(missing.begin(), missing.end());
  missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
  std::vector<double> values(missing.size());
  parallel_for(missing.size(), workers,
               [&](std::size_t i) { values[i] = fn_(missing[i]); });
  std::lock_guard lock(mu_);
  for (std::size_t i = 0; i < missing.size(); ++i) {
    cache_.emplace(missing[i], values[i]);
  }
}

std::size_t CohortUtility::evaluations() const {
  std::lock_guard lock(mu_);
  return cache_.size();
}

std::vector<double> exhaustive_shapley(CohortUtility& utility,
                                       std::size_t cohort_size,
                                       std::size_t cap, std::size_t workers) {
  check_cohort_size(cohort_size);
  if (cohort_size > cap) {
    throw SizeError(fmt::format(
        "exhaustive Shapley over {} clients exceeds the cap of {}; use the "
        "kernel approximation",
        cohort_size, cap));
  }
  const std::size_t n = cohort_size;
  const Coalition full = grand_coalition(n);

  std::vector<Coalition> all(static_cast<std::size_t>(full) + 1);
  for (Coalition s = 0; s <= full; ++s) all[s] = s;
  utility.prefetch(all, workers);

  // coef[k] = 1 / (n * C(n-1, k)) for a coalition of size k without i.
  std::vector<double> coef(n);
  for (std::size_t k = 0; k < n; ++k) {
    coef[k] = 1.0 / (static_cast<double>(n) * binomial(n - 1, k));
  }
  std::vector<double> phi(n, 0.0);
  for (Coalition s = 0; s <= full; ++s) {
    const double base = utility(s);
    const auto k = static_cast<std::size_t>(std::popcount(s));
    for (std::size_t i = 0; i < n; ++i) {
      const Coalition bit = Coalition{1} << i;
      if (s & bit) continue;
      phi[i] += coef[k] * (utility(s | bit) - base);
    }
  }
  return phi;
}

double kernel_weight(std::size_t subset_size, std::size_t cohort_size) {
  if (subset_size == 0) {
    throw DomainError("kernel weight of the empty coalition is undefined");
  }
  if (subset_size > cohort_size) {
    throw DomainError("coalition larger than the cohort");
  }
  if (subset_size == cohort_size) return 1.0;
  const double n = static_cast<double>(cohort_size);
  const double s = static_cast<double>(subset_size);
  return (n - 1.0) / (binomial(cohort_size, subset_size) * s * (n - s));
}

std::vector<Coalition> sample_cohorts(std::size_t cohort_size,
                                      std::uint64_t seed) {
  check_cohort_size(cohort_size);
  const std::size_t n = cohort_size;
  std::vector<Coalition> out;
  if (n < 4) {  // 2^n <= 3n exactly for n <= 3.
    for (Coalition s = 1; s <= grand_coalition(n); ++s) out.push_back(s);
    return out;
  }

  for (std::size_t i = 0; i < n; ++i) out.push_back(Coalition{1} << i);
  Rng rng(seed);
  std::set<Coalition> drawn;
  std::vector<double> drawn_of_size(n + 1, 0.0);
  std::vector<double> mass(n + 1, 0.0);
  const std::size_t extra = 2 * n;
  for (std::size_t t = 0; t < extra; ++t) {
    for (std::size_t k = 2; k <= n; ++k) {
      mass[k] = (binomial(n, k) - drawn_of_size[k]) * kernel_weight(k, n);
    }
    std::discrete_distribution<std::size_t> size_dist(mass.begin(), mass.end());
    const std::size_t k = size_dist(rng);
    Coalition s = 0;
    do {
      s = random_subset(n, k, rng);
    } while (drawn.contains(s));
    drawn.insert(s);
    drawn_of_size[k] += 1.0;
    out.push_back(s);
  }
  const Coalition full = grand_coalition(n);
  if (!drawn.contains(full)) out.back() = full;
  return out;
}

std::vector<double> kernel_shapley(CohortUtility& utility,
                                   std::size_t cohort_size,
                                   std::span<const Coalition> samples,
                                   std::size_t workers) {
  check_cohort_size(cohort_size);
  const std::size_t n = cohort_size;
  if (samples.empty()) throw ValidationError("no sampled coalitions");

  // Accumulate in a canonical order so the fit ignores sample order.
  std::vector<Coalition> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  Coalition covered = 0;
  for (const Coalition s : sorted) {
    if (s == 0) throw DomainError("the empty coalition cannot be sampled");
    if (s & ~grand_coalition(n)) {
      throw ValidationError("coalition refers to a client outside the cohort");
    }
    covered |= s;
  }
  if (covered != grand_coalition(n)) {
    const auto missing =
        static_cast<std::size_t>(std::countr_zero(~covered & grand_coalition(n)));
    throw CoverageError(fmt::format(
        "cohort member {} appears in no sampled coalition", missing));
  }
  utility.prefetch(sorted, workers);

  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (const Coalition s : sorted) {
    const double w =
        kernel_weight(static_cast<std::size_t>(std::popcount(s)), n);
    const double v = utility(s);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(s >> i & 1)) continue;
      rhs(i) += w * v;
      for (std::size_t j = 0; j < n; ++j) {
        if (s >> j & 1) normal(i, j) += w;
      }
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
  Eigen::VectorXd phi;
  if (lu.rank() < static_cast<Eigen::Index>(n)) {
    normal += kRidge * Eigen::MatrixXd::Identity(n, n);
    phi = normal.fullPivLu().solve(rhs);
  } else {
    phi = lu.solve(rhs);
  }
  return {phi.data(), phi.data() + n};
}

std::vector<double> normalize(std::span<const double> values) {
  if (values.empty()) return {};
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double min = *lo;
  const double range = *hi - min;
  std::vector<double> out(values.size(), 1.0);
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = std::clamp((values[i] - min) / range, 0.0, 1.0);
  }
  return out;
}

std::map<std::size_t, double> normalize(
    const std::map<std::size_t, double>& values) {
  std::vector<double> flat;
  flat.reserve(values.size());
  for (const auto& [client, v] : values) flat.push_back(v);
  const auto scaled = normalize(flat);
  std::map<std::size_t, double> out;
  std::size_t k = 0;
  for (const auto& [client, v] : values) out.emplace(client, scaled[k++]);
  return out;
}

ShapleyLedger::ShapleyLedger(std::size_t clients, double beta, double initial)
    : beta_(beta), entries_(clients) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw ValidationError("beta must lie in [0, 1]");
  }
  for (auto& e : entries_) e.surrogate = initial;
}

std::vector<double> ShapleyLedger::surrogates() const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.surrogate);
  return out;
}

void ShapleyLedger::record_round(std::span<const std::size_t> participants,
                                 std::span<const double> raw_values) {
  if (participants.size() != raw_values.size()) {
    throw ValidationError("one raw value per participant is required");
  }
  const auto scaled = normalize(raw_values);
  std::map<std::size_t, double> round_values;
  for (std::size_t k = 0; k < participants.size(); ++k) {
    round_values[participants[k]] = scaled[k];
  }
  ShapleyLedger next = surrogate_update(*this, round_values, participants);
  for (std::size_t k = 0; k < participants.size(); ++k) {
    next.entries_[participants[k]].raw = raw_values[k];
  }
  *this = std::move(next);
}

void ShapleyLedger::write_round_csv(std::ostream& out) const {
  for (const std::size_t c : last_participants_) {
    const Entry& e = entries_[c];
    out << fmt::format("{},{},{:.10g},{:.10g},{:.10g}\n", round_, c, e.raw,
                       e.normalized, e.surrogate);
  }
}

ShapleyLedger surrogate_update(const ShapleyLedger& ledger,
                               const std::map<std::size_t, double>& round_values,
                               std::span<const std::size_t> participants) {
  ShapleyLedger next = ledger;
  const double beta = ledger.beta_;
  for (const std::size_t c : participants) {
    const auto it = round_values.find(c);
    if (it == round_values.end()) {
      throw ValidationError(fmt::format("participant {} has no round value", c));
    }
    if (c >= next.entries_.size()) {
      throw ValidationError(fmt::format("unknown client {}", c));
    }
    auto& e = next.entries_[c];
    e.normalized = it->second;
    e.surrogate = beta * e.surrogate + (1.0 - beta) * it->second;
    e.observed = true;
  }
  next.last_participants_.assign(participants.begin(), participants.end());
  ++next.round_;
  return next;
}

}  // namespace ebfl
