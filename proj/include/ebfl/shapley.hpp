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

#ifndef EBFL_SHAPLEY_HPP_
#define EBFL_SHAPLEY_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

namespace ebfl {

// Bit k set <=> cohort member k (position in the round's cohort) is present.
using Coalition = std::uint64_t;

inline constexpr std::size_t kMaxCohortBits = 63;
inline constexpr std::size_t kDefaultExhaustiveCap = 12;

inline Coalition grand_coalition(std::size_t cohort_size) {
  return cohort_size >= 64 ? ~Coalition{0}
                           : (Coalition{1} << cohort_size) - 1;
}

// Memoized v(S). v(0) is the utility of the unchanged global model. Safe for
// concurrent lookups; the wrapped function must be safe to call concurrently
// when prefetch() uses more than one worker.
class CohortUtility {
 public:
  using Fn = std::function<double(Coalition)>;

  explicit CohortUtility(Fn fn) : fn_(std::move(fn)) {}

  double operator()(Coalition s);
  void prefetch(std::span<const Coalition> coalitions, std::size_t workers);

  // Distinct coalitions evaluated so far.
  std::size_t evaluations() const;

 private:
  Fn fn_;
  mutable std::mutex mu_;
  std::unordered_map<Coalition, double> cache_;
};

// Exact Shapley values of the cohort game; 2^n utility evaluations.
// Throws SizeError when cohort_size > cap.
std::vector<double> exhaustive_shapley(CohortUtility& utility,
                                       std::size_t cohort_size,
                                       std::size_t cap = kDefaultExhaustiveCap,
                                       std::size_t workers = 1);

// Kernel weight of a coalition of `subset_size` in a cohort of `cohort_size`:
// 1 for the grand coalition, else (n-1) / (C(n,s) * s * (n-s)).
double kernel_weight(std::size_t subset_size, std::size_t cohort_size);

// min(2^n, 3n) coalitions: every non-empty subset when 2^n <= 3n, otherwise
// the n singletons plus 2n distinct larger coalitions drawn without
// replacement proportionally to their kernel weight. The grand coalition is
// always present.
std::vector<Coalition> sample_cohorts(std::size_t cohort_size,
                                      std::uint64_t seed);

// Weighted least squares fit v(S) ~ sum_{i in S} phi_i over the samples.
std::vector<double> kernel_shapley(CohortUtility& utility,
                                   std::size_t cohort_size,
                                   std::span<const Coalition> samples,
                                   std::size_t workers = 1);

// Min-max scaling into [0, 1]; a degenerate range maps everything to 1.
std::vector<double> normalize(std::span<const double> values);
std::map<std::size_t, double> normalize(
    const std::map<std::size_t, double>& values);

// Per-client raw, normalized and surrogate contribution values.
class ShapleyLedger {
 public:
  struct Entry {
    double raw = 0.0;
    double normalized = 0.0;
    double surrogate = 1.0;
    bool observed = false;
  };

  ShapleyLedger(std::size_t clients, double beta, double initial = 1.0);

  double beta() const { return beta_; }
  std::size_t round() const { return round_; }
  std::size_t size() const { return entries_.size(); }
  const Entry& entry(std::size_t client) const { return entries_.at(client); }
  double surrogate(std::size_t client) const {
    return entries_.at(client).surrogate;
  }
  std::vector<double> surrogates() const;

  // Normalizes the round's raw values and applies the surrogate update.
  void record_round(std::span<const std::size_t> participants,
                    std::span<const double> raw_values);

  // Writes `round,client,phi_raw,phi_norm,phi_surrogate` rows for the clients
  // observed in the most recent round.
  void write_round_csv(std::ostream& out) const;

 private:
  friend ShapleyLedger surrogate_update(
      const ShapleyLedger&, const std::map<std::size_t, double>&,
      std::span<const std::size_t>);

  double beta_;
  std::size_t round_ = 0;
  std::vector<Entry> entries_;
  std::vector<std::size_t> last_participants_;
};

// Phi_i <- beta * Phi_i + (1 - beta) * value_i for participants; others keep
// Phi. Throws ValidationError if a participant has no round value.
ShapleyLedger surrogate_update(const ShapleyLedger& ledger,
                               const std::map<std::size_t, double>& round_values,
                               std::span<const std::size_t> participants);

}  // namespace ebfl

#endif  // EBFL_SHAPLEY_HPP_
