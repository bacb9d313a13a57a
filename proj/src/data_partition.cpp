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

#include "ebfl/data_partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "ebfl/error.hpp"
#include "ebfl/random.hpp"

namespace ebfl {
namespace {

constexpr int kShardMatchAttempts = 200;

double entropy(const std::vector<double>& p, double (*log_fn)(double)) {
  double h = 0.0;
  for (const double x : p) {
    if (x > 0.0) h -= x * log_fn(x);
  }
  return h;
}

double log2_of(double x) { return std::log2(x); }
double ln_of(double x) { return std::log(x); }

std::vector<std::vector<double>> label_distributions(
    const PartitionAssignment& partition) {
  std::vector<std::vector<double>> dists;
  dists.reserve(partition.client_count);
  for (std::size_t c = 0; c < partition.client_count; ++c) {
    const auto& h = partition.histograms[c];
    const double total =
        static_cast<double>(std::accumulate(h.begin(), h.end(), std::size_t{0}));
    if (total == 0.0) {
      throw ValidationError(fmt::format("client {} holds no samples", c));
    }
    std::vector<double> p(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) p[k] = h[k] / total;
    dists.push_back(std::move(p));
  }
  return dists;
}

}  // namespace

std::size_t PartitionAssignment::client_size(std::size_t client) const {
  const auto& h = histograms.at(client);
  return std::accumulate(h.begin(), h.end(), std::size_t{0});
}

std::vector<std::vector<std::size_t>> PartitionAssignment::members() const {
  std::vector<std::vector<std::size_t>> out(client_count);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    out[assignment[i]].push_back(i);
  }
  return out;
}

PartitionAssignment make_assignment(std::size_t client_count, int num_classes,
                                    std::vector<std::size_t> assignment,
                                    const std::vector<int>& labels) {
  if (assignment.size() != labels.size()) {
    throw ValidationError("assignment length differs from sample count");
  }
  PartitionAssignment p;
  p.client_count = client_count;
  p.histograms.assign(client_count,
                      std::vector<std::size_t>(num_classes, std::size_t{0}));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (assignment[i] >= client_count) {
      throw ValidationError("assignment refers to an unknown client");
    }
    ++p.histograms[assignment[i]][static_cast<std::size_t>(labels[i])];
  }
  p.assignment = std::move(assignment);
  return p;
}

std::size_t shards_per_class(std::size_t clients, std::size_t labels_per_client,
                             std::size_t total_classes) {
  if (total_classes == 0) throw ValidationError("total_classes must be > 0");
  return (clients * labels_per_client + total_classes - 1) / total_classes;
}

PartitionAssignment shard_partition(const LabeledDataset& data,
                                    std::size_t clients,
                                    std::size_t labels_per_client,
                                    std::size_t total_classes,
                                    std::uint64_t seed) {
  data.validate();
  if (clients == 0 || labels_per_client == 0 || total_classes == 0) {
    throw ValidationError("clients, labels_per_client and classes must be > 0");
  }
  if (static_cast<std::size_t>(data.num_classes) > total_classes) {
    throw ValidationError("dataset has more classes than total_classes");
  }
  if (labels_per_client > total_classes) {
    throw InfeasibleError(fmt::format(
        "labels_per_client {} exceeds the {} available classes",
        labels_per_client, total_classes));
  }
  if (clients * labels_per_client < total_classes) {
    throw InfeasibleError("clients * labels_per_client < total_classes");
  }
  const std::size_t l = total_classes;
  const std::size_t shards = shards_per_class(clients, labels_per_client, l);
  Rng rng(seed);

  // Cut every class into `shards` near-equal shards of shuffled samples.
  std::vector<std::vector<std::size_t>> by_class(l);
  for (std::size_t i = 0; i < data.size(); ++i) {
    by_class[static_cast<std::size_t>(data.labels[i])].push_back(i);
  }
  std::vector<std::vector<std::vector<std::size_t>>> class_shards(l);
  for (std::size_t k = 0; k < l; ++k) {
    auto& idx = by_class[k];
    if (idx.size() < shards) {
      throw InfeasibleError(fmt::format(
          "class {} has {} samples, fewer than {} shards", k, idx.size(),
          shards));
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::size_t base = idx.size() / shards;
    const std::size_t extra = idx.size() % shards;
    std::size_t pos = 0;
    for (std::size_t s = 0; s < shards; ++s) {
      const std::size_t len = base + (s < extra ? 1 : 0);
      class_shards[k].emplace_back(idx.begin() + pos, idx.begin() + pos + len);
      pos += len;
    }
  }

  // Spread the clients * labels_per_client client slots over the classes as
  // evenly as possible; every class gets at least one slot.
  const std::size_t slots_total = clients * labels_per_client;
  std::vector<std::size_t> class_order(l);
  std::iota(class_order.begin(), class_order.end(), std::size_t{0});
  std::shuffle(class_order.begin(), class_order.end(), rng);
  std::vector<std::size_t> used(l, slots_total / l);
  for (std::size_t r = 0; r < slots_total % l; ++r) ++used[class_order[r]];
  std::vector<std::size_t> slots;
  slots.reserve(slots_total);
  for (const std::size_t k : class_order) slots.insert(slots.end(), used[k], k);

  auto distinct_chunks = [&](const std::vector<std::size_t>& s) {
    for (std::size_t c = 0; c < clients; ++c) {
      auto first = s.begin() + c * labels_per_client;
      std::vector<std::size_t> chunk(first, first + labels_per_client);
      std::sort(chunk.begin(), chunk.end());
      if (std::adjacent_find(chunk.begin(), chunk.end()) != chunk.end()) {
        return false;
      }
    }
    return true;
  };

  // client_classes[c] lists the classes of the slots dealt to client c.
  std::vector<std::vector<std::size_t>> client_classes(clients);
  bool matched = false;
  std::vector<std::size_t> trial = slots;
  for (int attempt = 0; attempt < kShardMatchAttempts && !matched; ++attempt) {
    std::shuffle(trial.begin(), trial.end(), rng);
    matched = distinct_chunks(trial);
  }
  if (matched) {
    for (std::size_t c = 0; c < clients; ++c) {
      client_classes[c].assign(trial.begin() + c * labels_per_client,
                               trial.begin() + (c + 1) * labels_per_client);
    }
  } else {
    // Dealing class-grouped slots round-robin always works: a class run is at
    // most `shards` <= clients long, so it lands on distinct clients.
    std::vector<std::size_t> client_perm(clients);
    std::iota(client_perm.begin(), client_perm.end(), std::size_t{0});
    std::shuffle(client_perm.begin(), client_perm.end(), rng);
    for (std::size_t s = 0; s < slots.size(); ++s) {
      client_classes[client_perm[s % clients]].push_back(slots[s]);
    }
  }

  std::vector<std::size_t> assignment(data.size(), 0);
  std::vector<std::size_t> next_shard(l, 0);
  std::vector<std::vector<std::size_t>> holders(l);
  for (std::size_t c = 0; c < clients; ++c) {
    for (const std::size_t k : client_classes[c]) {
      for (const std::size_t i : class_shards[k][next_shard[k]]) {
        assignment[i] = c;
      }
      ++next_shard[k];
      holders[k].push_back(c);
    }
  }
  for (std::size_t k = 0; k < l; ++k) {
    for (std::size_t s = next_shard[k]; s < shards; ++s) {
      std::uniform_int_distribution<std::size_t> pick(0, holders[k].size() - 1);
      const std::size_t c = holders[k][pick(rng)];
      for (const std::size_t i : class_shards[k][s]) assignment[i] = c;
    }
  }
  return make_assignment(clients, static_cast<int>(l), std::move(assignment),
                         data.labels);
}

PartitionAssignment dirichlet_partition(const LabeledDataset& data,
                                        std::size_t clients,
                                        double concentration,
                                        std::uint64_t seed) {
  data.validate();
  if (!(concentration > 0.0) || !std::isfinite(concentration)) {
    throw ValidationError("Dirichlet concentration must be > 0");
  }
  if (clients == 0) throw ValidationError("clients must be >= 1");
  if (data.size() < clients) {
    throw ValidationError("fewer samples than clients");
  }
  Rng rng(seed);
  std::gamma_distribution<double> gamma(concentration, 1.0);
  const auto l = static_cast<std::size_t>(data.num_classes);

  std::vector<std::vector<std::size_t>> by_class(l);
  for (std::size_t i = 0; i < data.size(); ++i) {
    by_class[static_cast<std::size_t>(data.labels[i])].push_back(i);
  }
  std::vector<std::size_t> assignment(data.size(), 0);
  std::vector<double> weights(clients);
  for (std::size_t k = 0; k < l; ++k) {
    double total = 0.0;
    for (auto& w : weights) {
      w = gamma(rng);
      total += w;
    }
    if (!(total > 0.0)) {
      // Every draw underflowed; the limit of such a draw is a point mass.
      std::fill(weights.begin(), weights.end(), 0.0);
      std::uniform_int_distribution<std::size_t> pick(0, clients - 1);
      weights[pick(rng)] = 1.0;
    }
    std::discrete_distribution<std::size_t> draw(weights.begin(),
                                                 weights.end());
    for (const std::size_t i : by_class[k]) assignment[i] = draw(rng);
  }

  std::vector<std::vector<std::size_t>> members(clients);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    members[assignment[i]].push_back(i);
  }
  for (std::size_t c = 0; c < clients; ++c) {
    if (!members[c].empty()) continue;
    std::size_t largest = 0;
    for (std::size_t j = 1; j < clients; ++j) {
      if (members[j].size() > members[largest].size()) largest = j;
    }
    auto& donor = members[largest];
    std::uniform_int_distribution<std::size_t> pick(0, donor.size() - 1);
    const std::size_t at = pick(rng);
    const std::size_t moved = donor[at];
    donor.erase(donor.begin() + static_cast<std::ptrdiff_t>(at));
    members[c].push_back(moved);
    assignment[moved] = c;
  }
  return make_assignment(clients, data.num_classes, std::move(assignment),
                         data.labels);
}

double js_divergence(const PartitionAssignment& partition) {
  const auto dists = label_distributions(partition);
  const std::size_t n = dists.size();
  const std::size_t l = n ? dists.front().size() : 0;
  if (n <= 1 || l <= 1) return 0.0;

  std::vector<double> mean(l, 0.0);
  double mean_entropy = 0.0;
  for (const auto& p : dists) {
    for (std::size_t k = 0; k < l; ++k) mean[k] += p[k] / n;
    mean_entropy += entropy(p, log2_of) / n;
  }
  const double jsd = entropy(mean, log2_of) - mean_entropy;
  const double normalizer = std::log2(static_cast<double>(std::min(n, l)));
  return std::clamp(jsd / normalizer, 0.0, 1.0);
}

double js_divergence_to_pooled(const PartitionAssignment& partition) {
  const auto dists = label_distributions(partition);
  if (dists.empty()) return 0.0;
  const std::size_t l = dists.front().size();
  std::vector<double> pooled(l, 0.0);
  double total = 0.0;
  for (const auto& h : partition.histograms) {
    for (std::size_t k = 0; k < l; ++k) {
      pooled[k] += static_cast<double>(h[k]);
      total += static_cast<double>(h[k]);
    }
  }
  for (auto& x : pooled) x /= total;
  const double pooled_entropy = entropy(pooled, ln_of);

  double sum = 0.0;
  std::vector<double> mid(l);
  for (const auto& p : dists) {
    for (std::size_t k = 0; k < l; ++k) mid[k] = 0.5 * (p[k] + pooled[k]);
    sum += std::max(0.0, entropy(mid, ln_of) -
                             0.5 * (entropy(p, ln_of) + pooled_entropy));
  }
  return sum / static_cast<double>(dists.size());
}

void write_partition_csv(std::ostream& out,
                         const PartitionAssignment& partition) {
  out << "sample_index,client_index\n";
  for (std::size_t i = 0; i < partition.assignment.size(); ++i) {
    out << i << ',' << partition.assignment[i] << '\n';
  }
}

}  // namespace ebfl
