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

#ifndef EBFL_DATA_PARTITION_HPP_
#define EBFL_DATA_PARTITION_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ebfl/dataset.hpp"

namespace ebfl {

struct PartitionAssignment {
  std::size_t client_count = 0;
  // assignment[sample] = client.
  std::vector<std::size_t> assignment;
  // histograms[client][label].
  std::vector<std::vector<std::size_t>> histograms;

  std::size_t client_size(std::size_t client) const;
  // Sample indices per client, ascending.
  std::vector<std::vector<std::size_t>> members() const;
};

PartitionAssignment make_assignment(std::size_t client_count, int num_classes,
                                    std::vector<std::size_t> assignment,
                                    const std::vector<int>& labels);

// Each class is cut into ceil(clients * labels_per_client / total_classes)
// shards and every client receives labels_per_client shards of distinct
// classes. Shards left over after that go to a client already holding the
// same class, so every sample is assigned.
PartitionAssignment shard_partition(const LabeledDataset& data,
                                    std::size_t clients,
                                    std::size_t labels_per_client,
                                    std::size_t total_classes,
                                    std::uint64_t seed);

std::size_t shards_per_class(std::size_t clients, std::size_t labels_per_client,
                             std::size_t total_classes);

// Per class, client proportions ~ Dirichlet(concentration * 1) and samples are
// drawn multinomially from them. Empty clients then take one sample from the
// currently largest client.
PartitionAssignment dirichlet_partition(const LabeledDataset& data,
                                        std::size_t clients,
                                        double concentration,
                                        std::uint64_t seed);

// Generalized Jensen-Shannon divergence (uniform client weights, log base 2)
// of the per-client label distributions, divided by log2(min(n, l)).
double js_divergence(const PartitionAssignment& partition);

// Mean over clients of JSD(client || pooled label distribution), natural log.
double js_divergence_to_pooled(const PartitionAssignment& partition);

// CSV `sample_index,client_index`.
void write_partition_csv(std::ostream& out,
                         const PartitionAssignment& partition);

}  // namespace ebfl

#endif  // EBFL_DATA_PARTITION_HPP_
