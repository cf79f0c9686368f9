// Copyright 2026 The layoutret Authors.
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

#ifndef LAYOUTRET_SYNTHETIC_HPP_
#define LAYOUTRET_SYNTHETIC_HPP_

// Deterministic synthetic benchmark: pages that aggregate into three content
// blocks each (title+text, figure+caption, table+caption), block and query
// multi-vectors planted around the gold blocks, and token costs where every
// block costs a third of its page.

#include <cstddef>
#include <cstdint>
#include <filesystem>

namespace layoutret::synthetic {

struct Options {
  std::uint64_t seed = 7;
  std::size_t pages = 10;
  std::size_t samples_per_page = 2;
  std::size_t dim = 32;
  std::size_t block_tokens = 4;
  std::size_t query_tokens = 6;
  double query_noise = 0.35;
};

// Writes layout.json, manifest.json, token_costs.json, block_vectors.lfve
// and query_vectors.lfve into out_dir (created if needed).
void WriteBenchmark(const std::filesystem::path& out_dir,
                    const Options& options = {});

}  // namespace layoutret::synthetic

#endif  // LAYOUTRET_SYNTHETIC_HPP_
