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

#ifndef LAYOUTRET_TESTS_METRIC_ORACLES_HPP_
#define LAYOUTRET_TESTS_METRIC_ORACLES_HPP_

// Straightforward reference implementations of the ranking and text metrics,
// written independently of src/metrics.cpp.

#include <algorithm>
#include <cmath>
#include <iterator>
#include <set>
#include <string>
#include <vector>

#include "layoutret/verify.hpp"

namespace layoutret::oracle {

using Tokens = std::vector<std::string>;

// Full (n+1)x(m+1) table.
inline std::size_t OracleLcs(const Tokens& a, const Tokens& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1,
                                          std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1
                                     : std::max(t[i - 1][j], t[i][j - 1]);
    }
  }
  return t[a.size()][b.size()];
}

inline double OracleNdcg(const Tokens& ranked, const std::set<std::string>& gold,
                         std::size_t k) {
  double dcg = 0, ideal = 0;
  for (std::size_t r = 1; r <= std::min(k, ranked.size()); ++r) {
    if (gold.count(ranked[r - 1])) dcg += 1.0 / std::log2(r + 1.0);
  }
  for (std::size_t r = 1; r <= std::min(k, gold.size()); ++r) {
    ideal += 1.0 / std::log2(r + 1.0);
  }
  return dcg / ideal;
}

inline double OracleRecall(const Tokens& ranked, const std::set<std::string>& gold,
                           std::size_t k) {
  std::set<std::string> top(ranked.begin(),
                            ranked.begin() + std::min(k, ranked.size()));
  std::vector<std::string> both;
  std::set_intersection(top.begin(), top.end(), gold.begin(), gold.end(),
                        std::back_inserter(both));
  return static_cast<double>(both.size()) / static_cast<double>(gold.size());
}

inline double OracleRouge(const Tokens& c, const Tokens& r) {
  if (c.empty() && r.empty()) return 1.0;
  if (c.empty() || r.empty()) return 0.0;
  const double lcs = static_cast<double>(OracleLcs(c, r));
  if (lcs == 0) return 0.0;
  const double p = lcs / c.size(), q = lcs / r.size();
  return 2 * p * q / (p + q);
}

inline double OracleF1(const Tokens& c, const Tokens& r) {
  if (c.empty() && r.empty()) return 1.0;
  if (c.empty() || r.empty()) return 0.0;
  std::multiset<std::string> mc(c.begin(), c.end()), mr(r.begin(), r.end());
  std::vector<std::string> both;
  std::set_intersection(mc.begin(), mc.end(), mr.begin(), mr.end(),
                        std::back_inserter(both));
  if (both.empty()) return 0.0;
  const double p = static_cast<double>(both.size()) / c.size();
  const double q = static_cast<double>(both.size()) / r.size();
  return 2 * p * q / (p + q);
}

inline std::string Join(const Tokens& t) {
  std::string s;
  for (const auto& w : t) s += (s.empty() ? "" : " ") + w;
  return s;
}

inline Tokens RandomWords(verify::Rng& rng, std::size_t max_len, std::size_t vocab) {
  Tokens t(verify::UniformIndex(rng, max_len + 1));
  for (auto& w : t) w = "w" + std::to_string(verify::UniformIndex(rng, vocab));
  return t;
}

}  // namespace layoutret::oracle

#endif  // LAYOUTRET_TESTS_METRIC_ORACLES_HPP_
