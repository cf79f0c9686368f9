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

#ifndef LAYOUTRET_VERIFY_HPP_
#define LAYOUTRET_VERIFY_HPP_

// Independent reference implementations and the self-verification suites
// behind `layoutret verify`. Nothing in here calls the kernel it checks.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "layoutret/fusion.hpp"
#include "layoutret/geometry.hpp"
#include "layoutret/index.hpp"
#include "layoutret/matrix.hpp"

namespace layoutret::verify {

using Rng = std::mt19937_64;

// Portable draws (no std:: distributions, so fixtures are reproducible
// across standard libraries).
double Uniform(Rng& rng, double lo, double hi);
std::size_t UniformIndex(Rng& rng, std::size_t n);
double Gaussian(Rng& rng);

Matrix RandomMatrix(Rng& rng, std::size_t rows, std::size_t cols,
                    double lo = -1, double hi = 1);
MultiVector RandomMultiVector(Rng& rng, std::size_t rows, std::size_t dim);

// A page of up to max_regions regions in reading order, built from stacked
// fragments, figure/table/caption pairs and near-duplicate boxes so that
// every branch of the merge predicate fires.
std::vector<Region> RandomRegions(Rng& rng, std::size_t max_regions,
                                  const BBox& page);

// Components of the merge graph via union-find over all pairs; member ids
// sorted, components ordered by smallest member.
std::vector<std::vector<int>> UnionFindComponents(
    const std::vector<Region>& regions, const AggregationConfig& cfg);

// Triple-loop MaxSim with explicit index arithmetic.
double BruteForceMaxSim(const MultiVector& query, const MultiVector& block);

// Textbook softmax(QK^T/sqrt(d))V evaluated in long double without max
// subtraction (inputs are kept small by the callers).
Matrix StraightLineAttention(const Matrix& q, const Matrix& k,
                             const Matrix& v);

// Central finite differences of ContrastiveLoss with step h, laid out like
// the batch.
std::vector<QueryScores> FiniteDifferenceGradient(const LossBatch& batch,
                                                  double h);

// |a - b| / max(1, |a|, |b|).
double RelativeError(double a, double b);

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::size_t cases = 0;
  std::size_t mismatches = 0;
  double max_error = 0;
  std::vector<std::string> lines;  // one per check
};

SuiteResult RunAggregateSuite(std::uint64_t seed = 1, std::size_t pages = 500);
SuiteResult RunMaxSimSuite(std::uint64_t seed = 2);
SuiteResult RunLossSuite(std::uint64_t seed = 3, std::size_t batches = 100);
SuiteResult RunFusionSuite(std::uint64_t seed = 4);

// Dispatches on "aggregate", "maxsim", "loss" or "fusion"; throws
// ContractError for anything else.
SuiteResult RunSuite(const std::string& name, std::uint64_t seed);

}  // namespace layoutret::verify

#endif  // LAYOUTRET_VERIFY_HPP_
