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

#include "layoutret/verify.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "layoutret/error.hpp"

namespace layoutret::verify {
namespace {

std::string Format(const char* fmt, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

void Check(SuiteResult& r, bool ok, const std::string& line) {
  r.passed = r.passed && ok;
  r.lines.push_back((ok ? "ok    " : "FAIL  ") + line);
}

bool SameBits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t Find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void Union(std::size_t a, std::size_t b) {
    a = Find(a);
    b = Find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

double Uniform(Rng& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

std::size_t UniformIndex(Rng& rng, std::size_t n) {
  return n == 0 ? 0 : static_cast<std::size_t>(rng() % n);
}

double Gaussian(Rng& rng) {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - Uniform(rng, 0, 1);
  const double u2 = Uniform(rng, 0, 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Matrix RandomMatrix(Rng& rng, std::size_t rows, std::size_t cols, double lo,
                    double hi) {
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (double& v : m.row(r)) v = Uniform(rng, lo, hi);
  }
  return m;
}

MultiVector RandomMultiVector(Rng& rng, std::size_t rows, std::size_t dim) {
  std::vector<float> values(rows * dim);
  for (float& v : values) v = static_cast<float>(Uniform(rng, -1, 1));
  return MultiVector(rows, dim, std::move(values));
}

std::vector<Region> RandomRegions(Rng& rng, std::size_t max_regions,
                                  const BBox& page) {
  const std::size_t target = UniformIndex(rng, max_regions + 1);
  const bool two_columns = Uniform(rng, 0, 1) < 0.4;
  const double margin = 0.06 * page.width();
  const double mid = page.x1 + page.width() / 2;
  struct Column {
    double x1, x2, cursor;
  };
  std::vector<Column> columns;
  if (two_columns) {
    columns.push_back({page.x1 + margin, mid - 20, page.y1 + margin});
    columns.push_back({mid + 20, page.x2 - margin, page.y1 + margin});
  } else {
    columns.push_back({page.x1 + margin, page.x2 - margin, page.y1 + margin});
  }

  std::vector<Region> out;
  const auto clamp_box = [&](BBox b) {
    b.x1 = std::clamp(b.x1, page.x1, page.x2);
    b.x2 = std::clamp(b.x2, page.x1, page.x2);
    b.y1 = std::clamp(b.y1, page.y1, page.y2);
    b.y2 = std::clamp(b.y2, page.y1, page.y2);
    return b;
  };
  const auto emit = [&](BBox b, LayoutTag tag) {
    b = clamp_box(b);
    if (b.valid() && out.size() < target) out.push_back({0, b, tag, {}});
  };
  const auto place = [&](Column& col, double height, double gap,
                         double jitter) {
    const double y1 = col.cursor + gap;
    BBox b{col.x1 + Uniform(rng, -jitter, jitter),
           y1, col.x2 + Uniform(rng, -jitter, jitter), y1 + height};
    col.cursor = b.y2;
    return b;
  };

  std::size_t guard = 0;
  while (out.size() < target && guard++ < 4 * max_regions + 8) {
    Column& col = columns[UniformIndex(rng, columns.size())];
    if (col.cursor > page.y2 - margin) {
      col.cursor = page.y1 + margin + Uniform(rng, 0, 200);
    }
    const double kind = Uniform(rng, 0, 1);
    if (kind < 0.45) {
      static constexpr LayoutTag kText[] = {
          LayoutTag::kPlainText, LayoutTag::kPlainText, LayoutTag::kPlainText,
          LayoutTag::kIsolateFormula, LayoutTag::kFormulaCaption,
          LayoutTag::kTitle};
      emit(place(col, Uniform(rng, 15, 120), Uniform(rng, -10, 70), 60),
           kText[UniformIndex(rng, std::size(kText))]);
    } else if (kind < 0.6) {
      emit(place(col, Uniform(rng, 80, 300), Uniform(rng, 0, 80), 40),
           LayoutTag::kFigure);
      emit(place(col, Uniform(rng, 15, 40), Uniform(rng, -6, 50), 80),
           LayoutTag::kFigureCaption);
    } else if (kind < 0.75) {
      const bool caption_first = Uniform(rng, 0, 1) < 0.5;
      if (caption_first) {
        emit(place(col, Uniform(rng, 15, 40), Uniform(rng, 0, 60), 80),
             LayoutTag::kTableCaption);
      }
      emit(place(col, Uniform(rng, 80, 300), Uniform(rng, -6, 50), 40),
           LayoutTag::kTable);
      if (!caption_first) {
        emit(place(col, Uniform(rng, 10, 30), Uniform(rng, -6, 50), 80),
             LayoutTag::kTableFootnote);
      }
    } else if (kind < 0.82) {
      const double y = Uniform(rng, page.y1, page.y1 + 40);
      emit({page.x1 + Uniform(rng, 0, page.width() / 2), y,
            page.x2 - Uniform(rng, 0, page.width() / 2), y + 20},
           LayoutTag::kAbandon);
    } else if (!out.empty()) {
      // Near-duplicate of an earlier detection, possibly with another tag.
      const BBox& src = out[UniformIndex(rng, out.size())].bbox;
      const double j = Uniform(rng, 0, 6);
      emit({src.x1 + Uniform(rng, -j, j), src.y1 + Uniform(rng, -j, j),
            src.x2 + Uniform(rng, -j, j), src.y2 + Uniform(rng, -j, j)},
           kDetectorTags[UniformIndex(rng, kDetectorTags.size())]);
    }
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const Region& a, const Region& b) {
                     if (a.bbox.y1 != b.bbox.y1) return a.bbox.y1 < b.bbox.y1;
                     return a.bbox.x1 < b.bbox.x1;
                   });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
  return out;
}

std::vector<std::vector<int>> UnionFindComponents(
    const std::vector<Region>& regions, const AggregationConfig& cfg) {
  DisjointSets sets(regions.size());
  for (std::size_t i = 0; i < regions.size(); ++i) {
    for (std::size_t j = 0; j < regions.size(); ++j) {
      if (i != j && MergePredicate(regions[i], regions[j], cfg)) sets.Union(i, j);
    }
  }
  std::map<std::size_t, std::vector<int>> by_root;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    by_root[sets.Find(i)].push_back(regions[i].id);
  }
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : by_root) {
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

double BruteForceMaxSim(const MultiVector& query, const MultiVector& block) {
  const std::size_t d = query.dim();
  const auto qv = query.values();
  const auto bv = block.values();
  double score = 0.0;
  for (std::size_t i = 0; i < query.rows(); ++i) {
    double best = 0.0;
    for (std::size_t j = 0; j < block.rows(); ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        dot = dot + double{qv[i * d + c]} * double{bv[j * d + c]};
      }
      if (j == 0 || dot > best) best = dot;
    }
    score = score + best;
  }
  return score;
}

Matrix StraightLineAttention(const Matrix& q, const Matrix& k,
                             const Matrix& v) {
  const long double inv_sqrt_d =
      1.0L / std::sqrt(static_cast<long double>(q.cols()));
  Matrix out(q.rows(), v.cols());
  for (std::size_t i = 0; i < q.rows(); ++i) {
    std::vector<long double> w(k.rows());
    long double z = 0;
    for (std::size_t j = 0; j < k.rows(); ++j) {
      long double dot = 0;
      for (std::size_t c = 0; c < q.cols(); ++c) dot += q(i, c) * k(j, c);
      w[j] = std::exp(dot * inv_sqrt_d);
      z += w[j];
    }
    for (std::size_t c = 0; c < v.cols(); ++c) {
      long double acc = 0;
      for (std::size_t j = 0; j < k.rows(); ++j) acc += w[j] / z * v(j, c);
      out(i, c) = static_cast<double>(acc);
    }
  }
  return out;
}

std::vector<QueryScores> FiniteDifferenceGradient(const LossBatch& batch,
                                                  double h) {
  std::vector<QueryScores> grad = batch.queries;
  LossBatch probe = batch;
  const auto diff = [&](double& slot) {
    const double saved = slot;
    slot = saved + h;
    const double up = ContrastiveLoss(probe);
    slot = saved - h;
    const double down = ContrastiveLoss(probe);
    slot = saved;
    return (up - down) / (2 * h);
  };
  for (std::size_t k = 0; k < probe.queries.size(); ++k) {
    for (std::size_t i = 0; i < probe.queries[k].positives.size(); ++i) {
      grad[k].positives[i] = diff(probe.queries[k].positives[i]);
    }
    for (std::size_t i = 0; i < probe.queries[k].negatives.size(); ++i) {
      grad[k].negatives[i] = diff(probe.queries[k].negatives[i]);
    }
  }
  return grad;
}

double RelativeError(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// ---- suites --------------------------------------------------------------------

SuiteResult RunAggregateSuite(std::uint64_t seed, std::size_t pages) {
  SuiteResult r;
  r.name = "aggregate";
  Rng rng(seed);
  const AggregationConfig cfg;
  const BBox page{0, 0, 1000, 1400};
  std::size_t enclosure_failures = 0;
  std::size_t total_regions = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t p = 0; p < pages; ++p) {
    const auto regions = RandomRegions(rng, 30, page);
    total_regions += regions.size();
    const auto blocks = AggregateBlocks(regions, page, cfg);
    const auto expected = UnionFindComponents(regions, cfg);
    ++r.cases;

    std::vector<std::vector<int>> got;
    for (const Block& b : blocks) {
      if (b.auxiliary()) continue;
      got.push_back(b.member_region_ids);
      BBox hull = regions[0].bbox;
      bool first = true;
      for (int id : b.member_region_ids) {
        const BBox& rb = regions[static_cast<std::size_t>(id)].bbox;
        hull = first ? rb : hull.united(rb);
        first = false;
      }
      if (hull != b.bbox) ++enclosure_failures;
    }
    const Block& aux = blocks.back();
    const bool aux_ok = aux.auxiliary() && aux.bbox == page &&
                        aux.mask_of->size() == got.size() &&
                        blocks.size() == got.size() + 1;
    if (got != expected || !aux_ok) ++r.mismatches;
  }
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  Check(r, r.mismatches == 0,
        Format("components vs union-find oracle: %.0f mismatches over %.0f "
               "pages (%.0f regions)",
               static_cast<double>(r.mismatches), static_cast<double>(pages),
               static_cast<double>(total_regions)));
  Check(r, enclosure_failures == 0,
        Format("block bbox equals member hull: %.0f failures",
               static_cast<double>(enclosure_failures)));
  Check(r, seconds < 5.0, Format("elapsed %.3f s (limit 5 s)", seconds));
  r.max_error = static_cast<double>(r.mismatches);
  return r;
}

SuiteResult RunMaxSimSuite(std::uint64_t seed) {
  SuiteResult r;
  r.name = "maxsim";
  Rng rng(seed);
  const auto start = std::chrono::steady_clock::now();

  std::size_t pair_mismatch = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t dim = 1 + UniformIndex(rng, 128);
    const auto q = RandomMultiVector(rng, 1 + UniformIndex(rng, 32), dim);
    const auto b = RandomMultiVector(rng, 1 + UniformIndex(rng, 32), dim);
    if (!SameBits(MaxSim(q, b), BruteForceMaxSim(q, b))) ++pair_mismatch;
    ++r.cases;
  }
  Check(r, pair_mismatch == 0,
        Format("1000 random pairs bitwise equal to triple loop: %.0f "
               "mismatches",
               static_cast<double>(pair_mismatch)));

  constexpr std::size_t kDim = 64;
  BlockIndex index(kDim);
  std::vector<MultiVector> blocks;
  std::vector<std::string> page_of;
  for (std::size_t i = 0; i < 1000; ++i) {
    IndexEntry e;
    char id[32];
    std::snprintf(id, sizeof(id), "blk%04zu", (i * 7919) % 1000);
    e.block_id = id;
    e.page_id = "page" + std::to_string(UniformIndex(rng, 120));
    e.vectors = RandomMultiVector(rng, 1 + UniformIndex(rng, 16), kDim);
    blocks.push_back(e.vectors);
    page_of.push_back(e.page_id);
    index.Add(std::move(e));
  }
  index.Seal();

  std::size_t topk_mismatch = 0;
  std::size_t page_mismatch = 0;
  std::size_t serial_mismatch = 0;
  for (int qi = 0; qi < 10; ++qi) {
    const auto q = RandomMultiVector(rng, 1 + UniformIndex(rng, 24), kDim);
    std::vector<std::pair<double, std::string>> oracle;
    std::map<std::string, double> page_max;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const double s = BruteForceMaxSim(q, blocks[i]);
      oracle.emplace_back(s, std::string(index.entries()[i].block_id));
      auto [it, fresh] = page_max.try_emplace(page_of[i], s);
      if (!fresh) it->second = std::max(it->second, s);
    }
    std::sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (std::size_t k : {std::size_t{10}, std::size_t{1000}}) {
      const auto hits = index.SearchTopK(q, k);
      if (hits.size() != k) {
        ++topk_mismatch;
        continue;
      }
      for (std::size_t i = 0; i < k; ++i) {
        if (hits[i].block_id != oracle[i].second ||
            !SameBits(hits[i].score, oracle[i].first))
          ++topk_mismatch;
      }
    }
    const auto pages = index.PageScores(q);
    if (pages.size() != page_max.size()) ++page_mismatch;
    for (const auto& [page, s] : page_max) {
      auto it = pages.find(page);
      if (it == pages.end() || !SameBits(it->second, s)) ++page_mismatch;
    }
    const auto par = index.ScoreAll(q);
    const auto ser = index.ScoreAllSerial(q);
    for (std::size_t i = 0; i < par.size(); ++i) {
      if (!SameBits(par[i], ser[i])) ++serial_mismatch;
    }
    ++r.cases;
  }
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  Check(r, topk_mismatch == 0,
        Format("top-k over 1000 blocks vs exhaustive sort: %.0f mismatches",
               static_cast<double>(topk_mismatch)));
  Check(r, page_mismatch == 0,
        Format("page score equals max of block scores: %.0f mismatches",
               static_cast<double>(page_mismatch)));
  Check(r, serial_mismatch == 0,
        Format("parallel scoring equals serial reference: %.0f mismatches",
               static_cast<double>(serial_mismatch)));
  Check(r, seconds < 10.0, Format("elapsed %.3f s (limit 10 s)", seconds));
  r.mismatches = pair_mismatch + topk_mismatch + page_mismatch + serial_mismatch;
  r.max_error = static_cast<double>(r.mismatches);
  return r;
}

namespace {

LossBatch RandomLossBatch(Rng& rng, double tau, double lo, double hi) {
  LossBatch batch;
  batch.tau = tau;
  const std::size_t b = 1 + UniformIndex(rng, 6);
  for (std::size_t k = 0; k < b; ++k) {
    QueryScores q;
    const std::size_t pos = 1 + UniformIndex(rng, 4);
    const std::size_t neg = UniformIndex(rng, 13);
    for (std::size_t i = 0; i < pos; ++i) q.positives.push_back(Uniform(rng, lo, hi));
    for (std::size_t i = 0; i < neg; ++i) q.negatives.push_back(Uniform(rng, lo, hi));
    batch.queries.push_back(std::move(q));
  }
  return batch;
}

}  // namespace

SuiteResult RunLossSuite(std::uint64_t seed, std::size_t batches) {
  SuiteResult r;
  r.name = "loss";
  Rng rng(seed);
  constexpr double kStep = 1e-5;
  constexpr double kPerturb = 1e-3;
  double max_grad_err = 0;
  double max_shift_err = 0;
  double max_grad_sum = 0;
  std::size_t sign_failures = 0;
  std::size_t monotone_failures = 0;
  std::size_t nonfinite = 0;

  for (std::size_t n = 0; n < batches; ++n) {
    const double tau = n % 2 == 0 ? kDefaultTemperature : Uniform(rng, 0.05, 1.0);
    LossBatch batch = RandomLossBatch(rng, tau, -1, 1);
    ++r.cases;
    const double loss = ContrastiveLoss(batch);
    const auto grad = ContrastiveLossGradient(batch);
    const auto fd = FiniteDifferenceGradient(batch, kStep);
    if (!std::isfinite(loss) || loss < 0) ++nonfinite;

    for (std::size_t k = 0; k < batch.queries.size(); ++k) {
      double sum = 0;
      const auto& g = grad[k];
      for (std::size_t i = 0; i < g.positives.size(); ++i) {
        max_grad_err = std::max(max_grad_err,
                                RelativeError(g.positives[i], fd[k].positives[i]));
        if (g.positives[i] > 0) ++sign_failures;
        sum += g.positives[i];
      }
      for (std::size_t i = 0; i < g.negatives.size(); ++i) {
        max_grad_err = std::max(max_grad_err,
                                RelativeError(g.negatives[i], fd[k].negatives[i]));
        if (g.negatives[i] < 0) ++sign_failures;
        sum += g.negatives[i];
      }
      max_grad_sum = std::max(max_grad_sum, std::abs(sum) * tau);

      // Monotonicity: raising a positive never raises the loss, raising a
      // negative never lowers it, and the change is strict whenever it is
      // larger than the loss's rounding resolution.
      const double resolution = 1e-12 * std::max(1.0, loss);
      LossBatch probe = batch;
      const auto check = [&](double& slot, double slope, bool positive) {
        const double saved = slot;
        slot = saved + kPerturb;
        const double up = ContrastiveLoss(probe);
        slot = saved - kPerturb;
        const double down = ContrastiveLoss(probe);
        slot = saved;
        const bool strict = std::abs(slope) * kPerturb > resolution;
        bool ok = positive ? (up <= loss && loss <= down)
                           : (up >= loss && loss >= down);
        if (strict) ok = ok && (positive ? up < down : up > down);
        if (!ok) ++monotone_failures;
      };
      for (std::size_t i = 0; i < probe.queries[k].positives.size(); ++i) {
        check(probe.queries[k].positives[i], g.positives[i], true);
      }
      for (std::size_t i = 0; i < probe.queries[k].negatives.size(); ++i) {
        check(probe.queries[k].negatives[i], g.negatives[i], false);
      }

      LossBatch shifted = batch;
      const double c = Uniform(rng, -5, 5);
      for (double& s : shifted.queries[k].positives) s += c;
      for (double& s : shifted.queries[k].negatives) s += c;
      max_shift_err = std::max(
          max_shift_err, std::abs(ContrastiveLoss(shifted) - loss) /
                             std::max(1.0, loss));
    }

    // Wide-range stress: |s / tau| up to 1e4.
    const LossBatch wide = RandomLossBatch(rng, kDefaultTemperature, -200, 200);
    const double wide_loss = ContrastiveLoss(wide);
    if (!std::isfinite(wide_loss) || wide_loss < 0) ++nonfinite;
    for (const auto& g : ContrastiveLossGradient(wide)) {
      for (double v : g.positives) nonfinite += std::isfinite(v) ? 0 : 1;
      for (double v : g.negatives) nonfinite += std::isfinite(v) ? 0 : 1;
    }
  }

  Check(r, max_grad_err < 1e-5,
        Format("analytic vs central differences (h=1e-5): max relative error "
               "%.3e (limit 1e-5)",
               max_grad_err));
  Check(r, sign_failures == 0 && max_grad_sum < 1e-12,
        Format("gradient signs: %.0f failures, max |per-query sum| %.3e",
               static_cast<double>(sign_failures), max_grad_sum));
  Check(r, monotone_failures == 0,
        Format("monotone in positive/negative scores: %.0f failures",
               static_cast<double>(monotone_failures)));
  Check(r, max_shift_err < 1e-9,
        Format("shift invariance: max change %.3e (limit 1e-9)", max_shift_err));
  Check(r, nonfinite == 0,
        Format("finite for scores in [-200, 200] at tau=0.02: %.0f failures",
               static_cast<double>(nonfinite)));
  r.max_error = max_grad_err;
  r.mismatches = sign_failures + monotone_failures + nonfinite;
  return r;
}

SuiteResult RunFusionSuite(std::uint64_t seed) {
  SuiteResult r;
  r.name = "fusion";
  Rng rng(seed);
  double max_row_sum_err = 0;
  double max_oracle_err = 0;
  double max_hull_violation = 0;
  double max_linearity_err = 0;
  std::size_t negative_weights = 0;
  std::size_t single_key_failures = 0;

  for (int n = 0; n < 200; ++n) {
    ++r.cases;
    const std::size_t rows = 1 + UniformIndex(rng, 8);
    const std::size_t keys = 1 + UniformIndex(rng, 8);
    const std::size_t d = 1 + UniformIndex(rng, 16);
    const std::size_t dv = 1 + UniformIndex(rng, 16);
    const Matrix q = RandomMatrix(rng, rows, d);
    const Matrix k = RandomMatrix(rng, keys, d);
    const Matrix v = RandomMatrix(rng, keys, dv);

    const Matrix w = AttentionWeights(q, k);
    const Matrix out = Attention(q, k, v);
    const Matrix ref = StraightLineAttention(q, k, v);
    for (std::size_t i = 0; i < rows; ++i) {
      double sum = 0;
      for (double x : w.row(i)) {
        sum += x;
        if (x < 0) ++negative_weights;
      }
      max_row_sum_err = std::max(max_row_sum_err, std::abs(sum - 1.0));
      for (std::size_t c = 0; c < dv; ++c) {
        max_oracle_err = std::max(max_oracle_err, std::abs(out(i, c) - ref(i, c)));
        double lo = v(0, c), hi = v(0, c);
        for (std::size_t j = 1; j < keys; ++j) {
          lo = std::min(lo, v(j, c));
          hi = std::max(hi, v(j, c));
        }
        max_hull_violation = std::max(
            {max_hull_violation, lo - out(i, c), out(i, c) - hi});
      }
    }

    // Single global token: every context row is that token, exactly.
    const Matrix g = RandomMatrix(rng, 1, d);
    const Matrix ctx = Contextualize(q, g);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t c = 0; c < d; ++c) {
        if (!SameBits(ctx(i, c), g(0, c))) ++single_key_failures;
      }
    }

    const Matrix proj = RandomMatrix(rng, 1 + UniformIndex(rng, 12), 2 * d);
    const Matrix x = RandomMatrix(rng, 2, d);
    const Matrix y = RandomMatrix(rng, 2, d);
    const double alpha = Uniform(rng, -3, 3);
    const double beta = Uniform(rng, -3, 3);
    std::vector<double> mix_h(d), mix_c(d);
    for (std::size_t c = 0; c < d; ++c) {
      mix_h[c] = alpha * x(0, c) + beta * y(0, c);
      mix_c[c] = alpha * x(1, c) + beta * y(1, c);
    }
    const auto fx = FuseAndProject(x.row(0), x.row(1), proj);
    const auto fy = FuseAndProject(y.row(0), y.row(1), proj);
    const auto fm = FuseAndProject(mix_h, mix_c, proj);
    for (std::size_t c = 0; c < fm.size(); ++c) {
      max_linearity_err = std::max(
          max_linearity_err, std::abs(fm[c] - (alpha * fx[c] + beta * fy[c])));
    }
  }

  Check(r, max_row_sum_err <= 1e-12 && negative_weights == 0,
        Format("softmax rows sum to 1: max error %.3e (limit 1e-12), %.0f "
               "negative weights",
               max_row_sum_err, static_cast<double>(negative_weights)));
  Check(r, max_oracle_err <= 1e-12,
        Format("attention vs straight-line reference: max error %.3e",
               max_oracle_err));
  Check(r, max_hull_violation <= 1e-12,
        Format("outputs inside the value hull: max violation %.3e",
               max_hull_violation));
  Check(r, max_linearity_err <= 1e-10,
        Format("fuse_and_project linearity: max error %.3e (limit 1e-10)",
               max_linearity_err));
  Check(r, single_key_failures == 0,
        Format("single global token reproduced exactly: %.0f failures",
               static_cast<double>(single_key_failures)));
  r.max_error = std::max({max_row_sum_err, max_oracle_err, max_linearity_err});
  r.mismatches = negative_weights + single_key_failures;
  return r;
}

SuiteResult RunSuite(const std::string& name, std::uint64_t seed) {
  if (name == "aggregate") return RunAggregateSuite(seed);
  if (name == "maxsim") return RunMaxSimSuite(seed);
  if (name == "loss") return RunLossSuite(seed);
  if (name == "fusion") return RunFusionSuite(seed);
  throw ContractError("unknown verification suite '" + name + "'");
}

}  // namespace layoutret::verify
