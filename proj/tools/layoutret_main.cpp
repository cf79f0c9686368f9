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

// layoutret: aggregate layout regions into blocks, build a late-interaction
// index, search it and evaluate runs.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "layoutret/corpus_io.hpp"
#include "layoutret/error.hpp"
#include "layoutret/pipeline.hpp"
#include "layoutret/verify.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

std::vector<layoutret::LayoutTag> ParsePriority(const std::string& csv) {
  std::vector<layoutret::LayoutTag> out;
  std::stringstream in(csv);
  std::string name;
  while (std::getline(in, name, ',')) {
    out.push_back(layoutret::ParseDetectorTag(name));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace layoutret;

  CLI::App app{"Layout-aware block retrieval: aggregate, index, search, eval"};
  app.set_config("--config", "",
                 "TOML/INI file with option defaults (flags override it)");
  app.fallthrough();
  app.require_subcommand(1);

  RunConfig config;
  std::string priority_csv;
  bool exclude_aux = false;
  app.add_option("--threads", config.threads,
                 "OpenMP threads for scoring and evaluation (0: runtime "
                 "default); never changes outputs");
  app.add_option("--tau-x", config.aggregation.tau_x,
                 "minimum horizontal IoU for a spatial merge")
      ->capture_default_str();
  app.add_option("--tau-y", config.aggregation.tau_y,
                 "maximum vertical gap in pixels for a spatial merge")
      ->capture_default_str();
  app.add_option("--tau-o", config.aggregation.tau_o,
                 "overlap ratio above which regions are force-merged")
      ->capture_default_str();
  app.add_option("--delta", config.aggregation.delta,
                 "tolerated vertical overlap in pixels")
      ->capture_default_str();
  app.add_flag("--exact-tags", config.aggregation.exact_tag_match,
               "merge only identical tags instead of semantic groups");
  app.add_option("--priority", priority_csv,
                 "comma-separated tag priority, highest first");
  app.add_flag("--normalize", config.index.normalize,
                "L2-normalize block and query tokens before MaxSim");
  app.add_flag("--exclude-aux-pages", exclude_aux,
               "leave the masked-page block out of page scores");
  app.add_option("--ks", config.eval.ks, "metric cutoffs")
      ->capture_default_str();
  app.add_option("--gen-k", config.eval.generation_k,
                 "blocks/pages handed to generation (token accounting, "
                 "ANLCS)")
      ->capture_default_str();
  app.add_option("--rouge-beta", config.eval.rouge_beta, "ROUGE-L beta")
      ->capture_default_str();
  app.add_option("--loss-tau", config.loss_tau,
                 "contrastive temperature (echoed into reports)")
      ->capture_default_str();
  app.add_option("--tie-break", config.tie_break, "ranking tie-break")
      ->check(CLI::IsMember({"block_id"}))
      ->capture_default_str();

  auto* aggregate = app.add_subcommand(
      "aggregate", "merge layout regions into semantic blocks");
  std::string layout_in, blocks_out;
  aggregate->add_option("layout", layout_in, "layout JSON (page or array)")
      ->required();
  aggregate->add_option("blocks", blocks_out, "output blocks JSON")->required();

  auto* index = app.add_subcommand("index", "build an LFIX index");
  std::string blocks_in, vectors_in, index_out, token_costs;
  index->add_option("blocks", blocks_in, "blocks JSON")->required();
  index->add_option("vectors", vectors_in, "LFVE file keyed by block id")
      ->required();
  index->add_option("index", index_out, "output LFIX file")->required();
  index->add_option("--token-costs", token_costs,
                    "JSON object mapping block id to token cost");

  auto* search = app.add_subcommand("search", "rank blocks or pages");
  std::string index_in, queries_in, results_out;
  std::size_t k = 0;
  bool page_level = false, both_levels = false;
  std::vector<std::string> query_ids;
  search->add_option("index", index_in, "LFIX file")->required();
  search->add_option("queries", queries_in, "LFVE file keyed by query id")
      ->required();
  search->add_option("-k", k, "results per query (default: 3)");
  search->add_flag("--page-level", page_level, "rank pages (max over blocks)");
  search->add_flag("--both", both_levels, "emit block and page rankings");
  search->add_option("--query", query_ids, "only these query ids");
  search->add_option("-o,--output", results_out,
                     "write results here instead of stdout");

  auto* eval = app.add_subcommand("eval", "score a run against a manifest");
  std::string manifest_in, results_in, report_out;
  eval->add_option("manifest", manifest_in, "benchmark manifest")->required();
  eval->add_option("results", results_in, "search results JSON")->required();
  eval->add_option("report", report_out, "output report JSON")->required();

  auto* verify_cmd = app.add_subcommand(
      "verify", "run a numeric self-verification suite");
  std::string suite;
  std::uint64_t seed = 0;
  verify_cmd->add_option("--suite", suite, "suite to run")
      ->check(CLI::IsMember({"fusion", "loss", "maxsim", "aggregate", "all"}))
      ->required();
  verify_cmd->add_option("--seed", seed, "RNG seed (default: per-suite)");

  auto* stats = app.add_subcommand("stats", "benchmark manifest statistics");
  std::string stats_manifest;
  stats->add_option("manifest", stats_manifest, "benchmark manifest")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (!priority_csv.empty()) {
      config.aggregation.priority = ParsePriority(priority_csv);
    }
    config.index.auxiliary_in_pages = !exclude_aux;
    if (k == 0) k = config.top_k;
    config.top_k = k;
    config.Validate();
    SetThreadCount(config.threads);

    if (*aggregate) {
      CmdAggregate(layout_in, blocks_out, config.aggregation);
    } else if (*index) {
      CmdIndex(blocks_in, vectors_in,
               token_costs.empty()
                   ? std::nullopt
                   : std::optional<std::filesystem::path>(token_costs),
               index_out, config.index);
    } else if (*search) {
      const SearchLevel level = both_levels  ? SearchLevel::kBoth
                                : page_level ? SearchLevel::kPage
                                             : SearchLevel::kBlock;
      const Json out =
          RunSearch(index_in, queries_in, k, level, query_ids, config.index);
      if (results_out.empty()) {
        std::cout << DumpJson(out);
      } else {
        WriteFileBytes(results_out, DumpJson(out));
      }
    } else if (*eval) {
      CmdEval(manifest_in, results_in, report_out, config);
    } else if (*verify_cmd) {
      std::vector<std::string> suites;
      if (suite == "all") {
        suites = {"aggregate", "maxsim", "loss", "fusion"};
      } else {
        suites = {suite};
      }
      bool ok = true;
      for (std::size_t i = 0; i < suites.size(); ++i) {
        const std::uint64_t s = seed ? seed : i + 1;
        const auto result = verify::RunSuite(suites[i], s);
        std::printf("suite %s: %s (cases %zu, max error %.3e)\n",
                    result.name.c_str(), result.passed ? "PASS" : "FAIL",
                    result.cases, result.max_error);
        for (const auto& line : result.lines) std::printf("  %s\n", line.c_str());
        ok = ok && result.passed;
      }
      return ok ? 0 : kExitValidation;
    } else if (*stats) {
      const auto m = LoadManifest(stats_manifest, config.aggregation);
      const auto st = ComputeManifestStats(m);
      Json j = Json::object();
      j["dataset"] = m.dataset;
      j["qa_pairs"] = st.qa_pairs;
      j["pages"] = st.pages;
      j["avg_question_length"] = st.avg_question_length;
      j["avg_answer_length"] = st.avg_answer_length;
      j["avg_blocks_per_page"] = st.avg_blocks_per_page;
      j["avg_relevant_blocks"] = st.avg_relevant_blocks;
      std::cout << DumpJson(j);
    }
  } catch (const IoError& e) {
    std::cerr << "layoutret: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "layoutret: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
