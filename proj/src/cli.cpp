#include "audit/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "audit/config.hpp"
#include "audit/estimator.hpp"
#include "audit/frame.hpp"
#include "audit/github_client.hpp"
#include "audit/ingest.hpp"
#include "audit/pair_record.hpp"
#include "audit/report.hpp"
#include "audit/sensitivity.hpp"
#include "audit/text.hpp"

namespace audit::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;
constexpr int kExitEstimation = 4;

struct LoadedRun {
  config::AuditConfig config;
  config::LoadedParams loaded_params;
  std::shared_ptr<frame::NameFrame> frame;
  std::vector<estimator::DatasetStats> stats;  // canonical dataset order
  nlohmann::json frame_json;
};

LoadedRun load_run(const std::filesystem::path& config_path) {
  LoadedRun run;
  run.config = config::load_config(config_path);
  run.loaded_params = config::load_params(run.config.params_path);

  std::filesystem::path frame_path;
  if (run.config.frame_path) {
    frame_path = *run.config.frame_path;
  } else if (run.loaded_params.frame_path) {
    frame_path = *run.loaded_params.frame_path;
  } else {
    throw ConfigError("no frame file: set 'frame' in the config or parameter file");
  }
  run.frame = std::make_shared<frame::NameFrame>(frame::load_frame(frame_path));
  run.frame_json = frame::frame_to_json(*run.frame);
  run.loaded_params.params.frame = run.frame;
  run.loaded_params.params.validate();

  if (run.config.pair_files.empty()) {
    throw ConfigError("config lists no datasets to estimate");
  }
  for (DatasetId id : kAllDatasets) {
    const auto it = run.config.pair_files.find(id);
    if (it == run.config.pair_files.end()) continue;
    const auto weight_it = run.loaded_params.weights.find(id);
    const double weight =
        weight_it == run.loaded_params.weights.end() ? 1.0 : weight_it->second;
    auto stats = ingest::count_pairs_file(it->second, *run.frame, weight);
    if (stats.total_pairs == 0) {
      stats.dataset = id;  // an empty file carries no dataset tag of its own
    } else if (stats.dataset != id) {
      throw EstimationError("pair file " + it->second.string() +
                            " holds dataset '" +
                            std::string(to_string(stats.dataset)) +
                            "' but is configured as '" +
                            std::string(to_string(id)) + "'");
    }
    run.stats.push_back(std::move(stats));
  }
  return run;
}

report::AuditReport build_report(const LoadedRun& run) {
  report::AuditReport rep;
  rep.meta.generated_at = config::iso_timestamp_utc();
  rep.meta.config_digest = config::digest_hex(
      {&run.config.raw, &run.loaded_params.raw, &run.frame_json});
  rep.meta.frame_label = run.frame->label;
  rep.meta.normalization = std::string(text::normalization_rules());
  rep.meta.unsafe_debug = run.config.unsafe_debug;
  rep.params.base_rate_range = run.loaded_params.params.base_rate_range;
  rep.params.us_fraction = run.loaded_params.params.us_fraction;
  rep.params.weights = run.loaded_params.weights;
  rep.params.notes = run.loaded_params.notes;

  for (const auto& stats : run.stats) {
    rep.estimates.push_back(
        estimator::estimate_dataset(stats, run.loaded_params.params));
  }
  rep.total = estimator::total(rep.estimates);
  if (!run.loaded_params.weights.empty()) {
    rep.weighted_total =
        estimator::weighted_total(rep.estimates, run.loaded_params.weights);
  }
  for (const auto& [id, pairs_path] : run.config.pair_files) {
    const auto summary_path = pairs_path.string() + ".summary.json";
    std::ifstream in(summary_path);
    if (!in) continue;
    const auto doc = nlohmann::json::parse(in, nullptr, false);
    if (!doc.is_discarded()) rep.ingest_summaries.push_back(doc);
  }
  if (run.config.unsafe_debug) {
    rep.debug_frame_surnames.assign(run.frame->surnames.begin(),
                                    run.frame->surnames.end());
  }
  return rep;
}

void write_report_outputs(const report::AuditReport& rep,
                          const config::AuditConfig& cfg) {
  std::cout << report::render_table(rep);
  if (cfg.report_json_out) {
    report::write_text_file(*cfg.report_json_out, report::to_json(rep).dump(2) + "\n");
  }
  if (cfg.report_csv_out) {
    report::write_text_file(*cfg.report_csv_out, report::to_csv(rep));
  }
}

int cmd_estimate(const std::filesystem::path& config_path) {
  const LoadedRun run = load_run(config_path);
  const auto rep = build_report(run);
  write_report_outputs(rep, run.config);
  return kExitOk;
}

int cmd_sensitivity(const std::filesystem::path& config_path,
                    const std::string& parameter, double target,
                    const std::string& output) {
  const LoadedRun run = load_run(config_path);
  const std::string digest = config::digest_hex(
      {&run.config.raw, &run.loaded_params.raw, &run.frame_json});
  if (run.loaded_params.weights.empty()) {
    throw ConfigError("sensitivity requires a 'weights' map in the parameter file");
  }
  std::vector<sensitivity::Parameter> parameters;
  if (parameter == "all") {
    parameters = {sensitivity::Parameter::precision,
                  sensitivity::Parameter::coverage,
                  sensitivity::Parameter::base_rate};
  } else {
    const auto p = sensitivity::parameter_from_string(parameter);
    if (!p) {
      throw ConfigError("unknown parameter '" + parameter +
                        "' (use precision, coverage, base_rate or all)");
    }
    parameters = {*p};
  }
  nlohmann::json results = nlohmann::json::array();
  for (const auto p : parameters) {
    const auto result = sensitivity::break_even(
        run.stats, run.loaded_params.params, run.loaded_params.weights, p, target);
    std::cout << sensitivity::to_string(p) << " break-even: "
              << result.break_even_value * 100.0 << "% (total "
              << result.total_at_break_even << ", weighted total "
              << result.weighted_total_at_break_even << ")\n";
    results.push_back(result.to_json());
  }
  if (!output.empty()) {
    nlohmann::json doc;
    doc["config_digest"] = digest;
    doc["target_rdm"] = target;
    doc["results"] = std::move(results);
    report::write_text_file(output, doc.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_ingest(const std::string& dataset_name,
               const std::vector<std::string>& inputs,
               const std::string& opinions, const std::string& people,
               const std::string& output, std::string summary_path,
               double sample_fraction, std::uint64_t seed, bool seed_set,
               unsigned jobs, double reject_budget,
               const std::string& split_rule) {
  const auto dataset = dataset_from_string(dataset_name);
  if (!dataset) throw ConfigError("unknown dataset '" + dataset_name + "'");
  if (sample_fraction < 1.0 && !seed_set) {
    throw ConfigError("--seed is required when --sample is below 1.0");
  }
  ingest::AdapterOptions options;
  options.sample_fraction = sample_fraction;
  options.seed = seed;
  options.jobs = jobs;
  options.author_split_rule = split_rule;

  std::vector<std::filesystem::path> files(inputs.begin(), inputs.end());
  for (const auto& f : files) {
    if (!std::filesystem::exists(f)) {
      throw ConfigError("input file does not exist: " + f.string());
    }
  }

  PairWriter writer(output);
  const ingest::PairSink sink = [&](PairRecord&& record) { writer.write(record); };

  ingest::IngestSummary summary;
  switch (*dataset) {
    case DatasetId::pubmed_central:
      if (files.empty()) throw ConfigError("--input is required for this dataset");
      summary = ingest::parse_pubmed(files, options, sink);
      break;
    case DatasetId::books3:
      if (files.empty()) throw ConfigError("--input is required for this dataset");
      summary = ingest::parse_books3(files, options, sink);
      break;
    case DatasetId::arxiv:
      if (files.empty()) throw ConfigError("--input is required for this dataset");
      summary = ingest::parse_arxiv(files, options, sink);
      break;
    case DatasetId::github:
      if (files.empty()) throw ConfigError("--input is required for this dataset");
      summary = ingest::parse_github(files, options, sink);
      break;
    case DatasetId::freelaw:
      if (opinions.empty() || people.empty()) {
        throw ConfigError("freelaw needs --opinions and --people");
      }
      summary = ingest::parse_freelaw(opinions, people, options, sink);
      break;
  }

  if (summary_path.empty()) summary_path = output + ".summary.json";
  nlohmann::json summary_doc = summary.to_json();
  if (sample_fraction < 1.0) {
    summary_doc["sample"] = {{"fraction", sample_fraction}, {"seed", seed}};
  }
  report::write_text_file(summary_path, summary_doc.dump(2) + "\n");

  std::cout << to_string(*dataset) << ": " << summary.records_emitted
            << " records from " << summary.documents_seen << " documents ("
            << summary.records_rejected << " rejected, "
            << summary.files_unreadable << " unreadable files)\n";
  ingest::enforce_reject_budget(summary, reject_budget);
  return kExitOk;
}

int cmd_census_coverage(const std::string& census, const std::string& frame_path,
                        double precision, double population,
                        const std::vector<double>& base_rates) {
  const auto frame = frame::load_frame(frame_path);
  const auto rows = estimator::load_census_csv(census);
  for (const double base_rate : base_rates) {
    const double coverage = estimator::census_coverage(
        rows, frame, precision, population, base_rate);
    char line[96];
    std::snprintf(line, sizeof(line), "base_rate=%.2f%% coverage=%.4f%%",
                  base_rate * 100.0, coverage * 100.0);
    std::cout << line << "\n";
  }
  return kExitOk;
}

int cmd_report(const std::string& input, const std::string& format,
               const std::string& output) {
  std::ifstream in(input);
  if (!in) throw ConfigError("report file not readable: " + input);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("report file: ") + e.what());
  }
  const auto rep = report::report_from_json(doc);
  std::string rendered;
  if (format == "table") {
    rendered = report::render_table(rep);
  } else if (format == "json") {
    rendered = report::to_json(rep).dump(2) + "\n";
  } else if (format == "csv") {
    rendered = report::to_csv(rep);
  } else {
    throw ConfigError("unknown format '" + format + "'");
  }
  if (output.empty()) {
    std::cout << rendered;
  } else {
    report::write_text_file(output, rendered);
  }
  return kExitOk;
}

int cmd_github_fetch(const std::string& repos_path, const std::string& output,
                     std::string checkpoint, const std::string& base_url,
                     int max_contributors, double wait_cap,
                     double sample_fraction, std::uint64_t seed, bool seed_set) {
  if (sample_fraction < 1.0 && !seed_set) {
    throw ConfigError("--seed is required when --sample is below 1.0");
  }
  github_client::FetchOptions options;
  options.base_url = base_url;
  options.max_contributors = max_contributors;
  options.wait_cap_seconds = wait_cap;
  options.sample_fraction = sample_fraction;
  options.seed = seed;
  if (const char* token = std::getenv("GITHUB_TOKEN")) options.token = token;
  if (checkpoint.empty()) checkpoint = output + ".checkpoint.json";

  const auto repos = github_client::load_repo_list(repos_path);
  const auto stats = github_client::fetch_profiles(
      repos, output, checkpoint, options,
      [](const std::string& message) { std::cerr << message << "\n"; });
  std::cout << "fetched " << stats.profiles_written << " profiles from "
            << stats.repos_done << "/" << stats.repos_total << " repositories ("
            << stats.repos_failed << " failed, " << stats.requests
            << " requests, " << stats.rate_limit_waits << " rate-limit waits)\n";
  return kExitOk;
}

int cmd_domains_rank(const std::string& input, const std::string& output) {
  const auto ranked = report::domain_rank(report::load_domain_counts(input));
  std::string text = "domain,word_count\n";
  for (const auto& d : ranked) {
    text += d.domain + "," + std::to_string(d.word_count) + "\n";
  }
  if (output.empty()) {
    std::cout << text;
  } else {
    report::write_text_file(output, text);
  }
  return kExitOk;
}

int cmd_domains_overlap(const std::string& a, std::size_t top_a,
                        const std::string& b, std::size_t top_b) {
  const auto ranked_a = report::domain_rank(report::load_domain_counts(a));
  const auto ranked_b = report::domain_rank(report::load_domain_counts(b));
  std::cout << report::top_k_overlap(ranked_a, top_a, ranked_b, top_b) << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"corpus-audit: corpus-authorship audit toolkit"};
  app.require_subcommand(1);

  // ingest
  auto* ingest_cmd = app.add_subcommand(
      "ingest", "Parse corpus metadata into pair-record NDJSON");
  std::string dataset_name, output, summary_path, opinions, people;
  std::string split_rule = "last_token";
  std::vector<std::string> inputs;
  double sample_fraction = 1.0;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  double reject_budget = 0.05;
  ingest_cmd->add_option("--dataset", dataset_name,
                         "pubmed_central|books3|arxiv|github|freelaw")
      ->required();
  ingest_cmd->add_option("--input", inputs, "input metadata file(s)");
  ingest_cmd->add_option("--opinions", opinions, "opinion bulk file (freelaw)");
  ingest_cmd->add_option("--people", people, "people bulk file (freelaw)");
  ingest_cmd->add_option("--output", output, "pair-record NDJSON output")
      ->required();
  ingest_cmd->add_option("--summary", summary_path,
                         "summary JSON output (default <output>.summary.json)");
  ingest_cmd->add_option("--sample", sample_fraction,
                         "document-level sample fraction in (0,1]");
  auto* seed_opt = ingest_cmd->add_option("--seed", seed, "sampling seed");
  ingest_cmd->add_option("--jobs", jobs, "parallel file parsers");
  ingest_cmd->add_option("--reject-budget", reject_budget,
                         "abort when structural rejects exceed this fraction");
  ingest_cmd->add_option("--split-rule", split_rule,
                         "free-text surname rule: last_token|particle_aware");

  // estimate
  auto* estimate_cmd =
      app.add_subcommand("estimate", "Count pair files and compute estimates");
  std::string config_path;
  estimate_cmd->add_option("--config", config_path, "audit config JSON")
      ->required();

  // sensitivity
  auto* sens_cmd = app.add_subcommand(
      "sensitivity", "Break-even analysis on the weighted RDM");
  std::string sens_config, sens_parameter = "all", sens_output;
  double target_rdm = 1.0;
  sens_cmd->add_option("--config", sens_config, "audit config JSON")->required();
  sens_cmd->add_option("--parameter", sens_parameter,
                       "precision|coverage|base_rate|all");
  sens_cmd->add_option("--target-rdm", target_rdm, "target weighted RDM");
  sens_cmd->add_option("--output", sens_output, "write results JSON here");

  // census-coverage
  auto* census_cmd = app.add_subcommand(
      "census-coverage", "Frame coverage from a surname frequency table");
  std::string census_path, census_frame;
  double census_precision = 0.85;
  double census_population = 0.0;
  std::vector<double> census_base_rates;
  census_cmd->add_option("--census", census_path, "census CSV (name,count)")
      ->required();
  census_cmd->add_option("--frame", census_frame, "frame JSON")->required();
  census_cmd->add_option("--precision", census_precision, "frame precision");
  census_cmd->add_option("--population", census_population, "total population")
      ->required();
  census_cmd
      ->add_option("--base-rate", census_base_rates,
                   "population base rate(s), fraction")
      ->required();

  // report
  auto* report_cmd =
      app.add_subcommand("report", "Re-render an exported report");
  std::string report_input, report_format = "table", report_output;
  report_cmd->add_option("--input", report_input, "report JSON")->required();
  report_cmd->add_option("--format", report_format, "table|json|csv");
  report_cmd->add_option("--output", report_output, "output path (default stdout)");

  // github-fetch
  auto* fetch_cmd = app.add_subcommand(
      "github-fetch", "Fetch contributor profile names for a repository list");
  std::string repos_path, fetch_output, fetch_checkpoint;
  std::string base_url = "https://api.github.com";
  int max_contributors = 100;
  double wait_cap = 60.0;
  double fetch_sample = 1.0;
  std::uint64_t fetch_seed = 0;
  fetch_cmd->add_option("--repos", repos_path, "file with one owner/repo per line")
      ->required();
  fetch_cmd->add_option("--output", fetch_output, "profile NDJSON output")
      ->required();
  fetch_cmd->add_option("--checkpoint", fetch_checkpoint,
                        "checkpoint file (default <output>.checkpoint.json)");
  fetch_cmd->add_option("--base-url", base_url, "API base URL");
  fetch_cmd->add_option("--max-contributors", max_contributors,
                        "contributors fetched per repository");
  fetch_cmd->add_option("--wait-cap-seconds", wait_cap,
                        "upper bound on rate-limit waits");
  fetch_cmd->add_option("--sample", fetch_sample, "repository sample fraction");
  auto* fetch_seed_opt = fetch_cmd->add_option("--seed", fetch_seed, "sampling seed");

  // domains
  auto* domains_cmd =
      app.add_subcommand("domains", "Domain ranking and top-k overlap");
  domains_cmd->require_subcommand(1);
  auto* rank_cmd = domains_cmd->add_subcommand("rank", "Rank domains by word count");
  std::string rank_input, rank_output;
  rank_cmd->add_option("--input", rank_input, "CSV of domain,word_count")
      ->required();
  rank_cmd->add_option("--output", rank_output, "output path (default stdout)");
  auto* overlap_cmd =
      domains_cmd->add_subcommand("overlap", "Top-k overlap of two rankings");
  std::string overlap_a, overlap_b;
  std::size_t top_a = 0, top_b = 0;
  overlap_cmd->add_option("--a", overlap_a, "first domain-count CSV")->required();
  overlap_cmd->add_option("--top-a", top_a, "k for the first list")->required();
  overlap_cmd->add_option("--b", overlap_b, "second domain-count CSV")->required();
  overlap_cmd->add_option("--top-b", top_b, "k for the second list")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (ingest_cmd->parsed()) {
      return cmd_ingest(dataset_name, inputs, opinions, people, output,
                        summary_path, sample_fraction, seed,
                        seed_opt->count() > 0, jobs, reject_budget, split_rule);
    }
    if (estimate_cmd->parsed()) return cmd_estimate(config_path);
    if (sens_cmd->parsed()) {
      return cmd_sensitivity(sens_config, sens_parameter, target_rdm, sens_output);
    }
    if (census_cmd->parsed()) {
      return cmd_census_coverage(census_path, census_frame, census_precision,
                                 census_population, census_base_rates);
    }
    if (report_cmd->parsed()) {
      return cmd_report(report_input, report_format, report_output);
    }
    if (fetch_cmd->parsed()) {
      return cmd_github_fetch(repos_path, fetch_output, fetch_checkpoint,
                              base_url, max_contributors, wait_cap, fetch_sample,
                              fetch_seed, fetch_seed_opt->count() > 0);
    }
    if (domains_cmd->parsed()) {
      if (rank_cmd->parsed()) return cmd_domains_rank(rank_input, rank_output);
      return cmd_domains_overlap(overlap_a, top_a, overlap_b, top_b);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IngestError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const BudgetError& e) {
    std::cerr << "reject budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const EstimationError& e) {
    std::cerr << "estimation error: " << e.what() << "\n";
    return kExitEstimation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kExitEstimation;
  }
  return kExitConfig;
}

}  // namespace audit::cli
