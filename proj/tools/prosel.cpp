// prosel: command-line front end for spectral subset selection.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "cli_commands.hpp"
#include "prosel/version.hpp"

namespace {

using prosel::ReportFormat;

struct SimulationFlags {
  std::optional<std::string> config_file;
  std::optional<double> info;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> symptoms, aes, noise, incidence;
  std::optional<std::size_t> dimension, n_candidates, terms_per_cluster, noise_pool, duplicate_pairs;
  std::optional<double> similarity, k, x0, beta, alpha;
  bool allow_wide = false;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  std::optional<std::string> out;
  std::string format;
};

void add_simulation_flags(CLI::App* cmd, SimulationFlags& f, const char* info_help) {
  cmd->add_option("--config", f.config_file, "key=value configuration file; flags override its values")
      ->check(CLI::ExistingFile);
  cmd->add_option("--info", f.info, info_help);
  cmd->add_option("--seed", f.seed, "Master seed (default: 0)");
  cmd->add_option("--symptoms", f.symptoms, "Planted symptoms per run, lo-hi (default: 5-40)");
  cmd->add_option("--aes", f.aes, "Terms drawn per planted symptom, lo-hi (default: 1-3)");
  cmd->add_option("--noise", f.noise, "Noise terms per run, lo-hi (default: 10-50)");
  cmd->add_option("--incidence", f.incidence, "Incidence weight per term, lo-hi (default: 1-10)");
  cmd->add_option("--dimension", f.dimension, "Embedding dimension (default: 256)");
  cmd->add_option("--similarity", f.similarity, "Mean cosine of a cluster term to its centroid (default: 0.99)");
  cmd->add_option("--n-candidates", f.n_candidates, "Number of candidate items / clusters (default: 80)");
  cmd->add_option("--terms-per-cluster", f.terms_per_cluster, "Vocabulary terms per cluster (default: 8)");
  cmd->add_option("--noise-pool", f.noise_pool, "Noise vocabulary size (default: 2000)");
  cmd->add_option("--duplicate-pairs", f.duplicate_pairs, "Candidates sharing a cluster with another (default: 0)");
  cmd->add_option("--k", f.k, "Logistic steepness (default: 20)");
  cmd->add_option("--x0", f.x0, "Logistic midpoint (default: 0.8)");
  cmd->add_option("--beta", f.beta, "Weight tie-break coefficient (default: 0.1)");
  cmd->add_option("--alpha", f.alpha, "Weight propagation threshold (default: 0.9)");
  cmd->add_flag("--allow-wide-ranges", f.allow_wide, "Permit ranges outside 5-40 / 1-3 / 10-50 (recorded as warnings)");
  cmd->add_option("--threads", f.threads, "Worker threads (default: hardware concurrency)");
  cmd->add_option("--out", f.out, "Output path (default: standard output)");
}

/// Applies the config file, then every flag that was given. Returns whether
/// `info` was set explicitly by either.
bool build_config(const SimulationFlags& f, prosel::SimulationConfig& c) {
  bool info_given = false;
  if (f.config_file) {
    std::vector<std::string> keys;
    c = prosel::parse_simulation_config(prosel::text::read_file(*f.config_file), c, *f.config_file, &keys);
    info_given = std::find(keys.begin(), keys.end(), "info") != keys.end();
  }
  if (f.info) {
    c.info = *f.info;
    info_given = true;
  }
  if (f.runs) c.n_runs = *f.runs;
  if (f.seed) c.master_seed = *f.seed;
  if (f.symptoms) c.n_symptoms = prosel::parse_range(*f.symptoms);
  if (f.aes) c.aes_per_symptom = prosel::parse_range(*f.aes);
  if (f.noise) c.n_noise = prosel::parse_range(*f.noise);
  if (f.incidence) c.incidence = prosel::parse_range(*f.incidence);
  if (f.dimension) c.dimension = *f.dimension;
  if (f.similarity) c.intra_cluster_similarity = *f.similarity;
  if (f.n_candidates) c.n_candidates = *f.n_candidates;
  if (f.terms_per_cluster) c.terms_per_cluster = *f.terms_per_cluster;
  if (f.noise_pool) c.noise_pool = *f.noise_pool;
  if (f.duplicate_pairs) c.duplicate_pairs = *f.duplicate_pairs;
  if (f.k) c.utility.k = *f.k;
  if (f.x0) c.utility.x0 = *f.x0;
  if (f.beta) c.utility.beta = *f.beta;
  if (f.alpha) c.alpha = *f.alpha;
  if (f.allow_wide) c.allow_wide_ranges = true;
  return info_given;
}

std::optional<std::filesystem::path> as_path(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  return std::filesystem::path(*s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prosel: select a minimal, diverse, relevant subset of candidate items"};
  app.require_subcommand(1);
  app.set_version_flag("--version", prosel::kVersion);

  // select ------------------------------------------------------------------
  prosel::cli::SelectOptions sel;
  std::string sel_emb, sel_cand, sel_prof, sel_format = "csv";
  std::optional<std::string> sel_out;
  auto* select = app.add_subcommand("select", "Rank candidates against a historical profile");
  select->add_option("--embeddings", sel_emb, "Embedding file (.tsv or .json)")->required();
  select->add_option("--candidates", sel_cand, "Candidate CSV: item_id,category,term_1[;term_2...]")->required();
  select->add_option("--profile", sel_prof, "Profile CSV: term,weight (blank weight = 1)")->required();
  select->add_option("--info", sel.params.info, "Cumulative explained-variance threshold (default: 0.90)");
  select->add_option("--k", sel.params.utility.k, "Logistic steepness (default: 20)");
  select->add_option("--x0", sel.params.utility.x0, "Logistic midpoint (default: 0.8)");
  select->add_option("--beta", sel.params.utility.beta, "Weight tie-break coefficient (default: 0.1)");
  select->add_option("--alpha", sel.params.alpha, "Weight propagation threshold (default: 0.9)");
  select->add_option("--select-n", sel.params.select_n, "Flag this many top-ranked items instead of k_optimal (default: 0 = k_optimal)");
  select->add_option("--out", sel_out, "Report path (default: standard output)");
  select->add_option("--format", sel_format, "Report format: csv, json or table (default: csv)")
      ->check(CLI::IsMember({"csv", "json", "table"}));

  // simulate ----------------------------------------------------------------
  SimulationFlags sim;
  sim.format = "json";
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo recovery of planted symptoms");
  add_simulation_flags(simulate, sim, "Cumulative explained-variance threshold; required (reference: 0.975)");
  simulate->add_option("--runs", sim.runs, "Number of simulated trials (default: 1000)");
  simulate->add_option("--format", sim.format, "Output format: json or table (default: json)")
      ->check(CLI::IsMember({"json", "table"}));

  // tpir --------------------------------------------------------------------
  SimulationFlags tp;
  tp.format = "csv";
  std::size_t reps = 100;
  auto* tpir = app.add_subcommand("tpir", "Per-item true positive incidence rate, one planted item at a time");
  add_simulation_flags(tpir, tp, "Cumulative explained-variance threshold (default: 0.80)");
  tpir->add_option("--reps", reps, "Replicates per candidate item (default: 100)");
  tpir->add_option("--format", tp.format, "Output format: csv or json (default: csv)")->check(CLI::IsMember({"csv", "json"}));

  // report ------------------------------------------------------------------
  std::string rep_in, rep_format = "table";
  std::optional<std::string> rep_out;
  auto* report = app.add_subcommand("report", "Re-render a saved JSON selection report");
  report->add_option("--in", rep_in, "JSON report written by `select --format json`")->required();
  report->add_option("--format", rep_format, "Output format: csv, json or table (default: table)")
      ->check(CLI::IsMember({"csv", "json", "table"}));
  report->add_option("--out", rep_out, "Output path (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : prosel::cli::kExitInputFailure;
  }

  if (*select) {
    sel.embeddings = sel_emb;
    sel.candidates = sel_cand;
    sel.profile = sel_prof;
    sel.out = as_path(sel_out);
    sel.format = prosel::parse_report_format(sel_format);
    return prosel::cli::cmd_select(sel, std::cout, std::cerr);
  }
  if (*simulate) {
    prosel::cli::SimulateOptions o;
    const int rc = prosel::cli::guarded(std::cerr, [&] {
      o.info_given = build_config(sim, o.config);
      return 0;
    });
    if (rc) return rc;
    o.threads = sim.threads;
    o.out = as_path(sim.out);
    o.format = prosel::parse_report_format(sim.format);
    return prosel::cli::cmd_simulate(o, std::cout, std::cerr);
  }
  if (*tpir) {
    prosel::cli::TpirOptions o;
    o.config.info = 0.80;
    const int rc = prosel::cli::guarded(std::cerr, [&] {
      build_config(tp, o.config);
      return 0;
    });
    if (rc) return rc;
    o.reps = reps;
    o.threads = tp.threads;
    o.out = as_path(tp.out);
    o.format = prosel::parse_report_format(tp.format);
    return prosel::cli::cmd_tpir(o, std::cout, std::cerr);
  }
  prosel::cli::ReportOptions o;
  o.input = rep_in;
  o.out = as_path(rep_out);
  o.format = prosel::parse_report_format(rep_format);
  return prosel::cli::cmd_report(o, std::cout, std::cerr);
}
