#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "distresslab/errors.hpp"
#include "distresslab/pipeline.hpp"
#include "distresslab/synth.hpp"

namespace {

std::vector<std::string> parse_features(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Financial distress identification toolkit: ratios, PCA, "
               "hierarchical clustering, CHAID trees and binary logit over "
               "two-year statement corpora"};
  app.require_subcommand(1);

  std::string input, out_dir = "out", features_csv;
  std::string linkage = "single";
  int k = 2;
  bool cluster_on_scores = false;
  distress::ChaidParams chaid_params;
  double cutoff = 0.5;
  double corr_threshold = 0.75;
  bool impute = false;
  bool no_intercept = false;

  auto add_common = [&](CLI::App* cmd, bool needs_input = true) {
    if (needs_input) cmd->add_option("--input", input, "input statements CSV")->required();
    cmd->add_option("--out", out_dir, "output directory (default: out)");
    cmd->add_option("--features", features_csv, "comma-separated ratio codes, e.g. I1,I7");
    cmd->add_flag("--impute", impute, "mean-impute invalid ratios instead of excluding rows");
  };

  auto* ratios = app.add_subcommand("ratios", "compute the 14 ratios and distress labels");
  add_common(ratios);
  ratios->add_option("--corr-threshold", corr_threshold, "report |r| above this (default 0.75)");

  auto* pca = app.add_subcommand("pca", "principal components with varimax rotation");
  add_common(pca);

  auto* cluster = app.add_subcommand("cluster", "agglomerative hierarchical clustering");
  add_common(cluster);
  cluster->add_option("--linkage", linkage, "single|complete|average|centroid|ward");
  cluster->add_option("--k", k, "number of clusters (default 2)");
  cluster->add_flag("--on-scores", cluster_on_scores, "cluster PCA component scores");

  auto* chaid = app.add_subcommand("chaid", "CHAID classification tree");
  add_common(chaid);
  chaid->add_option("--alpha-merge", chaid_params.alpha_merge, "category merge significance");
  chaid->add_option("--alpha-split", chaid_params.alpha_split, "split significance");
  chaid->add_option("--bins", chaid_params.bins, "quantile bins per ratio (default 10)");
  chaid->add_option("--max-depth", chaid_params.max_depth, "maximum tree depth (default 3)");
  chaid->add_option("--min-node", chaid_params.min_node, "minimum rows to split (default 10)");
  chaid->add_option("--min-child", chaid_params.min_child, "minimum rows per child (default 5)");
  chaid->add_flag("!--no-bonferroni", chaid_params.bonferroni, "disable the Bonferroni adjustment");

  auto* logit = app.add_subcommand("logit", "binary logit with inference statistics");
  add_common(logit);
  logit->add_option("--cutoff", cutoff, "classification cutoff probability (default 0.5)");
  logit->add_flag("--no-intercept", no_intercept, "drop the C term");

  auto* pipeline = app.add_subcommand("pipeline", "run all analyses in dependency order");
  add_common(pipeline);
  std::string analyses_csv = "ratios,correlations,pca,cluster,chaid,logit";
  std::string pca_features_csv, cluster_features_csv, chaid_features_csv,
      logit_features_csv = "I1,I7";
  pipeline->add_option("--analyses", analyses_csv, "subset of ratios,correlations,pca,cluster,chaid,logit");
  pipeline->add_option("--pca-features", pca_features_csv, "ratio codes for pca");
  pipeline->add_option("--cluster-features", cluster_features_csv, "ratio codes for clustering");
  pipeline->add_option("--chaid-features", chaid_features_csv, "ratio codes for chaid");
  pipeline->add_option("--logit-features", logit_features_csv, "ratio codes for logit");
  pipeline->add_option("--linkage", linkage, "single|complete|average|centroid|ward");
  pipeline->add_option("--k", k, "number of clusters");
  pipeline->add_flag("--on-scores", cluster_on_scores, "cluster PCA component scores");
  pipeline->add_option("--alpha-merge", chaid_params.alpha_merge, "chaid merge significance");
  pipeline->add_option("--alpha-split", chaid_params.alpha_split, "chaid split significance");
  pipeline->add_option("--bins", chaid_params.bins, "chaid quantile bins");
  pipeline->add_option("--cutoff", cutoff, "logit classification cutoff");
  pipeline->add_option("--corr-threshold", corr_threshold, "correlation report threshold");

  auto* synth = app.add_subcommand("synth", "generate a seeded synthetic statement corpus");
  std::uint64_t seed = 7;
  int n_companies = 55;
  double fraction = 18.0 / 55.0;
  std::string synth_out = "synthetic.csv";
  synth->add_option("--seed", seed, "RNG seed (default 7)");
  synth->add_option("--n", n_companies, "companies (default 55)");
  synth->add_option("--fraction", fraction, "distressed fraction (default 18/55)");
  synth->add_option("--out", synth_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      write_text(synth_out, distress::generate_synthetic(seed, n_companies, fraction));
      std::cout << "wrote " << synth_out << "\n";
      return 0;
    }

    distress::PipelineConfig cfg;
    cfg.input_path = input;
    cfg.out_dir = out_dir;
    cfg.linkage = distress::linkage_from_string(linkage);
    cfg.k = k;
    cfg.cluster_on_scores = cluster_on_scores;
    cfg.chaid = chaid_params;
    cfg.cutoff = cutoff;
    cfg.corr_threshold = corr_threshold;
    cfg.logit_intercept = !no_intercept;
    cfg.policy = impute ? distress::MissingPolicy::MeanImpute : distress::MissingPolicy::Exclude;

    auto features = parse_features(features_csv);
    if (ratios->parsed()) {
      cfg.analyses = {"ratios", "correlations"};
    } else if (pca->parsed()) {
      cfg.analyses = {"pca"};
      cfg.pca_features = features;
    } else if (cluster->parsed()) {
      cfg.analyses = cluster_on_scores ? std::vector<std::string>{"pca", "cluster"}
                                       : std::vector<std::string>{"cluster"};
      cfg.cluster_features = features;
      if (cluster_on_scores) cfg.pca_features = features;
    } else if (chaid->parsed()) {
      cfg.analyses = {"chaid"};
      cfg.chaid_features = features;
    } else if (logit->parsed()) {
      cfg.analyses = {"logit"};
      if (!features.empty()) cfg.logit_features = features;
    } else if (pipeline->parsed()) {
      cfg.analyses = parse_features(analyses_csv);
      cfg.pca_features = parse_features(pca_features_csv);
      cfg.cluster_features = parse_features(cluster_features_csv);
      cfg.chaid_features = parse_features(chaid_features_csv);
      cfg.logit_features = parse_features(logit_features_csv);
    }

    auto report = distress::run_pipeline(cfg);
    std::cout << report.json;
    if (!report.warnings.empty()) {
      std::cerr << report.warnings.size() << " warning(s); see report\n";
    }
    return 0;
  } catch (const distress::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
