#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "distresslab/chaid.hpp"
#include "distresslab/finstat.hpp"
#include "distresslab/hcluster.hpp"
#include "distresslab/logit.hpp"

namespace distress {

struct CorrelationPair {
  std::string a;
  std::string b;
  double r;
};

// All ratio pairs with |r| >= threshold, descending |r|.
std::vector<CorrelationPair> correlation_report(const Dataset& ds, double threshold);

struct PipelineConfig {
  std::string input_path;                // CSV in the documented schema
  std::vector<std::string> analyses = {"ratios", "correlations", "pca",
                                       "cluster", "chaid", "logit"};
  std::vector<std::string> pca_features;      // default: all 14
  std::vector<std::string> cluster_features;  // default: I1,I2,I3,I4,I6,I7,I12
  std::vector<std::string> chaid_features;    // default: all 14
  std::vector<std::string> logit_features = {"I1", "I7"};
  Linkage linkage = Linkage::Single;
  int k = 2;
  bool cluster_on_scores = false;  // cluster PCA component scores instead of raw ratios
  ChaidParams chaid;
  bool logit_intercept = true;
  double cutoff = 0.5;
  double corr_threshold = 0.75;
  MissingPolicy policy = MissingPolicy::Exclude;
  std::string out_dir;  // artifacts land here when non-empty
};

struct RunReport {
  std::string json;  // serialized report (the report.json payload)
  std::vector<std::string> warnings;
};

// Runs the requested analyses in dependency order over one input corpus
// and writes report.json plus per-analysis artifacts to out_dir.
RunReport run_pipeline(const PipelineConfig& cfg);

// Verbosity from the DISTRESS_LAB_LOG environment variable (debug|info|quiet).
bool log_enabled();
void log_line(const std::string& msg);

}  // namespace distress
