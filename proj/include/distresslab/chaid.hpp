#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "distresslab/finstat.hpp"

namespace distress {

struct ChaidParams {
  double alpha_merge = 0.05;
  double alpha_split = 0.05;
  int max_depth = 3;
  int min_node = 10;
  int min_child = 5;
  int bins = 10;
  bool bonferroni = true;
};

// Ordered interval categories over one ratio, from equal-frequency cut
// points (duplicate quantiles collapsed).
struct CategoricalPredictor {
  std::string name;
  std::vector<double> cut_points;  // strictly increasing

  int category_count() const { return static_cast<int>(cut_points.size()) + 1; }
  // category j spans [cut(j-1), cut(j)); first/last unbounded
  int category_of(double value) const;
};

CategoricalPredictor discretize(const Dataset& ds, const std::string& feature, int bins);

// One child branch of a split: a contiguous run of categories and the
// value interval [lo, hi) that routes to it.
struct ChaidBranch {
  std::vector<int> categories;
  double lo;  // -inf on the first branch
  double hi;  // +inf on the last branch
  int child_id;
};

struct ChaidSplit {
  std::string predictor;
  double chi_square;
  double p_value;     // unadjusted
  double adjusted_p;  // Bonferroni-adjusted (equal to p_value when off)
  std::vector<ChaidBranch> branches;
};

struct ChaidNode {
  int id = 0;
  int depth = 0;
  int n_healthy = 0;
  int n_distressed = 0;
  std::optional<ChaidSplit> split;

  int size() const { return n_healthy + n_distressed; }
  bool is_leaf() const { return !split.has_value(); }
  Label majority() const;  // ties resolve to Distressed
};

struct ChaidTree {
  std::vector<ChaidNode> nodes;  // node id == index, root 0
  std::vector<std::string> features;
  std::vector<CategoricalPredictor> predictors;  // aligned with features
  ChaidParams params;
};

// Repeatedly merges the adjacent pair of categories least significantly
// different w.r.t. the label (largest chi-square p) while p > alpha_merge.
std::vector<std::vector<int>> merge_categories(const CategoricalPredictor& pred,
                                               const Dataset& ds, const ChaidParams& params);
std::vector<std::vector<int>> merge_categories(const CategoricalPredictor& pred,
                                               const Dataset& ds, std::span<const int> rows,
                                               const ChaidParams& params);

struct SplitCandidate {
  int predictor_pos;  // index into the considered predictor list
  std::vector<std::vector<int>> groups;
  double chi_square;
  double p_value;
  double adjusted_p;
};

// Best Bonferroni-adjusted split across predictors, or nothing when no
// adjusted p-value clears alpha_split. Groups smaller than min_child are
// folded into their most similar neighbour before evaluation.
std::optional<SplitCandidate> best_split(const Dataset& ds, std::span<const int> rows,
                                         const std::vector<CategoricalPredictor>& predictors,
                                         const ChaidParams& params);

ChaidTree grow_tree(const Dataset& ds, const std::vector<std::string>& features,
                    const ChaidParams& params);

struct RuleConjunct {
  std::string feature;
  double lo;  // value >= lo (ignore when -inf)
  double hi;  // value < hi (ignore when +inf)
};

struct Rule {
  std::vector<RuleConjunct> conjuncts;
  Label predicted;
  int support = 0;
  double confidence = 0.0;
  int leaf_id = 0;
};

std::vector<Rule> extract_rules(const ChaidTree& t);

struct ChaidPrediction {
  Label predicted;
  int leaf_id;
};

// Routes by interval membership; the unbounded edge intervals clamp
// out-of-range values to the nearest boundary bin.
ChaidPrediction classify(const ChaidTree& t, const RatioVector& rv);

// Nested if/else rendering of the fitted rules.
std::string rules_text(const ChaidTree& t);
std::string to_json(const ChaidTree& t);
std::string to_dot(const ChaidTree& t);

}  // namespace distress
