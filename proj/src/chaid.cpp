#include "distresslab/chaid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "distresslab/errors.hpp"
#include "distresslab/numcore.hpp"
#include "json.hpp"

namespace distress {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LabelCounts {
  int healthy = 0;
  int distressed = 0;
  int total() const { return healthy + distressed; }
};

// Pearson chi-square of a groups x 2 contingency table; cells with zero
// expectation contribute nothing. df = (#nonempty groups - 1).
struct ChiSquare {
  double statistic = 0.0;
  int df = 0;
  double p = 1.0;
};

ChiSquare pearson_chi_square(const std::vector<LabelCounts>& table) {
  double n = 0.0, col_h = 0.0, col_d = 0.0;
  int nonempty = 0;
  for (const auto& row : table) {
    n += row.total();
    col_h += row.healthy;
    col_d += row.distressed;
    if (row.total() > 0) ++nonempty;
  }
  ChiSquare out;
  out.df = std::max(nonempty - 1, 1);
  if (n == 0.0 || col_h == 0.0 || col_d == 0.0) return out;  // degenerate: p = 1
  for (const auto& row : table) {
    double rt = row.total();
    if (rt == 0.0) continue;
    double eh = rt * col_h / n;
    double ed = rt * col_d / n;
    out.statistic += (row.healthy - eh) * (row.healthy - eh) / eh;
    out.statistic += (row.distressed - ed) * (row.distressed - ed) / ed;
  }
  out.p = chi_square_sf(out.statistic, out.df);
  return out;
}

LabelCounts add(const LabelCounts& a, const LabelCounts& b) {
  return {a.healthy + b.healthy, a.distressed + b.distressed};
}

// C(n, k) in floating point; n and k stay small (bounded by bin count).
double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<LabelCounts> category_counts(const CategoricalPredictor& pred, const Dataset& ds,
                                         std::span<const int> rows, int feature_idx) {
  std::vector<LabelCounts> counts(pred.category_count());
  for (int r : rows) {
    const auto& row = ds.rows[static_cast<std::size_t>(r)];
    if (!row.ratios.is_valid(feature_idx))
      fail(Errc::InvalidFeature, "company '" + row.company_id + "' has no valid " + pred.name);
    int cat = pred.category_of(row.ratios[feature_idx]);
    if (row.health.label == Label::Healthy)
      ++counts[cat].healthy;
    else
      ++counts[cat].distressed;
  }
  return counts;
}

struct MergedGroups {
  std::vector<std::vector<int>> groups;  // contiguous category runs, ascending
  std::vector<LabelCounts> counts;       // aligned with groups
  int initial_present = 0;               // categories with data before merging
};

// Merge loop: repeatedly fuse the adjacent pair with the largest p while
// that p exceeds alpha. The fuse order does not depend on alpha, only the
// stopping point does.
MergedGroups merge_categories_impl(const std::vector<LabelCounts>& per_category,
                                   double alpha_merge) {
  MergedGroups mg;
  for (int c = 0; c < static_cast<int>(per_category.size()); ++c) {
    if (per_category[c].total() > 0) {
      mg.groups.push_back({c});
      mg.counts.push_back(per_category[c]);
    }
  }
  mg.initial_present = static_cast<int>(mg.groups.size());

  while (mg.groups.size() > 1) {
    double best_p = -1.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i + 1 < mg.groups.size(); ++i) {
      ChiSquare cs = pearson_chi_square({mg.counts[i], mg.counts[i + 1]});
      if (cs.p > best_p) {
        best_p = cs.p;
        best_i = i;
      }
    }
    if (best_p <= alpha_merge) break;
    auto& left = mg.groups[best_i];
    auto& right = mg.groups[best_i + 1];
    left.insert(left.end(), right.begin(), right.end());
    mg.counts[best_i] = add(mg.counts[best_i], mg.counts[best_i + 1]);
    mg.groups.erase(mg.groups.begin() + static_cast<std::ptrdiff_t>(best_i) + 1);
    mg.counts.erase(mg.counts.begin() + static_cast<std::ptrdiff_t>(best_i) + 1);
  }
  return mg;
}

// Fold groups below min_child into the adjacent neighbour they are least
// significantly different from.
void enforce_min_child(MergedGroups& mg, int min_child) {
  while (mg.groups.size() > 1) {
    std::size_t undersized = mg.groups.size();
    for (std::size_t i = 0; i < mg.groups.size(); ++i) {
      if (mg.counts[i].total() < min_child) {
        undersized = i;
        break;
      }
    }
    if (undersized == mg.groups.size()) return;

    std::size_t left_i = undersized;  // merge target pair (left_i, left_i+1)
    if (undersized == 0) {
      left_i = 0;
    } else if (undersized + 1 == mg.groups.size()) {
      left_i = undersized - 1;
    } else {
      ChiSquare l = pearson_chi_square({mg.counts[undersized - 1], mg.counts[undersized]});
      ChiSquare r = pearson_chi_square({mg.counts[undersized], mg.counts[undersized + 1]});
      left_i = (l.p >= r.p) ? undersized - 1 : undersized;
    }
    auto& left = mg.groups[left_i];
    auto& right = mg.groups[left_i + 1];
    left.insert(left.end(), right.begin(), right.end());
    mg.counts[left_i] = add(mg.counts[left_i], mg.counts[left_i + 1]);
    mg.groups.erase(mg.groups.begin() + static_cast<std::ptrdiff_t>(left_i) + 1);
    mg.counts.erase(mg.counts.begin() + static_cast<std::ptrdiff_t>(left_i) + 1);
  }
}

std::vector<int> all_rows(const Dataset& ds) {
  std::vector<int> rows(ds.rows.size());
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

}  // namespace

int CategoricalPredictor::category_of(double value) const {
  auto it = std::upper_bound(cut_points.begin(), cut_points.end(), value);
  return static_cast<int>(it - cut_points.begin());
}

CategoricalPredictor discretize(const Dataset& ds, const std::string& feature, int bins) {
  if (bins < 2) fail(Errc::InvalidConfig, "bins must be at least 2");
  const int fi = ratio_index(feature);

  std::vector<double> values;
  values.reserve(ds.rows.size());
  for (const auto& row : ds.rows) {
    if (!row.ratios.is_valid(fi))
      fail(Errc::InvalidFeature, "company '" + row.company_id + "' has no valid " + feature);
    values.push_back(row.ratios[fi]);
  }
  std::sort(values.begin(), values.end());
  if (values.empty() || values.front() == values.back())
    fail(Errc::DegenerateFeature, feature + " has fewer than 2 distinct values");

  const std::size_t n = values.size();
  CategoricalPredictor pred;
  pred.name = feature;
  for (int b = 1; b < bins; ++b) {
    std::size_t pos = (static_cast<std::size_t>(b) * n) / static_cast<std::size_t>(bins);
    if (pos == 0 || pos >= n) continue;
    // move past a tie run so the cut falls between distinct values
    while (pos < n && values[pos] == values[pos - 1]) ++pos;
    if (pos >= n) continue;
    double cut = 0.5 * (values[pos - 1] + values[pos]);
    if (pred.cut_points.empty() || cut > pred.cut_points.back()) pred.cut_points.push_back(cut);
  }
  return pred;
}

std::vector<std::vector<int>> merge_categories(const CategoricalPredictor& pred, const Dataset& ds,
                                               std::span<const int> rows,
                                               const ChaidParams& params) {
  auto counts = category_counts(pred, ds, rows, ratio_index(pred.name));
  return merge_categories_impl(counts, params.alpha_merge).groups;
}

std::vector<std::vector<int>> merge_categories(const CategoricalPredictor& pred, const Dataset& ds,
                                               const ChaidParams& params) {
  auto rows = all_rows(ds);
  return merge_categories(pred, ds, rows, params);
}

std::optional<SplitCandidate> best_split(const Dataset& ds, std::span<const int> rows,
                                         const std::vector<CategoricalPredictor>& predictors,
                                         const ChaidParams& params) {
  std::optional<SplitCandidate> best;
  for (std::size_t pi = 0; pi < predictors.size(); ++pi) {
    const auto& pred = predictors[pi];
    auto counts = category_counts(pred, ds, rows, ratio_index(pred.name));
    MergedGroups mg = merge_categories_impl(counts, params.alpha_merge);
    if (mg.initial_present < 2) continue;
    enforce_min_child(mg, params.min_child);
    if (mg.groups.size() < 2) continue;

    ChiSquare cs = pearson_chi_square(mg.counts);
    double adjusted = cs.p;
    if (params.bonferroni) {
      double multiplier =
          binomial(mg.initial_present - 1, static_cast<int>(mg.groups.size()) - 1);
      adjusted = std::min(1.0, cs.p * multiplier);
    }
    if (adjusted >= params.alpha_split) continue;
    // ties broken by feature order: strict improvement required
    if (!best || adjusted < best->adjusted_p) {
      SplitCandidate cand;
      cand.predictor_pos = static_cast<int>(pi);
      cand.groups = mg.groups;
      cand.chi_square = cs.statistic;
      cand.p_value = cs.p;
      cand.adjusted_p = adjusted;
      best = std::move(cand);
    }
  }
  return best;
}

namespace {

ChaidNode make_node(int id, int depth, const Dataset& ds, std::span<const int> rows) {
  ChaidNode node;
  node.id = id;
  node.depth = depth;
  for (int r : rows) {
    if (ds.rows[static_cast<std::size_t>(r)].health.label == Label::Healthy)
      ++node.n_healthy;
    else
      ++node.n_distressed;
  }
  return node;
}

}  // namespace

Label ChaidNode::majority() const {
  return n_healthy > n_distressed ? Label::Healthy : Label::Distressed;
}

ChaidTree grow_tree(const Dataset& ds, const std::vector<std::string>& features,
                    const ChaidParams& params) {
  if (features.empty()) fail(Errc::InvalidFeature, "feature list is empty");
  if (params.min_child > params.min_node)
    fail(Errc::InvalidConfig, "min_child must not exceed min_node");
  if (ds.rows.empty()) fail(Errc::EmptyDataset, "no rows");
  if (ds.single_class()) fail(Errc::SingleClassDataset, "tree induction needs both labels");

  ChaidTree tree;
  tree.features = features;
  tree.params = params;
  for (const auto& f : features) tree.predictors.push_back(discretize(ds, f, params.bins));

  struct Work {
    int node_id;
    std::vector<int> rows;
  };
  std::vector<Work> stack;
  tree.nodes.push_back(make_node(0, 0, ds, all_rows(ds)));
  stack.push_back({0, all_rows(ds)});

  while (!stack.empty()) {
    Work w = std::move(stack.back());
    stack.pop_back();
    ChaidNode& node = tree.nodes[static_cast<std::size_t>(w.node_id)];

    if (node.depth >= params.max_depth) continue;
    if (node.size() < params.min_node) continue;
    if (node.n_healthy == 0 || node.n_distressed == 0) continue;

    auto cand = best_split(ds, w.rows, tree.predictors, params);
    if (!cand) continue;

    const auto& pred = tree.predictors[static_cast<std::size_t>(cand->predictor_pos)];
    const int fi = ratio_index(pred.name);

    ChaidSplit split;
    split.predictor = pred.name;
    split.chi_square = cand->chi_square;
    split.p_value = cand->p_value;
    split.adjusted_p = cand->adjusted_p;

    // children in group order; branch boundaries come from the cut just
    // below each following group's first category, so absent categories
    // route with the branch to their left
    std::vector<std::vector<int>> child_rows(cand->groups.size());
    std::vector<double> bounds;  // size groups-1
    for (std::size_t g = 0; g + 1 < cand->groups.size(); ++g)
      bounds.push_back(pred.cut_points[static_cast<std::size_t>(cand->groups[g + 1].front()) - 1]);
    for (int r : w.rows) {
      double v = ds.rows[static_cast<std::size_t>(r)].ratios[fi];
      std::size_t g = std::upper_bound(bounds.begin(), bounds.end(), v) - bounds.begin();
      child_rows[g].push_back(r);
    }

    int node_depth = node.depth;
    int node_id = node.id;
    for (std::size_t g = 0; g < cand->groups.size(); ++g) {
      ChaidBranch branch;
      branch.categories = cand->groups[g];
      branch.lo = (g == 0) ? -kInf : bounds[g - 1];
      branch.hi = (g + 1 == cand->groups.size()) ? kInf : bounds[g];
      branch.child_id = static_cast<int>(tree.nodes.size());
      split.branches.push_back(branch);
      tree.nodes.push_back(
          make_node(branch.child_id, node_depth + 1, ds, child_rows[g]));
      stack.push_back({branch.child_id, std::move(child_rows[g])});
    }
    tree.nodes[static_cast<std::size_t>(node_id)].split = std::move(split);
  }
  return tree;
}

std::vector<Rule> extract_rules(const ChaidTree& t) {
  std::vector<Rule> rules;

  struct Constraint {
    double lo = -kInf;
    double hi = kInf;
  };

  // depth-first in branch order so rules read left to right
  struct Frame {
    int node_id;
    std::vector<std::pair<std::string, Constraint>> path;
  };
  std::vector<Frame> stack;
  stack.push_back({0, {}});
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const ChaidNode& node = t.nodes[static_cast<std::size_t>(f.node_id)];
    if (node.is_leaf()) {
      Rule rule;
      rule.leaf_id = node.id;
      rule.support = node.size();
      rule.predicted = node.majority();
      int majority_count = std::max(node.n_healthy, node.n_distressed);
      rule.confidence = node.size() > 0
                            ? static_cast<double>(majority_count) / node.size()
                            : 0.0;
      for (const auto& [feature, c] : f.path) rule.conjuncts.push_back({feature, c.lo, c.hi});
      rules.push_back(std::move(rule));
      continue;
    }
    const auto& split = *node.split;
    for (auto it = split.branches.rbegin(); it != split.branches.rend(); ++it) {
      Frame child = f;
      child.node_id = it->child_id;
      bool merged = false;
      for (auto& [feature, c] : child.path) {
        if (feature == split.predictor) {
          c.lo = std::max(c.lo, it->lo);
          c.hi = std::min(c.hi, it->hi);
          merged = true;
          break;
        }
      }
      if (!merged) child.path.push_back({split.predictor, {it->lo, it->hi}});
      stack.push_back(std::move(child));
    }
  }
  return rules;
}

ChaidPrediction classify(const ChaidTree& t, const RatioVector& rv) {
  int id = 0;
  while (true) {
    const ChaidNode& node = t.nodes[static_cast<std::size_t>(id)];
    if (node.is_leaf()) return {node.majority(), node.id};
    const auto& split = *node.split;
    const int fi = ratio_index(split.predictor);
    if (!rv.is_valid(fi)) fail(Errc::InvalidFeature, "no valid " + split.predictor + " value");
    double v = rv[fi];
    id = split.branches.back().child_id;
    for (const auto& branch : split.branches) {
      if (v < branch.hi) {
        id = branch.child_id;
        break;
      }
    }
  }
}

namespace {

std::string fmt_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void rules_text_walk(const ChaidTree& t, int node_id, int indent, std::ostringstream& os) {
  const ChaidNode& node = t.nodes[static_cast<std::size_t>(node_id)];
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (node.is_leaf()) {
    os << pad << "=> \"" << to_string(node.majority()) << "\" (" << node.n_distressed
       << " distressed / " << node.size() << ")\n";
    return;
  }
  const auto& split = *node.split;
  for (std::size_t b = 0; b < split.branches.size(); ++b) {
    const auto& branch = split.branches[b];
    std::string cond;
    if (branch.lo == -kInf)
      cond = split.predictor + " < " + fmt_value(branch.hi);
    else if (branch.hi == kInf)
      cond = split.predictor + " >= " + fmt_value(branch.lo);
    else
      cond = fmt_value(branch.lo) + " <= " + split.predictor + " < " + fmt_value(branch.hi);
    os << pad << (b == 0 ? "if " : "else if ") << cond << " then\n";
    rules_text_walk(t, branch.child_id, indent + 1, os);
  }
}

}  // namespace

std::string rules_text(const ChaidTree& t) {
  std::ostringstream os;
  rules_text_walk(t, 0, 0, os);
  return os.str();
}

std::string to_json(const ChaidTree& t) {
  nlohmann::ordered_json j;
  j["features"] = t.features;
  j["params"] = {{"alpha_merge", t.params.alpha_merge}, {"alpha_split", t.params.alpha_split},
                 {"max_depth", t.params.max_depth},     {"min_node", t.params.min_node},
                 {"min_child", t.params.min_child},     {"bins", t.params.bins},
                 {"bonferroni", t.params.bonferroni}};
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& node : t.nodes) {
    nlohmann::ordered_json nj;
    nj["id"] = node.id;
    nj["depth"] = node.depth;
    nj["healthy"] = node.n_healthy;
    nj["distressed"] = node.n_distressed;
    if (node.split) {
      nlohmann::ordered_json sj;
      sj["predictor"] = node.split->predictor;
      sj["chi_square"] = node.split->chi_square;
      sj["p_value"] = node.split->p_value;
      sj["adjusted_p"] = node.split->adjusted_p;
      sj["branches"] = nlohmann::ordered_json::array();
      for (const auto& b : node.split->branches) {
        nlohmann::ordered_json bj;
        bj["categories"] = b.categories;
        bj["lo"] = b.lo == -kInf ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(b.lo);
        bj["hi"] = b.hi == kInf ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(b.hi);
        bj["child"] = b.child_id;
        sj["branches"].push_back(bj);
      }
      nj["split"] = sj;
    }
    j["nodes"].push_back(nj);
  }
  return j.dump(2);
}

std::string to_dot(const ChaidTree& t) {
  std::ostringstream os;
  os << "digraph chaid {\n  node [shape=box];\n";
  for (const auto& node : t.nodes) {
    os << "  n" << node.id << " [label=\"#" << node.id << "\\nh=" << node.n_healthy
       << " d=" << node.n_distressed;
    if (node.is_leaf()) os << "\\n" << to_string(node.majority());
    os << "\"];\n";
  }
  for (const auto& node : t.nodes) {
    if (!node.split) continue;
    for (const auto& b : node.split->branches) {
      std::string cond;
      if (b.lo == -kInf)
        cond = "< " + fmt_value(b.hi);
      else if (b.hi == kInf)
        cond = ">= " + fmt_value(b.lo);
      else
        cond = "[" + fmt_value(b.lo) + ", " + fmt_value(b.hi) + ")";
      os << "  n" << node.id << " -> n" << b.child_id << " [label=\"" << node.split->predictor
         << " " << cond << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace distress
