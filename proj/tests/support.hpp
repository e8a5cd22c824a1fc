#pragma once

// Shared fixtures for the unit and acceptance suites.

#include <string>
#include <vector>

#include "distresslab/chaid.hpp"
#include "distresslab/finstat.hpp"

namespace testsupport {

// Dataset over chosen ratio codes with explicit values per row.
inline distress::Dataset make_dataset(const std::vector<std::string>& features,
                                      const std::vector<std::vector<double>>& rows,
                                      const std::vector<distress::Label>& labels) {
  distress::Dataset ds;
  ds.feature_names = features;
  std::vector<int> idx;
  for (const auto& f : features) idx.push_back(distress::ratio_index(f));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    distress::DatasetRow row;
    row.company_id = "T" + std::to_string(r);
    for (std::size_t c = 0; c < idx.size(); ++c) {
      row.ratios.values[idx[c]] = rows[r][c];
      row.ratios.valid[idx[c]] = true;
    }
    row.health.label = labels[r];
    row.health.reason = labels[r] == distress::Label::Distressed
                            ? distress::DistressReason::CurrentYearLoss
                            : distress::DistressReason::None;
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

// The reference rule set as an explicit tree:
//   I1 < 0.04:  I2 < 0.03 -> unhealthy, else healthy
//   I1 >= 0.04: I13 < 44.17 -> healthy, else unhealthy
inline distress::ChaidTree reference_rule_tree() {
  using namespace distress;
  const double inf = std::numeric_limits<double>::infinity();
  ChaidTree t;
  t.features = {"I1", "I2", "I13"};

  auto leaf = [](int id, int depth, Label majority) {
    ChaidNode n;
    n.id = id;
    n.depth = depth;
    n.n_healthy = majority == Label::Healthy ? 1 : 0;
    n.n_distressed = majority == Label::Distressed ? 1 : 0;
    return n;
  };

  ChaidNode root;
  root.id = 0;
  root.depth = 0;
  root.n_healthy = 2;
  root.n_distressed = 2;
  ChaidSplit s0;
  s0.predictor = "I1";
  s0.branches = {{{0}, -inf, 0.04, 1}, {{1}, 0.04, inf, 2}};
  root.split = s0;

  ChaidNode low = leaf(1, 1, Label::Distressed);
  low.n_healthy = 1;
  low.n_distressed = 1;
  ChaidSplit s1;
  s1.predictor = "I2";
  s1.branches = {{{0}, -inf, 0.03, 3}, {{1}, 0.03, inf, 4}};
  low.split = s1;

  ChaidNode high = leaf(2, 1, Label::Healthy);
  high.n_healthy = 1;
  high.n_distressed = 1;
  ChaidSplit s2;
  s2.predictor = "I13";
  s2.branches = {{{0}, -inf, 44.17, 5}, {{1}, 44.17, inf, 6}};
  high.split = s2;

  t.nodes = {root,
             low,
             high,
             leaf(3, 2, Label::Distressed),
             leaf(4, 2, Label::Healthy),
             leaf(5, 2, Label::Healthy),
             leaf(6, 2, Label::Distressed)};
  return t;
}

inline distress::RatioVector ratio_point(std::initializer_list<std::pair<const char*, double>> kv) {
  distress::RatioVector rv;
  for (const auto& [code, value] : kv) {
    int i = distress::ratio_index(code);
    rv.values[i] = value;
    rv.valid[i] = true;
  }
  return rv;
}

}  // namespace testsupport
