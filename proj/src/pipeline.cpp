#include "distresslab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "distresslab/errors.hpp"
#include "distresslab/numcore.hpp"
#include "distresslab/pca.hpp"
#include "json.hpp"

namespace distress {

using json = nlohmann::ordered_json;

bool log_enabled() {
  const char* v = std::getenv("DISTRESS_LAB_LOG");
  if (!v) return false;
  std::string s(v);
  return s == "debug" || s == "info" || s == "1";
}

void log_line(const std::string& msg) {
  if (log_enabled()) std::cerr << "[distresslab] " << msg << "\n";
}

std::vector<CorrelationPair> correlation_report(const Dataset& ds, double threshold) {
  Matrix corr = correlation_matrix(ds.feature_matrix());
  std::vector<CorrelationPair> pairs;
  for (std::size_t a = 0; a < corr.rows(); ++a)
    for (std::size_t b = a + 1; b < corr.cols(); ++b)
      if (std::fabs(corr(a, b)) >= threshold)
        pairs.push_back({ds.feature_names[a], ds.feature_names[b], corr(a, b)});
  std::stable_sort(pairs.begin(), pairs.end(), [](const CorrelationPair& x, const CorrelationPair& y) {
    return std::fabs(x.r) > std::fabs(y.r);
  });
  return pairs;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::InvalidConfig, "cannot open input '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
  out << content;
}

json matrix_table(const Matrix& m, const std::vector<std::string>& row_names,
                  const std::vector<std::string>& col_names) {
  json t = json::object();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::object();
    for (std::size_t c = 0; c < m.cols(); ++c) row[col_names[c]] = m(r, c);
    t[row_names[r]] = row;
  }
  return t;
}

std::vector<std::string> component_names(std::size_t k) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < k; ++j) names.push_back("PC" + std::to_string(j + 1));
  return names;
}

struct Confusion {
  // cells[r][c]: r = predicted/cluster row, c = 0 healthy, 1 distressed
  std::vector<std::array<int, 2>> cells;
  int total = 0;

  int misclassified() const {
    int hit = 0;
    for (const auto& row : cells) hit += std::max(row[0], row[1]);
    return total - hit;
  }
};

json confusion_to_json(const Confusion& cm, const std::vector<std::string>& row_names) {
  json j = json::object();
  json rows = json::object();
  for (std::size_t r = 0; r < cm.cells.size(); ++r)
    rows[row_names[r]] = {{"healthy", cm.cells[r][0]}, {"distressed", cm.cells[r][1]}};
  j["rows"] = rows;
  j["total"] = cm.total;
  j["misclassified"] = cm.misclassified();
  return j;
}

}  // namespace

RunReport run_pipeline(const PipelineConfig& cfg) {
  RunReport rep;
  json report = json::object();

  const std::set<std::string> requested(cfg.analyses.begin(), cfg.analyses.end());
  static const std::set<std::string> known = {"ratios", "correlations", "pca",
                                              "cluster",  "chaid",      "logit"};
  for (const auto& a : requested)
    if (!known.count(a)) fail(Errc::InvalidConfig, "unknown analysis '" + a + "'");
  if (cfg.cluster_on_scores && requested.count("cluster") && !requested.count("pca"))
    fail(Errc::InvalidConfig, "cluster_on_scores requires the pca analysis");

  auto warn = [&](const std::string& msg) {
    rep.warnings.push_back(msg);
    log_line("warning: " + msg);
  };

  log_line("reading " + cfg.input_path);
  const std::string csv = read_file(cfg.input_path);
  const auto records = parse_statements(csv);
  log_line(std::to_string(records.size()) + " companies parsed");

  const auto all_codes = all_ratio_codes();
  const std::vector<std::string> default_cluster = {"I1", "I2", "I3", "I4", "I6", "I7", "I12"};
  const auto pca_features = cfg.pca_features.empty() ? all_codes : cfg.pca_features;
  const auto cluster_features =
      cfg.cluster_features.empty() ? default_cluster : cfg.cluster_features;
  const auto chaid_features = cfg.chaid_features.empty() ? all_codes : cfg.chaid_features;

  report["input"] = {{"path", cfg.input_path}, {"companies", records.size()}};

  // ---- ratios ---------------------------------------------------------
  if (requested.count("ratios")) {
    json section = json::object();
    json companies = json::array();
    int healthy = 0, distressed = 0;
    for (const auto& rec : records) {
      json c = json::object();
      c["company_id"] = rec.company_id;
      HealthLabel hl = label_company(rec);
      c["label"] = to_string(hl.label);
      c["reason"] = to_string(hl.reason);
      (hl.label == Label::Healthy ? healthy : distressed)++;
      try {
        RatioVector rv = compute_ratios(rec);
        json ratios = json::object();
        json invalid = json::array();
        for (int i = 0; i < kRatioCount; ++i) {
          if (rv.is_valid(i))
            ratios[ratio_code(i)] = rv[i];
          else
            invalid.push_back(ratio_code(i));
        }
        c["ratios"] = ratios;
        if (!invalid.empty()) c["invalid"] = invalid;
        if (i11_sign_caveat(rec)) {
          c["i11_sign_caveat"] = true;
          warn("company '" + rec.company_id +
               "': I11 growth rate has a negative prior-year base; sign is not interpretable");
        }
      } catch (const Error& e) {
        c["error"] = e.what();
        warn("company '" + rec.company_id + "': " + e.what());
      }
      companies.push_back(c);
    }
    section["companies"] = companies;
    section["healthy"] = healthy;
    section["distressed"] = distressed;
    report["ratios"] = section;
  }

  // ---- correlations ---------------------------------------------------
  if (requested.count("correlations")) {
    json section = json::object();
    try {
      auto build = build_dataset(records, all_codes, cfg.policy);
      auto pairs = correlation_report(build.dataset, cfg.corr_threshold);
      json arr = json::array();
      std::ostringstream text;
      for (const auto& p : pairs) {
        arr.push_back({{"pair", {p.a, p.b}}, {"r", p.r}});
        char buf[80];
        std::snprintf(buf, sizeof(buf), "%s and %s (%.1f%%)", p.a.c_str(), p.b.c_str(),
                      p.r * 100.0);
        if (text.tellp() > 0) text << ", ";
        text << buf;
      }
      section["threshold"] = cfg.corr_threshold;
      section["pairs"] = arr;
      section["text"] = text.str();
      for (const auto& ex : build.excluded)
        warn("correlations: excluded '" + ex.company_id + "' (" + ex.reason + ")");
    } catch (const Error& e) {
      section["error"] = e.what();
      warn(std::string("correlations: ") + e.what());
    }
    report["correlations"] = section;
  }

  // ---- pca -------------------------------------------------------------
  RotatedModel rotated;   // kept for cluster_on_scores
  Matrix score_w;         // features x k
  Matrix pca_std_matrix;  // standardized rows used by the pca fit
  Dataset pca_dataset;    // rows behind pca_std_matrix
  bool pca_ok = false;
  if (requested.count("pca")) {
    json section = json::object();
    try {
      auto build = build_dataset(records, pca_features, cfg.policy);
      for (const auto& ex : build.excluded)
        warn("pca: excluded '" + ex.company_id + "' (" + ex.reason + ")");
      PcaModel model = fit_pca(build.dataset, pca_features);
      int k = select_components(model, ComponentRule::KaiserUnitEigenvalue);
      rotated = varimax_rotate(model, k, true);
      score_w = score_coefficients(rotated, model.correlation);
      rotated.score_coefficients = score_w;
      pca_std_matrix = standardize(build.dataset.feature_matrix());
      pca_dataset = build.dataset;
      pca_ok = true;

      section["features"] = pca_features;
      section["eigenvalues"] = model.eigenvalues;
      section["explained_share"] = model.explained_share;
      section["cumulative_share"] = model.cumulative_share;
      section["components_kept"] = k;
      section["selection_rule"] = "kaiser_unit_eigenvalue";
      auto comp = component_names(static_cast<std::size_t>(k));
      section["rotated_loadings"] = matrix_table(rotated.rotated_loadings, pca_features, comp);
      section["score_coefficients"] = matrix_table(score_w, pca_features, comp);
      // row order follows the company order of the dataset used
      json scored = json::object();
      for (std::size_t r = 0; r < build.dataset.rows.size(); ++r) {
        auto scores = project(rotated, score_w, pca_std_matrix.row(r));
        json srow = json::object();
        for (std::size_t j = 0; j < scores.size(); ++j) srow[comp[j]] = scores[j];
        scored[build.dataset.rows[r].company_id] = srow;
      }
      section["component_scores"] = scored;
    } catch (const Error& e) {
      section["error"] = e.what();
      warn(std::string("pca: ") + e.what());
    }
    report["pca"] = section;
  }

  // ---- cluster ---------------------------------------------------------
  if (requested.count("cluster")) {
    json section = json::object();
    try {
      Dataset ds;
      Matrix points;
      if (cfg.cluster_on_scores) {
        if (!pca_ok) fail(Errc::InvalidConfig, "pca did not complete; cannot cluster scores");
        ds = pca_dataset;
        points = matmul(pca_std_matrix, score_w);
        section["space"] = "component_scores";
      } else {
        auto build = build_dataset(records, cluster_features, cfg.policy);
        for (const auto& ex : build.excluded)
          warn("cluster: excluded '" + ex.company_id + "' (" + ex.reason + ")");
        ds = build.dataset;
        points = standardize(ds.feature_matrix());
        section["space"] = "standardized_ratios";
      }

      Dendrogram dend = agglomerate(distance_matrix(points), cfg.linkage);
      auto assign = cut(dend, cfg.k);

      section["linkage"] = to_string(cfg.linkage);
      section["k"] = cfg.k;
      json assignment = json::object();
      for (std::size_t r = 0; r < ds.rows.size(); ++r)
        assignment[ds.rows[r].company_id] = assign[r];
      section["assignment"] = assignment;

      Confusion cm;
      cm.cells.assign(static_cast<std::size_t>(cfg.k), {0, 0});
      std::vector<std::string> row_names;
      for (int c = 0; c < cfg.k; ++c) row_names.push_back("cluster_" + std::to_string(c));
      for (std::size_t r = 0; r < ds.rows.size(); ++r) {
        int col = ds.rows[r].health.label == Label::Distressed ? 1 : 0;
        ++cm.cells[static_cast<std::size_t>(assign[r])][col];
        ++cm.total;
      }
      section["confusion"] = confusion_to_json(cm, row_names);

      std::vector<std::string> labels;
      for (const auto& row : ds.rows) labels.push_back(row.company_id);
      write_file(cfg.out_dir, "dendrogram.dot", to_dot(dend, labels));
      json merges = json::array();
      for (const auto& m : dend.merges)
        merges.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height}, {"size", m.size}});
      section["merges"] = merges;
    } catch (const Error& e) {
      section["error"] = e.what();
      warn(std::string("cluster: ") + e.what());
    }
    report["cluster"] = section;
  }

  // ---- chaid -----------------------------------------------------------
  if (requested.count("chaid")) {
    json section = json::object();
    try {
      auto build = build_dataset(records, chaid_features, cfg.policy, true);
      for (const auto& ex : build.excluded)
        warn("chaid: excluded '" + ex.company_id + "' (" + ex.reason + ")");
      const Dataset& ds = build.dataset;

      ChaidTree tree = grow_tree(ds, chaid_features, cfg.chaid);
      auto rules = extract_rules(tree);

      section["features"] = chaid_features;
      section["tree"] = json::parse(to_json(tree));
      json jrules = json::array();
      for (const auto& rule : rules) {
        json jr = json::object();
        json conj = json::array();
        for (const auto& c : rule.conjuncts) {
          json jc = json::object();
          jc["feature"] = c.feature;
          jc["lo"] = std::isinf(c.lo) ? json(nullptr) : json(c.lo);
          jc["hi"] = std::isinf(c.hi) ? json(nullptr) : json(c.hi);
          conj.push_back(jc);
        }
        jr["if"] = conj;
        jr["then"] = to_string(rule.predicted);
        jr["support"] = rule.support;
        jr["confidence"] = rule.confidence;
        jr["leaf"] = rule.leaf_id;
        jrules.push_back(jr);
      }
      section["rules"] = jrules;

      Confusion cm;
      cm.cells.assign(2, {0, 0});
      for (const auto& row : ds.rows) {
        auto predicted = classify(tree, row.ratios);
        int r = predicted.predicted == Label::Distressed ? 1 : 0;
        int c = row.health.label == Label::Distressed ? 1 : 0;
        ++cm.cells[static_cast<std::size_t>(r)][c];
        ++cm.total;
      }
      section["confusion"] = confusion_to_json(cm, {"predicted_healthy", "predicted_distressed"});

      write_file(cfg.out_dir, "chaid_tree.json", to_json(tree));
      write_file(cfg.out_dir, "chaid_rules.txt", rules_text(tree));
      write_file(cfg.out_dir, "chaid_tree.dot", to_dot(tree));
    } catch (const Error& e) {
      section["error"] = e.what();
      warn(std::string("chaid: ") + e.what());
    }
    report["chaid"] = section;
  }

  // ---- logit -----------------------------------------------------------
  if (requested.count("logit")) {
    json section = json::object();
    try {
      auto build = build_dataset(records, cfg.logit_features, cfg.policy, true);
      for (const auto& ex : build.excluded)
        warn("logit: excluded '" + ex.company_id + "' (" + ex.reason + ")");
      const Dataset& ds = build.dataset;

      LogitSpec spec;
      spec.feature_names = cfg.logit_features;
      spec.include_intercept = cfg.logit_intercept;
      LogitFit fit = fit_logit(ds, spec);
      FitStatistics stats = fit_statistics(fit);

      json coef = json::array();
      for (std::size_t c = 0; c < fit.beta.size(); ++c)
        coef.push_back({{"variable", fit.coef_names[c]},
                        {"coefficient", fit.beta[c]},
                        {"std_error", fit.std_errors[c]},
                        {"z_statistic", stats.z_stats[c]},
                        {"prob", stats.p_values[c]}});
      section["coefficients"] = coef;
      section["statistics"] = {{"mean_dependent_var", stats.mean_dep},
                               {"sd_dependent_var", stats.sd_dep},
                               {"log_likelihood", fit.log_likelihood},
                               {"restricted_log_likelihood", fit.restricted_log_likelihood},
                               {"lr_statistic", stats.lr_statistic},
                               {"lr_df", fit.slope_count},
                               {"probability_lr_stat", stats.lr_p_value},
                               {"mcfadden_r_squared", stats.mcfadden_r2},
                               {"akaike", stats.aic},
                               {"schwarz", stats.schwarz},
                               {"hannan_quinn", stats.hannan_quinn},
                               {"avg_log_likelihood", stats.avg_log_likelihood},
                               {"obs_with_dep_0", fit.n_obs - fit.n_dep1},
                               {"obs_with_dep_1", fit.n_dep1},
                               {"total_obs", fit.n_obs},
                               {"iterations", fit.iterations}};
      section["cutoff"] = cfg.cutoff;

      Confusion cm;
      cm.cells.assign(2, {0, 0});
      json probs = json::object();
      for (const auto& row : ds.rows) {
        double p = predict_prob(fit.beta, row.ratios, spec);
        probs[row.company_id] = p;
        int r = classify_cutoff(p, cfg.cutoff) == Label::Distressed ? 1 : 0;
        int c = row.health.label == Label::Distressed ? 1 : 0;
        ++cm.cells[static_cast<std::size_t>(r)][c];
        ++cm.total;
      }
      section["fitted_probabilities"] = probs;
      section["confusion"] = confusion_to_json(cm, {"predicted_healthy", "predicted_distressed"});

      write_file(cfg.out_dir, "logit_fit.json", json(section).dump(2));
      write_file(cfg.out_dir, "logit_fit.txt", fit_text(fit, stats));
    } catch (const Error& e) {
      section["error"] = e.what();
      warn(std::string("logit: ") + e.what());
    }
    report["logit"] = section;
  }

  if (!rep.warnings.empty()) report["warnings"] = rep.warnings;
  rep.json = report.dump(2) + "\n";
  write_file(cfg.out_dir, "report.json", rep.json);
  log_line("pipeline complete");
  return rep;
}

}  // namespace distress
