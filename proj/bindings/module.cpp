#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "distresslab/chaid.hpp"
#include "distresslab/errors.hpp"
#include "distresslab/finstat.hpp"
#include "distresslab/hcluster.hpp"
#include "distresslab/logit.hpp"
#include "distresslab/numcore.hpp"
#include "distresslab/pca.hpp"
#include "distresslab/pipeline.hpp"
#include "distresslab/synth.hpp"

namespace py = pybind11;
using namespace distress;

namespace {

std::vector<std::vector<double>> to_rows(const Matrix& m) {
  std::vector<std::vector<double>> out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) out[r] = m.row(r);
  return out;
}

RatioVector ratios_from_dict(const py::dict& values) {
  RatioVector rv;
  for (const auto& item : values) {
    int i = ratio_index(py::cast<std::string>(item.first));
    rv.values[i] = py::cast<double>(item.second);
    rv.valid[i] = true;
  }
  return rv;
}

Dataset load_dataset(const std::string& csv_text, std::vector<std::string> features,
                     bool impute, bool require_both_labels) {
  if (features.empty()) features = all_ratio_codes();
  auto records = parse_statements(csv_text);
  auto build = build_dataset(records, features,
                             impute ? MissingPolicy::MeanImpute : MissingPolicy::Exclude,
                             require_both_labels);
  return build.dataset;
}

py::dict stats_dict(const LogitFit& fit, const FitStatistics& st) {
  py::dict d;
  d["z_stats"] = st.z_stats;
  d["p_values"] = st.p_values;
  d["mcfadden_r2"] = st.mcfadden_r2;
  d["lr_statistic"] = st.lr_statistic;
  d["lr_p_value"] = st.lr_p_value;
  d["aic"] = st.aic;
  d["schwarz"] = st.schwarz;
  d["hannan_quinn"] = st.hannan_quinn;
  d["avg_log_likelihood"] = st.avg_log_likelihood;
  d["mean_dep"] = st.mean_dep;
  d["sd_dep"] = st.sd_dep;
  d["log_likelihood"] = fit.log_likelihood;
  d["restricted_log_likelihood"] = fit.restricted_log_likelihood;
  d["iterations"] = fit.iterations;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Financial distress identification toolkit: ratios, PCA with "
            "varimax rotation, hierarchical clustering, CHAID trees and "
            "binary logit estimation";

  py::register_exception<Error>(m, "DistressError");

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("feature_names", &Dataset::feature_names)
      .def_property_readonly("n_rows", [](const Dataset& ds) { return ds.rows.size(); })
      .def_property_readonly("company_ids",
                             [](const Dataset& ds) {
                               std::vector<std::string> ids;
                               for (const auto& r : ds.rows) ids.push_back(r.company_id);
                               return ids;
                             })
      .def_property_readonly("labels",
                             [](const Dataset& ds) {
                               std::vector<std::string> out;
                               for (const auto& r : ds.rows)
                                 out.push_back(to_string(r.health.label));
                               return out;
                             })
      .def("matrix", [](const Dataset& ds) { return to_rows(ds.feature_matrix()); })
      .def("count_distressed",
           [](const Dataset& ds) { return ds.count(Label::Distressed); });

  m.def("generate_synthetic", &generate_synthetic, py::arg("seed"), py::arg("n"),
        py::arg("distress_fraction"),
        "Deterministic synthetic two-year statement corpus (CSV text).");

  m.def("load_dataset", &load_dataset, py::arg("csv_text"),
        py::arg("features") = std::vector<std::string>{}, py::arg("impute") = false,
        py::arg("require_both_labels") = false,
        "Parse a statements CSV and assemble the ratio dataset.");

  m.def("ratio_codes", &all_ratio_codes);

  // ---- pca ----------------------------------------------------------------
  py::class_<PcaModel>(m, "PcaModel")
      .def_readonly("feature_names", &PcaModel::feature_names)
      .def_readonly("eigenvalues", &PcaModel::eigenvalues)
      .def_readonly("explained_share", &PcaModel::explained_share)
      .def_readonly("cumulative_share", &PcaModel::cumulative_share)
      .def_property_readonly("loadings",
                             [](const PcaModel& m_) { return to_rows(m_.loadings); })
      .def_property_readonly("correlation",
                             [](const PcaModel& m_) { return to_rows(m_.correlation); });

  py::class_<RotatedModel>(m, "RotatedModel")
      .def_readonly("feature_names", &RotatedModel::feature_names)
      .def_property_readonly(
          "rotated_loadings",
          [](const RotatedModel& rm) { return to_rows(rm.rotated_loadings); })
      .def_property_readonly("rotation",
                             [](const RotatedModel& rm) { return to_rows(rm.rotation); })
      .def_property_readonly("score_coefficients", [](const RotatedModel& rm) {
        return to_rows(rm.score_coefficients);
      });

  m.def(
      "fit_pca",
      [](const Dataset& ds, std::vector<std::string> features) {
        if (features.empty()) features = ds.feature_names;
        return fit_pca(ds, features);
      },
      py::arg("dataset"), py::arg("features") = std::vector<std::string>{});

  m.def(
      "select_components",
      [](const PcaModel& model, const std::string& rule, double threshold) {
        if (rule == "kaiser")
          return select_components(model, ComponentRule::KaiserUnitEigenvalue);
        if (rule == "cumulative_share")
          return select_components(model, ComponentRule::CumulativeShare, threshold);
        fail(Errc::InvalidConfig, "rule must be 'kaiser' or 'cumulative_share'");
      },
      py::arg("model"), py::arg("rule") = "kaiser", py::arg("threshold") = 0.75);

  m.def(
      "varimax_rotate",
      [](const PcaModel& model, int k, bool kaiser_normalize) {
        auto rm = varimax_rotate(model, k, kaiser_normalize);
        rm.score_coefficients = score_coefficients(rm, model.correlation);
        return rm;
      },
      py::arg("model"), py::arg("k"), py::arg("kaiser_normalize") = true,
      "Varimax rotation of the first k components, with regression-method "
      "score coefficients attached.");

  // ---- clustering -----------------------------------------------------------
  m.def(
      "cluster",
      [](const Dataset& ds, const std::string& linkage, int k) {
        Matrix z = standardize(ds.feature_matrix());
        auto dend = agglomerate(distance_matrix(z), linkage_from_string(linkage));
        auto assign = cut(dend, k);
        py::dict out;
        std::vector<py::tuple> merges;
        for (const auto& mg : dend.merges)
          merges.push_back(py::make_tuple(mg.left, mg.right, mg.height, mg.size));
        out["merges"] = merges;
        out["assignment"] = assign;
        std::vector<std::string> labels;
        for (const auto& r : ds.rows) labels.push_back(r.company_id);
        out["dot"] = to_dot(dend, labels);
        return out;
      },
      py::arg("dataset"), py::arg("linkage") = "single", py::arg("k") = 2,
      "Agglomerative clustering over standardized ratios.");

  // ---- chaid ------------------------------------------------------------------
  py::class_<ChaidTree>(m, "ChaidTree")
      .def_property_readonly("n_nodes",
                             [](const ChaidTree& t) { return t.nodes.size(); })
      .def_property_readonly("root_predictor",
                             [](const ChaidTree& t) -> py::object {
                               if (!t.nodes[0].split) return py::none();
                               return py::cast(t.nodes[0].split->predictor);
                             })
      .def("rules_text", [](const ChaidTree& t) { return rules_text(t); })
      .def("to_json", [](const ChaidTree& t) { return to_json(t); })
      .def("to_dot", [](const ChaidTree& t) { return to_dot(t); })
      .def(
          "classify",
          [](const ChaidTree& t, const py::dict& values) {
            auto p = classify(t, ratios_from_dict(values));
            return py::make_tuple(std::string(to_string(p.predicted)), p.leaf_id);
          },
          py::arg("values"), "Route one ratio dict to (label, leaf id).");

  m.def(
      "fit_chaid",
      [](const Dataset& ds, std::vector<std::string> features, double alpha_merge,
         double alpha_split, int max_depth, int min_node, int min_child, int bins,
         bool bonferroni) {
        if (features.empty()) features = ds.feature_names;
        ChaidParams params;
        params.alpha_merge = alpha_merge;
        params.alpha_split = alpha_split;
        params.max_depth = max_depth;
        params.min_node = min_node;
        params.min_child = min_child;
        params.bins = bins;
        params.bonferroni = bonferroni;
        return grow_tree(ds, features, params);
      },
      py::arg("dataset"), py::arg("features") = std::vector<std::string>{},
      py::arg("alpha_merge") = 0.05, py::arg("alpha_split") = 0.05, py::arg("max_depth") = 3,
      py::arg("min_node") = 10, py::arg("min_child") = 5, py::arg("bins") = 10,
      py::arg("bonferroni") = true);

  // ---- logit ---------------------------------------------------------------------
  py::class_<LogitFit>(m, "LogitFit")
      .def_readonly("coef_names", &LogitFit::coef_names)
      .def_readonly("beta", &LogitFit::beta)
      .def_readonly("std_errors", &LogitFit::std_errors)
      .def_readonly("log_likelihood", &LogitFit::log_likelihood)
      .def_readonly("restricted_log_likelihood", &LogitFit::restricted_log_likelihood)
      .def_readonly("iterations", &LogitFit::iterations)
      .def_readonly("converged", &LogitFit::converged)
      .def_readonly("n_obs", &LogitFit::n_obs)
      .def_readonly("n_dep1", &LogitFit::n_dep1)
      .def("statistics",
           [](const LogitFit& fit) { return stats_dict(fit, fit_statistics(fit)); })
      .def("text", [](const LogitFit& fit) { return fit_text(fit, fit_statistics(fit)); });

  m.def(
      "fit_logit",
      [](const Dataset& ds, std::vector<std::string> features, bool intercept) {
        LogitSpec spec;
        spec.feature_names = features.empty() ? ds.feature_names : std::move(features);
        spec.include_intercept = intercept;
        return fit_logit(ds, spec);
      },
      py::arg("dataset"), py::arg("features") = std::vector<std::string>{},
      py::arg("intercept") = true);

  m.def(
      "predict_prob",
      [](const LogitFit& fit, const py::dict& values) {
        LogitSpec spec;
        spec.feature_names = fit.coef_names;
        if (!spec.feature_names.empty() && spec.feature_names.back() == "C") {
          spec.feature_names.pop_back();
          spec.include_intercept = true;
        } else {
          spec.include_intercept = false;
        }
        return predict_prob(fit.beta, ratios_from_dict(values), spec);
      },
      py::arg("fit"), py::arg("values"),
      "Distress probability for one ratio dict under a fitted logit.");

  m.def("classify_cutoff",
        [](double prob, double cutoff) { return std::string(to_string(classify_cutoff(prob, cutoff))); },
        py::arg("prob"), py::arg("cutoff") = 0.5);

  m.def(
      "run_pipeline",
      [](const std::string& input_path, const std::string& out_dir,
         std::vector<std::string> analyses, const std::string& linkage, int k, double cutoff,
         double corr_threshold) {
        PipelineConfig cfg;
        cfg.input_path = input_path;
        cfg.out_dir = out_dir;
        if (!analyses.empty()) cfg.analyses = std::move(analyses);
        cfg.linkage = linkage_from_string(linkage);
        cfg.k = k;
        cfg.cutoff = cutoff;
        cfg.corr_threshold = corr_threshold;
        auto rep = run_pipeline(cfg);
        return py::make_tuple(rep.json, rep.warnings);
      },
      py::arg("input_path"), py::arg("out_dir") = std::string{},
      py::arg("analyses") = std::vector<std::string>{}, py::arg("linkage") = "single",
      py::arg("k") = 2, py::arg("cutoff") = 0.5, py::arg("corr_threshold") = 0.75,
      "Run the full analysis pipeline; returns (report_json, warnings).");
}
