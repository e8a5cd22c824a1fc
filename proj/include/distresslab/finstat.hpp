#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "distresslab/matrix.hpp"

namespace distress {

// One fiscal year of raw statement lines, in the statement's currency.
struct YearFigures {
  int year = 0;
  double turnover = 0.0;
  double net_profit_loss = 0.0;
  double total_assets = 0.0;
  double equity = 0.0;
  double total_debts = 0.0;
  double current_assets = 0.0;
  double current_liabilities = 0.0;
  double working_capital = 0.0;
  long employees = 0;
  double operating_revenue = 0.0;
};

// Two consecutive fiscal years for one company plus the obligation flags
// needed by the two-consecutive-years distress rules.
struct CompanyRecord {
  std::string company_id;
  YearFigures year_prev;
  YearFigures year_cur;
  bool unpaid_obligations_prev = false;
  bool unpaid_obligations_cur = false;
  bool loss_prev_prev = false;  // loss in the year before year_prev
};

inline constexpr int kRatioCount = 14;

// "I1".."I14" -> 0..13; throws InvalidFeature on anything else.
int ratio_index(std::string_view code);
std::string ratio_code(int index);
std::vector<std::string> all_ratio_codes();

// The 14 ratios for one company-year. A ratio whose denominator was zero
// has valid=false and a 0 placeholder; it must never be used as a number.
struct RatioVector {
  std::array<double, kRatioCount> values{};
  std::array<bool, kRatioCount> valid{};

  double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
  bool is_valid(int i) const { return valid[static_cast<std::size_t>(i)]; }
};

enum class Label { Healthy, Distressed };

enum class DistressReason { None, TwoYearLosses, TwoYearUnpaidObligations, CurrentYearLoss };

struct HealthLabel {
  Label label = Label::Healthy;
  DistressReason reason = DistressReason::None;
};

const char* to_string(Label l);
const char* to_string(DistressReason r);

struct DatasetRow {
  std::string company_id;
  RatioVector ratios;
  HealthLabel health;
};

struct Dataset {
  std::vector<DatasetRow> rows;
  std::vector<std::string> feature_names;  // ordered ratio codes included

  std::vector<int> feature_indices() const;
  // rows x features numeric view over the selected ratios
  Matrix feature_matrix() const;
  std::size_t count(Label l) const;
  bool single_class() const;
};

// Parses the documented CSV schema (header required; exactly two rows
// per company, consecutive years). Input order of companies preserved.
std::vector<CompanyRecord> parse_statements(std::string_view csv_text);

// The 14 ratio definitions, growth rates on (cur - prev)/prev. Requires
// total_assets > 0 in the current year (NonPositiveTotalAssets).
RatioVector compute_ratios(const CompanyRecord& rec);

// True when the growth rate of net profit has a non-interpretable sign
// (prior-year net P/L negative).
bool i11_sign_caveat(const CompanyRecord& rec);

HealthLabel label_company(const CompanyRecord& rec);

enum class MissingPolicy { Exclude, MeanImpute };

struct ExcludedCompany {
  std::string company_id;
  std::string reason;
};

struct DatasetBuild {
  Dataset dataset;
  std::vector<ExcludedCompany> excluded;
};

// Assembles rows with ratios and labels over the selected features.
// Companies with an invalid selected ratio are excluded and reported
// (default) or mean-imputed. require_both_labels adds the
// SingleClassDataset check for callers that will fit a classifier.
DatasetBuild build_dataset(const std::vector<CompanyRecord>& records,
                           const std::vector<std::string>& features,
                           MissingPolicy policy = MissingPolicy::Exclude,
                           bool require_both_labels = false);

}  // namespace distress
