#include "distresslab/finstat.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include "distresslab/errors.hpp"

namespace distress {

int ratio_index(std::string_view code) {
  if (code.size() >= 2 && (code[0] == 'I' || code[0] == 'i')) {
    int n = 0;
    auto [ptr, ec] = std::from_chars(code.data() + 1, code.data() + code.size(), n);
    if (ec == std::errc() && ptr == code.data() + code.size() && n >= 1 && n <= kRatioCount)
      return n - 1;
  }
  fail(Errc::InvalidFeature, "unknown ratio code '" + std::string(code) + "'");
}

std::string ratio_code(int index) { return "I" + std::to_string(index + 1); }

std::vector<std::string> all_ratio_codes() {
  std::vector<std::string> codes;
  codes.reserve(kRatioCount);
  for (int i = 0; i < kRatioCount; ++i) codes.push_back(ratio_code(i));
  return codes;
}

const char* to_string(Label l) { return l == Label::Healthy ? "healthy" : "distressed"; }

const char* to_string(DistressReason r) {
  switch (r) {
    case DistressReason::None: return "none";
    case DistressReason::TwoYearLosses: return "two_year_losses";
    case DistressReason::TwoYearUnpaidObligations: return "two_year_unpaid_obligations";
    case DistressReason::CurrentYearLoss: return "current_year_loss";
  }
  return "none";
}

std::vector<int> Dataset::feature_indices() const {
  std::vector<int> idx;
  idx.reserve(feature_names.size());
  for (const auto& name : feature_names) idx.push_back(ratio_index(name));
  return idx;
}

Matrix Dataset::feature_matrix() const {
  const auto idx = feature_indices();
  Matrix m(rows.size(), idx.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < idx.size(); ++c) {
      if (!rows[r].ratios.is_valid(idx[c]))
        fail(Errc::InvalidFeature, "company '" + rows[r].company_id + "' has no valid " +
                                       feature_names[c] + "; exclude or impute first");
      m(r, c) = rows[r].ratios[idx[c]];
    }
  return m;
}

std::size_t Dataset::count(Label l) const {
  std::size_t n = 0;
  for (const auto& row : rows)
    if (row.health.label == l) ++n;
  return n;
}

bool Dataset::single_class() const {
  return count(Label::Healthy) == 0 || count(Label::Distressed) == 0;
}

// ---------------------------------------------------------------------------
// CSV parsing

namespace {

const std::array<std::string, 14> kColumns = {
    "company_id",     "year",
    "turnover",       "net_profit_loss",
    "total_assets",   "equity",
    "total_debts",    "current_assets",
    "current_liabilities", "working_capital",
    "employees",      "operating_revenue",
    "unpaid_obligations",  "loss_prior_year"};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      cells.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return cells;
}

double parse_number(const std::string& cell, std::size_t row, const std::string& col) {
  if (cell.empty())
    fail(Errc::MalformedNumber, "empty cell at row " + std::to_string(row) + ", column " + col);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
    fail(Errc::MalformedNumber,
         "'" + cell + "' at row " + std::to_string(row) + ", column " + col);
  return v;
}

long parse_count(const std::string& cell, std::size_t row, const std::string& col) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || v < 0)
    fail(Errc::MalformedNumber,
         "'" + cell + "' at row " + std::to_string(row) + ", column " + col);
  return v;
}

bool parse_flag(const std::string& cell, std::size_t row, const std::string& col) {
  if (cell == "0") return false;
  if (cell == "1") return true;
  fail(Errc::MalformedNumber,
       "'" + cell + "' at row " + std::to_string(row) + ", column " + col + " (expected 0/1)");
}

struct RawRow {
  std::size_t line_no;
  YearFigures fig;
  bool unpaid_obligations;
  bool loss_prior_year;
};

}  // namespace

std::vector<CompanyRecord> parse_statements(std::string_view csv_text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= csv_text.size(); ++i) {
    if (i == csv_text.size() || csv_text[i] == '\n') {
      std::string_view line = csv_text.substr(start, i - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!trim(line).empty()) lines.push_back(line);
      start = i + 1;
    }
  }
  if (lines.empty()) fail(Errc::MissingColumn, "empty input, header row required");

  auto header = split_csv_line(lines[0]);
  std::map<std::string, std::size_t> col_of;
  for (std::size_t i = 0; i < header.size(); ++i) col_of[header[i]] = i;
  for (const auto& name : kColumns)
    if (!col_of.count(name)) fail(Errc::MissingColumn, "column '" + name + "' not in header");

  // company_id -> rows, input order preserved
  std::vector<std::string> order;
  std::map<std::string, std::vector<RawRow>> by_company;

  for (std::size_t li = 1; li < lines.size(); ++li) {
    auto cells = split_csv_line(lines[li]);
    if (cells.size() < header.size())
      fail(Errc::MissingColumn, "row " + std::to_string(li + 1) + " has " +
                                    std::to_string(cells.size()) + " cells, expected " +
                                    std::to_string(header.size()));
    auto cell = [&](const std::string& col) -> const std::string& { return cells[col_of[col]]; };

    RawRow raw;
    raw.line_no = li + 1;
    std::string id = cell("company_id");
    if (id.empty()) fail(Errc::MalformedNumber, "empty company_id at row " + std::to_string(li + 1));
    raw.fig.year = static_cast<int>(parse_count(cell("year"), li + 1, "year"));
    raw.fig.turnover = parse_number(cell("turnover"), li + 1, "turnover");
    raw.fig.net_profit_loss = parse_number(cell("net_profit_loss"), li + 1, "net_profit_loss");
    raw.fig.total_assets = parse_number(cell("total_assets"), li + 1, "total_assets");
    raw.fig.equity = parse_number(cell("equity"), li + 1, "equity");
    raw.fig.total_debts = parse_number(cell("total_debts"), li + 1, "total_debts");
    raw.fig.current_assets = parse_number(cell("current_assets"), li + 1, "current_assets");
    raw.fig.current_liabilities =
        parse_number(cell("current_liabilities"), li + 1, "current_liabilities");
    raw.fig.working_capital = parse_number(cell("working_capital"), li + 1, "working_capital");
    raw.fig.employees = parse_count(cell("employees"), li + 1, "employees");
    raw.fig.operating_revenue =
        parse_number(cell("operating_revenue"), li + 1, "operating_revenue");
    raw.unpaid_obligations = parse_flag(cell("unpaid_obligations"), li + 1, "unpaid_obligations");
    raw.loss_prior_year = parse_flag(cell("loss_prior_year"), li + 1, "loss_prior_year");

    auto it = by_company.find(id);
    if (it == by_company.end()) {
      order.push_back(id);
      by_company[id].push_back(raw);
    } else {
      for (const auto& existing : it->second)
        if (existing.fig.year == raw.fig.year)
          fail(Errc::DuplicateCompanyYear,
               "company '" + id + "' has two rows for year " + std::to_string(raw.fig.year));
      it->second.push_back(raw);
    }
  }

  std::vector<CompanyRecord> records;
  records.reserve(order.size());
  for (const auto& id : order) {
    auto& rows = by_company[id];
    if (rows.size() != 2)
      fail(Errc::MissingYearPair, "company '" + id + "' has " + std::to_string(rows.size()) +
                                      " year rows, expected exactly 2");
    if (rows[0].fig.year > rows[1].fig.year) std::swap(rows[0], rows[1]);
    if (rows[1].fig.year != rows[0].fig.year + 1)
      fail(Errc::MissingYearPair, "company '" + id + "' years " +
                                      std::to_string(rows[0].fig.year) + " and " +
                                      std::to_string(rows[1].fig.year) + " are not consecutive");
    CompanyRecord rec;
    rec.company_id = id;
    rec.year_prev = rows[0].fig;
    rec.year_cur = rows[1].fig;
    rec.unpaid_obligations_prev = rows[0].unpaid_obligations;
    rec.unpaid_obligations_cur = rows[1].unpaid_obligations;
    rec.loss_prev_prev = rows[0].loss_prior_year;  // only meaningful on the earlier row
    records.push_back(std::move(rec));
  }
  return records;
}

// ---------------------------------------------------------------------------
// Ratios

namespace {

// Stores num/den, or flags the ratio invalid when den == 0.
void set_ratio(RatioVector& rv, int idx, double num, double den, double scale = 1.0) {
  if (den == 0.0) {
    rv.values[idx] = 0.0;
    rv.valid[idx] = false;
  } else {
    rv.values[idx] = num / den * scale;
    rv.valid[idx] = true;
  }
}

}  // namespace

RatioVector compute_ratios(const CompanyRecord& rec) {
  const YearFigures& cur = rec.year_cur;
  const YearFigures& prev = rec.year_prev;
  if (cur.total_assets <= 0.0)
    fail(Errc::NonPositiveTotalAssets,
         "company '" + rec.company_id + "' total_assets " + std::to_string(cur.total_assets));

  RatioVector rv;
  const double employees = static_cast<double>(cur.employees);
  set_ratio(rv, 0, cur.net_profit_loss, cur.turnover, 100.0);       // I1 profit margin
  set_ratio(rv, 1, cur.net_profit_loss, cur.total_assets, 100.0);   // I2 return on assets
  set_ratio(rv, 2, cur.net_profit_loss, cur.equity, 100.0);         // I3 return on equity
  set_ratio(rv, 3, cur.net_profit_loss, employees);                 // I4 profit per employee
  set_ratio(rv, 4, cur.operating_revenue, employees);               // I5 operating revenue per employee
  set_ratio(rv, 5, cur.current_assets, cur.current_liabilities);    // I6 current ratio
  set_ratio(rv, 6, cur.total_debts, cur.equity, 100.0);             // I7 debts on equity
  set_ratio(rv, 7, cur.total_debts, cur.total_assets, 100.0);       // I8 debts on total assets
  set_ratio(rv, 8, cur.working_capital, employees);                 // I9 working capital per employee
  set_ratio(rv, 9, cur.total_assets, employees);                    // I10 total assets per employee
  set_ratio(rv, 10, cur.net_profit_loss - prev.net_profit_loss, prev.net_profit_loss);  // I11
  set_ratio(rv, 11, cur.total_assets - prev.total_assets, prev.total_assets);           // I12
  set_ratio(rv, 12, cur.turnover - prev.turnover, prev.turnover);                       // I13
  rv.values[13] = std::log(cur.total_assets);                       // I14 company size
  rv.valid[13] = true;
  return rv;
}

bool i11_sign_caveat(const CompanyRecord& rec) { return rec.year_prev.net_profit_loss < 0.0; }

HealthLabel label_company(const CompanyRecord& rec) {
  const bool loss_cur = rec.year_cur.net_profit_loss < 0.0;
  const bool loss_prev = rec.year_prev.net_profit_loss < 0.0;
  if ((loss_cur && loss_prev) || (loss_prev && rec.loss_prev_prev))
    return {Label::Distressed, DistressReason::TwoYearLosses};
  if (rec.unpaid_obligations_cur && rec.unpaid_obligations_prev)
    return {Label::Distressed, DistressReason::TwoYearUnpaidObligations};
  if (loss_cur) return {Label::Distressed, DistressReason::CurrentYearLoss};
  return {Label::Healthy, DistressReason::None};
}

DatasetBuild build_dataset(const std::vector<CompanyRecord>& records,
                           const std::vector<std::string>& features, MissingPolicy policy,
                           bool require_both_labels) {
  if (features.empty()) fail(Errc::InvalidFeature, "feature list is empty");
  std::vector<int> idx;
  idx.reserve(features.size());
  for (const auto& f : features) idx.push_back(ratio_index(f));

  DatasetBuild out;
  out.dataset.feature_names = features;

  struct Pending {
    DatasetRow row;
    std::vector<int> missing;  // positions into idx
  };
  std::vector<Pending> pending;

  for (const auto& rec : records) {
    Pending p;
    p.row.company_id = rec.company_id;
    p.row.health = label_company(rec);
    try {
      p.row.ratios = compute_ratios(rec);
    } catch (const Error& e) {
      if (e.code() == Errc::NonPositiveTotalAssets) {
        out.excluded.push_back({rec.company_id, errc_name(e.code())});
        continue;
      }
      throw;
    }
    for (std::size_t c = 0; c < idx.size(); ++c)
      if (!p.row.ratios.is_valid(idx[c])) p.missing.push_back(static_cast<int>(c));
    pending.push_back(std::move(p));
  }

  if (policy == MissingPolicy::Exclude) {
    for (auto& p : pending) {
      if (p.missing.empty()) {
        out.dataset.rows.push_back(std::move(p.row));
      } else {
        std::string what = "invalid";
        for (int c : p.missing) what += " " + features[c];
        out.excluded.push_back({p.row.company_id, what});
      }
    }
  } else {
    // column means over valid entries
    std::vector<double> sum(idx.size(), 0.0);
    std::vector<std::size_t> cnt(idx.size(), 0);
    for (const auto& p : pending)
      for (std::size_t c = 0; c < idx.size(); ++c)
        if (p.row.ratios.is_valid(idx[c])) {
          sum[c] += p.row.ratios[idx[c]];
          ++cnt[c];
        }
    for (std::size_t c = 0; c < idx.size(); ++c)
      if (cnt[c] == 0 && !pending.empty())
        fail(Errc::DegenerateFeature, "feature " + features[c] + " has no valid entries to impute from");
    for (auto& p : pending) {
      for (int c : p.missing) {
        p.row.ratios.values[idx[c]] = sum[c] / static_cast<double>(cnt[c]);
        p.row.ratios.valid[idx[c]] = true;
      }
      out.dataset.rows.push_back(std::move(p.row));
    }
  }

  if (out.dataset.rows.empty()) fail(Errc::EmptyDataset, "no usable rows after assembly");
  if (require_both_labels && out.dataset.single_class())
    fail(Errc::SingleClassDataset, "all rows carry the same label");
  return out;
}

}  // namespace distress
