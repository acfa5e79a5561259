#include "aeroplan/stats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <limits>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "aeroplan/distributions.hpp"
#include "aeroplan/error.hpp"

namespace aeroplan {

namespace {

constexpr double kRelativeZero = 1e-12;

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct Csv {
  std::map<std::string, std::size_t> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  std::size_t column(const std::string& name) const {
    auto it = columns.find(name);
    if (it == columns.end()) {
      throw Error(ErrorCode::kInvalidArgument, "missing CSV column " + name);
    }
    return it->second;
  }
};

Csv read_csv(std::istream& in) {
  Csv csv;
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (header) {
      for (std::size_t i = 0; i < fields.size(); ++i) csv.columns[fields[i]] = i;
      header = false;
      continue;
    }
    if (fields.size() != csv.columns.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "line " + std::to_string(line_no) + ": expected " +
                      std::to_string(csv.columns.size()) + " fields");
    }
    csv.rows.push_back(std::move(fields));
    csv.line_numbers.push_back(line_no);
  }
  if (header) throw Error(ErrorCode::kInvalidArgument, "empty CSV input");
  return csv;
}

double parse_number(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kInvalidArgument,
              "line " + std::to_string(line_no) + ": not a number: " + s);
}

// Averages repeated (subject, condition) cells into a complete table.
class CellAccumulator {
 public:
  void add(const std::string& subject, const std::string& condition, double v) {
    if (std::find(subjects_.begin(), subjects_.end(), subject) == subjects_.end()) {
      subjects_.push_back(subject);
    }
    if (std::find(conditions_.begin(), conditions_.end(), condition) ==
        conditions_.end()) {
      conditions_.push_back(condition);
    }
    auto& cell = cells_[{subject, condition}];
    cell.first += v;
    cell.second += 1;
  }

  MeasureTable table() const {
    MeasureTable t;
    t.subjects = subjects_;
    t.conditions = conditions_;
    for (const auto& s : subjects_) {
      std::vector<double> row;
      for (const auto& c : conditions_) {
        auto it = cells_.find({s, c});
        if (it == cells_.end()) {
          throw Error(ErrorCode::kInvalidArgument,
                      "incomplete table: no value for subject " + s +
                          " under condition " + c);
        }
        row.push_back(it->second.first / it->second.second);
      }
      t.values.push_back(std::move(row));
    }
    t.validate();
    return t;
  }

 private:
  std::vector<std::string> subjects_;
  std::vector<std::string> conditions_;
  std::map<std::pair<std::string, std::string>, std::pair<double, int>> cells_;
};

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

void MeasureTable::validate() const {
  if (values.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need at least 2 subjects");
  }
  if (conditions.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need at least 2 conditions");
  }
  if (!subjects.empty() && subjects.size() != values.size()) {
    throw Error(ErrorCode::kInvalidArgument, "subject labels do not match rows");
  }
  for (const auto& row : values) {
    if (row.size() != conditions.size()) {
      throw Error(ErrorCode::kInvalidArgument, "ragged measure table");
    }
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kInvalidArgument, "non-finite measurement");
      }
    }
  }
}

MeasureTable MeasureTable::from_rows(std::vector<std::vector<double>> rows,
                                     std::vector<std::string> conditions) {
  MeasureTable t;
  t.values = std::move(rows);
  if (conditions.empty() && !t.values.empty()) {
    for (std::size_t j = 0; j < t.values.front().size(); ++j) {
      conditions.push_back("C" + std::to_string(j + 1));
    }
  }
  t.conditions = std::move(conditions);
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    t.subjects.push_back("S" + std::to_string(i + 1));
  }
  t.validate();
  return t;
}

AnovaResult rm_anova(const MeasureTable& table) {
  table.validate();
  const std::size_t n = table.n();
  const std::size_t k = table.k();
  const auto& x = table.values;

  double grand = 0.0;
  std::vector<double> subj(n, 0.0);
  std::vector<double> cond(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      grand += x[i][j];
      subj[i] += x[i][j];
      cond[j] += x[i][j];
    }
  }
  grand /= static_cast<double>(n * k);
  for (auto& s : subj) s /= static_cast<double>(k);
  for (auto& c : cond) c /= static_cast<double>(n);

  AnovaResult r;
  for (std::size_t i = 0; i < n; ++i) {
    r.ss_subjects += (subj[i] - grand) * (subj[i] - grand);
    for (std::size_t j = 0; j < k; ++j) {
      r.ss_total += (x[i][j] - grand) * (x[i][j] - grand);
      const double e = x[i][j] - subj[i] - cond[j] + grand;
      r.ss_error += e * e;
    }
  }
  r.ss_subjects *= static_cast<double>(k);
  for (std::size_t j = 0; j < k; ++j) {
    r.ss_conditions += (cond[j] - grand) * (cond[j] - grand);
  }
  r.ss_conditions *= static_cast<double>(n);

  r.df1 = static_cast<int>(k - 1);
  r.df2 = static_cast<int>((n - 1) * (k - 1));
  r.means = cond;

  const double zero = kRelativeZero * r.ss_total;
  const bool no_effect = r.ss_conditions <= zero;
  const bool no_error = r.ss_error <= zero;
  r.ms_error = no_error ? 0.0 : r.ss_error / r.df2;
  if (no_effect) {
    r.F = 0.0;
    r.p = 1.0;
  } else if (no_error) {
    r.degenerate = true;
    r.F = std::numeric_limits<double>::infinity();
    r.p = 0.0;
  } else {
    r.F = (r.ss_conditions / r.df1) / r.ms_error;
    r.p = f_sf(r.F, r.df1, r.df2);
  }
  const double half =
      t_quantile(0.975, r.df2) * std::sqrt(r.ms_error / static_cast<double>(n));
  r.ci_half_width.assign(k, half);
  return r;
}

TukeyResult tukey_hsd(const MeasureTable& table) {
  return tukey_hsd(table, rm_anova(table));
}

TukeyResult tukey_hsd(const MeasureTable& table, const AnovaResult& anova) {
  if (anova.degenerate) {
    throw Error(ErrorCode::kDegenerateVariance,
                "error variance is zero while condition means differ");
  }
  const std::size_t k = table.k();
  const double se = std::sqrt(anova.ms_error / static_cast<double>(table.n()));
  TukeyResult r;
  r.q.assign(k, std::vector<double>(k, 0.0));
  r.p.assign(k, std::vector<double>(k, 1.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double diff = std::abs(anova.means[i] - anova.means[j]);
      const double q = se > 0.0 ? diff / se : 0.0;
      const double p = q > 0.0 ? ptukey_sf(q, static_cast<int>(k), anova.df2) : 1.0;
      r.q[i][j] = r.q[j][i] = q;
      r.p[i][j] = r.p[j][i] = p;
    }
  }
  return r;
}

double cronbach_alpha(const std::vector<std::vector<double>>& items) {
  if (items.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "alpha needs at least 2 subjects");
  }
  const std::size_t k = items.front().size();
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "alpha needs at least 2 items");
  std::vector<double> totals;
  std::vector<std::vector<double>> columns(k);
  for (const auto& row : items) {
    if (row.size() != k) throw Error(ErrorCode::kInvalidArgument, "ragged item matrix");
    double t = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      columns[j].push_back(row[j]);
      t += row[j];
    }
    totals.push_back(t);
  }
  const double total_var = sample_variance(totals);
  if (!(total_var > 0.0)) {
    throw Error(ErrorCode::kZeroTotalVariance, "total scores do not vary");
  }
  double item_var = 0.0;
  for (const auto& c : columns) item_var += sample_variance(c);
  const double kk = static_cast<double>(k);
  return kk * (total_var - item_var) / ((kk - 1.0) * total_var);
}

void LikertResponse::validate() const {
  for (int s : items) {
    if (s < kLikertMin || s > kLikertMax) {
      throw Error(ErrorCode::kInvalidArgument,
                  "Likert score " + std::to_string(s) + " outside 1..7");
    }
  }
}

std::array<double, 4> LikertResponse::usability_items() const {
  validate();
  std::array<double, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    out[i] = i == kReverseItem ? reverse_score(items[i]) : items[i];
  }
  return out;
}

int reverse_score(int score) { return kLikertMax + kLikertMin - score; }

double usability_aggregate(const LikertResponse& response) {
  double sum = 0.0;
  for (double v : response.usability_items()) sum += v;
  return sum;
}

MeasureTable read_measure_table(std::istream& in, const std::string& measure) {
  const Csv csv = read_csv(in);
  const std::size_t cs = csv.column("subject");
  const std::size_t cc = csv.column("condition");
  const std::size_t cm = csv.column("measure");
  const std::size_t cv = csv.column("value");
  CellAccumulator acc;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    if (row[cm] != measure) continue;
    acc.add(row[cs], row[cc], parse_number(row[cv], csv.line_numbers[r]));
  }
  return acc.table();
}

std::vector<SurveyRow> read_survey(std::istream& in) {
  const Csv csv = read_csv(in);
  const std::size_t cs = csv.column("subject");
  const std::size_t ci = csv.column("interface");
  std::array<std::size_t, 5> cq{};
  for (std::size_t i = 0; i < 5; ++i) cq[i] = csv.column("q" + std::to_string(i + 1));
  std::vector<SurveyRow> out;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    SurveyRow s{row[cs], row[ci], {}};
    for (std::size_t i = 0; i < 5; ++i) {
      const double v = parse_number(row[cq[i]], csv.line_numbers[r]);
      if (v != std::floor(v)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "line " + std::to_string(csv.line_numbers[r]) +
                        ": Likert scores are integers");
      }
      s.response.items[i] = static_cast<int>(v);
    }
    s.response.validate();
    out.push_back(std::move(s));
  }
  return out;
}

MeasureTable usability_table(const std::vector<SurveyRow>& rows) {
  CellAccumulator acc;
  for (const auto& r : rows) {
    acc.add(r.subject, r.interface, usability_aggregate(r.response));
  }
  return acc.table();
}

std::vector<std::vector<double>> usability_item_matrix(
    const std::vector<SurveyRow>& rows) {
  std::vector<std::vector<double>> out;
  for (const auto& r : rows) {
    const auto items = r.response.usability_items();
    out.emplace_back(items.begin(), items.end());
  }
  return out;
}

StatReport analyze(const std::string& measure, MeasureTable table,
                   std::optional<double> alpha) {
  StatReport r;
  r.measure = measure;
  r.anova = rm_anova(table);
  if (!r.anova.degenerate) r.tukey = tukey_hsd(table, r.anova);
  r.table = std::move(table);
  r.alpha = alpha;
  return r;
}

std::string format_p(double p) {
  if (p < 1e-4) return "p < 0.0001";
  return "p = " + fixed(p);
}

std::string render_text(const StatReport& r) {
  std::ostringstream os;
  const auto& a = r.anova;
  os << r.measure << " (n = " << r.table.n() << ")\n";
  for (std::size_t j = 0; j < r.table.k(); ++j) {
    os << "  " << std::left << std::setw(10) << r.table.conditions[j] << " mean "
       << fixed(a.means[j]) << "  95% CI +/- " << fixed(a.ci_half_width[j]) << '\n';
  }
  os << "F(" << a.df1 << "," << a.df2 << ") = "
     << (a.degenerate ? std::string("inf") : fixed(a.F)) << ", " << format_p(a.p);
  if (a.degenerate) os << " (zero error variance)";
  os << '\n';
  if (r.tukey) {
    os << "Tukey HSD\n";
    for (std::size_t i = 0; i < r.table.k(); ++i) {
      for (std::size_t j = i + 1; j < r.table.k(); ++j) {
        os << "  " << r.table.conditions[i] << " vs " << r.table.conditions[j]
           << ": q = " << fixed(r.tukey->q[i][j]) << ", "
           << format_p(r.tukey->p[i][j]) << '\n';
      }
    }
  }
  if (r.alpha) os << "Cronbach's alpha = " << fixed(*r.alpha) << '\n';
  return os.str();
}

void write_report_csv(std::ostream& out, const StatReport& r) {
  const auto& a = r.anova;
  out << std::setprecision(10);
  out << "measure,term,a,b,value\n";
  out << r.measure << ",F,,," << a.F << '\n';
  out << r.measure << ",df1,,," << a.df1 << '\n';
  out << r.measure << ",df2,,," << a.df2 << '\n';
  out << r.measure << ",p,,," << a.p << '\n';
  for (std::size_t j = 0; j < r.table.k(); ++j) {
    out << r.measure << ",mean," << r.table.conditions[j] << ",," << a.means[j] << '\n';
    out << r.measure << ",ci_half_width," << r.table.conditions[j] << ",,"
        << a.ci_half_width[j] << '\n';
  }
  if (r.tukey) {
    for (std::size_t i = 0; i < r.table.k(); ++i) {
      for (std::size_t j = i + 1; j < r.table.k(); ++j) {
        out << r.measure << ",tukey_p," << r.table.conditions[i] << ','
            << r.table.conditions[j] << ',' << r.tukey->p[i][j] << '\n';
      }
    }
  }
  if (r.alpha) out << r.measure << ",cronbach_alpha,,," << *r.alpha << '\n';
}

void write_plot_data(std::ostream& out, const StatReport& r) {
  out << std::setprecision(10);
  out << "condition,mean,ci_low,ci_high\n";
  for (std::size_t j = 0; j < r.table.k(); ++j) {
    const double m = r.anova.means[j];
    const double h = r.anova.ci_half_width[j];
    out << r.table.conditions[j] << ',' << m << ',' << m - h << ',' << m + h << '\n';
  }
}

}  // namespace aeroplan
