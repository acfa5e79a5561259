#pragma once

// Within-subject analysis of trial measures and survey responses.

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace aeroplan {

// subjects x conditions, complete.
struct MeasureTable {
  std::vector<std::string> subjects;
  std::vector<std::string> conditions;
  std::vector<std::vector<double>> values;  // values[subject][condition]

  std::size_t n() const { return values.size(); }
  std::size_t k() const { return conditions.size(); }

  // Throws kInvalidArgument: fewer than 2 subjects or conditions, ragged
  // rows, non-finite values, label counts that do not match.
  void validate() const;

  static MeasureTable from_rows(std::vector<std::vector<double>> rows,
                                std::vector<std::string> conditions = {});
};

struct AnovaResult {
  double F = 0.0;
  int df1 = 0;
  int df2 = 0;
  double p = 1.0;
  double ss_conditions = 0.0;
  double ss_subjects = 0.0;
  double ss_error = 0.0;
  double ss_total = 0.0;
  double ms_error = 0.0;
  // Zero error variance with a real condition effect: F is infinite and p
  // is reported as 0.
  bool degenerate = false;
  std::vector<double> means;
  std::vector<double> ci_half_width;  // 95%, from the error mean square
};

// One-way repeated-measures ANOVA (sphericity assumed).
AnovaResult rm_anova(const MeasureTable& table);

struct TukeyResult {
  std::vector<std::vector<double>> q;  // studentized mean differences
  std::vector<std::vector<double>> p;  // symmetric, unit diagonal
};

// All pairs, using the ANOVA error mean square and df2. Throws
// kDegenerateVariance when that error term is zero but means differ.
TukeyResult tukey_hsd(const MeasureTable& table);
TukeyResult tukey_hsd(const MeasureTable& table, const AnovaResult& anova);

// items[subject][item]. Throws kInvalidArgument for fewer than 2 items or
// subjects, kZeroTotalVariance when total scores do not vary.
double cronbach_alpha(const std::vector<std::vector<double>>& items);

inline constexpr int kLikertMin = 1;
inline constexpr int kLikertMax = 7;
inline constexpr std::size_t kReverseItem = 3;  // zero-based: the fourth item

struct LikertResponse {
  std::array<int, 5> items{};

  // Throws kInvalidArgument for a score outside 1..7.
  void validate() const;
  // The usability items with the reverse-coded one inverted.
  std::array<double, 4> usability_items() const;
};

int reverse_score(int score);
// Sum of items 1-4 after inversion, range 4..28.
double usability_aggregate(const LikertResponse& response);

struct SurveyRow {
  std::string subject;
  std::string interface;
  LikertResponse response;
};

// --- File formats -----------------------------------------------------------------

// Long format with header subject,condition,measure,value. Repeated cells
// for one subject and condition are averaged. Conditions keep first-seen
// order. Throws kInvalidArgument on malformed rows or an incomplete table.
MeasureTable read_measure_table(std::istream& in, const std::string& measure);

// Header subject,interface,q1,q2,q3,q4,q5.
std::vector<SurveyRow> read_survey(std::istream& in);
MeasureTable usability_table(const std::vector<SurveyRow>& rows);
// Per-response usability items (reverse item inverted), for Cronbach's alpha.
std::vector<std::vector<double>> usability_item_matrix(const std::vector<SurveyRow>& rows);

struct StatReport {
  std::string measure;
  MeasureTable table;
  AnovaResult anova;
  std::optional<TukeyResult> tukey;
  std::optional<double> alpha;
};

StatReport analyze(const std::string& measure, MeasureTable table,
                   std::optional<double> alpha = std::nullopt);

// "p < 0.0001" below that threshold, otherwise "p = 0.xxxx".
std::string format_p(double p);
std::string render_text(const StatReport& report);
void write_report_csv(std::ostream& out, const StatReport& report);
// condition,mean,ci_low,ci_high
void write_plot_data(std::ostream& out, const StatReport& report);

}  // namespace aeroplan
