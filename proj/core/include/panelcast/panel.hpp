#ifndef PANELCAST_PANEL_HPP_
#define PANELCAST_PANEL_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace panelcast {

enum class PoliticalStatus : char { Republican = 'R', Democrat = 'D', Split = 'S' };

/// One state-year observation.
struct PanelRecord {
  std::string state;
  int year = 0;
  double violent_crime = 0.0;
  double population = 0.0;
  double unemployment_rate = 0.0;  // percent
  double median_income = 0.0;      // USD
  double hs_grad_rate = 0.0;       // percent
  PoliticalStatus political_status = PoliticalStatus::Split;
  double pct_male = 0.0;
  double pct_female = 0.0;

  friend bool operator==(const PanelRecord&, const PanelRecord&) = default;
};

/// Records sorted by (state, year). Construction does not enforce the panel
/// invariants; run `validate` for that.
class PanelDataset {
 public:
  PanelDataset() = default;
  explicit PanelDataset(std::vector<PanelRecord> records);

  const std::vector<PanelRecord>& records() const noexcept { return records_; }
  const std::vector<std::string>& states() const noexcept { return states_; }
  /// Inclusive [first_year, last_year] over all records; {0, -1} when empty.
  std::pair<int, int> year_range() const noexcept { return year_range_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  /// Contiguous slice of records belonging to `state` (empty if absent).
  std::span<const PanelRecord> state_records(std::string_view state) const;

  friend bool operator==(const PanelDataset&, const PanelDataset&) = default;

 private:
  std::vector<PanelRecord> records_;
  std::vector<std::string> states_;
  std::pair<int, int> year_range_{0, -1};
};

struct ValidationIssue {
  std::string state;
  int year = 0;
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;
  bool is_valid() const noexcept { return errors.empty(); }
};

inline constexpr std::string_view kPanelCsvHeader =
    "state,year,violent_crime,population,unemployment_rate,median_income,hs_grad_rate,"
    "political_status,pct_male,pct_female";

/// The fifty state codes in the fixed order used by `synthesize_panel`.
inline constexpr std::array<std::string_view, 50> kStateCodes = {
    "AL", "AK", "AZ", "AR", "CA", "CO", "CT", "DE", "FL", "GA", "HI", "ID", "IL",
    "IN", "IA", "KS", "KY", "LA", "ME", "MD", "MA", "MI", "MN", "MS", "MO", "MT",
    "NE", "NV", "NH", "NJ", "NM", "NY", "NC", "ND", "OH", "OK", "OR", "PA", "RI",
    "SC", "SD", "TN", "TX", "UT", "VT", "VA", "WA", "WV", "WI", "WY"};

/// Parses a panel CSV. Throws MalformedRow, UnknownPoliticalStatus,
/// DuplicateStateYear, or IoError when the file cannot be read.
PanelDataset load_panel(const std::filesystem::path& path);
PanelDataset read_panel(std::istream& in);

/// Writes the CSV form. Numbers use the shortest round-trip representation, so
/// `load_panel(write_panel(d)) == d`.
void write_panel(const PanelDataset& dataset, const std::filesystem::path& path);
void write_panel(const PanelDataset& dataset, std::ostream& out);

/// Collects every record- and panel-level invariant violation.
ValidationReport validate(const PanelDataset& dataset);

/// Deterministic synthetic panel with a learnable AR(1) crime signal.
PanelDataset synthesize_panel(std::uint64_t seed, int n_states, int first_year, int n_years);

char to_char(PoliticalStatus status) noexcept;

}  // namespace panelcast

#endif  // PANELCAST_PANEL_HPP_
