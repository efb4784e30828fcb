#include "panelcast/panel.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include "panelcast/csv.hpp"
#include "panelcast/errors.hpp"

namespace panelcast {

namespace {

constexpr std::size_t kColumnCount = 10;
constexpr double kGenderSumTolerance = 0.5;

bool record_less(const PanelRecord& a, const PanelRecord& b) {
  if (a.state != b.state) return a.state < b.state;
  return a.year < b.year;
}

bool is_state_code(std::string_view s) {
  return s.size() == 2 && std::all_of(s.begin(), s.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

bool in_percent_range(double v) { return v >= 0.0 && v <= 100.0; }

}  // namespace

char to_char(PoliticalStatus status) noexcept { return static_cast<char>(status); }

PanelDataset::PanelDataset(std::vector<PanelRecord> records) : records_(std::move(records)) {
  std::stable_sort(records_.begin(), records_.end(), record_less);
  for (const auto& r : records_) {
    if (states_.empty() || states_.back() != r.state) states_.push_back(r.state);
  }
  if (!records_.empty()) {
    const auto [lo, hi] = std::minmax_element(
        records_.begin(), records_.end(),
        [](const PanelRecord& a, const PanelRecord& b) { return a.year < b.year; });
    year_range_ = {lo->year, hi->year};
  }
}

std::span<const PanelRecord> PanelDataset::state_records(std::string_view state) const {
  const auto lo = std::lower_bound(records_.begin(), records_.end(), state,
                                   [](const PanelRecord& r, std::string_view s) { return r.state < s; });
  auto hi = lo;
  while (hi != records_.end() && hi->state == state) ++hi;
  return {lo, hi};
}

PanelDataset read_panel(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw MalformedRow(1, "missing header");
  ++line_no;
  std::string_view header = line;
  if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
  if (csv::trim(header) != kPanelCsvHeader) {
    throw MalformedRow(line_no, "header must be exactly '" + std::string(kPanelCsvHeader) + "'");
  }

  std::vector<PanelRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != kColumnCount) {
      throw MalformedRow(line_no, "expected " + std::to_string(kColumnCount) + " columns, found " +
                                      std::to_string(fields.size()));
    }
    auto number = [&](std::size_t col, const char* name) {
      const auto v = csv::parse_double(fields[col]);
      if (!v) {
        throw MalformedRow(line_no, std::string("cannot parse ") + name + " '" +
                                        std::string(csv::trim(fields[col])) + "'");
      }
      return *v;
    };

    PanelRecord r;
    r.state = std::string(csv::trim(fields[0]));
    const auto year = csv::parse_int(fields[1]);
    if (!year) throw MalformedRow(line_no, "cannot parse year '" + std::string(csv::trim(fields[1])) + "'");
    r.year = static_cast<int>(*year);
    r.violent_crime = number(2, "violent_crime");
    r.population = number(3, "population");
    r.unemployment_rate = number(4, "unemployment_rate");
    r.median_income = number(5, "median_income");
    r.hs_grad_rate = number(6, "hs_grad_rate");
    const auto status = csv::trim(fields[7]);
    if (status == "R") {
      r.political_status = PoliticalStatus::Republican;
    } else if (status == "D") {
      r.political_status = PoliticalStatus::Democrat;
    } else if (status == "S") {
      r.political_status = PoliticalStatus::Split;
    } else {
      throw UnknownPoliticalStatus(line_no, std::string(status));
    }
    r.pct_male = number(8, "pct_male");
    r.pct_female = number(9, "pct_female");
    records.push_back(std::move(r));
  }

  PanelDataset dataset(std::move(records));
  const auto& sorted = dataset.records();
  const auto dup = std::adjacent_find(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.state == b.state && a.year == b.year;
  });
  if (dup != sorted.end()) throw DuplicateStateYear(dup->state, dup->year);
  return dataset;
}

PanelDataset load_panel(const std::filesystem::path& path) {
  auto in = csv::open_input(path);
  return read_panel(in);
}

void write_panel(const PanelDataset& dataset, std::ostream& out) {
  out << kPanelCsvHeader << '\n';
  for (const auto& r : dataset.records()) {
    out << r.state << ',' << r.year << ',' << csv::format_double(r.violent_crime) << ','
        << csv::format_double(r.population) << ',' << csv::format_double(r.unemployment_rate) << ','
        << csv::format_double(r.median_income) << ',' << csv::format_double(r.hs_grad_rate) << ','
        << to_char(r.political_status) << ',' << csv::format_double(r.pct_male) << ','
        << csv::format_double(r.pct_female) << '\n';
  }
}

void write_panel(const PanelDataset& dataset, const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  write_panel(dataset, out);
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

ValidationReport validate(const PanelDataset& dataset) {
  ValidationReport report;
  auto add = [&](const PanelRecord& r, std::string field, std::string message) {
    report.errors.push_back({r.state, r.year, std::move(field), std::move(message)});
  };

  for (const auto& r : dataset.records()) {
    if (!is_state_code(r.state)) add(r, "state", "must be a 2-letter uppercase code");
    if (!(r.violent_crime >= 0.0) || !std::isfinite(r.violent_crime)) {
      add(r, "violent_crime", "must be a non-negative count");
    }
    if (!(r.population > 0.0) || !std::isfinite(r.population)) add(r, "population", "must be positive");
    if (!in_percent_range(r.unemployment_rate)) add(r, "unemployment_rate", "must be in [0,100]");
    if (!(r.median_income > 0.0) || !std::isfinite(r.median_income)) {
      add(r, "median_income", "must be positive");
    }
    if (!in_percent_range(r.hs_grad_rate)) add(r, "hs_grad_rate", "must be in [0,100]");
    if (!in_percent_range(r.pct_male)) add(r, "pct_male", "must be in [0,100]");
    if (!in_percent_range(r.pct_female)) add(r, "pct_female", "must be in [0,100]");
    if (!(std::abs(r.pct_male + r.pct_female - 100.0) <= kGenderSumTolerance)) {
      add(r, "pct_male+pct_female", "gender percentages must sum to 100 within 0.5");
    }
  }

  const auto [first_year, last_year] = dataset.year_range();
  for (const auto& state : dataset.states()) {
    const auto rows = dataset.state_records(state);
    std::set<int> seen;
    for (const auto& r : rows) {
      if (!seen.insert(r.year).second) add(r, "year", "duplicate state-year record");
    }
    for (int year = first_year; year <= last_year; ++year) {
      if (!seen.contains(year)) {
        report.errors.push_back({state, year, "year", "missing year; panel must be contiguous over [" +
                                                          std::to_string(first_year) + "," +
                                                          std::to_string(last_year) + "]"});
      }
    }
  }
  return report;
}

}  // namespace panelcast
