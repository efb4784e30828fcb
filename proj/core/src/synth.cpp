#include <algorithm>
#include <cmath>
#include <random>

#include "panelcast/errors.hpp"
#include "panelcast/panel.hpp"

namespace panelcast {

namespace {

double round_to(double value, double step) { return std::round(value / step) / std::round(1.0 / step); }

PoliticalStatus draw_status(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double p = u(rng);
  if (p < 0.45) return PoliticalStatus::Republican;
  if (p < 0.90) return PoliticalStatus::Democrat;
  return PoliticalStatus::Split;
}

// Crime follows
//   c_t = 0.9 c_{t-1} + 0.1 * rate * pop_t / 1e5 + k * (u_{t-1} - u_mean) + noise
// so the equilibrium tracks population and last year's unemployment shock moves
// next year's count. Unemployment is an independent yearly shock around a state
// mean; the other covariates are stationary so later years stay in-distribution.
std::vector<PanelRecord> synthesize_state(std::uint64_t seed, int index, int first_year, int n_years) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  double population = std::exp(uniform(std::log(3.0e6), std::log(6.0e6)));
  const double growth = uniform(-0.003, 0.008);
  const double rate_per_100k = uniform(350.0, 450.0);
  const double unemployment_mean = uniform(5.0, 6.0);
  const double income_mean = uniform(40000.0, 75000.0);
  const double grad_mean = uniform(75.0, 90.0);
  const double male_mean = uniform(48.6, 50.4);
  const double base0 = rate_per_100k * population / 1e5;
  const double unemployment_effect = 0.1 * base0;  // per percentage point

  double unemployment = unemployment_mean;
  double prev_unemployment = unemployment_mean;
  double income = income_mean;
  double grad = grad_mean;
  PoliticalStatus status = draw_status(rng);
  double crime = base0;

  std::vector<PanelRecord> rows;
  rows.reserve(static_cast<std::size_t>(n_years));
  for (int t = 0; t < n_years; ++t) {
    if (t > 0) {
      population *= 1.0 + growth + 0.002 * normal(rng);
      prev_unemployment = unemployment;
      unemployment = std::clamp(unemployment_mean + normal(rng), 2.0, 15.0);
      income = income_mean + 0.8 * (income - income_mean) + 0.01 * income_mean * normal(rng);
      grad = std::clamp(grad_mean + 0.8 * (grad - grad_mean) + 0.5 * normal(rng), 50.0, 99.0);
      if (unit(rng) < 0.15) status = draw_status(rng);
      const double base = rate_per_100k * population / 1e5;
      crime = 0.9 * crime + 0.1 * base + unemployment_effect * (prev_unemployment - unemployment_mean) +
              0.01 * base * normal(rng);
      crime = std::max(crime, 0.0);
    }
    const double male = round_to(male_mean + 0.05 * normal(rng), 0.01);

    PanelRecord r;
    r.state = std::string(kStateCodes[static_cast<std::size_t>(index)]);
    r.year = first_year + t;
    r.violent_crime = std::round(crime);
    r.population = std::round(population);
    r.unemployment_rate = round_to(unemployment, 0.1);
    r.median_income = std::round(income);
    r.hs_grad_rate = round_to(grad, 0.1);
    r.political_status = status;
    r.pct_male = male;
    r.pct_female = round_to(100.0 - male, 0.01);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

PanelDataset synthesize_panel(std::uint64_t seed, int n_states, int first_year, int n_years) {
  if (n_states < 1 || n_states > static_cast<int>(kStateCodes.size())) {
    throw InvalidArgument("n_states must be in [1, 50], got " + std::to_string(n_states));
  }
  if (n_years < 1) throw InvalidArgument("n_years must be >= 1, got " + std::to_string(n_years));

  std::vector<PanelRecord> records;
  records.reserve(static_cast<std::size_t>(n_states) * static_cast<std::size_t>(n_years));
  for (int s = 0; s < n_states; ++s) {
    auto rows = synthesize_state(seed, s, first_year, n_years);
    records.insert(records.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
  }
  return PanelDataset(std::move(records));
}

}  // namespace panelcast
