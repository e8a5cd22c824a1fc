#include "distresslab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <vector>

#include "distresslab/errors.hpp"

namespace distress {

namespace {

// Explicit draws on top of mt19937_64 so output does not depend on the
// standard library's distribution implementations.
struct Rng {
  std::mt19937_64 engine;

  explicit Rng(std::uint64_t seed) : engine(seed) {}

  double uniform() {
    // 53-bit mantissa in [0, 1)
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal(double mean, double sd) {
    // Box-Muller, one value per call
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    return mean + sd * z;
  }

  double lognormal(double mu, double sigma) { return std::exp(normal(mu, sigma)); }

  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(uniform() * (hi - lo + 1));
  }
};

enum class Profile { Healthy, TwoYearLosses, UnpaidObligations, CurrentYearLoss };

std::string money(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string generate_synthetic(std::uint64_t seed, int n, double distress_fraction) {
  if (!(distress_fraction > 0.0 && distress_fraction < 1.0))
    fail(Errc::InvalidFraction, "distress_fraction must lie strictly between 0 and 1");
  if (n < 4) fail(Errc::InvalidConfig, "need at least 4 companies");

  const int n_distressed =
      std::clamp(static_cast<int>(std::llround(distress_fraction * n)), 1, n - 1);

  Rng rng(seed);

  // distress statuses in shuffled positions, reasons cycled
  std::vector<Profile> profiles(static_cast<std::size_t>(n), Profile::Healthy);
  for (int i = 0; i < n_distressed; ++i) {
    switch (i % 3) {
      case 0: profiles[i] = Profile::TwoYearLosses; break;
      case 1: profiles[i] = Profile::UnpaidObligations; break;
      default: profiles[i] = Profile::CurrentYearLoss; break;
    }
  }
  for (int i = n - 1; i > 0; --i)
    std::swap(profiles[i], profiles[rng.uniform_int(0, i)]);

  std::ostringstream os;
  os << "company_id,year,turnover,net_profit_loss,total_assets,equity,total_debts,"
        "current_assets,current_liabilities,working_capital,employees,operating_revenue,"
        "unpaid_obligations,loss_prior_year\n";

  for (int i = 0; i < n; ++i) {
    const Profile profile = profiles[static_cast<std::size_t>(i)];
    char id[16];
    std::snprintf(id, sizeof(id), "SYN%03d", i + 1);

    const double turnover_prev = rng.lognormal(std::log(5.0e6), 0.8);
    const double turnover_growth = std::max(rng.normal(0.05, 0.25), -0.8);
    const double turnover_cur = turnover_prev * (1.0 + turnover_growth);

    const double assets_prev = rng.lognormal(std::log(8.0e6), 0.9);
    const double assets_growth = std::max(rng.normal(0.03, 0.15), -0.6);
    const double assets_cur = assets_prev * (1.0 + assets_growth);

    // distressed firms tend to carry thinner equity, with overlap
    const bool distressed = profile != Profile::Healthy;
    const double equity_frac_cur =
        distressed ? rng.uniform(0.05, 0.5) : rng.uniform(0.2, 0.7);
    const double equity_frac_prev = std::clamp(equity_frac_cur + rng.normal(0.0, 0.05), 0.04, 0.75);

    double margin_prev, margin_cur;
    switch (profile) {
      case Profile::TwoYearLosses:
        margin_prev = rng.uniform(-0.25, -0.02);
        margin_cur = rng.uniform(-0.25, -0.02);
        break;
      case Profile::UnpaidObligations:
        margin_prev = rng.uniform(0.005, 0.12);
        margin_cur = rng.uniform(0.005, 0.12);
        break;
      case Profile::CurrentYearLoss:
        margin_prev = rng.uniform(0.02, 0.15);
        margin_cur = rng.uniform(-0.2, -0.02);
        break;
      case Profile::Healthy:
      default:
        margin_prev = rng.uniform(0.005, 0.18);
        margin_cur = rng.uniform(0.005, 0.18);
        break;
    }

    const bool flags = profile == Profile::UnpaidObligations;

    for (int y = 0; y < 2; ++y) {
      const bool cur = y == 1;
      const double turnover = cur ? turnover_cur : turnover_prev;
      const double assets = cur ? assets_cur : assets_prev;
      const double margin = cur ? margin_cur : margin_prev;
      const double equity = assets * (cur ? equity_frac_cur : equity_frac_prev);
      const double debts = assets - equity;
      const double current_assets = assets * rng.uniform(0.2, 0.6);
      const double current_liabilities = std::max(debts * rng.uniform(0.3, 0.9), 1000.0);
      const double working_capital = current_assets - current_liabilities;
      const long employees =
          std::clamp<long>(static_cast<long>(assets / 1.0e5 * rng.uniform(0.5, 2.0)) + 5, 5, 5000);
      const double operating_revenue = turnover * rng.uniform(0.92, 1.1);
      const double net_pl = margin * turnover;

      os << id << ',' << (cur ? 2008 : 2007) << ',' << money(turnover) << ','
         << money(net_pl) << ',' << money(assets) << ',' << money(equity) << ','
         << money(debts) << ',' << money(current_assets) << ','
         << money(current_liabilities) << ',' << money(working_capital) << ','
         << employees << ',' << money(operating_revenue) << ',' << (flags ? 1 : 0) << ','
         << 0 << '\n';
    }
  }
  return os.str();
}

}  // namespace distress
