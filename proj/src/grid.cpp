#include "omk/grid.hpp"

#include <cmath>
#include <sstream>

#include "fft_convolve.hpp"
#include "omk/error.hpp"
#include "omk/keldysh.hpp"

namespace omk {

FrequencyWindow lattice_window(double spacing, double lo, double hi) {
  if (!(spacing > 0.0) || !(hi >= lo)) fail(ErrorCode::invalid_argument, "lattice_window: bad range");
  FrequencyWindow w;
  w.spacing = spacing;
  w.first = static_cast<std::int64_t>(std::ceil(lo / spacing - 1e-9));
  const auto last = static_cast<std::int64_t>(std::floor(hi / spacing + 1e-9));
  w.size = last >= w.first ? static_cast<std::size_t>(last - w.first + 1) : 0;
  return w;
}

WindowPlan plan_windows(const Model& m, const WindowOptions& opt) {
  if (!(opt.half_width_factor > 0.0) || !(opt.resolution > 0.0))
    fail(ErrorCode::invalid_argument, "plan_windows: window factors must be positive");
  const LinePair lines = bare_lines(m);
  const Cooperativities c = cooperativities(lines, m.couplings.g_tilde);
  const double km = lines[0].width, kp = lines[1].width;
  double narrow = std::min(km, kp);
  if (c.plus > 0.0) narrow = std::min(narrow, km * std::sqrt(1.0 + c.plus));
  if (c.minus < 0.0 && c.minus > -1.0) narrow = std::min(narrow, km * (1.0 + c.minus));

  WindowPlan plan;
  plan.narrowest_width = narrow;
  const double em = lines[0].energy, ep = lines[1].energy;
  const double h0 = narrow / opt.resolution;
  const auto k = static_cast<std::int64_t>(std::ceil(em / h0));
  plan.spacing = em / static_cast<double>(k);
  const double half_width = opt.half_width_factor * (km + kp);
  const std::size_t want =
      std::max(opt.min_points, static_cast<std::size_t>(std::ceil(2.0 * half_width / plan.spacing)));
  plan.points = detail::next_pow2(want);
  if (plan.points > opt.max_points) {
    std::ostringstream os;
    os << "plan_windows: " << plan.points << " points per window exceed the cap of " << opt.max_points
       << " (narrowest width " << narrow << ")";
    fail(ErrorCode::memory_budget, os.str());
  }
  const std::int64_t cm = k;
  const std::int64_t cp = 2 * k + std::llround((ep - 2.0 * em) / plan.spacing);
  const auto half = static_cast<std::int64_t>(plan.points / 2);
  plan.windows[0] = {plan.spacing, cm - half, plan.points};
  plan.windows[1] = {plan.spacing, cp - half, plan.points};
  return plan;
}

}  // namespace omk
