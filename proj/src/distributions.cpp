#include "htband/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace htband {

namespace {

constexpr double kMassTolerance = 1e-12;
constexpr double kMomentTolerance = 1e-9;

std::string fmt_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

void require(bool ok, const std::string& message) {
  if (!ok) {
    throw std::domain_error(message);
  }
}

// (1 - p) delta_0 + p delta_at
RewardDistribution two_point(double p, double at, std::string label) {
  require(p >= 0.0 && p <= 1.0, "atom mass must lie in [0,1]");
  return RewardDistribution({{0.0, 1.0 - p}, {at, p}}, std::move(label));
}

}  // namespace

void HeavyTailParams::validate() const {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw std::domain_error("epsilon must lie in (0,1]");
  }
  if (!(u >= 0.0) || !std::isfinite(u)) {
    throw std::domain_error("u must be finite and >= 0");
  }
}

std::string_view to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::DiracMixture:
      return "dirac-mixture";
    case DistributionKind::NegativeDiracMixture:
      return "negative-dirac-mixture";
    case DistributionKind::PointMass:
      return "point-mass";
  }
  return "unknown";
}

RewardDistribution::RewardDistribution(std::vector<Atom> atoms,
                                       std::string label)
    : atoms_(std::move(atoms)), label_(std::move(label)) {
  if (atoms_.empty()) {
    throw std::domain_error("distribution needs at least one atom");
  }
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (!std::isfinite(a.value)) {
      throw std::domain_error("atom values must be finite");
    }
    if (!(a.mass >= 0.0)) {
      throw std::domain_error("atom masses must be nonnegative");
    }
    total += a.mass;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw std::domain_error("atom masses must sum to 1");
  }

  cumulative_.reserve(atoms_.size());
  double running = 0.0;
  for (const auto& a : atoms_) {
    running += a.mass;
    cumulative_.push_back(running);
  }

  std::size_t support = 0;
  bool nonpositive = true;
  for (const auto& a : atoms_) {
    if (a.mass > 0.0) {
      ++support;
      nonpositive = nonpositive && a.value <= 0.0;
    }
  }
  if (support == 1) {
    kind_ = DistributionKind::PointMass;
  } else if (nonpositive) {
    kind_ = DistributionKind::NegativeDiracMixture;
  } else {
    kind_ = DistributionKind::DiracMixture;
  }
  if (label_.empty()) {
    label_ = std::string(to_string(kind_));
  }
}

RewardDistribution RewardDistribution::point_mass(double at) {
  return RewardDistribution({{at, 1.0}}, "point-mass(" + fmt_num(at) + ")");
}

double RewardDistribution::mean() const noexcept {
  double sum = 0.0;
  for (const auto& a : atoms_) {
    sum += a.mass * a.value;
  }
  return sum;
}

double RewardDistribution::variance() const noexcept {
  const double mu = mean();
  double sum = 0.0;
  for (const auto& a : atoms_) {
    sum += a.mass * (a.value - mu) * (a.value - mu);
  }
  return sum;
}

double RewardDistribution::moment(double alpha) const {
  if (!(alpha > 0.0)) {
    throw std::domain_error("moment order must be positive");
  }
  double sum = 0.0;
  for (const auto& a : atoms_) {
    if (a.mass > 0.0 && a.value != 0.0) {
      sum += a.mass * std::pow(std::abs(a.value), alpha);
    }
  }
  return sum;
}

double RewardDistribution::nonzero_mass() const noexcept {
  double sum = 0.0;
  for (const auto& a : atoms_) {
    if (a.value != 0.0) {
      sum += a.mass;
    }
  }
  return sum;
}

bool RewardDistribution::satisfies_truncated_nonpositivity() const {
  std::vector<Atom> by_magnitude;
  for (const auto& a : atoms_) {
    if (a.mass > 0.0 && a.value != 0.0) {
      by_magnitude.push_back(a);
    }
  }
  std::sort(by_magnitude.begin(), by_magnitude.end(),
            [](const Atom& l, const Atom& r) {
              return std::abs(l.value) > std::abs(r.value);
            });
  // Walk thresholds from large to small; after each group of equal
  // magnitudes the running sum is the tail just below that magnitude.
  double tail = 0.0;
  std::size_t i = 0;
  while (i < by_magnitude.size()) {
    const double level = std::abs(by_magnitude[i].value);
    while (i < by_magnitude.size() &&
           std::abs(by_magnitude[i].value) == level) {
      tail += by_magnitude[i].mass * by_magnitude[i].value;
      ++i;
    }
    if (tail > 0.0) {
      return false;
    }
  }
  return true;
}

double RewardDistribution::sample(Rng& rng) const noexcept {
  const double x = rng.uniform01();
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (x < cumulative_[i]) {
      return atoms_[i].value;
    }
  }
  // Rounding left a sliver above the last cumulative mass.
  for (std::size_t i = atoms_.size(); i-- > 0;) {
    if (atoms_[i].mass > 0.0) {
      return atoms_[i].value;
    }
  }
  return atoms_.back().value;
}

RewardDistribution make_rho(double y, double gap_scale,
                            const HeavyTailParams& params) {
  params.validate();
  const double eps = params.epsilon;
  const double u = params.u;
  require(u > 0.0, "rho_y requires u > 0");
  const double limit = std::pow(u, 1.0 / (1.0 + eps));
  require(gap_scale > 0.0 && gap_scale < limit,
          "Delta must lie in (0, u^{1/(1+epsilon)})");
  require(y > 0.0 && y < limit, "y must lie in (0, u^{1/(1+epsilon)})");
  require(y <= gap_scale * (1.0 + 1e-12), "y must not exceed Delta");
  const double mass = std::pow(y, 1.0 + 1.0 / eps) * std::pow(u, -1.0 / eps);
  const double at = -std::pow(u, 1.0 / eps) * std::pow(gap_scale, -1.0 / eps);
  return two_point(mass, at,
                   "rho(y=" + fmt_num(y) + ",Delta=" + fmt_num(gap_scale) + ")");
}

BanditInstance::BanditInstance(std::vector<RewardDistribution> arms,
                               HeavyTailParams params, std::string label)
    : arms_(std::move(arms)), params_(params), label_(std::move(label)) {
  params_.validate();
  if (arms_.empty()) {
    throw std::domain_error("instance needs at least one arm");
  }
  const double order = 1.0 + params_.epsilon;
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    if (arms_[i].moment(order) > params_.u + kMomentTolerance) {
      throw std::domain_error("arm " + std::to_string(i) +
                              " violates E|X|^{1+epsilon} <= u");
    }
    means_.push_back(arms_[i].mean());
  }
  optimal_ = 0;
  for (std::size_t i = 1; i < means_.size(); ++i) {
    if (means_[i] > means_[optimal_]) {
      optimal_ = i;
    }
  }
  for (std::size_t i = 0; i < means_.size(); ++i) {
    gaps_.push_back(i == optimal_ ? 0.0 : means_[optimal_] - means_[i]);
  }
}

double BanditInstance::max_gap() const noexcept {
  return *std::max_element(gaps_.begin(), gaps_.end());
}

std::string_view to_string(LowerBoundKind kind) {
  switch (kind) {
    case LowerBoundKind::UAdaptiveBase:
      return "u-adaptive-base";
    case LowerBoundKind::UAdaptiveAlt:
      return "u-adaptive-alt";
    case LowerBoundKind::EpsAdaptiveBase:
      return "eps-adaptive-base";
    case LowerBoundKind::EpsAdaptiveAlt:
      return "eps-adaptive-alt";
    case LowerBoundKind::AssumptionLb:
      return "assumption-lb";
  }
  return "unknown";
}

std::optional<LowerBoundKind> parse_lower_bound_kind(std::string_view name) {
  for (auto kind : {LowerBoundKind::UAdaptiveBase, LowerBoundKind::UAdaptiveAlt,
                    LowerBoundKind::EpsAdaptiveBase,
                    LowerBoundKind::EpsAdaptiveAlt,
                    LowerBoundKind::AssumptionLb}) {
    if (to_string(kind) == name) {
      return kind;
    }
  }
  return std::nullopt;
}

namespace {

// nu_2 of the u-adaptive pair: mass Delta^{1+1/eps} u^{-1/eps} at
// u^{1/eps} Delta^{-1/eps}; mean Delta, (1+eps)-moment u.
RewardDistribution u_adaptive_arm(double gap, double u, double eps) {
  const double mass = std::pow(gap, 1.0 + 1.0 / eps) * std::pow(u, -1.0 / eps);
  const double at = std::pow(u, 1.0 / eps) * std::pow(gap, -1.0 / eps);
  return two_point(mass, at,
                   "u-adaptive-arm(Delta=" + fmt_num(gap) + ",u=" + fmt_num(u) +
                       ")");
}

// nu_2 of the eps-adaptive pair with gamma = (2 Delta)^{1/eps}.
RewardDistribution eps_adaptive_arm(double gap, double eps) {
  const double gamma = std::pow(2.0 * gap, 1.0 / eps);
  const double mass = std::pow(gamma, 1.0 + eps) - gap * gamma;
  return two_point(mass, 1.0 / gamma,
                   "eps-adaptive-arm(Delta=" + fmt_num(gap) +
                       ",eps=" + fmt_num(eps) + ")");
}

}  // namespace

BanditInstance make_lb_instance(LowerBoundKind which,
                                const LowerBoundParams& p) {
  const HeavyTailParams base{p.epsilon, p.u};
  base.validate();
  const double eps = p.epsilon;
  const std::string name(to_string(which));

  switch (which) {
    case LowerBoundKind::UAdaptiveBase: {
      require(p.u > 0.0, "u must be positive");
      require(p.gap_scale > 0.0 &&
                  p.gap_scale < std::pow(p.u, 1.0 / (1.0 + eps)),
              "Delta must lie in (0, u^{1/(1+epsilon)})");
      return BanditInstance({RewardDistribution::point_mass(0.0),
                             u_adaptive_arm(p.gap_scale, p.u, eps)},
                            base, name);
    }
    case LowerBoundKind::UAdaptiveAlt: {
      require(p.u > 0.0, "u must be positive");
      require(p.u_alt >= p.u, "u_alt must be >= u");
      require(p.gap_scale > 0.0 &&
                  p.gap_scale < std::pow(p.u, 1.0 / (1.0 + eps)),
              "Delta must lie in (0, u^{1/(1+epsilon)})");
      require(p.gap_scale < 0.5 * std::pow(p.u_alt, 1.0 / (1.0 + eps)),
              "Delta must lie in (0, u_alt^{1/(1+epsilon)}/2)");
      return BanditInstance({u_adaptive_arm(2.0 * p.gap_scale, p.u_alt, eps),
                             u_adaptive_arm(p.gap_scale, p.u, eps)},
                            HeavyTailParams{eps, p.u_alt}, name);
    }
    case LowerBoundKind::EpsAdaptiveBase: {
      require(p.gap_scale > 0.0 && p.gap_scale <= 0.5,
              "Delta must lie in (0, 1/2]");
      return BanditInstance({RewardDistribution::point_mass(0.0),
                             eps_adaptive_arm(p.gap_scale, eps)},
                            HeavyTailParams{eps, 1.0}, name);
    }
    case LowerBoundKind::EpsAdaptiveAlt: {
      require(p.gap_scale > 0.0 && p.gap_scale <= 0.5,
              "Delta must lie in (0, 1/2]");
      require(p.epsilon_alt > 0.0 && p.epsilon_alt < eps,
              "epsilon_alt must lie in (0, epsilon)");
      const double eps_alt = p.epsilon_alt;
      const double gamma_alt = std::pow(2.0 * p.gap_scale, 1.0 / eps_alt);
      auto first = two_point(std::pow(gamma_alt, 1.0 + eps_alt),
                             1.0 / gamma_alt,
                             "eps-adaptive-alt-arm(Delta=" +
                                 fmt_num(p.gap_scale) +
                                 ",eps=" + fmt_num(eps_alt) + ")");
      return BanditInstance(
          {std::move(first), eps_adaptive_arm(p.gap_scale, eps)},
          HeavyTailParams{eps_alt, 1.0}, name);
    }
    case LowerBoundKind::AssumptionLb: {
      require(p.u > 0.0, "u must be positive");
      require(p.num_arms >= 2, "assumption-lb needs at least 2 arms");
      const double gap = p.gap_scale;
      const double shrink = eps / (1.0 + eps);
      std::vector<RewardDistribution> arms;
      arms.push_back(make_rho(std::pow(2.0 / 3.0, shrink) * gap, gap, base));
      for (std::size_t j = 1; j < p.num_arms; ++j) {
        if (p.alt_arm && *p.alt_arm == j) {
          arms.push_back(make_rho(std::pow(1.0 / 3.0, shrink) * gap, gap, base));
        } else {
          arms.push_back(make_rho(gap, gap, base));
        }
      }
      if (p.alt_arm) {
        require(*p.alt_arm >= 1 && *p.alt_arm < p.num_arms,
                "alt_arm must lie in [1, num_arms)");
      }
      return BanditInstance(std::move(arms), base,
                            p.alt_arm ? name + "-alt" : name);
    }
  }
  throw std::domain_error("unknown lower-bound construction");
}

}  // namespace htband
