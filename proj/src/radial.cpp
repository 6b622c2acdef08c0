#include "transeig/radial.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "transeig/bessel.hpp"
#include "transeig/dopri5.hpp"
#include "transeig/errors.hpp"

namespace transeig::radial {

namespace {

constexpr int kPositivitySamples = 4001;

// d^s/dr^s r^{2t} at r, as a coefficient times r^{2t-s}.
double monomial_derivative(int t, int s, double r) {
  int p = 2 * t;
  if (s > p) return 0.0;
  double ff = 1.0;
  for (int q = 0; q < s; ++q) ff *= static_cast<double>(p - q);
  return ff * std::pow(r, p - s);
}

double binomial(int n, int k) {
  double b = 1.0;
  for (int q = 1; q <= k; ++q) b = b * static_cast<double>(n - k + q) / static_cast<double>(q);
  return b;
}

}  // namespace

// ---------------------------------------------------------------------------

RadialProfile::RadialProfile(double radius, std::vector<double> coeffs) : radius_(radius), coeffs_(std::move(coeffs)) {
  if (!(radius_ > 0.0) || !std::isfinite(radius_)) throw PreconditionError("profile radius must be positive");
  if (coeffs_.empty()) throw PreconditionError("profile needs at least one coefficient");
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw PreconditionError("profile coefficients must be finite");
  }
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
  for (int q = 0; q < kPositivitySamples; ++q) {
    double r = radius_ * q / (kPositivitySamples - 1);
    if (!((*this)(r) > 0.0)) {
      std::ostringstream os;
      os << "refraction index not positive at r=" << r;
      throw PreconditionError(os.str());
    }
  }
  // A root just inside an endpoint shows up as a derivative pointing into zero.
  const double h = radius_ / (kPositivitySamples - 1);
  if ((*this)(radius_) - h * derivative(radius_, 1) <= 0.0) {
    throw PreconditionError("refraction index approaches zero near r=R");
  }
}

bool RadialProfile::is_constant() const { return coeffs_.size() == 1; }

double RadialProfile::operator()(double r) const {
  const double r2 = r * r;
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * r2 + *it;
  return acc;
}

double RadialProfile::derivative(double r, int s) const {
  double acc = 0.0;
  for (std::size_t t = 0; t < coeffs_.size(); ++t) acc += coeffs_[t] * monomial_derivative(static_cast<int>(t), s, r);
  return acc;
}

double RadialProfile::max_value() const {
  double best = 0.0;
  for (int q = 0; q < kPositivitySamples; ++q) best = std::max(best, (*this)(radius_ * q / (kPositivitySamples - 1)));
  return best;
}

double RadialProfile::disk_integral() const {
  double acc = 0.0;
  for (std::size_t t = 0; t < coeffs_.size(); ++t) {
    double p = 2.0 * static_cast<double>(t) + 2.0;
    acc += coeffs_[t] * std::pow(radius_, p) / p;
  }
  return 2.0 * M_PI * acc;
}

nlohmann::json RadialProfile::to_json() const { return {{"radius", radius_}, {"coeffs", coeffs_}}; }

RadialProfile RadialProfile::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("radius") || !j.contains("coeffs") || !j["coeffs"].is_array()) {
    throw ParseError(R"(profile must look like {"radius": R, "coeffs": [c0, c1, ...]})");
  }
  return {j.at("radius").get<double>(), j.at("coeffs").get<std::vector<double>>()};
}

// ---------------------------------------------------------------------------

namespace {

RadialProfile contact_profile(const RadialProfile& base, double amplitude, int order) {
  if (amplitude == 0.0 || !std::isfinite(amplitude)) throw PreconditionError("contact amplitude must be nonzero");
  if (order < 1) throw PreconditionError("contact order must be >= 1");
  std::vector<double> c = base.coeffs();
  c.resize(std::max(c.size(), static_cast<std::size_t>(order) + 1), 0.0);
  const double R2 = base.radius() * base.radius();
  // (R^2 - r^2)^j = sum_t C(j,t) R^{2(j-t)} (-1)^t r^{2t}
  for (int t = 0; t <= order; ++t) {
    c[static_cast<std::size_t>(t)] += amplitude * binomial(order, t) * std::pow(R2, order - t) * (t % 2 == 0 ? 1.0 : -1.0);
  }
  return {base.radius(), std::move(c)};
}

}  // namespace

ContactFamily::ContactFamily(RadialProfile base, double amplitude, int order)
    : base_(std::move(base)), amplitude_(amplitude), order_(order), n1_(contact_profile(base_, amplitude, order)) {}

nlohmann::json ContactFamily::to_json() const {
  return {{"base", base_.to_json()}, {"amplitude", amplitude_}, {"order", order_}};
}

ContactFamily ContactFamily::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("base") || !j.contains("amplitude") || !j.contains("order")) {
    throw ParseError(R"(contact family must look like {"base": {...}, "amplitude": c, "order": j})");
  }
  return {RadialProfile::from_json(j.at("base")), j.at("amplitude").get<double>(), j.at("order").get<int>()};
}

int contact_order(const RadialProfile& a, const RadialProfile& b) {
  if (a.radius() != b.radius()) throw PreconditionError("profiles on different radii");
  const std::size_t deg = std::max(a.coeffs().size(), b.coeffs().size());
  auto coef = [](const RadialProfile& p, std::size_t t) { return t < p.coeffs().size() ? p.coeffs()[t] : 0.0; };
  bool identical = true;
  for (std::size_t t = 0; t < deg; ++t) identical = identical && coef(a, t) == coef(b, t);
  if (identical) return -1;
  const double R = a.radius();
  for (int s = 0; s <= static_cast<int>(2 * deg); ++s) {
    double diff = 0.0, scale = 0.0;
    for (std::size_t t = 0; t < deg; ++t) {
      double md = monomial_derivative(static_cast<int>(t), s, R);
      diff += (coef(a, t) - coef(b, t)) * md;
      scale += (std::abs(coef(a, t)) + std::abs(coef(b, t))) * std::abs(md);
    }
    if (std::abs(diff) > 1e-10 * scale) return s;
  }
  return -1;
}

// ---------------------------------------------------------------------------

double default_seed_radius(const RadialProfile& p, cplx lambda) {
  return std::min(0.05 * p.radius(), 0.5 / (std::abs(lambda) * std::sqrt(p.max_value()) + 1.0));
}

BoundaryData frobenius_seed(const RadialProfile& p, int m, cplx lambda, double r0) {
  if (!(r0 > 0.0) || r0 > p.radius() / 10.0 * (1.0 + 1e-12)) {
    throw PreconditionError("seed radius must lie in (0, R/10]");
  }
  const auto& c = p.coeffs();
  const cplx lam2 = lambda * lambda;
  const double r2 = r0 * r0;
  // b_t and db_t = d b_t / d lambda; stored without the r0^{2t} factor folded in,
  // i.e. B_t = b_t r0^{2t} to keep magnitudes bounded.
  std::vector<cplx> B{1.0}, dB{0.0};
  cplx s0 = 1.0, s2 = 0.0, ds0 = 0.0, ds2 = 0.0;  // sum B_t, sum 2t B_t, and lambda-derivatives
  double biggest = 1.0;
  int quiet = 0;
  constexpr int kMaxTerms = 2000;
  const int deg = static_cast<int>(c.size()) - 1;
  for (int t = 1; t <= kMaxTerms; ++t) {
    cplx conv = 0.0, dconv = 0.0;
    for (int q = 0; q <= std::min(deg, t - 1); ++q) {
      // B_t = -lambda^2 r0^2 sum_{q+s=t-1} c_q r0^{2q} B_s / (4t(t+m))
      double cq = c[static_cast<std::size_t>(q)] * std::pow(r2, q);
      conv += cq * B[static_cast<std::size_t>(t - 1 - q)];
      dconv += cq * dB[static_cast<std::size_t>(t - 1 - q)];
    }
    const double den = 4.0 * t * (t + m);
    cplx bt = -lam2 * r2 * conv / den;
    cplx dbt = (-2.0 * lambda * r2 * conv - lam2 * r2 * dconv) / den;
    B.push_back(bt);
    dB.push_back(dbt);
    s0 += bt;
    s2 += 2.0 * t * bt;
    ds0 += dbt;
    ds2 += 2.0 * t * dbt;
    double a = std::max(std::abs(bt), std::abs(dbt) / (1.0 + std::abs(lambda)));
    biggest = std::max(biggest, std::abs(bt));
    if (a <= 1e-17 * std::max(std::abs(s0), 1e-300) && t > deg) {
      if (++quiet >= 2) break;
    } else {
      quiet = 0;
    }
    if (t == kMaxTerms) throw SeedError("Frobenius tail did not settle at r0");
  }
  if (biggest > 1e5 * std::abs(s0)) throw SeedError("Frobenius series cancels at r0; shrink r0");
  BoundaryData out;
  out.log_scale = m * std::log(r0);
  out.u = s0;
  out.du = (static_cast<double>(m) * s0 + s2) / r0;
  out.u_lambda = ds0;
  out.du_lambda = (static_cast<double>(m) * ds0 + ds2) / r0;
  return out;
}

namespace {

template <int N>
using State = Eigen::Matrix<cplx, N, 1>;

// Integrates v = u / r^m in t = log r:  v_tt + 2m v_t + lambda^2 n(r) r^2 v = 0,
// with w = dv/dlambda obeying the same equation forced by 2 lambda n r^2 v.
template <int N>
BoundaryData integrate(const RadialProfile& p, int m, cplx lambda, double r0, const BoundaryData& seed,
                       const SolverOptions& opt) {
  const double two_m = 2.0 * m;
  const cplx lam2 = lambda * lambda;
  State<N> y;
  y(0) = seed.u;
  y(1) = r0 * seed.du - static_cast<double>(m) * seed.u;
  if constexpr (N == 4) {
    y(2) = seed.u_lambda;
    y(3) = r0 * seed.du_lambda - static_cast<double>(m) * seed.u_lambda;
  }
  auto rhs = [&](double t, const State<N>& s) {
    const double r = std::exp(t);
    const double nr2 = p(r) * r * r;
    State<N> d;
    d(0) = s(1);
    d(1) = -two_m * s(1) - lam2 * nr2 * s(0);
    if constexpr (N == 4) {
      d(2) = s(3);
      d(3) = -two_m * s(3) - lam2 * nr2 * s(2) - 2.0 * lambda * nr2 * s(0);
    }
    return d;
  };
  auto err_norm = [&](const State<N>& e, const State<N>& a, const State<N>& b) {
    double ma = std::max({std::abs(a(0)), std::abs(a(1)), std::abs(b(0)), std::abs(b(1))});
    double ea = std::max(std::abs(e(0)), std::abs(e(1)));
    if constexpr (N == 4) {
      double mb = std::max({std::abs(a(2)), std::abs(a(3)), std::abs(b(2)), std::abs(b(3))});
      double eb = std::max(std::abs(e(2)), std::abs(e(3)));
      double mall = std::max(ma, mb);
      return std::max(ea / (opt.rtol * ma + opt.atol * mall), eb / (opt.rtol * mb + opt.atol * mall));
    } else {
      return ea / ((opt.rtol + opt.atol) * ma);
    }
  };
  double log_scale = 0.0;
  auto on_accept = [&](double, State<N>& s, State<N>& fsal) {
    double mx = s.cwiseAbs().maxCoeff();
    if (mx > opt.overflow_threshold) {
      int e = std::ilogb(mx);
      s *= std::ldexp(1.0, -e);
      fsal *= std::ldexp(1.0, -e);
      log_scale += e * M_LN2;
    }
  };
  const double t0 = std::log(r0);
  const double t1 = std::log(p.radius());
  const double freq = std::abs(lambda) * std::sqrt(p.max_value()) * r0 + two_m + 1.0;
  ode::Dopri5Options dopt;
  dopt.initial_step = std::min((t1 - t0) / 10.0, 0.5 / freq);
  ode::Dopri5Result res = ode::integrate_dopri5(rhs, t0, t1, y, err_norm, on_accept, dopt);
  if (res.status != ode::Dopri5Status::ok) {
    std::ostringstream os;
    os << "radial integration failed (" << (res.status == ode::Dopri5Status::step_underflow ? "step underflow" : "step budget")
       << ") at r=" << std::exp(res.t) << ", h=" << res.h << ", m=" << m << ", lambda=" << lambda
       << ", accepted=" << res.accepted << ", rejected=" << res.rejected;
    throw StiffnessError(os.str());
  }
  const double R = p.radius();
  BoundaryData out;
  out.log_scale = log_scale + m * std::log(R);
  out.u = y(0);
  out.du = (static_cast<double>(m) * y(0) + y(1)) / R;
  if constexpr (N == 4) {
    out.u_lambda = y(2);
    out.du_lambda = (static_cast<double>(m) * y(2) + y(3)) / R;
  }
  return out;
}

}  // namespace

BoundaryData regular_solution(const RadialProfile& p, int m, cplx lambda, const SolverOptions& opt) {
  if (m < 0 || m > 250 || std::abs(lambda) > 200.0 || std::abs(lambda.imag()) > 30.0) {
    std::ostringstream os;
    os << "regular_solution outside envelope: m=" << m << ", lambda=" << lambda;
    throw DomainError(os.str());
  }
  double r0 = opt.seed_radius > 0.0 ? opt.seed_radius : default_seed_radius(p, lambda);
  for (int attempt = 0;; ++attempt) {
    try {
      BoundaryData seed = frobenius_seed(p, m, lambda, r0);
      return opt.sensitivity ? integrate<4>(p, m, lambda, r0, seed, opt) : integrate<2>(p, m, lambda, r0, seed, opt);
    } catch (const SeedError&) {
      if (attempt + 1 >= opt.seed_attempts) throw;
      r0 *= 0.25;
    }
  }
}

bool closed_form_available(const RadialProfile& p, int m, cplx lambda) {
  return p.is_constant() && m >= 0 && m <= special::kMaxOrder &&
         std::abs(lambda) * std::sqrt(p.coeffs()[0]) * p.radius() <= special::kMaxArgument;
}

BoundaryData constant_index_solution(const RadialProfile& p, int m, cplx lambda) {
  if (!closed_form_available(p, m, lambda)) throw DomainError("closed form needs a constant profile inside the Bessel envelope");
  const double sn = std::sqrt(p.coeffs()[0]);
  const double R = p.radius();
  const cplx k = lambda * sn;
  const cplx x = k * R;
  special::ScaledBesselPair S = special::normalized_bessel_pair(m, x);
  const cplx s2 = std::abs(x) == 0.0 ? cplx(-0.5 / (m + 1.0)) * S.value
                                     : -(2.0 * m + 1.0) / x * S.derivative - S.value;
  BoundaryData out;
  out.log_scale = S.log_scale + m * std::log(R);
  out.u = S.value;
  out.du = static_cast<double>(m) / R * S.value + k * S.derivative;
  out.u_lambda = R * sn * S.derivative;
  out.du_lambda = (m + 1.0) * sn * S.derivative + k * R * sn * s2;
  return out;
}

}  // namespace transeig::radial
