#include "qmem/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace qmem {

namespace {

// sum_{n <= t} [-k (t-n)]^n / n! * exp(-(i w + g)(t-n)), times in units of tau.
cplx delayed_series(double t, cplx k, double w, double g, int cap) {
  if (t < 0.0) throw std::invalid_argument("time must be nonnegative");
  const int nmax = static_cast<int>(std::floor(t));
  if (nmax + 1 > cap) throw std::invalid_argument("series_terms too small for the requested time");
  cplx sum = 0.0;
  for (int n = 0; n <= nmax; ++n) {
    const double s = t - n;
    const cplx decay = std::exp(cplx(-g * s, -w * s));
    if (n == 0) {
      sum += decay;
      continue;
    }
    const cplx x = -k * s;
    if (x == cplx(0.0)) continue;
    // x^n / n! evaluated in log space; |x| e^{-g s} stays bounded
    const cplx term = std::exp(static_cast<double>(n) * std::log(x) - std::lgamma(n + 1.0)) * decay;
    sum += term;
  }
  return sum;
}

}  // namespace

cplx amplitude_c(double t_over_tau, const GiantAtom2LParams& p) {
  if (p.gamma_tau <= 0.0) throw std::invalid_argument("gamma_tau must be positive");
  const double half = 0.5 * p.gamma_tau;
  return delayed_series(t_over_tau, half, p.omega_e_tau, half, p.series_terms);
}

TwoLevelDecay decay_two_level(double t_over_tau, const GiantAtom2LParams& p) {
  return {amplitude_c(t_over_tau, p), t_over_tau};
}

ChoiOperator channel_two_level(cplx c) {
  const double a = std::norm(c);
  if (std::sqrt(a) > 1.0 + 1e-12) throw std::invalid_argument("|c| must not exceed 1");
  Mat m = Mat::Zero(4, 4);
  m(0, 0) = 1.0;
  m(0, 3) = std::conj(c);
  m(3, 0) = c;
  m(2, 2) = 1.0 - a;
  m(3, 3) = a;
  return ChoiOperator(2, 2, m);
}

namespace {

cplx gamma_bar_2(const GiantAtom3LParams& p) {
  return 0.5 * (p.gamma1_tau * std::exp(cplx(0.0, -p.omega_s_tau)) + p.gamma2_tau);
}

void check_3l(const GiantAtom3LParams& p) {
  if (p.gamma1_tau <= 0.0 || p.gamma2_tau <= 0.0) throw std::invalid_argument("decay rates must be positive");
  if (p.integrator_step <= 0.0) throw std::invalid_argument("integrator_step must be positive");
}

}  // namespace

cplx amplitude_d(double t_over_tau, const GiantAtom3LParams& p) {
  check_3l(p);
  const double g1 = 0.5 * (p.gamma1_tau + p.gamma2_tau);
  return delayed_series(t_over_tau, gamma_bar_2(p), p.omega_e_tau, g1, p.series_terms);
}

std::pair<double, double> populations_G_S(double t_over_tau, const GiantAtom3LParams& p) {
  check_3l(p);
  if (t_over_tau < 0.0) throw std::invalid_argument("time must be nonnegative");
  if (t_over_tau == 0.0) return {0.0, 0.0};
  const cplx rot = std::exp(cplx(0.0, -p.omega_s_tau));
  auto flux = [&](double t) {
    const cplx d = amplitude_d(t, p);
    const cplx back = t >= 1.0 ? amplitude_d(t - 1.0, p) : cplx(0.0);
    const double pop = std::norm(d);
    const cplx cross = back * std::conj(d);
    return std::pair<double, double>{p.gamma1_tau * (pop + std::real(rot * cross)),
                                     p.gamma2_tau * (pop + std::real(cross))};
  };
  // Composite Simpson per delay interval; the integrand jumps at multiples of tau.
  double G = 0.0, S = 0.0;
  double a = 0.0;
  while (a < t_over_tau) {
    const double b = std::min(std::floor(a) + 1.0, t_over_tau);
    const int steps = std::max(2, 2 * static_cast<int>(std::ceil((b - a) / (2.0 * p.integrator_step))));
    const double h = (b - a) / steps;
    for (int k = 0; k <= steps; ++k) {
      // evaluate just inside the interval at its ends so the delayed term sees the right branch
      double t = a + k * h;
      if (k == 0) t = std::nextafter(a, b);
      if (k == steps) t = std::nextafter(b, a);
      const double w = (k == 0 || k == steps) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      const auto f = flux(t);
      G += w * h / 3.0 * f.first;
      S += w * h / 3.0 * f.second;
    }
    a = b;
  }
  const double total = std::norm(amplitude_d(t_over_tau, p)) + G + S;
  if (std::abs(total - 1.0) > 1e-6) throw std::runtime_error("population conservation failed; reduce integrator_step");
  return {G, S};
}

ThreeLevelDecay decay_three_level(double t_over_tau, const GiantAtom3LParams& p) {
  ThreeLevelDecay s;
  s.time = t_over_tau;
  s.d = amplitude_d(t_over_tau, p);
  std::tie(s.G, s.S) = populations_G_S(t_over_tau, p);
  s.phi_s = std::remainder(p.omega_s_tau * t_over_tau, 2.0 * std::numbers::pi);
  return s;
}

ChoiOperator channel_three_level(cplx d, double G, double phi_s) {
  const double a = std::norm(d);
  if (G < -1e-9 || a + G > 1.0 + 1e-9) throw std::invalid_argument("three-level parameters violate |d|^2 + G <= 1, G >= 0");
  const cplx ph = std::exp(cplx(0.0, phi_s));
  Mat m = Mat::Zero(9, 9);
  // basis g=0, s=1, e=2; row index = input * 3 + output
  Vec v = Vec::Zero(9);
  v(0) = 1.0;
  v(4) = std::conj(ph);
  v(8) = d;
  m += v * v.adjoint();
  m(6, 6) = std::max(G, 0.0);
  m(7, 7) = std::max(1.0 - a - G, 0.0);
  return ChoiOperator(3, 3, m);
}

ChoiOperator channel_three_level(const ThreeLevelDecay& s) { return channel_three_level(s.d, s.G, s.phi_s); }

ChoiOperator dephasing_channel(cplx alpha) {
  if (std::abs(alpha) > 1.0 + 1e-12) throw std::invalid_argument("|alpha| must not exceed 1");
  Mat m = Mat::Zero(4, 4);
  m(0, 0) = 1.0;
  m(3, 3) = 1.0;
  m(0, 3) = alpha;
  m(3, 0) = std::conj(alpha);
  return ChoiOperator(2, 2, m);
}

ChoiOperator heisenberg_channel(double t, const HeisenbergParams& p) {
  if (t < 0.0) throw std::invalid_argument("time must be nonnegative");
  const double r = 1.0 / std::sqrt(2.0);
  // Bell basis on (system, environment): Phi+, Phi-, Psi+, Psi-
  Mat bell = Mat::Zero(4, 4);
  bell(0, 0) = r, bell(3, 0) = r;
  bell(0, 1) = r, bell(3, 1) = -r;
  bell(1, 2) = r, bell(2, 2) = r;
  bell(1, 3) = r, bell(2, 3) = -r;
  // eigenvalues of H = -(jx XX + jy YY + jz ZZ)/2 on the Bell states
  const double e[4] = {-0.5 * (p.jx - p.jy + p.jz), -0.5 * (-p.jx + p.jy + p.jz), -0.5 * (p.jx + p.jy - p.jz),
                       0.5 * (p.jx + p.jy + p.jz)};
  Mat phase = Mat::Zero(4, 4);
  for (int k = 0; k < 4; ++k) phase(k, k) = std::exp(cplx(0.0, e[k] * t));
  const Mat u = bell * phase * bell.adjoint();
  Mat choi = Mat::Zero(4, 4);
  for (int k = 0; k < 2; ++k) {
    // Kraus operator <k|_E U |1>_E
    Mat kraus(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) kraus(i, j) = u(i * 2 + k, j * 2 + 1);
    Vec v(4);
    for (int i = 0; i < 2; ++i) v.segment(i * 2, 2) = kraus.col(i);
    choi += v * v.adjoint();
  }
  return ChoiOperator(2, 2, choi);
}

double axis_to_time_2l(double axis, const GiantAtom2LParams& p) { return axis / (0.5 * p.gamma_tau); }

double axis_to_time_3l(double axis, const GiantAtom3LParams& p) {
  return axis / (0.5 * (p.gamma1_tau + p.gamma2_tau));
}

}  // namespace qmem
