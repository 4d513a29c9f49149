#pragma once

#include <numbers>
#include <utility>

#include "qmem/channel.hpp"

namespace qmem {

// All times are in units of the delay tau; rates enter as products with tau.
struct GiantAtom2LParams {
  double omega_e_tau = 40.0 * std::numbers::pi;
  double gamma_tau = 12.0;
  int series_terms = 64;
};

struct GiantAtom3LParams {
  double omega_e_tau = 40.0 * std::numbers::pi;
  double omega_s_tau = 20.0 * std::numbers::pi;
  double gamma1_tau = 4.0;
  double gamma2_tau = 8.0;
  int series_terms = 64;
  double integrator_step = 1e-3;
};

struct TwoLevelDecay {
  cplx c;
  double time = 0.0;
};

struct ThreeLevelDecay {
  cplx d;
  double G = 0.0;
  double S = 0.0;
  double phi_s = 0.0;
  double time = 0.0;
};

struct HeisenbergParams {
  double jx = 0.0;
  double jy = 0.0;
  double jz = 0.0;
};

cplx amplitude_c(double t_over_tau, const GiantAtom2LParams& p);
TwoLevelDecay decay_two_level(double t_over_tau, const GiantAtom2LParams& p);
ChoiOperator channel_two_level(cplx c);

cplx amplitude_d(double t_over_tau, const GiantAtom3LParams& p);
// Ground (G) and intermediate-level (S) populations after emission from |e>.
std::pair<double, double> populations_G_S(double t_over_tau, const GiantAtom3LParams& p);
ThreeLevelDecay decay_three_level(double t_over_tau, const GiantAtom3LParams& p);
ChoiOperator channel_three_level(cplx d, double G, double phi_s);
ChoiOperator channel_three_level(const ThreeLevelDecay& s);

ChoiOperator dephasing_channel(cplx alpha);

ChoiOperator heisenberg_channel(double t, const HeisenbergParams& p);

// Figure axes use the amplitude decay rate times t; these convert to t / tau.
double axis_to_time_2l(double axis, const GiantAtom2LParams& p);
double axis_to_time_3l(double axis, const GiantAtom3LParams& p);

}  // namespace qmem
