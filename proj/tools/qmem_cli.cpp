#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "qmem/io.hpp"
#include "qmem/programs.hpp"
#include "qmem/scan.hpp"
#include "qmem/witness.hpp"

using namespace qmem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kSolver = 3;
constexpr int kReproduce = 4;

struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

cplx parse_complex(const std::string& s) {
  std::stringstream in(s);
  double re = 0.0, im = 0.0;
  char sep = 0;
  if (!(in >> re)) throw std::invalid_argument("cannot parse complex number: " + s);
  if (in >> sep) {
    if (sep != ',' || !(in >> im)) throw std::invalid_argument("complex numbers are written re,im: " + s);
  }
  return {re, im};
}

Grid parse_grid(const std::string& s, Grid g) {
  std::stringstream in(s);
  char a = 0, b = 0;
  if (!(in >> g.min >> a >> g.max >> b >> g.steps) || a != ':' || b != ':')
    throw std::invalid_argument("grids are written min:max:steps: " + s);
  return g;
}

void emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    io::write_json_file(out, j);
  }
}

void require_optimal(sdp::SolveStatus s) {
  if (s != sdp::SolveStatus::Optimal) throw SolverFailure("solver finished with status " + sdp::to_string(s));
}

struct Common {
  std::string config;
  std::string out;
  int workers = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON configuration file")->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "output path (stdout when omitted)");
  app->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "seed for randomized steps");
  app->add_option("--tol", c.tol, "detection threshold / validity tolerance")->check(CLI::PositiveNumber);
}

// ---- scans ----

struct ScanArgs {
  Common common;
  std::string t1, dt;
  bool no_quantum = false, no_markov = false, seesaw = false;
};

int run_scan_command(Family family, const ScanArgs& a) {
  ScanConfig c;
  c.family = family;
  if (family != Family::GA2 && family != Family::GA3) {
    c.t1 = {0.0, 5.0, 21};
    c.dt = {0.0, 5.0, 21};
  }
  if (family == Family::GA3) c.dt = {0.0, 6.0, 30};
  if (!a.common.config.empty()) c = scan_config_from_json(io::read_json_file(a.common.config), c);
  c.family = family;
  if (!a.t1.empty()) c.t1 = parse_grid(a.t1, c.t1);
  if (!a.dt.empty()) c.dt = parse_grid(a.dt, c.dt);
  if (!a.common.out.empty()) c.output = a.common.out;
  if (a.common.workers > 0) c.workers = a.common.workers;
  if (a.common.seed > 0) c.seed = a.common.seed;
  if (a.common.tol > 0.0) c.threshold = a.common.tol;
  if (a.no_quantum) c.quantum = false;
  if (a.no_markov) c.markov = false;
  if (a.seesaw) c.seesaw = true;
  c.validate();

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!c.output.empty()) {
    file.open(c.output);
    if (!file) throw std::runtime_error("cannot write " + c.output);
    out = &file;
    io::write_json_file(c.output + ".config.json", to_json(c));
  }
  *out << csv_header(c) << "\n" << std::flush;
  bool failures = false;
  run_scan(c, [&](const ScanRow& row) {
    *out << csv_line(c, row) << "\n" << std::flush;
    failures = failures || row.solver_status != "Optimal";
  });
  return failures ? kSolver : kOk;
}

// ---- classification ----

struct ClassifyArgs {
  Common common;
  std::string c1, c2, d1, d2;
  double g1 = -1.0, g2 = -1.0;
  std::optional<double> t1, t2;
  GiantAtom2LParams ga2;
  GiantAtom3LParams ga3;
};

void add_ga2_params(CLI::App* app, GiantAtom2LParams& p) {
  app->add_option("--omega-e-tau", p.omega_e_tau, "transition frequency times delay");
  app->add_option("--gamma-tau", p.gamma_tau, "decay rate times delay");
}

void add_ga3_params(CLI::App* app, GiantAtom3LParams& p) {
  app->add_option("--omega-e-tau", p.omega_e_tau, "upper level frequency times delay");
  app->add_option("--omega-s-tau", p.omega_s_tau, "intermediate level frequency times delay");
  app->add_option("--gamma1-tau", p.gamma1_tau, "decay rate to g times delay");
  app->add_option("--gamma2-tau", p.gamma2_tau, "decay rate to s times delay");
  app->add_option("--step", p.integrator_step, "population integrator step in units of the delay");
}

int classify_2l(const ClassifyArgs& a) {
  cplx c1, c2;
  if (a.t1 && a.t2) {
    c1 = amplitude_c(axis_to_time_2l(*a.t1, a.ga2), a.ga2);
    c2 = amplitude_c(axis_to_time_2l(*a.t2, a.ga2), a.ga2);
  } else if (!a.c1.empty() && !a.c2.empty()) {
    c1 = parse_complex(a.c1);
    c2 = parse_complex(a.c2);
  } else {
    throw std::invalid_argument("give either --t1/--t2 or --c1/--c2");
  }
  if (std::abs(c1) > 1.0 + 1e-12 || std::abs(c2) > 1.0 + 1e-12) throw std::invalid_argument("|c| must not exceed 1");
  emit(io::to_json(classify_two_level(c1, c2)), a.common.out);
  return kOk;
}

int classify_3l(const ClassifyArgs& a) {
  ThreeLevelDecay s1, s2;
  if (a.t1 && a.t2) {
    s1 = decay_three_level(axis_to_time_3l(*a.t1, a.ga3), a.ga3);
    s2 = decay_three_level(axis_to_time_3l(*a.t2, a.ga3), a.ga3);
  } else if (!a.d1.empty() && !a.d2.empty() && a.g1 >= 0.0 && a.g2 >= 0.0) {
    s1.d = parse_complex(a.d1);
    s2.d = parse_complex(a.d2);
    s1.G = a.g1;
    s2.G = a.g2;
    for (const auto* s : {&s1, &s2})
      if (std::norm(s->d) + s->G > 1.0 + 1e-9) throw std::invalid_argument("|d|^2 + G must not exceed 1");
  } else {
    throw std::invalid_argument("give either --t1/--t2 or --d1/--G1/--d2/--G2");
  }
  emit(io::to_json(classify_three_level(s1, s2)), a.common.out);
  return kOk;
}

int classify_deph(const ClassifyArgs& a) {
  if (a.c1.empty() || a.c2.empty()) throw std::invalid_argument("give --a1 and --a2");
  const cplx a1 = parse_complex(a.c1), a2 = parse_complex(a.c2);
  if (std::abs(a1) > 1.0 + 1e-12 || std::abs(a2) > 1.0 + 1e-12) throw std::invalid_argument("|alpha| must not exceed 1");
  emit(io::to_json(classify_dephasing(a1, a2)), a.common.out);
  return kOk;
}

// ---- robustness ----

struct RobustnessArgs {
  Common common;
  std::string kind = "quantum";
  std::string choi1, choi2, witness_out;
  bool seesaw = false;
};

int robustness(const RobustnessArgs& a) {
  const ChoiOperator e1 = io::choi_from_json(io::read_json_file(a.choi1));
  const ChoiOperator e2 = io::choi_from_json(io::read_json_file(a.choi2));
  RobustnessOptions opt;
  if (a.common.tol > 0.0) opt.threshold = a.common.tol;
  opt.extract_witness = !a.witness_out.empty();
  RobustnessResult r;
  if (a.kind == "quantum") {
    r = robustness_quantum_memory(e1, e2, opt);
  } else if (a.kind == "markov") {
    r = robustness_markovianity(e1, e2, opt);
  } else {
    throw std::invalid_argument("--kind must be quantum or markov");
  }
  require_optimal(r.status);
  json j{{"kind", a.kind}, {"s_star", r.s_star}, {"r_star", r.r_star}, {"verdict", io::to_json(r.verdict)},
         {"status", sdp::to_string(r.status)}, {"duality_gap", r.duality_gap}};
  if (a.seesaw) {
    SeesawOptions so;
    if (a.common.seed > 0) so.seed = a.common.seed;
    const SeesawResult s = seesaw_lower_bound(e1, e2, so);
    j["s_seesaw"] = s.s_lower;
    j["seesaw_recombination_error"] = s.recombination_error;
  }
  if (opt.extract_witness) {
    if (r.dual_witness) {
      io::write_json_file(a.witness_out, io::to_json(*r.dual_witness));
      j["witness"] = a.witness_out;
    } else {
      j["witness"] = nullptr;
    }
  }
  emit(j, a.common.out);
  return kOk;
}

// ---- witnesses ----

struct WitnessArgs {
  Common common;
  std::string witness, w1, w2, basis = "pauli", choi1, choi2;
  std::string normalization = "trace", mask1, mask2, out_prefix;
  std::optional<double> value;
};

RestrictedBasis basis_named(const std::string& name) {
  if (name == "pauli") return pauli_basis();
  if (name == "three-level") return three_level_state_basis();
  throw std::invalid_argument("--basis must be pauli or three-level");
}

WitnessPair load_witness(const WitnessArgs& a) {
  if (!a.witness.empty()) return io::witness_from_json(io::read_json_file(a.witness));
  if (a.w1.empty() || a.w2.empty()) throw std::invalid_argument("give --witness or both --w1 and --w2");
  WitnessCoefficients c;
  c.w = {io::read_coefficient_csv(a.w1), io::read_coefficient_csv(a.w2)};
  return assemble_from_coefficients(c, basis_named(a.basis));
}

json verify_json(const VerifyResult& v) {
  return {{"valid", v.valid},
          {"min_value", v.min_value},
          {"residual", v.certificate.residual},
          {"shift", v.certificate.shift},
          {"status", sdp::to_string(v.status)}};
}

int witness_verify(const WitnessArgs& a) {
  VerifyOptions opt;
  if (a.common.tol > 0.0) opt.tol = a.common.tol;
  const VerifyResult v = verify_witness(load_witness(a), opt);
  require_optimal(v.status);
  emit(verify_json(v), a.common.out);
  return kOk;
}

int witness_eval(const WitnessArgs& a) {
  const WitnessPair w = load_witness(a);
  const ChoiOperator e1 = io::choi_from_json(io::read_json_file(a.choi1));
  const ChoiOperator e2 = io::choi_from_json(io::read_json_file(a.choi2));
  const double value = evaluate_witness(w, e1, e2);
  const double tr = (w.w1.trace() + w.w2.trace()).real();
  emit(json{{"value", value}, {"trace_sum", tr}, {"normalized", tr != 0.0 ? value / tr : 0.0}}, a.common.out);
  return kOk;
}

int witness_search(const WitnessArgs& a) {
  RestrictedBasis basis = basis_named(a.basis);
  const std::string* masks[2] = {&a.mask1, &a.mask2};
  for (int k = 0; k < 2; ++k)
    if (!masks[k]->empty()) basis.mask[static_cast<std::size_t>(k)] = (io::read_coefficient_csv(*masks[k]).array() != 0.0).cast<int>();
  basis.validate();
  Normalization norm;
  if (a.normalization == "trace") {
    norm = Normalization::TraceSum;
  } else if (a.normalization == "coeff") {
    norm = Normalization::CoeffSum;
  } else {
    throw std::invalid_argument("--normalization must be trace or coeff");
  }
  if (!a.value) throw std::invalid_argument("--value is required");
  const ChoiOperator e1 = io::choi_from_json(io::read_json_file(a.choi1));
  const ChoiOperator e2 = io::choi_from_json(io::read_json_file(a.choi2));
  const SearchResult r = restricted_witness_search(e1, e2, basis, norm, *a.value);
  require_optimal(r.status);
  json j{{"value", r.value},
         {"status", sdp::to_string(r.status)},
         {"orbits", r.orbit_count},
         {"coefficient_sum", r.coefficients.coefficient_sum()},
         {"trace_sum", trace_sum(r.coefficients, basis)}};
  if (!a.out_prefix.empty()) {
    io::write_coefficient_csv(a.out_prefix + "_w1.csv", r.coefficients.w[0]);
    io::write_coefficient_csv(a.out_prefix + "_w2.csv", r.coefficients.w[1]);
    j["files"] = {a.out_prefix + "_w1.csv", a.out_prefix + "_w2.csv"};
  }
  emit(j, a.common.out);
  return kOk;
}

// ---- export ----

struct ExportArgs {
  Common common;
  std::string family = "ga2", alpha = "1";
  double t = 0.0;
  GiantAtom2LParams ga2;
  GiantAtom3LParams ga3;
  HeisenbergParams heisenberg{-1.0, -2.0, -3.0};
};

int export_channel(const ExportArgs& a) {
  ChoiOperator c;
  switch (family_from_string(a.family)) {
    case Family::GA2:
      c = channel_two_level(amplitude_c(a.t, a.ga2));
      break;
    case Family::GA3:
      c = channel_three_level(decay_three_level(a.t, a.ga3));
      break;
    case Family::Dephasing:
      c = dephasing_channel(parse_complex(a.alpha));
      break;
    case Family::Heisenberg:
      c = heisenberg_channel(a.t, a.heisenberg);
      break;
  }
  emit(io::to_json(c), a.common.out);
  return kOk;
}

// ---- fixture reproduction ----

struct ReproduceArgs {
  Common common;
  std::string data = QMEM_DATA_DIR;
  bool quick = false;
};

int reproduce(const ReproduceArgs& a) {
  const std::string dir = a.data + "/tables/";
  json report = json::array();
  bool all = true;
  auto check = [&](const std::string& name, bool pass, json measured) {
    all = all && pass;
    std::cout << (pass ? "PASS " : "FAIL ") << name << " " << measured.dump() << std::endl;
    report.push_back({{"check", name}, {"pass", pass}, {"measured", std::move(measured)}});
  };
  auto timed = [](auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = fn();
    return std::pair{r, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
  };

  WitnessCoefficients t12, t34;
  t12.w = {io::read_coefficient_csv(dir + "two_level_w1.csv"), io::read_coefficient_csv(dir + "two_level_w2.csv")};
  t34.w = {io::read_coefficient_csv(dir + "three_level_w1.csv"), io::read_coefficient_csv(dir + "three_level_w2.csv")};
  const RestrictedBasis pauli = pauli_basis(), three = three_level_state_basis();
  const WitnessPair w12 = assemble_from_coefficients(t12, pauli), w34 = assemble_from_coefficients(t34, three);

  const GiantAtom2LParams p2;
  const ChoiOperator a1 = channel_two_level(amplitude_c(axis_to_time_2l(5.9, p2), p2));
  const ChoiOperator a2 = channel_two_level(amplitude_c(axis_to_time_2l(7.0, p2), p2));
  const double v12 = evaluate_witness(w12, a1, a2);
  const double n12 = trace_sum(t12, pauli);
  check("tables_1_2_violation", v12 <= -0.0839 * 0.98 && v12 / n12 <= -1e-2,
        {{"value", v12}, {"normalized", v12 / n12}, {"target", -0.0839}});
  const VerifyResult ver12 = verify_witness(w12);
  check("tables_1_2_valid", ver12.valid, verify_json(ver12));

  RestrictedBasis masked = pauli;
  for (int k = 0; k < 2; ++k) masked.mask[static_cast<std::size_t>(k)] = (t12.w[static_cast<std::size_t>(k)].array() != 0.0).cast<int>();
  const SearchResult s2 = restricted_witness_search(a1, a2, masked, Normalization::TraceSum, n12);
  check("two_level_search", s2.status == sdp::SolveStatus::Optimal && s2.value <= -0.0839 * 0.95,
        {{"value", s2.value}, {"status", sdp::to_string(s2.status)}});

  const GiantAtom3LParams p3;
  const ChoiOperator b1 = channel_three_level(decay_three_level(axis_to_time_3l(6.0, p3), p3));
  const ChoiOperator b2 = channel_three_level(decay_three_level(axis_to_time_3l(6.92, p3), p3));
  const auto [s3, secs] = timed([&] { return restricted_witness_search(b1, b2, three, Normalization::CoeffSum, 27.039); });
  check("three_level_search", s3.status == sdp::SolveStatus::Optimal && s3.value <= -0.016 * 0.9,
        {{"value", s3.value}, {"status", sdp::to_string(s3.status)}, {"seconds", secs}});
  if (!a.quick) {
    const VerifyResult ver34 = verify_witness(w34);
    check("tables_3_4_valid", ver34.valid, verify_json(ver34));
  }
  const ChoiOperator id2 = ChoiOperator::identity(2), id3 = ChoiOperator::identity(3);
  const double i12 = evaluate_witness(w12, id2, id2), i34 = evaluate_witness(w34, id3, id3);
  check("identity_pair_sanity", i12 >= -1e-8 && i34 >= -1e-8, {{"tables_1_2", i12}, {"tables_3_4", i34}});

  if (!a.common.out.empty()) io::write_json_file(a.common.out, report);
  return all ? kOk : kReproduce;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum memory diagnostics for two-time channel pairs"};
  app.require_subcommand(1);

  ScanArgs scan_args[4];
  const Family families[4] = {Family::GA2, Family::GA3, Family::Dephasing, Family::Heisenberg};
  const char* scan_names[4] = {"scan-2l", "scan-3l", "scan-dephasing", "scan-heisenberg"};
  CLI::App* scans[4];
  for (int k = 0; k < 4; ++k) {
    scans[k] = app.add_subcommand(scan_names[k], "robustness heatmap over (t1, dt)");
    add_common(scans[k], scan_args[k].common);
    scans[k]->add_option("--t1", scan_args[k].t1, "t1 grid as min:max:steps");
    scans[k]->add_option("--dt", scan_args[k].dt, "dt grid as min:max:steps");
    scans[k]->add_flag("--no-quantum", scan_args[k].no_quantum, "skip the quantum-memory robustness");
    scans[k]->add_flag("--no-markov", scan_args[k].no_markov, "skip the Markovianity robustness");
    scans[k]->add_flag("--seesaw", scan_args[k].seesaw, "add a see-saw lower bound column");
  }

  ClassifyArgs c2, c3, cd;
  auto* cl2 = app.add_subcommand("classify-2l", "analytic verdict for a two-level pair");
  add_common(cl2, c2.common);
  cl2->add_option("--c1", c2.c1, "earlier amplitude re,im");
  cl2->add_option("--c2", c2.c2, "later amplitude re,im");
  cl2->add_option("--t1", c2.t1, "earlier time on the amplitude-rate axis");
  cl2->add_option("--t2", c2.t2, "later time on the amplitude-rate axis");
  add_ga2_params(cl2, c2.ga2);
  auto* cl3 = app.add_subcommand("classify-3l", "analytic verdict for a three-level pair");
  add_common(cl3, c3.common);
  cl3->add_option("--d1", c3.d1, "earlier amplitude re,im");
  cl3->add_option("--d2", c3.d2, "later amplitude re,im");
  cl3->add_option("--G1", c3.g1, "earlier ground population");
  cl3->add_option("--G2", c3.g2, "later ground population");
  cl3->add_option("--t1", c3.t1, "earlier time on the amplitude-rate axis");
  cl3->add_option("--t2", c3.t2, "later time on the amplitude-rate axis");
  add_ga3_params(cl3, c3.ga3);
  auto* cld = app.add_subcommand("classify-dephasing", "analytic verdict for a dephasing pair");
  add_common(cld, cd.common);
  cld->add_option("--a1", cd.c1, "earlier coherence factor re,im")->required();
  cld->add_option("--a2", cd.c2, "later coherence factor re,im")->required();

  RobustnessArgs ra;
  auto* rob = app.add_subcommand("robustness", "robustness of a channel pair");
  add_common(rob, ra.common);
  rob->add_option("--kind", ra.kind, "quantum or markov")->check(CLI::IsMember({"quantum", "markov"}));
  rob->add_option("--choi1", ra.choi1, "earlier channel JSON")->required()->check(CLI::ExistingFile);
  rob->add_option("--choi2", ra.choi2, "later channel JSON")->required()->check(CLI::ExistingFile);
  rob->add_option("--witness-out", ra.witness_out, "write the dual witness here when memory is detected");
  rob->add_flag("--seesaw", ra.seesaw, "also run the see-saw lower bound");

  WitnessArgs wv, we, ws;
  auto* wit = app.add_subcommand("witness", "witness verification, evaluation and search");
  wit->require_subcommand(1);
  auto add_source = [](CLI::App* sub, WitnessArgs& w) {
    sub->add_option("--witness", w.witness, "witness JSON")->check(CLI::ExistingFile);
    sub->add_option("--w1", w.w1, "coefficient CSV for the earlier time")->check(CLI::ExistingFile);
    sub->add_option("--w2", w.w2, "coefficient CSV for the later time")->check(CLI::ExistingFile);
    sub->add_option("--basis", w.basis, "pauli or three-level");
  };
  auto* wver = wit->add_subcommand("verify", "check validity of a witness");
  add_common(wver, wv.common);
  add_source(wver, wv);
  auto* wev = wit->add_subcommand("eval", "evaluate a witness on a channel pair");
  add_common(wev, we.common);
  add_source(wev, we);
  wev->add_option("--choi1", we.choi1)->required()->check(CLI::ExistingFile);
  wev->add_option("--choi2", we.choi2)->required()->check(CLI::ExistingFile);
  auto* wse = wit->add_subcommand("search", "optimal witness on a restricted basis");
  add_common(wse, ws.common);
  wse->add_option("--basis", ws.basis, "pauli or three-level");
  wse->add_option("--choi1", ws.choi1)->required()->check(CLI::ExistingFile);
  wse->add_option("--choi2", ws.choi2)->required()->check(CLI::ExistingFile);
  wse->add_option("--normalization", ws.normalization, "trace or coeff");
  wse->add_option("--value", ws.value, "normalization constant")->required();
  wse->add_option("--mask1", ws.mask1, "CSV whose nonzero entries form the earlier-time mask")->check(CLI::ExistingFile);
  wse->add_option("--mask2", ws.mask2, "CSV whose nonzero entries form the later-time mask")->check(CLI::ExistingFile);
  wse->add_option("--out-prefix", ws.out_prefix, "write coefficient CSVs with this prefix");

  ExportArgs ea;
  auto* exp = app.add_subcommand("export-channel", "write a channel's Choi operator as JSON");
  add_common(exp, ea.common);
  exp->add_option("--family", ea.family, "ga2, ga3, dephasing or heisenberg")
      ->check(CLI::IsMember({"ga2", "ga3", "dephasing", "heisenberg"}));
  exp->add_option("--t", ea.t, "time in units of the delay (giant atoms) or seconds (heisenberg)");
  exp->add_option("--alpha", ea.alpha, "dephasing coherence factor re,im");
  exp->add_option("--omega-e-tau", ea.ga2.omega_e_tau, "two-level frequency times delay");
  exp->add_option("--gamma-tau", ea.ga2.gamma_tau, "two-level decay rate times delay");
  exp->add_option("--jx", ea.heisenberg.jx);
  exp->add_option("--jy", ea.heisenberg.jy);
  exp->add_option("--jz", ea.heisenberg.jz);

  ReproduceArgs rp;
  auto* rep = app.add_subcommand("reproduce", "check the shipped witness tables");
  add_common(rep, rp.common);
  rep->add_option("--data", rp.data, "data directory holding tables/")->check(CLI::ExistingDirectory);
  rep->add_flag("--quick", rp.quick, "skip the three-level table verification");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    for (int k = 0; k < 4; ++k)
      if (*scans[k]) return run_scan_command(families[k], scan_args[k]);
    if (*cl2) return classify_2l(c2);
    if (*cl3) return classify_3l(c3);
    if (*cld) return classify_deph(cd);
    if (*rob) return robustness(ra);
    if (*wver) return witness_verify(wv);
    if (*wev) return witness_eval(we);
    if (*wse) return witness_search(ws);
    if (*exp) return export_channel(ea);
    if (*rep) return reproduce(rp);
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}
