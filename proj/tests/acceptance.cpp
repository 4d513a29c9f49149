#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "qmem/io.hpp"
#include "qmem/programs.hpp"
#include "qmem/scan.hpp"
#include "qmem/witness.hpp"

using namespace qmem;

namespace {

constexpr double kPi = std::numbers::pi;
const std::string kTables = std::string(QMEM_DATA_DIR) + "/tables/";

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

cplx random_disk(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(std::sqrt(u(rng)), 2 * kPi * u(rng));
}

struct Heatmap {
  int rows = 0, cols = 0;
  std::vector<ScanRow> cells;
  const ScanRow& at(int i, int j) const { return cells[static_cast<std::size_t>(i * cols + j)]; }
  bool detected(int i, int j) const { return at(i, j).r_quantum > 1e-6; }
  bool analytic(int i, int j) const { return at(i, j).analytic_verdict == "QuantumMemory"; }
  const ScanRow& peak() const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < cells.size(); ++k)
      if (cells[k].r_quantum > cells[best].r_quantum) best = k;
    return cells[best];
  }
};

Heatmap heatmap(Family family) {
  ScanConfig c;
  c.family = family;
  c.t1 = {0.0, 12.0, 60};
  c.dt = {0.0, 6.0, 30};
  c.markov = false;
  Heatmap h;
  h.rows = c.t1.steps;
  h.cols = c.dt.steps;
  h.cells = run_scan(c);
  return h;
}

// Mismatches between detection and the analytic criterion that are not next to an analytic boundary.
int stray_cells(const Heatmap& h, int* mismatches) {
  int stray = 0;
  *mismatches = 0;
  for (int i = 0; i < h.rows; ++i)
    for (int j = 0; j < h.cols; ++j) {
      if (h.detected(i, j) == h.analytic(i, j)) continue;
      ++*mismatches;
      bool near_boundary = false;
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const int a = i + di, b = j + dj;
          if (a < 0 || b < 0 || a >= h.rows || b >= h.cols) continue;
          if (h.analytic(a, b) != h.analytic(i, j)) near_boundary = true;
        }
      if (!near_boundary) ++stray;
    }
  return stray;
}

int failed_rows(const Heatmap& h) {
  int n = 0;
  for (const auto& c : h.cells) n += c.solver_status != "Optimal";
  return n;
}

}  // namespace

int main() {
  std::printf("acceptance suite: 9 criteria\n");

  criterion(1, "two-level witness tables", [] {
    const auto t0 = std::chrono::steady_clock::now();
    WitnessCoefficients t;
    t.w = {io::read_coefficient_csv(kTables + "two_level_w1.csv"), io::read_coefficient_csv(kTables + "two_level_w2.csv")};
    const GiantAtom2LParams p;
    const ChoiOperator e1 = channel_two_level(amplitude_c(axis_to_time_2l(5.9, p), p));
    const ChoiOperator e2 = channel_two_level(amplitude_c(axis_to_time_2l(7.0, p), p));
    const double value = evaluate_witness(assemble_from_coefficients(t, pauli_basis()), e1, e2);
    const double norm = trace_sum(t, pauli_basis());
    const double secs = seconds_since(t0);
    const bool pass = value <= -0.0839 * 0.98 && value / norm <= -1e-2 && secs < 1.0;
    return Outcome{pass, fmt("<W> = %.6f (need <= %.6f), normalized %.6f with tr-sum %.3f (need <= -0.01)", value,
                             -0.0839 * 0.98, value / norm, norm)};
  });

  criterion(2, "three-level witness", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const GiantAtom3LParams p;
    const ChoiOperator e1 = channel_three_level(decay_three_level(axis_to_time_3l(6.0, p), p));
    const ChoiOperator e2 = channel_three_level(decay_three_level(axis_to_time_3l(6.92, p), p));
    const RestrictedBasis basis = three_level_state_basis();
    const SearchResult s = restricted_witness_search(e1, e2, basis, Normalization::CoeffSum, 27.039);
    const WitnessPair found = assemble_from_coefficients(s.coefficients, basis);
    const VerifyResult found_ok = verify_witness(found);
    WitnessCoefficients t;
    t.w = {io::read_coefficient_csv(kTables + "three_level_w1.csv"),
           io::read_coefficient_csv(kTables + "three_level_w2.csv")};
    const VerifyResult tables = verify_witness(assemble_from_coefficients(t, basis));
    const double secs = seconds_since(t0);
    const bool search_ok = s.status == sdp::SolveStatus::Optimal && s.value <= -0.016 * 0.9 && found_ok.valid;
    const bool pass = search_ok && tables.valid && secs < 300.0;
    return Outcome{pass, fmt("search <W> = %.6f (need <= %.4f, sum w = %.3f, found witness valid %d); tables III-IV "
                             "valid %d (min over PPT-classical %.5f, status %s)",
                             s.value, -0.016 * 0.9, s.coefficients.coefficient_sum(), found_ok.valid, tables.valid,
                             tables.min_value, sdp::to_string(tables.status).c_str())};
  });

  Heatmap ga2;
  criterion(3, "two-level heatmap", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    ga2 = heatmap(Family::GA2);
    const double secs = seconds_since(t0);
    int mismatches = 0;
    const int stray = stray_cells(ga2, &mismatches);
    const ScanRow& pk = ga2.peak();
    const bool located = std::abs(pk.t1 - 5.9) <= 0.2 && std::abs(pk.dt - 1.1) <= 0.2;
    const bool pass = stray == 0 && located && failed_rows(ga2) == 0 && secs < 600.0;
    return Outcome{pass, fmt("60x30 grid, %d boundary mismatches, %d away from the analytic boundary, peak r* = %.5f "
                             "at (%.3f, %.3f), solver failures %d",
                             mismatches, stray, pk.r_quantum, pk.t1, pk.dt, failed_rows(ga2))};
  });

  criterion(4, "three-level heatmap", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const Heatmap ga3 = heatmap(Family::GA3);
    const double secs = seconds_since(t0);
    if (ga2.cells.empty()) ga2 = heatmap(Family::GA2);
    int inter = 0, uni = 0;
    for (int i = 0; i < ga3.rows; ++i)
      for (int j = 0; j < ga3.cols; ++j) {
        inter += ga3.detected(i, j) && ga2.detected(i, j);
        uni += ga3.detected(i, j) || ga2.detected(i, j);
      }
    const double jaccard = uni > 0 ? static_cast<double>(inter) / uni : 0.0;
    const double ratio = ga3.peak().r_quantum / ga2.peak().r_quantum;
    const bool pass = jaccard >= 0.9 && ratio >= 0.35 && ratio <= 0.65 && failed_rows(ga3) == 0 && secs < 3600.0;
    return Outcome{pass, fmt("Jaccard %.4f (need >= 0.9), peak ratio %.4f (need in [0.35, 0.65]), three-level peak "
                             "%.5f at (%.3f, %.3f), solver failures %d",
                             jaccard, ratio, ga3.peak().r_quantum, ga3.peak().t1, ga3.peak().dt, failed_rows(ga3))};
  });

  criterion(5, "classifier and SDP agree", [] {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int wrong2 = 0, false_pos2 = 0, quantum2 = 0;
    for (int k = 0; k < 300; ++k) {
      const cplx c1 = random_disk(rng), c2 = random_disk(rng);
      const bool analytic = classify_two_level(c1, c2).kind == MemoryKind::QuantumMemory;
      const bool detected = robustness_quantum_memory(channel_two_level(c1), channel_two_level(c2)).r_star > 1e-6;
      quantum2 += analytic;
      wrong2 += analytic != detected;
      false_pos2 += detected && !analytic;
    }
    int wrong3 = 0, false_pos3 = 0, quantum3 = 0;
    for (int k = 0; k < 100; ++k) {
      ThreeLevelDecay s[2];
      for (auto& x : s) {
        x.d = random_disk(rng);
        x.G = (1.0 - std::norm(x.d)) * u(rng);
        x.S = 1.0 - std::norm(x.d) - x.G;
        x.phi_s = 2 * kPi * u(rng);
      }
      const bool analytic = classify_three_level(s[0], s[1]).kind == MemoryKind::QuantumMemory;
      const bool detected =
          robustness_quantum_memory(channel_three_level(s[0]), channel_three_level(s[1])).r_star > 1e-6;
      quantum3 += analytic;
      wrong3 += analytic != detected;
      false_pos3 += detected && !analytic;
    }
    const bool pass = wrong2 == 0 && wrong3 == 0;
    return Outcome{pass, fmt("d=2: %d/300 disagreements (%d false positives, %d quantum pairs); d=3: %d/100 "
                             "disagreements (%d false positives, %d quantum pairs)",
                             wrong2, false_pos2, quantum2, wrong3, false_pos3, quantum3)};
  });

  criterion(6, "dephasing classicality", [] {
    std::mt19937_64 rng(7);
    double worst_rec = 0.0, worst_rq = 0.0, weakest_markov = 1e300;
    int missed = 0, nonmarkov = 0;
    for (int k = 0; k < 100; ++k) {
      const cplx a1 = random_disk(rng), a2 = random_disk(rng);
      const auto inst = dephasing_instrument(a1, a2);
      worst_rec = std::max(worst_rec,
                           (inst.decomposition.recombine().matrix() - dephasing_channel(a2).matrix()).cwiseAbs().maxCoeff());
      const ChoiOperator e1 = dephasing_channel(a1), e2 = dephasing_channel(a2);
      worst_rq = std::max(worst_rq, robustness_quantum_memory(e1, e2).r_star);
      if (std::abs(a2) > std::abs(a1) + 1e-6) {
        ++nonmarkov;
        const double rm = robustness_markovianity(e1, e2).r_star;
        weakest_markov = std::min(weakest_markov, rm);
        missed += !(rm > 0.0);
      }
    }
    const bool pass = worst_rec <= 1e-10 && worst_rq <= 1e-6 && missed == 0;
    return Outcome{pass, fmt("max recombination error %.2e, max r_quantum %.2e, %d non-Markovian pairs with smallest "
                             "r_markov %.3e (%d with r_markov <= 0)",
                             worst_rec, worst_rq, nonmarkov, weakest_markov, missed)};
  });

  criterion(7, "Heisenberg separation", [] {
    const HeisenbergParams j{-1.0, -2.0, -3.0};
    double best_sep = 0.0, best_t1 = 0.0, best_t2 = 0.0, max_rq = 0.0;
    for (int i = 0; i <= 20; ++i)
      for (int k = 1; k <= 20; ++k) {
        const double t1 = 0.25 * i, t2 = t1 + 0.25 * k;
        const ChoiOperator e1 = heisenberg_channel(t1, j), e2 = heisenberg_channel(t2, j);
        const double rq = robustness_quantum_memory(e1, e2).r_star;
        max_rq = std::max(max_rq, rq);
        if (rq < 1e-6) {
          const double rm = robustness_markovianity(e1, e2).r_star;
          if (rm > best_sep) best_sep = rm, best_t1 = t1, best_t2 = t2;
        }
      }
    const bool pass = best_sep > 0.05 && max_rq > 1e-6;
    return Outcome{pass, fmt("largest r_markov with r_quantum < 1e-6: %.4f at (t1, t2) = (%.2f, %.2f) s; max "
                             "r_quantum %.4f",
                             best_sep, best_t1, best_t2, max_rq)};
  });

  criterion(8, "analytic identities", [] {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double err2 = 0.0, err3 = 0.0;
    for (int k = 0; k < 100; ++k) {
      const cplx c = random_disk(rng), c2 = random_disk(rng);
      err2 = std::max(err2, (link_product(channel_two_level(c), channel_two_level(c2)).matrix() -
                             channel_two_level(c2 * c).matrix())
                                .cwiseAbs()
                                .maxCoeff());
      const cplx d1 = random_disk(rng), d2 = random_disk(rng);
      const double g1 = (1 - std::norm(d1)) * u(rng), g2 = (1 - std::norm(d2)) * u(rng);
      const double p1 = 2 * kPi * u(rng), p2 = 2 * kPi * u(rng);
      err3 = std::max(err3, (link_product(channel_three_level(d1, g1, p1), channel_three_level(d2, g2, p2)).matrix() -
                             channel_three_level(d2 * d1, g1 + std::norm(d1) * g2, p1 + p2).matrix())
                                .cwiseAbs()
                                .maxCoeff());
    }
    const GiantAtom3LParams p;
    double cons = 0.0;
    for (int i = 1; i <= 50; ++i) {
      const double t = 0.1 * i;
      const auto [G, S] = populations_G_S(t, p);
      cons = std::max(cons, std::abs(std::norm(amplitude_d(t, p)) + G + S - 1.0));
    }
    const bool pass = err2 <= 1e-10 && err3 <= 1e-10 && cons <= 1e-6;
    return Outcome{pass, fmt("two-level composition error %.2e, three-level composition error %.2e, conservation "
                             "error up to 5 tau %.2e",
                             err2, err3, cons)};
  });

  criterion(9, "see-saw tightness", [] {
    std::mt19937_64 rng(5);
    int tight = 0;
    double worst = 0.0;
    std::ostringstream loose;
    for (int k = 0; k < 20; ++k) {
      const cplx c1 = random_disk(rng), c2 = random_disk(rng);
      const ChoiOperator e1 = channel_two_level(c1), e2 = channel_two_level(c2);
      const double upper = robustness_quantum_memory(e1, e2).s_star;
      SeesawOptions so;
      so.seed = 100 + static_cast<std::uint64_t>(k);
      const double lower = seesaw_lower_bound(e1, e2, so).s_lower;
      const double gap = upper - lower;
      worst = std::max(worst, gap);
      if (lower >= upper - 1e-4) {
        ++tight;
      } else {
        loose << " #" << k << " gap " << gap;
      }
    }
    return Outcome{tight >= 18, fmt("%d/20 pairs tight within 1e-4 (need >= 18), largest gap %.2e;%s", tight, worst,
                                    loose.str().empty() ? " none loose" : loose.str().c_str())};
  });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
