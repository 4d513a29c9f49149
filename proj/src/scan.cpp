#include "qmem/scan.hpp"

#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "qmem/criteria.hpp"
#include "qmem/programs.hpp"

namespace qmem {

std::string to_string(Family f) {
  switch (f) {
    case Family::GA2:
      return "ga2";
    case Family::GA3:
      return "ga3";
    case Family::Dephasing:
      return "dephasing";
    case Family::Heisenberg:
      return "heisenberg";
  }
  return "unknown";
}

Family family_from_string(const std::string& s) {
  if (s == "ga2") return Family::GA2;
  if (s == "ga3") return Family::GA3;
  if (s == "dephasing") return Family::Dephasing;
  if (s == "heisenberg") return Family::Heisenberg;
  throw std::invalid_argument("unknown family: " + s);
}

std::vector<double> Grid::values() const {
  if (steps < 2) throw std::invalid_argument("grid needs at least 2 steps");
  std::vector<double> v(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) v[static_cast<std::size_t>(i)] = min + (max - min) * i / (steps - 1);
  return v;
}

cplx DephasingProfile::alpha(double t) const { return std::exp(-decay * t) * std::cos(frequency * t); }

void ScanConfig::validate() const {
  if (t1.steps < 2 || dt.steps < 2) throw std::invalid_argument("grids need at least 2 steps");
  if (t1.min < 0.0 || dt.min < 0.0 || t1.max < t1.min || dt.max < dt.min)
    throw std::invalid_argument("grid bounds must be nonnegative and ordered");
  if (workers < 1) throw std::invalid_argument("workers must be positive");
  if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
  if (dephasing.decay < 0.0) throw std::invalid_argument("dephasing decay must be nonnegative");
}

namespace {

Grid grid_from_json(const nlohmann::json& j, Grid g) {
  if (j.contains("min")) g.min = j.at("min").get<double>();
  if (j.contains("max")) g.max = j.at("max").get<double>();
  if (j.contains("steps")) g.steps = j.at("steps").get<int>();
  return g;
}

template <class T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ScanConfig scan_config_from_json(const nlohmann::json& j, ScanConfig c) {
  if (!j.is_object()) throw std::invalid_argument("scan config must be a JSON object");
  if (j.contains("family")) c.family = family_from_string(j.at("family").get<std::string>());
  if (j.contains("ga2")) {
    const auto& g = j.at("ga2");
    maybe(g, "omega_e_tau", c.ga2.omega_e_tau);
    maybe(g, "gamma_tau", c.ga2.gamma_tau);
    maybe(g, "series_terms", c.ga2.series_terms);
  }
  if (j.contains("ga3")) {
    const auto& g = j.at("ga3");
    maybe(g, "omega_e_tau", c.ga3.omega_e_tau);
    maybe(g, "omega_s_tau", c.ga3.omega_s_tau);
    maybe(g, "gamma1_tau", c.ga3.gamma1_tau);
    maybe(g, "gamma2_tau", c.ga3.gamma2_tau);
    maybe(g, "series_terms", c.ga3.series_terms);
    maybe(g, "integrator_step", c.ga3.integrator_step);
  }
  if (j.contains("dephasing")) {
    maybe(j.at("dephasing"), "decay", c.dephasing.decay);
    maybe(j.at("dephasing"), "frequency", c.dephasing.frequency);
  }
  if (j.contains("heisenberg")) {
    const auto& h = j.at("heisenberg");
    maybe(h, "jx", c.heisenberg.jx);
    maybe(h, "jy", c.heisenberg.jy);
    maybe(h, "jz", c.heisenberg.jz);
  }
  if (j.contains("t1_grid")) c.t1 = grid_from_json(j.at("t1_grid"), c.t1);
  if (j.contains("dt_grid")) c.dt = grid_from_json(j.at("dt_grid"), c.dt);
  if (j.contains("outputs")) {
    const auto& o = j.at("outputs");
    maybe(o, "quantum", c.quantum);
    maybe(o, "markov", c.markov);
    maybe(o, "analytic", c.analytic);
    maybe(o, "seesaw", c.seesaw);
  }
  maybe(j, "output", c.output);
  maybe(j, "workers", c.workers);
  maybe(j, "seed", c.seed);
  maybe(j, "threshold", c.threshold);
  c.validate();
  return c;
}

nlohmann::json to_json(const ScanConfig& c) {
  auto grid = [](const Grid& g) { return nlohmann::json{{"min", g.min}, {"max", g.max}, {"steps", g.steps}}; };
  return {{"family", to_string(c.family)},
          {"ga2", {{"omega_e_tau", c.ga2.omega_e_tau}, {"gamma_tau", c.ga2.gamma_tau}, {"series_terms", c.ga2.series_terms}}},
          {"ga3",
           {{"omega_e_tau", c.ga3.omega_e_tau},
            {"omega_s_tau", c.ga3.omega_s_tau},
            {"gamma1_tau", c.ga3.gamma1_tau},
            {"gamma2_tau", c.ga3.gamma2_tau},
            {"series_terms", c.ga3.series_terms},
            {"integrator_step", c.ga3.integrator_step}}},
          {"dephasing", {{"decay", c.dephasing.decay}, {"frequency", c.dephasing.frequency}}},
          {"heisenberg", {{"jx", c.heisenberg.jx}, {"jy", c.heisenberg.jy}, {"jz", c.heisenberg.jz}}},
          {"t1_grid", grid(c.t1)},
          {"dt_grid", grid(c.dt)},
          {"outputs", {{"quantum", c.quantum}, {"markov", c.markov}, {"analytic", c.analytic}, {"seesaw", c.seesaw}}},
          {"output", c.output},
          {"workers", c.workers},
          {"seed", c.seed},
          {"threshold", c.threshold}};
}

std::pair<ChoiOperator, ChoiOperator> scan_pair(const ScanConfig& c, double t1, double t2) {
  switch (c.family) {
    case Family::GA2:
      return {channel_two_level(amplitude_c(axis_to_time_2l(t1, c.ga2), c.ga2)),
              channel_two_level(amplitude_c(axis_to_time_2l(t2, c.ga2), c.ga2))};
    case Family::GA3:
      return {channel_three_level(decay_three_level(axis_to_time_3l(t1, c.ga3), c.ga3)),
              channel_three_level(decay_three_level(axis_to_time_3l(t2, c.ga3), c.ga3))};
    case Family::Dephasing:
      return {dephasing_channel(c.dephasing.alpha(t1)), dephasing_channel(c.dephasing.alpha(t2))};
    case Family::Heisenberg:
      return {heisenberg_channel(t1, c.heisenberg), heisenberg_channel(t2, c.heisenberg)};
  }
  throw std::invalid_argument("unknown family");
}

namespace {

std::string analytic_verdict(const ScanConfig& c, double t1, double t2) {
  switch (c.family) {
    case Family::GA2:
      return to_string(classify_two_level(amplitude_c(axis_to_time_2l(t1, c.ga2), c.ga2),
                                          amplitude_c(axis_to_time_2l(t2, c.ga2), c.ga2))
                           .kind);
    case Family::GA3:
      return to_string(classify_three_level(decay_three_level(axis_to_time_3l(t1, c.ga3), c.ga3),
                                            decay_three_level(axis_to_time_3l(t2, c.ga3), c.ga3))
                           .kind);
    case Family::Dephasing:
      return to_string(classify_dephasing(c.dephasing.alpha(t1), c.dephasing.alpha(t2)).kind);
    case Family::Heisenberg:
      return "none";
  }
  return "none";
}

}  // namespace

ScanRow evaluate_point(const ScanConfig& c, std::size_t index, double t1, double dt) {
  ScanRow row;
  row.index = index;
  row.t1 = t1;
  row.dt = dt;
  row.solver_status = "Optimal";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  row.r_quantum = row.r_markov = row.s_star = row.s_seesaw = nan;
  try {
    const auto [e1, e2] = scan_pair(c, t1, t1 + dt);
    RobustnessOptions opt;
    opt.solver = c.solver;
    opt.threshold = c.threshold;
    auto note = [&](sdp::SolveStatus s) {
      if (s != sdp::SolveStatus::Optimal) row.solver_status = sdp::to_string(s);
    };
    if (c.quantum) {
      const auto r = robustness_quantum_memory(e1, e2, opt);
      row.r_quantum = r.r_star;
      row.s_star = r.s_star;
      note(r.status);
    }
    if (c.markov) {
      const auto r = robustness_markovianity(e1, e2, opt);
      row.r_markov = r.r_star;
      note(r.status);
    }
    if (c.analytic) row.analytic_verdict = analytic_verdict(c, t1, t1 + dt);
    if (c.seesaw) {
      SeesawOptions so;
      so.seed = c.seed + index;
      so.solver = c.solver;
      so.restarts = 2;
      row.s_seesaw = seesaw_lower_bound(e1, e2, so).s_lower;
    }
  } catch (const std::exception& e) {
    row.solver_status = std::string("error: ") + e.what();
  }
  return row;
}

std::vector<ScanRow> run_scan(const ScanConfig& c, const std::function<void(const ScanRow&)>& on_row) {
  c.validate();
  const auto t1s = c.t1.values(), dts = c.dt.values();
  const std::size_t total = t1s.size() * dts.size();
  std::vector<ScanRow> rows(total);
  std::vector<char> done(total, 0);
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t flushed = 0;
  auto worker = [&] {
    for (std::size_t k = next++; k < total; k = next++) {
      ScanRow row = evaluate_point(c, k, t1s[k / dts.size()], dts[k % dts.size()]);
      std::lock_guard<std::mutex> lock(mu);
      rows[k] = std::move(row);
      done[k] = 1;
      while (flushed < total && done[flushed]) {
        if (on_row) on_row(rows[flushed]);
        ++flushed;
      }
    }
  };
  const int n = std::min<int>(c.workers, static_cast<int>(total));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

std::string csv_header(const ScanConfig& c) {
  std::string h = "t1,dt,r_quantum,r_markov,analytic_verdict,s_star,solver_status";
  if (c.seesaw) h += ",s_seesaw";
  return h;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string csv_line(const ScanConfig& c, const ScanRow& row) {
  std::string status = row.solver_status;
  for (auto& ch : status)
    if (ch == ',' || ch == '\n') ch = ';';
  std::string line = num(row.t1) + "," + num(row.dt) + "," + num(row.r_quantum) + "," + num(row.r_markov) + "," +
                     row.analytic_verdict + "," + num(row.s_star) + "," + status;
  if (c.seesaw) line += "," + num(row.s_seesaw);
  return line;
}

}  // namespace qmem
