#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmem/dynamics.hpp"
#include "qmem/sdp.hpp"

namespace qmem {

enum class Family { GA2, GA3, Dephasing, Heisenberg };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

struct Grid {
  double min = 0.0;
  double max = 1.0;
  int steps = 2;
  std::vector<double> values() const;
};

// alpha(t) = exp(-decay t) cos(frequency t)
struct DephasingProfile {
  double decay = 1.0;
  double frequency = 1.0;
  cplx alpha(double t) const;
};

// Grid axes: amplitude decay rate times t for the giant-atom families, plain time otherwise.
struct ScanConfig {
  Family family = Family::GA2;
  GiantAtom2LParams ga2;
  GiantAtom3LParams ga3;
  DephasingProfile dephasing;
  HeisenbergParams heisenberg{-1.0, -2.0, -3.0};
  Grid t1{0.0, 12.0, 60};
  Grid dt{0.0, 6.0, 30};
  bool quantum = true;
  bool markov = true;
  bool analytic = true;
  bool seesaw = false;  // adds an s_seesaw column
  std::string output;
  int workers = 1;
  std::uint64_t seed = 1;
  double threshold = 1e-6;
  sdp::SolverOptions solver;
  void validate() const;
};

// Config keys mirror the field names; physical parameters sit under "ga2", "ga3", "dephasing",
// "heisenberg", grids under "t1_grid"/"dt_grid" as {min, max, steps}, and "outputs" holds the flags.
ScanConfig scan_config_from_json(const nlohmann::json& j, ScanConfig base = {});
nlohmann::json to_json(const ScanConfig& c);

struct ScanRow {
  std::size_t index = 0;
  double t1 = 0.0;
  double dt = 0.0;
  double r_quantum = 0.0;
  double r_markov = 0.0;
  std::string analytic_verdict;
  double s_star = 1.0;
  std::string solver_status;
  double s_seesaw = 0.0;
};

// Channel pair of the family at axis values (t1, t1 + dt).
std::pair<ChoiOperator, ChoiOperator> scan_pair(const ScanConfig& c, double t1, double t2);
ScanRow evaluate_point(const ScanConfig& c, std::size_t index, double t1, double dt);

// Rows in grid order (t1 major). on_row is called in grid order from a single thread at a time.
std::vector<ScanRow> run_scan(const ScanConfig& c, const std::function<void(const ScanRow&)>& on_row = {});

std::string csv_header(const ScanConfig& c);
std::string csv_line(const ScanConfig& c, const ScanRow& row);

}  // namespace qmem
