#include "qmem/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace qmem::io {

namespace {

nlohmann::json real_rows(const Mat& m, bool imag) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(imag ? m(i, j).imag() : m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat complex_matrix(const nlohmann::json& re, const nlohmann::json& im, int n) {
  if (!re.is_array() || !im.is_array() || static_cast<int>(re.size()) != n || static_cast<int>(im.size()) != n)
    throw std::invalid_argument("matrix field has wrong shape");
  Mat m(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& rr = re[static_cast<std::size_t>(i)];
    const auto& ir = im[static_cast<std::size_t>(i)];
    if (static_cast<int>(rr.size()) != n || static_cast<int>(ir.size()) != n)
      throw std::invalid_argument("matrix row has wrong length");
    for (int j = 0; j < n; ++j)
      m(i, j) = cplx(rr[static_cast<std::size_t>(j)].get<double>(), ir[static_cast<std::size_t>(j)].get<double>());
  }
  return m;
}

}  // namespace

nlohmann::json to_json(const ChoiOperator& choi) {
  return {{"dim_in", choi.dim_in()},
          {"dim_out", choi.dim_out()},
          {"re", real_rows(choi.matrix(), false)},
          {"im", real_rows(choi.matrix(), true)}};
}

ChoiOperator choi_from_json(const nlohmann::json& j) {
  const int din = j.at("dim_in").get<int>();
  const int dout = j.at("dim_out").get<int>();
  return ChoiOperator(din, dout, complex_matrix(j.at("re"), j.at("im"), din * dout));
}

nlohmann::json to_json(const WitnessPair& w) {
  return {{"dim", w.dim},
          {"w1_re", real_rows(w.w1, false)},
          {"w1_im", real_rows(w.w1, true)},
          {"w2_re", real_rows(w.w2, false)},
          {"w2_im", real_rows(w.w2, true)}};
}

WitnessPair witness_from_json(const nlohmann::json& j) {
  WitnessPair w;
  w.dim = j.at("dim").get<int>();
  if (w.dim < 1) throw std::invalid_argument("witness dimension must be positive");
  const int n = w.dim * w.dim;
  w.w1 = complex_matrix(j.at("w1_re"), j.at("w1_im"), n);
  w.w2 = complex_matrix(j.at("w2_re"), j.at("w2_im"), n);
  return w;
}

nlohmann::json to_json(const MemoryVerdict& v) { return {{"kind", to_string(v.kind)}, {"margin", v.margin}}; }

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return nlohmann::json::parse(in);
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << std::setw(2) << j << '\n';
}

Eigen::MatrixXd read_coefficient_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("ragged coefficient table in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("empty coefficient table in " + path);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

void write_coefficient_csv(const std::string& path, const Eigen::MatrixXd& w) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << std::setprecision(17);
  for (int i = 0; i < w.rows(); ++i) {
    for (int j = 0; j < w.cols(); ++j) out << (j ? "," : "") << w(i, j);
    out << '\n';
  }
}

}  // namespace qmem::io
