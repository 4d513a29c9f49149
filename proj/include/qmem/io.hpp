#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "qmem/channel.hpp"
#include "qmem/criteria.hpp"
#include "qmem/witness.hpp"

namespace qmem::io {

nlohmann::json to_json(const ChoiOperator& choi);
ChoiOperator choi_from_json(const nlohmann::json& j);

nlohmann::json to_json(const WitnessPair& w);
WitnessPair witness_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MemoryVerdict& v);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

// Rectangular real table, rows = preparation index, cols = observable index.
Eigen::MatrixXd read_coefficient_csv(const std::string& path);
void write_coefficient_csv(const std::string& path, const Eigen::MatrixXd& w);

}  // namespace qmem::io
