#pragma once

#include <string>

#include <json.hpp>

#include "livsic/colligation.hpp"
#include "livsic/factorize.hpp"
#include "livsic/models.hpp"
#include "livsic/multint.hpp"

namespace livsic::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Complex numbers are [re, im] pairs; matrices are arrays of rows.
json to_json(cplx z);
json to_json(const Mat& M);
json to_json(const Vec& v);
cplx complex_from_json(const json& j, const std::string& what);
Mat matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& what);
Mat matrix_from_json(const json& j, const std::string& what);  // shape from the data

json to_json(const Colligation& c);
Colligation colligation_from_json(const json& j);

json to_json(const BlaschkeProduct& bp);
BlaschkeProduct blaschke_from_json(const json& j);

// Canonical text: two-space indented JSON with sorted keys and a trailing
// newline. serialize(parse(text)) == text for canonical text.
std::string serialize(const Colligation& c);
Colligation parse_colligation(const std::string& text);

json parse_json(const std::string& text);  // ParseError carries line/column

// Square matrix given either as {"A": [...]} or as a bare array of rows.
Mat parse_matrix(const std::string& text);

// CSV with header: t, a, then xi entries row-major as re/im column pairs.
// r is the external dimension; q follows from the column count.
ContinuousModelData parse_continuous_csv(const std::string& text, Eigen::Index r);

// CSV with header: t, then H(t) entries row-major as re/im column pairs.
StieltjesWeight parse_weight_csv(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace livsic::io
