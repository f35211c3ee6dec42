#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace polyrom {

// PODS1 container: named dense f64 matrices, bit-exact round trip.
// Layout: magic "PODS1\n", then per entry: name length (u32 LE), name bytes,
// rows (u64 LE), cols (u64 LE), row-major f64 LE payload.
using NamedMatrices = std::vector<std::pair<std::string, Eigen::MatrixXd>>;

std::string encode_store(const NamedMatrices& entries);
NamedMatrices decode_store(const std::string& bytes);

void write_store(const std::string& path, const NamedMatrices& entries);
NamedMatrices read_store(const std::string& path);

// Lookup helper; throws IoError when the name is missing.
const Eigen::MatrixXd& store_get(const NamedMatrices& entries,
                                 const std::string& name);

}  // namespace polyrom
