#pragma once

#include <string>

#include "json.hpp"
#include "kfbem/geometry.hpp"
#include "kfbem/types.hpp"

namespace kfbem {

/// Mesh and interface as JSON with a fixed field order (deterministic dumps).
nlohmann::json mesh_to_json(const Mesh2D& mesh);
nlohmann::json interface_to_json(const InterfaceMesh& iface);

nlohmann::json complex_array(const VectorXc& v);
VectorXc complex_vector_from_json(const nlohmann::json& j, const std::string& pointer);

/// {"n_h": n, "V": [[re, im], ...] row-major, "rhs": [...], "z": [...]}.
nlohmann::json system_to_json(const MatrixXc& v, const VectorXc& rhs, const VectorXc& z);

struct SystemData {
  MatrixXc v;
  VectorXc rhs;
  VectorXc z;
};
SystemData system_from_json(const nlohmann::json& j);

/// Binary matrix file: "KFBV", u32 version, u64 rows, u64 cols, then
/// row-major little-endian f64 pairs (re, im).
void write_kfbv(const std::string& path, const MatrixXc& m);
MatrixXc read_kfbv(const std::string& path);

/// Sparse matrix file used by the preprocessing cache ("KFBS", checksummed).
void write_sparse(const std::string& path, const SparseRowC& a);
SparseRowC read_sparse(const std::string& path);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

}  // namespace kfbem
