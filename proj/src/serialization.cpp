#include "kfbem/serialization.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "kfbem/error.hpp"
#include "kfbem/hash.hpp"

namespace kfbem {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace {

constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::string& buf, const T& v) {
  buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T take(const std::string& buf, std::size_t& pos, const std::string& path) {
  if (pos + sizeof(T) > buf.size()) throw Error(ErrorCode::CacheCorrupt, "truncated file " + path);
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

std::string read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

json mesh_to_json(const Mesh2D& mesh) {
  json j;
  json verts = json::array();
  for (const auto& v : mesh.vertices) verts.push_back({v.x, v.y});
  json tris = json::array();
  for (const auto& t : mesh.triangles) tris.push_back({t[0], t[1], t[2]});
  json faces = json::array();
  for (const auto& f : mesh.boundary)
    faces.push_back({{"edge", {f.edge[0], f.edge[1]}},
                     {"marker", f.marker == Marker::Dirichlet ? "dirichlet" : "neumann"},
                     {"side", f.side}});
  j["vertices"] = verts;
  j["triangles"] = tris;
  j["boundary"] = faces;
  j["embedded_loops"] = mesh.embedded_loops;
  j["d_max"] = mesh.d_max;
  j["d_min"] = mesh.d_min;
  j["shape_constant"] = mesh.shape_constant;
  j["quasi_uniformity"] = mesh.quasi_uniformity;
  return j;
}

json interface_to_json(const InterfaceMesh& iface) {
  json pts = json::array();
  for (const auto& p : iface.points) pts.push_back({p.x, p.y});
  return {{"points", pts}, {"closed", iface.closed}, {"h_max", iface.h_max}, {"h_min", iface.h_min}};
}

json complex_array(const VectorXc& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v(i).real(), v(i).imag()});
  return a;
}

VectorXc complex_vector_from_json(const json& j, const std::string& pointer) {
  if (!j.is_array()) throw Error(ErrorCode::Schema, pointer + ": expected an array of [re, im]");
  VectorXc v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw Error(ErrorCode::Schema, pointer + "/" + std::to_string(i) + ": expected [re, im]");
    v(static_cast<Eigen::Index>(i)) = {e[0].get<double>(), e[1].get<double>()};
  }
  return v;
}

json system_to_json(const MatrixXc& v, const VectorXc& rhs, const VectorXc& z) {
  json m = json::array();
  for (Eigen::Index r = 0; r < v.rows(); ++r)
    for (Eigen::Index c = 0; c < v.cols(); ++c) m.push_back({v(r, c).real(), v(r, c).imag()});
  json j;
  j["n_h"] = v.rows();
  j["V"] = m;
  j["rhs"] = complex_array(rhs);
  j["z"] = complex_array(z);
  return j;
}

SystemData system_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n_h") || !j["n_h"].is_number_integer())
    throw Error(ErrorCode::Schema, "/n_h: missing");
  const auto n = j["n_h"].get<Eigen::Index>();
  SystemData s;
  const VectorXc flat = complex_vector_from_json(j.at("V"), "/V");
  if (flat.size() != n * n) throw Error(ErrorCode::Schema, "/V: expected n_h * n_h entries");
  s.v.resize(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) s.v(r, c) = flat(r * n + c);
  s.rhs = complex_vector_from_json(j.at("rhs"), "/rhs");
  s.z = complex_vector_from_json(j.at("z"), "/z");
  return s;
}

void write_kfbv(const std::string& path, const MatrixXc& m) {
  std::string buf("KFBV");
  put(buf, kVersion);
  put(buf, static_cast<std::uint64_t>(m.rows()));
  put(buf, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      put(buf, m(r, c).real());
      put(buf, m(r, c).imag());
    }
  write_text(path, buf);
}

MatrixXc read_kfbv(const std::string& path) {
  const std::string buf = read_binary(path);
  if (buf.size() < 24 || buf.compare(0, 4, "KFBV") != 0) throw Error(ErrorCode::Parse, path + " is not a KFBV file");
  std::size_t pos = 4;
  if (take<std::uint32_t>(buf, pos, path) != kVersion) throw Error(ErrorCode::Parse, "unsupported KFBV version");
  const auto rows = take<std::uint64_t>(buf, pos, path);
  const auto cols = take<std::uint64_t>(buf, pos, path);
  if (buf.size() - pos != rows * cols * 16) throw Error(ErrorCode::Parse, path + ": size does not match header");
  MatrixXc m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double re = take<double>(buf, pos, path);
      const double im = take<double>(buf, pos, path);
      m(r, c) = {re, im};
    }
  return m;
}

void write_sparse(const std::string& path, const SparseRowC& a) {
  SparseRowC c = a;
  c.makeCompressed();
  std::string buf("KFBS");
  put(buf, kVersion);
  put(buf, static_cast<std::uint64_t>(c.rows()));
  put(buf, static_cast<std::uint64_t>(c.cols()));
  put(buf, static_cast<std::uint64_t>(c.nonZeros()));
  buf.append(reinterpret_cast<const char*>(c.outerIndexPtr()), sizeof(int) * (c.rows() + 1));
  buf.append(reinterpret_cast<const char*>(c.innerIndexPtr()), sizeof(int) * c.nonZeros());
  buf.append(reinterpret_cast<const char*>(c.valuePtr()), sizeof(cplx) * c.nonZeros());
  put(buf, fnv1a(buf.data(), buf.size()));
  write_text(path, buf);
}

SparseRowC read_sparse(const std::string& path) {
  const std::string buf = read_binary(path);
  if (buf.size() < 36 || buf.compare(0, 4, "KFBS") != 0) throw Error(ErrorCode::CacheCorrupt, path + " is not a KFBS file");
  const std::size_t body = buf.size() - 8;
  std::uint64_t stored = 0;
  std::memcpy(&stored, buf.data() + body, 8);
  if (fnv1a(buf.data(), body) != stored) throw Error(ErrorCode::CacheCorrupt, "checksum mismatch in " + path);
  std::size_t pos = 4;
  if (take<std::uint32_t>(buf, pos, path) != kVersion) throw Error(ErrorCode::CacheCorrupt, "unsupported version");
  const auto rows = take<std::uint64_t>(buf, pos, path);
  const auto cols = take<std::uint64_t>(buf, pos, path);
  const auto nnz = take<std::uint64_t>(buf, pos, path);
  if (body - pos != sizeof(int) * (rows + 1 + nnz) + sizeof(cplx) * nnz)
    throw Error(ErrorCode::CacheCorrupt, path + ": size does not match header");
  std::vector<int> ptr(rows + 1), idx(nnz);
  std::vector<cplx> val(nnz);
  std::memcpy(ptr.data(), buf.data() + pos, sizeof(int) * ptr.size());
  pos += sizeof(int) * ptr.size();
  std::memcpy(idx.data(), buf.data() + pos, sizeof(int) * idx.size());
  pos += sizeof(int) * idx.size();
  std::memcpy(val.data(), buf.data() + pos, sizeof(cplx) * val.size());
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(nnz);
  for (std::uint64_t r = 0; r < rows; ++r) {
    if (ptr[r] > ptr[r + 1] || ptr[r + 1] > static_cast<int>(nnz)) throw Error(ErrorCode::CacheCorrupt, "bad row pointer");
    for (int e = ptr[r]; e < ptr[r + 1]; ++e) {
      if (idx[e] < 0 || static_cast<std::uint64_t>(idx[e]) >= cols) throw Error(ErrorCode::CacheCorrupt, "bad column index");
      trip.emplace_back(static_cast<int>(r), idx[e], val[e]);
    }
  }
  SparseRowC a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

std::string read_text(const std::string& path) { return read_binary(path); }

}  // namespace kfbem
