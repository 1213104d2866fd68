// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlcpe/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

namespace hlcpe {

namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream os(path, mode);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  return os;
}

void put_le(std::ostream& os, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int n = 0; n < 8; ++n) b[n] = static_cast<unsigned char>(bits >> (8 * n));
  os.write(reinterpret_cast<const char*>(b), 8);
}

double get_le(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw IoError("truncated binary field");
  std::uint64_t bits = 0;
  for (int n = 0; n < 8; ++n) bits |= std::uint64_t(b[n]) << (8 * n);
  return std::bit_cast<double>(bits);
}

void write_header(const std::string& path, std::vector<int> dims, int ncomp) {
  nlohmann::json h;
  h["format"] = "hlcpe-field";
  h["version"] = 1;
  h["dims"] = dims;
  h["components"] = ncomp;
  h["dtype"] = "float64";
  h["endianness"] = "little";
  h["order"] = dims.size() == 3 ? std::vector<std::string>{"x", "y", "z", "component"}
                                : std::vector<std::string>{"x", "y", "component"};
  auto os = open_out(path + ".json");
  os << h.dump(2) << "\n";
}

nlohmann::json read_header(const std::string& path) {
  std::ifstream is(path + ".json");
  if (!is) throw IoError("cannot open '" + path + ".json'");
  return nlohmann::json::parse(is);
}

std::string header_line(bool has_z, int ncomp, const std::vector<std::string>& names) {
  std::string s = has_z ? "x,y,z" : "x,y";
  for (int c = 0; c < ncomp; ++c)
    s += "," + (c < int(names.size()) ? names[c] : "c" + std::to_string(c));
  return s;
}

}  // namespace

void write_csv(const Field2D& f, const Grid& g, const std::string& path, const std::vector<std::string>& names) {
  require_on_grid(f, g, "write_csv");
  auto os = open_out(path);
  os.precision(17);
  os << header_line(false, f.ncomp(), names) << "\n";
  for (int i = 0; i < f.nx(); ++i)
    for (int j = 0; j < f.ny(); ++j) {
      os << g.x(i) << "," << g.y(j);
      for (int c = 0; c < f.ncomp(); ++c) os << "," << f(c, i, j);
      os << "\n";
    }
}

void write_csv(const Field3D& f, const Grid& g, const std::string& path, const std::vector<std::string>& names) {
  require_on_grid(f, g, "write_csv");
  auto os = open_out(path);
  os.precision(17);
  os << header_line(true, f.ncomp(), names) << "\n";
  for (int i = 0; i < f.nx(); ++i)
    for (int j = 0; j < f.ny(); ++j)
      for (int k = 0; k < f.nz(); ++k) {
        os << g.x(i) << "," << g.y(j) << "," << g.z(k);
        for (int c = 0; c < f.ncomp(); ++c) os << "," << f(c, i, j, k);
        os << "\n";
      }
}

void write_binary(const Field2D& f, const std::string& path) {
  auto os = open_out(path, std::ios::out | std::ios::binary);
  for (int i = 0; i < f.nx(); ++i)
    for (int j = 0; j < f.ny(); ++j)
      for (int c = 0; c < f.ncomp(); ++c) put_le(os, f(c, i, j));
  write_header(path, {f.nx(), f.ny()}, f.ncomp());
}

void write_binary(const Field3D& f, const std::string& path) {
  auto os = open_out(path, std::ios::out | std::ios::binary);
  for (int i = 0; i < f.nx(); ++i)
    for (int j = 0; j < f.ny(); ++j)
      for (int k = 0; k < f.nz(); ++k)
        for (int c = 0; c < f.ncomp(); ++c) put_le(os, f(c, i, j, k));
  write_header(path, {f.nx(), f.ny(), f.nz()}, f.ncomp());
}

Field2D read_binary2d(const std::string& path) {
  auto h = read_header(path);
  auto dims = h.at("dims").get<std::vector<int>>();
  if (dims.size() != 2) throw IoError("'" + path + "' is not a 2D field");
  Field2D f(dims[0], dims[1], h.at("components").get<int>());
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  for (int i = 0; i < f.nx(); ++i)
    for (int j = 0; j < f.ny(); ++j)
      for (int c = 0; c < f.ncomp(); ++c) f(c, i, j) = get_le(is);
  return f;
}

Field3D read_binary3d(const std::string& path) {
  auto h = read_header(path);
  auto dims = h.at("dims").get<std::vector<int>>();
  if (dims.size() != 3) throw IoError("'" + path + "' is not a 3D field");
  Field3D f(dims[0], dims[1], dims[2], h.at("components").get<int>());
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  for (int i = 0; i < f.nx(); ++i)
    for (int j = 0; j < f.ny(); ++j)
      for (int k = 0; k < f.nz(); ++k)
        for (int c = 0; c < f.ncomp(); ++c) f(c, i, j, k) = get_le(is);
  return f;
}

}  // namespace hlcpe
