#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scan2map/point_cloud.hpp"

namespace scan2map {

enum class PlyFormat { BinaryLittleEndian, Ascii };

namespace detail {

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

inline std::optional<PlyType> ply_type_from_name(const std::string& name) {
  if (name == "char" || name == "int8") return PlyType::Int8;
  if (name == "uchar" || name == "uint8") return PlyType::UInt8;
  if (name == "short" || name == "int16") return PlyType::Int16;
  if (name == "ushort" || name == "uint16") return PlyType::UInt16;
  if (name == "int" || name == "int32") return PlyType::Int32;
  if (name == "uint" || name == "uint32") return PlyType::UInt32;
  if (name == "float" || name == "float32") return PlyType::Float32;
  if (name == "double" || name == "float64") return PlyType::Float64;
  return std::nullopt;
}

inline std::size_t ply_type_size(PlyType t) {
  switch (t) {
    case PlyType::Int8:
    case PlyType::UInt8:
      return 1;
    case PlyType::Int16:
    case PlyType::UInt16:
      return 2;
    case PlyType::Int32:
    case PlyType::UInt32:
    case PlyType::Float32:
      return 4;
    case PlyType::Float64:
      return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::Float32;
  bool is_list = false;
  PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

inline double read_binary_scalar(std::istream& in, PlyType t) {
  std::array<char, 8> buf{};
  in.read(buf.data(), static_cast<std::streamsize>(ply_type_size(t)));
  switch (t) {
    case PlyType::Int8: {
      std::int8_t v;
      std::memcpy(&v, buf.data(), 1);
      return v;
    }
    case PlyType::UInt8: {
      std::uint8_t v;
      std::memcpy(&v, buf.data(), 1);
      return v;
    }
    case PlyType::Int16: {
      std::int16_t v;
      std::memcpy(&v, buf.data(), 2);
      return v;
    }
    case PlyType::UInt16: {
      std::uint16_t v;
      std::memcpy(&v, buf.data(), 2);
      return v;
    }
    case PlyType::Int32: {
      std::int32_t v;
      std::memcpy(&v, buf.data(), 4);
      return v;
    }
    case PlyType::UInt32: {
      std::uint32_t v;
      std::memcpy(&v, buf.data(), 4);
      return v;
    }
    case PlyType::Float32: {
      float v;
      std::memcpy(&v, buf.data(), 4);
      return v;
    }
    case PlyType::Float64: {
      double v;
      std::memcpy(&v, buf.data(), 8);
      return v;
    }
  }
  return 0.0;
}

template <typename T>
void write_le(std::ostream& out, T value) {
  // Host is little-endian on every supported target; memcpy keeps the write
  // alias-safe.
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.write(buf, sizeof(T));
}

}  // namespace detail

/// Reads a PLY point cloud: ASCII or binary-little-endian, element "vertex"
/// with float32/float64 x, y, z and optional nx, ny, nz. Unknown properties
/// and elements are skipped.
inline PointCloud read_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("read_ply: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line) || (line != "ply" && line != "ply\r")) {
    throw ParseError("read_ply: missing ply magic in " + path);
  }
  bool binary = false;
  bool format_seen = false;
  std::vector<detail::PlyElement> elements;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "comment" || word == "obj_info" || word.empty()) continue;
    if (word == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt == "ascii") {
        binary = false;
      } else if (fmt == "binary_little_endian") {
        binary = true;
      } else {
        throw ParseError("read_ply: unsupported format '" + fmt + "' in " + path);
      }
      format_seen = true;
    } else if (word == "element") {
      detail::PlyElement el;
      ls >> el.name >> el.count;
      if (ls.fail()) throw ParseError("read_ply: bad element line in " + path);
      elements.push_back(el);
    } else if (word == "property") {
      if (elements.empty()) throw ParseError("read_ply: property before element in " + path);
      detail::PlyProperty prop;
      std::string type_name;
      ls >> type_name;
      if (type_name == "list") {
        std::string count_name, item_name;
        ls >> count_name >> item_name >> prop.name;
        const auto ct = detail::ply_type_from_name(count_name);
        const auto it = detail::ply_type_from_name(item_name);
        if (!ct || !it || ls.fail()) throw ParseError("read_ply: bad list property in " + path);
        prop.is_list = true;
        prop.count_type = *ct;
        prop.type = *it;
      } else {
        const auto t = detail::ply_type_from_name(type_name);
        ls >> prop.name;
        if (!t || ls.fail()) throw ParseError("read_ply: bad property line in " + path);
        prop.type = *t;
      }
      elements.back().properties.push_back(prop);
    } else if (word == "end_header") {
      break;
    } else {
      throw ParseError("read_ply: unknown header keyword '" + word + "' in " + path);
    }
  }
  if (!format_seen) throw ParseError("read_ply: missing format line in " + path);

  PointCloud cloud;
  for (const auto& el : elements) {
    int ix = -1, iy = -1, iz = -1, inx = -1, iny = -1, inz = -1;
    const bool is_vertex = el.name == "vertex";
    if (is_vertex) {
      for (std::size_t p = 0; p < el.properties.size(); ++p) {
        const auto& prop = el.properties[p];
        if (prop.is_list) continue;
        if (prop.type != detail::PlyType::Float32 && prop.type != detail::PlyType::Float64)
          continue;
        const int idx = static_cast<int>(p);
        if (prop.name == "x") ix = idx;
        if (prop.name == "y") iy = idx;
        if (prop.name == "z") iz = idx;
        if (prop.name == "nx") inx = idx;
        if (prop.name == "ny") iny = idx;
        if (prop.name == "nz") inz = idx;
      }
      if (ix < 0 || iy < 0 || iz < 0) {
        throw ParseError("read_ply: vertex element lacks float x/y/z in " + path);
      }
      cloud.points.reserve(el.count);
      if (inx >= 0 && iny >= 0 && inz >= 0) cloud.normals.reserve(el.count);
    }
    const bool want_normals = inx >= 0 && iny >= 0 && inz >= 0;
    std::vector<double> values(el.properties.size(), 0.0);
    for (std::size_t row = 0; row < el.count; ++row) {
      if (binary) {
        for (std::size_t p = 0; p < el.properties.size(); ++p) {
          const auto& prop = el.properties[p];
          if (prop.is_list) {
            const auto n = static_cast<std::size_t>(detail::read_binary_scalar(in, prop.count_type));
            in.seekg(static_cast<std::streamoff>(n * detail::ply_type_size(prop.type)),
                     std::ios::cur);
          } else {
            values[p] = detail::read_binary_scalar(in, prop.type);
          }
        }
      } else {
        for (std::size_t p = 0; p < el.properties.size(); ++p) {
          const auto& prop = el.properties[p];
          if (prop.is_list) {
            double n = 0;
            if (!(in >> n)) throw ParseError("read_ply: truncated ascii data in " + path);
            double dummy;
            for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) in >> dummy;
          } else {
            if (!(in >> values[p])) throw ParseError("read_ply: truncated ascii data in " + path);
          }
        }
      }
      if (!in) throw ParseError("read_ply: truncated data in " + path);
      if (is_vertex) {
        cloud.points.emplace_back(values[ix], values[iy], values[iz]);
        if (want_normals) cloud.normals.emplace_back(values[inx], values[iny], values[inz]);
      }
    }
  }
  return cloud;
}

/// Writes a point cloud as PLY, float64 properties x, y, z and nx, ny, nz
/// when normals are present. Default format is binary-little-endian.
inline void write_ply(const std::string& path, const PointCloud& cloud,
                      PlyFormat format = PlyFormat::BinaryLittleEndian) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("write_ply: cannot open " + path);
  }
  const bool binary = format == PlyFormat::BinaryLittleEndian;
  out.precision(17);
  out << "ply\n";
  out << "format " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n";
  out << "element vertex " << cloud.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  if (cloud.has_normals()) {
    out << "property double nx\nproperty double ny\nproperty double nz\n";
  }
  out << "end_header\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.points[i];
    if (binary) {
      detail::write_le(out, p.x());
      detail::write_le(out, p.y());
      detail::write_le(out, p.z());
      if (cloud.has_normals()) {
        const auto& n = cloud.normals[i];
        detail::write_le(out, n.x());
        detail::write_le(out, n.y());
        detail::write_le(out, n.z());
      }
    } else {
      out << p.x() << ' ' << p.y() << ' ' << p.z();
      if (cloud.has_normals()) {
        const auto& n = cloud.normals[i];
        out << ' ' << n.x() << ' ' << n.y() << ' ' << n.z();
      }
      out << '\n';
    }
  }
  if (!out) {
    throw IoError("write_ply: write failed for " + path);
  }
}

}  // namespace scan2map
