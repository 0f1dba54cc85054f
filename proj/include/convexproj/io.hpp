#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "convexproj/body.hpp"
#include "convexproj/cusps.hpp"
#include "convexproj/errors.hpp"
#include "convexproj/linalg.hpp"
#include "convexproj/smoothing.hpp"

namespace convexproj {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaTag = "convexproj/1";

// I/O failures and malformed inputs map to CLI exit code 2, unlike
// DomainError (exit 1): the distinction is "bad file" versus "bad math".
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------------------
// Emission.  All floating-point numbers are written with 17 significant
// digits, enough to reproduce the exact double on re-parse, and identical
// inputs always produce identical bytes.
// ---------------------------------------------------------------------------

inline std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s = buf;
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

namespace detail {

inline void append_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  out += '"';
}

inline bool all_scalars(const Json& j) {
  for (const auto& e : j)
    if (e.is_structured()) return false;
  return true;
}

inline void write_json(const Json& j, std::string& out, int depth) {
  switch (j.type()) {
    case Json::value_t::null:
      out += "null";
      return;
    case Json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      return;
    case Json::value_t::string:
      append_escaped(out, j.get<std::string>());
      return;
    case Json::value_t::number_integer:
      out += std::to_string(j.get<long long>());
      return;
    case Json::value_t::number_unsigned:
      out += std::to_string(j.get<unsigned long long>());
      return;
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      if (all_scalars(j)) {
        out += '[';
        for (size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write_json(j[i], out, depth + 1);
        }
        out += ']';
        return;
      }
      out += "[\n";
      for (size_t i = 0; i < j.size(); ++i) {
        out.append(2 * (depth + 1), ' ');
        write_json(j[i], out, depth + 1);
        if (i + 1 < j.size()) out += ',';
        out += '\n';
      }
      out.append(2 * depth, ' ');
      out += ']';
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      size_t i = 0;
      for (const auto& item : j.items()) {
        out.append(2 * (depth + 1), ' ');
        append_escaped(out, item.key());
        out += ": ";
        write_json(item.value(), out, depth + 1);
        if (++i < j.size()) out += ',';
        out += '\n';
      }
      out.append(2 * depth, ' ');
      out += '}';
      return;
    }
    default:
      out += "null";
      return;
  }
}

}  // namespace detail

inline std::string dump_artifact(const Json& j) {
  std::string out;
  detail::write_json(j, out, 0);
  out += '\n';
  return out;
}

// ---------------------------------------------------------------------------
// Files.
// ---------------------------------------------------------------------------

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out.good()) throw IoError("cannot write " + path);
}

inline Json load_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Parsing.  Every reader validates shape and reports which field failed; a
// "schema" key is optional on input but must match kSchemaTag when present.
// ---------------------------------------------------------------------------

inline void check_schema(const Json& j, const char* what) {
  if (!j.is_object())
    throw SchemaError(std::string(what) + " must be a JSON object");
  if (j.contains("schema")) {
    const Json& s = j.at("schema");
    if (!s.is_string() || s.get<std::string>() != kSchemaTag)
      throw SchemaError(std::string(what) + " has schema != " + kSchemaTag);
  }
}

inline const Json& require_field(const Json& j, const char* key,
                                 const char* what) {
  if (!j.is_object() || !j.contains(key))
    throw SchemaError(std::string(what) + " is missing \"" + key + "\"");
  return j.at(key);
}

inline Vec vec_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw SchemaError(std::string(what) + " must be a nonempty number array");
  Vec v(static_cast<int>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw SchemaError(std::string(what) + " must contain only numbers");
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  return v;
}

inline Json json_from_vec(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Mat mat_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw SchemaError(std::string(what) + " must be a nonempty array of rows");
  std::vector<Vec> rows;
  rows.reserve(j.size());
  for (const auto& r : j) rows.push_back(vec_from_json(r, what));
  Mat m(static_cast<int>(rows.size()), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw SchemaError(std::string(what) + " has rows of unequal length");
    m.row(static_cast<int>(i)) = rows[i];
  }
  return m;
}

inline Json json_from_mat(const Mat& m) {
  Json a = Json::array();
  for (int i = 0; i < m.rows(); ++i) a.push_back(json_from_vec(m.row(i)));
  return a;
}

inline double number_from_json(const Json& j, const char* what) {
  if (!j.is_number())
    throw SchemaError(std::string(what) + " must be a number");
  return j.get<double>();
}

inline int int_from_json(const Json& j, const char* what) {
  if (!j.is_number_integer() && !j.is_number_unsigned())
    throw SchemaError(std::string(what) + " must be an integer");
  return j.get<int>();
}

// ---------------------------------------------------------------------------
// Convex bodies: {"dim": n, "vertices": [[...]], "facets": [{"normal":
// [...], "offset": r}]}.  Facets are derived from the vertices when absent;
// facet-only bodies (possibly unbounded) are accepted as charts.
// ---------------------------------------------------------------------------

inline ConvexBody body_from_json(const Json& j) {
  check_schema(j, "body");
  const int dim = int_from_json(require_field(j, "dim", "body"), "body dim");
  if (dim < 1 || dim > 4) throw SchemaError("body dim must be in 1..4");
  std::vector<Vec> pts;
  if (j.contains("vertices")) {
    for (const auto& v : j.at("vertices")) {
      pts.push_back(vec_from_json(v, "body vertex"));
      if (pts.back().size() != dim)
        throw SchemaError("body vertex length != dim");
    }
  }
  if (!j.contains("facets")) {
    if (pts.empty()) throw SchemaError("body needs vertices or facets");
    return convex_hull(pts);
  }
  ConvexBody body;
  body.dim = dim;
  body.vertices = std::move(pts);
  for (const auto& f : j.at("facets")) {
    Facet facet;
    facet.normal = vec_from_json(require_field(f, "normal", "facet"),
                                 "facet normal");
    if (facet.normal.size() != dim)
      throw SchemaError("facet normal length != dim");
    facet.offset = number_from_json(require_field(f, "offset", "facet"),
                                    "facet offset");
    const double len = facet.normal.norm();
    if (len <= 1e-12) throw SchemaError("facet normal is zero");
    if (std::abs(len - 1.0) > 1e-12) {
      facet.normal /= len;
      facet.offset /= len;
    }
    body.facets.push_back(std::move(facet));
  }
  if (body.facets.empty() && body.vertices.empty())
    throw SchemaError("body needs vertices or facets");
  return body;
}

inline Json json_from_body(const ConvexBody& body) {
  Json j;
  j["schema"] = kSchemaTag;
  j["dim"] = body.dim;
  Json verts = Json::array();
  for (const Vec& v : body.vertices) verts.push_back(json_from_vec(v));
  j["vertices"] = std::move(verts);
  Json facets = Json::array();
  for (const Facet& f : body.facets) {
    Json jf;
    jf["normal"] = json_from_vec(f.normal);
    jf["offset"] = f.offset;
    facets.push_back(std::move(jf));
  }
  j["facets"] = std::move(facets);
  return j;
}

// ---------------------------------------------------------------------------
// Cones: {"dim": ambient, "generators": [[...]]}.  Facet normals are always
// rebuilt, so geometric degeneracy surfaces as a domain error, not here.
// ---------------------------------------------------------------------------

inline PolyCone cone_from_json(const Json& j) {
  check_schema(j, "cone");
  const int dim = int_from_json(require_field(j, "dim", "cone"), "cone dim");
  if (dim < 2 || dim > 5) throw SchemaError("cone dim must be in 2..5");
  std::vector<Vec> rays;
  for (const auto& r : require_field(j, "generators", "cone")) {
    rays.push_back(vec_from_json(r, "cone generator"));
    if (rays.back().size() != dim)
      throw SchemaError("cone generator length != dim");
  }
  if (rays.empty()) throw SchemaError("cone needs at least one generator");
  return make_cone(std::move(rays));
}

inline Json json_from_cone(const PolyCone& cone) {
  Json j;
  j["schema"] = kSchemaTag;
  j["dim"] = cone.dim_ambient;
  Json gens = Json::array();
  for (const Vec& g : cone.generators) gens.push_back(json_from_vec(g));
  j["generators"] = std::move(gens);
  return j;
}

inline std::vector<Vec> points_from_json(const Json& j, int dim) {
  check_schema(j, "points file");
  std::vector<Vec> pts;
  for (const auto& p : require_field(j, "points", "points file")) {
    pts.push_back(vec_from_json(p, "point"));
    if (pts.back().size() != dim)
      throw SchemaError("point length != expected dimension");
  }
  if (pts.empty()) throw SchemaError("points file has no points");
  return pts;
}

// ---------------------------------------------------------------------------
// Boundary graph patches: {"dim": d, "base": [[...]], "height": [...]}.
// ---------------------------------------------------------------------------

inline GraphPatch patch_from_json(const Json& j) {
  check_schema(j, "patch");
  GraphPatch patch;
  const Json& base = require_field(j, "base", "patch");
  const Json& height = require_field(j, "height", "patch");
  if (!height.is_array() || !base.is_array() || base.size() != height.size())
    throw SchemaError("patch base and height must be arrays of equal length");
  for (const auto& b : base) {
    patch.base.push_back(vec_from_json(b, "patch base point"));
    if (patch.base.back().size() != patch.base.front().size())
      throw SchemaError("patch base points have unequal length");
  }
  for (const auto& h : height)
    patch.height.push_back(number_from_json(h, "patch height"));
  if (patch.base.empty()) throw SchemaError("patch has no samples");
  return patch;
}

inline Json json_from_patch(const GraphPatch& patch) {
  Json j;
  j["schema"] = kSchemaTag;
  j["dim"] = static_cast<int>(patch.base.empty() ? 0 : patch.base[0].size());
  Json base = Json::array();
  for (const Vec& b : patch.base) base.push_back(json_from_vec(b));
  j["base"] = std::move(base);
  Json height = Json::array();
  for (double h : patch.height) height.push_back(h);
  j["height"] = std::move(height);
  return j;
}

// ---------------------------------------------------------------------------
// Cusp representations and deformation paths.  Generator matrices are
// (dim+1) x (dim+1) rows; wrong sizes are schema failures, while violated
// group axioms (commutation, invertibility) stay domain errors.
// ---------------------------------------------------------------------------

inline std::vector<Mat> generators_from_json(const Json& j, int dim,
                                             const char* what) {
  if (!j.is_array() || j.empty())
    throw SchemaError(std::string(what) + " generators must be a nonempty array");
  std::vector<Mat> gens;
  for (const auto& g : j) {
    gens.push_back(mat_from_json(g, "generator"));
    if (gens.back().rows() != dim + 1 || gens.back().cols() != dim + 1)
      throw SchemaError(std::string(what) + " generators must be " +
                        std::to_string(dim + 1) + "x" +
                        std::to_string(dim + 1));
  }
  return gens;
}

inline CuspRep rep_from_json(const Json& j) {
  check_schema(j, "rep");
  int dim = 3;
  if (j.contains("dim")) dim = int_from_json(j.at("dim"), "rep dim");
  if (dim != 3) throw SchemaError("rep dim must be 3");
  return make_cusp_rep(
      generators_from_json(require_field(j, "generators", "rep"), dim, "rep"));
}

inline Json json_from_rep(const CuspRep& rep) {
  Json j;
  j["schema"] = kSchemaTag;
  j["dim"] = rep.dim;
  Json gens = Json::array();
  for (const Mat& g : rep.generators) gens.push_back(json_from_mat(g));
  j["generators"] = std::move(gens);
  return j;
}

inline DeformPath path_from_json(const Json& j) {
  check_schema(j, "path");
  DeformPath path;
  for (const auto& kf : require_field(j, "keyframes", "path")) {
    DeformKeyframe frame;
    frame.t = number_from_json(require_field(kf, "t", "keyframe"),
                               "keyframe t");
    frame.generators = generators_from_json(
        require_field(kf, "generators", "keyframe"), 3, "keyframe");
    path.keyframes.push_back(std::move(frame));
  }
  if (path.keyframes.empty()) throw SchemaError("path has no keyframes");
  return path;
}

inline Json json_from_path(const DeformPath& path) {
  Json j;
  j["schema"] = kSchemaTag;
  Json frames = Json::array();
  for (const DeformKeyframe& kf : path.keyframes) {
    Json frame;
    frame["t"] = kf.t;
    Json gens = Json::array();
    for (const Mat& g : kf.generators) gens.push_back(json_from_mat(g));
    frame["generators"] = std::move(gens);
    frames.push_back(std::move(frame));
  }
  j["keyframes"] = std::move(frames);
  return j;
}

// ---------------------------------------------------------------------------
// Result records.
// ---------------------------------------------------------------------------

inline Json json_from_certificate(const ConvexityCertificate& cert) {
  Json j;
  j["base_point"] = json_from_vec(cert.base_point);
  j["verdict"] = cert.verdict;
  j["q"] = json_from_mat(cert.q);
  j["q_eigenvalues"] = json_from_vec(cert.q_eigenvalues);
  j["tolerance"] = cert.tolerance;
  j["differential_rank"] = cert.differential_rank;
  return j;
}

inline Json json_from_sample(const DeformSample& s) {
  Json j;
  j["t"] = s.t;
  j["stage_reached"] = s.stage_reached;
  j["message"] = s.message;
  j["vfg"] = s.vfg;
  j["witness_m"] = s.witness_m;
  j["verdict"] = s.verdict;
  j["min_eig_q"] = s.min_eig_q;
  j["hausdorff_boundary"] = s.hausdorff_boundary;
  j["hausdorff_hull"] = s.hausdorff_hull;
  return j;
}

}  // namespace convexproj
