#include "hugenfold/io.hpp"

#include <fstream>
#include <sstream>

namespace hugenfold::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what);
}

const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path, "missing field \"" + key + "\"");
  return *it;
}

const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

std::size_t read_size(const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0) return static_cast<std::size_t>(j.get<long long>());
  if (j.is_string()) {
    const Int v = read_int(j, path);
    if (v >= 0 && v <= Int(1'000'000)) return static_cast<std::size_t>(v);
  }
  fail(path, "expected a small nonnegative integer");
}

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

}  // namespace

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json int_json(const Int& v) { return to_string(v); }

Json vec_json(const IntVec& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(to_string(x));
  return out;
}

Json ext_json(const ExtInt& v) { return v.str(); }

Json matrix_json(const IntMatrix& m) {
  Json out = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(to_string(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

// Plain JSON integers are accepted when they fit; strings are canonical.
Int read_int(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return j.is_number_unsigned() ? Int(j.get<unsigned long long>()) : Int(j.get<long long>());
  if (!j.is_string()) fail(path, "expected a decimal string");
  try {
    return parse_int(j.get<std::string>());
  } catch (const Error&) {
    fail(path, "not a decimal integer: \"" + j.get<std::string>() + "\"");
  }
}

IntVec read_vec(const Json& j, const std::string& path) {
  IntVec out;
  for (std::size_t i = 0; i < array(j, path).size(); ++i) out.push_back(read_int(j[i], at(path, i)));
  return out;
}

ExtVec read_ext_vec(const Json& j, const std::string& path) {
  ExtVec out;
  for (std::size_t i = 0; i < array(j, path).size(); ++i) {
    const Json& e = j[i];
    if (e.is_string()) {
      try {
        out.push_back(ExtInt::parse(e.get<std::string>()));
      } catch (const Error&) {
        fail(at(path, i), "not an integer or \"inf\"/\"-inf\": \"" + e.get<std::string>() + "\"");
      }
    } else {
      out.emplace_back(read_int(e, at(path, i)));
    }
  }
  return out;
}

IntMatrix read_matrix(const Json& j, const std::string& path) {
  std::vector<IntVec> rows;
  for (std::size_t i = 0; i < array(j, path).size(); ++i) rows.push_back(read_vec(j[i], at(path, i)));
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].size() != cols) fail(at(path, i), "row length " + std::to_string(rows[i].size()) + " != " + std::to_string(cols));
  return IntMatrix::from_rows(rows, cols);
}

namespace {

HugeTableInstance read_table(const Json& j) {
  HugeTableInstance t;
  t.l = read_size(field(j, "l", ""), "l");
  t.m = read_size(field(j, "m", ""), "m");
  t.line_sums = read_matrix(field(j, "line_sums", ""), "line_sums");
  if (t.line_sums.rows() != t.l || t.line_sums.cols() != t.m) {
    fail("line_sums", "expected a " + std::to_string(t.l) + "x" + std::to_string(t.m) + " array");
  }
  const Json& types = array(field(j, "types", ""), "types");
  for (std::size_t k = 0; k < types.size(); ++k) {
    const std::string p = at("types", k);
    TableType ty;
    ty.rows = read_vec(field(types[k], "rows", p), p + ".rows");
    ty.cols = read_vec(field(types[k], "cols", p), p + ".cols");
    ty.count = read_int(field(types[k], "count", p), p + ".count");
    if (ty.rows.size() != t.l) fail(p + ".rows", "expected length " + std::to_string(t.l));
    if (ty.cols.size() != t.m) fail(p + ".cols", "expected length " + std::to_string(t.m));
    if (ty.count <= 0) fail(p + ".count", "must be positive");
    t.types.push_back(std::move(ty));
  }
  try {
    validate_table(t);
  } catch (const Error& e) {
    throw ParseError(std::string("table: ") + e.what());
  }
  return t;
}

HugeNFoldInstance read_nfold(const Json& j) {
  IntMatrix a1 = read_matrix(field(j, "A1", ""), "A1");
  IntMatrix a2 = read_matrix(field(j, "A2", ""), "A2");
  IntVec b0 = read_vec(field(j, "b0", ""), "b0");
  std::vector<BrickType> types;
  const Json& arr = array(field(j, "types", ""), "types");
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string p = at("types", k);
    BrickType ty;
    ty.w = read_vec(field(arr[k], "w", p), p + ".w");
    ty.lower = read_ext_vec(field(arr[k], "l", p), p + ".l");
    ty.upper = read_ext_vec(field(arr[k], "u", p), p + ".u");
    ty.b = read_vec(field(arr[k], "b", p), p + ".b");
    ty.count = read_int(field(arr[k], "count", p), p + ".count");
    types.push_back(std::move(ty));
  }
  try {
    return HugeNFoldInstance(Bimatrix(std::move(a1), std::move(a2)), std::move(types), std::move(b0));
  } catch (const Error& e) {
    throw ParseError(std::string("nfold: ") + e.what());
  }
}

}  // namespace

Instance read_instance(const Json& j) {
  const Json& kind = field(j, "kind", "");
  if (kind == "table") return read_table(j);
  if (kind == "nfold") return read_nfold(j);
  fail("kind", "expected \"table\" or \"nfold\"");
}

Json instance_json(const HugeTableInstance& tbl) {
  Json j;
  j["kind"] = "table";
  j["l"] = tbl.l;
  j["m"] = tbl.m;
  j["line_sums"] = matrix_json(tbl.line_sums);
  j["types"] = Json::array();
  for (const auto& ty : tbl.types) {
    j["types"].push_back({{"rows", vec_json(ty.rows)}, {"cols", vec_json(ty.cols)}, {"count", int_json(ty.count)}});
  }
  return j;
}

Json instance_json(const HugeNFoldInstance& inst) {
  Json j;
  j["kind"] = "nfold";
  j["A1"] = matrix_json(inst.bimatrix().a1());
  j["A2"] = matrix_json(inst.bimatrix().a2());
  j["b0"] = vec_json(inst.b0());
  j["types"] = Json::array();
  for (const auto& ty : inst.types()) {
    Json l = Json::array(), u = Json::array();
    for (const auto& v : ty.lower) l.push_back(ext_json(v));
    for (const auto& v : ty.upper) u.push_back(ext_json(v));
    j["types"].push_back({{"w", vec_json(ty.w)}, {"l", l}, {"u", u}, {"b", vec_json(ty.b)}, {"count", int_json(ty.count)}});
  }
  return j;
}

Json presentation_json(const CompactPresentation& cp) {
  Json types = Json::array();
  for (const auto& m : cp.types) {
    Json support = Json::array();
    for (const auto& [z, lambda] : m) support.push_back({{"brick", vec_json(z)}, {"mult", int_json(lambda)}});
    types.push_back({{"support", support}});
  }
  return Json{{"types", types}};
}

CompactPresentation read_presentation(const Json& j, const std::string& path) {
  CompactPresentation cp;
  const Json& types = array(field(j, "types", path), path + ".types");
  for (std::size_t k = 0; k < types.size(); ++k) {
    const std::string p = at(path + ".types", k);
    const Json& support = array(field(types[k], "support", p), p + ".support");
    BrickMap m;
    for (std::size_t i = 0; i < support.size(); ++i) {
      const std::string q = at(p + ".support", i);
      IntVec z = read_vec(field(support[i], "brick", q), q + ".brick");
      Int mult = read_int(field(support[i], "mult", q), q + ".mult");
      if (m.count(z)) fail(q + ".brick", "duplicate brick");
      m.emplace(std::move(z), std::move(mult));
    }
    cp.types.push_back(std::move(m));
  }
  return cp;
}

Json certificate_json(const InfeasibilityCertificate& cert) {
  Json j;
  j["aux"] = instance_json(cert.aux);
  j["presentation"] = presentation_json(cert.cp);
  j["slack"] = int_json(cert.slack);
  j["transcript"] = {{"method", cert.transcript.method},
                     {"rounds", cert.transcript.rounds},
                     {"optimum", int_json(cert.transcript.optimum)}};
  if (cert.witness) {
    Json v = Json::array();
    for (const auto& vk : cert.witness->v) v.push_back(vec_json(vk));
    j["witness"] = {{"u", vec_json(cert.witness->u)}, {"v", v}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

InfeasibilityCertificate read_certificate(const Json& j, const std::string& path) {
  const Json& aux = field(j, "aux", path);
  Instance inst = read_instance(aux);
  if (!std::holds_alternative<HugeNFoldInstance>(inst)) fail(path + ".aux", "expected an nfold instance");
  InfeasibilityCertificate cert{std::get<HugeNFoldInstance>(std::move(inst)),
                                read_presentation(field(j, "presentation", path), path + ".presentation"),
                                read_int(field(j, "slack", path), path + ".slack"),
                                {},
                                std::nullopt};
  const Json& tr = field(j, "transcript", path);
  const Json& method = field(tr, "method", path + ".transcript");
  if (!method.is_string()) fail(path + ".transcript.method", "expected a string");
  cert.transcript.method = method.get<std::string>();
  cert.transcript.rounds = read_size(field(tr, "rounds", path + ".transcript"), path + ".transcript.rounds");
  cert.transcript.optimum = read_int(field(tr, "optimum", path + ".transcript"), path + ".transcript.optimum");
  auto w = j.find("witness");
  if (w != j.end() && !w->is_null()) {
    EquationWitness ew;
    ew.u = read_vec(field(*w, "u", path + ".witness"), path + ".witness.u");
    const Json& v = array(field(*w, "v", path + ".witness"), path + ".witness.v");
    for (std::size_t k = 0; k < v.size(); ++k) ew.v.push_back(read_vec(v[k], at(path + ".witness.v", k)));
    cert.witness = std::move(ew);
  }
  return cert;
}

IntMatrix read_matrix_file(const Json& j) {
  if (j.is_array()) return read_matrix(j, "matrix");
  return read_matrix(field(j, "matrix", ""), "matrix");
}

Bimatrix read_bimatrix(const Json& j) {
  IntMatrix a1 = read_matrix(field(j, "A1", ""), "A1");
  IntMatrix a2 = read_matrix(field(j, "A2", ""), "A2");
  try {
    return Bimatrix(std::move(a1), std::move(a2));
  } catch (const Error& e) {
    throw ParseError(std::string("bimatrix: ") + e.what());
  }
}

}  // namespace hugenfold::io
