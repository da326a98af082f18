#include "conefract/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace conefract {

Json vector_to_json(const Eigen::Ref<const Vector>& v) {
  Json j = Json::array();
  for (Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Json matrix_to_json(const Eigen::Ref<const Matrix>& M) {
  Json j = Json::array();
  for (Index r = 0; r < M.rows(); ++r) j.push_back(vector_to_json(M.row(r).transpose()));
  return j;
}

Vector vector_from_json(const Json& j, const std::string& field) {
  if (!j.is_array()) throw InputError(field, "expected an array of numbers");
  Vector v(Index(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError(field + "[" + std::to_string(i) + "]", "expected a number");
    v(Index(i)) = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from_json(const Json& j, const std::string& field, Index cols) {
  if (!j.is_array()) throw InputError(field, "expected an array of rows");
  Matrix M(Index(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    Vector row = vector_from_json(j[r], field + "[" + std::to_string(r) + "]");
    if (row.size() != cols)
      throw InputError(field + "[" + std::to_string(r) + "]",
                       "row length " + std::to_string(row.size()) + ", expected " + std::to_string(cols));
    M.row(Index(r)) = row.transpose();
  }
  return M;
}

Json cone_to_json(const ConeProduct& K) {
  Json blocks = Json::array();
  for (const auto& b : K.blocks()) {
    switch (b.kind) {
      case ConeKind::NonNeg: blocks.push_back({{"type", "nonneg"}, {"dim", b.size}}); break;
      case ConeKind::SOC: blocks.push_back({{"type", "soc"}, {"dim", b.size}}); break;
      case ConeKind::PSD: blocks.push_back({{"type", "psd"}, {"side", b.size}}); break;
    }
  }
  return Json{{"blocks", blocks}};
}

ConeProduct cone_from_json(const Json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("blocks") || !j["blocks"].is_array())
    throw InputError(field + ".blocks", "expected an array of cone blocks");
  std::vector<ConeBlock> blocks;
  const Json& bl = j["blocks"];
  for (std::size_t i = 0; i < bl.size(); ++i) {
    const std::string f = field + ".blocks[" + std::to_string(i) + "]";
    const Json& b = bl[i];
    if (!b.is_object() || !b.contains("type") || !b["type"].is_string()) throw InputError(f + ".type", "missing block type");
    const std::string t = b["type"].get<std::string>();
    const char* key = t == "psd" ? "side" : "dim";
    if (t != "nonneg" && t != "soc" && t != "psd") throw InputError(f + ".type", "unknown block type '" + t + "'");
    if (!b.contains(key) || !b[key].is_number_integer() || b[key].get<long long>() < 1)
      throw InputError(f + "." + key, "expected a positive integer");
    Index n = b[key].get<Index>();
    blocks.push_back(t == "nonneg" ? ConeBlock::nonneg(n) : t == "soc" ? ConeBlock::soc(n) : ConeBlock::psd(n));
  }
  if (blocks.empty()) throw InputError(field + ".blocks", "at least one block required");
  return ConeProduct(blocks);
}

Json problem_to_json(const ConicLP& p) {
  Json j{{"cone", cone_to_json(p.cone)}, {"A", matrix_to_json(p.A)}, {"b", vector_to_json(p.b)},
         {"c", vector_to_json(p.c)}};
  if (p.intersection) j["intersection"] = cone_to_json(*p.intersection);
  return j;
}

ConicLP problem_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("<root>", "expected an object");
  if (!j.contains("cone")) throw InputError("cone", "missing");
  ConicLP p;
  p.cone = cone_from_json(j["cone"], "cone");
  const Index n = p.cone.dim();
  if (j.contains("intersection") && !j["intersection"].is_null()) {
    p.intersection = cone_from_json(j["intersection"], "intersection");
    if (p.intersection->dim() != n) throw InputError("intersection", "coordinate count does not match cone");
  }
  if (!j.contains("A")) throw InputError("A", "missing");
  p.A = matrix_from_json(j["A"], "A", n);
  if (!j.contains("c")) throw InputError("c", "missing");
  p.c = vector_from_json(j["c"], "c");
  if (p.c.size() != n) throw InputError("c", "length " + std::to_string(p.c.size()) + ", expected " + std::to_string(n));
  if (j.contains("b")) {
    p.b = vector_from_json(j["b"], "b");
    if (p.b.size() != p.A.rows()) throw InputError("b", "length does not match rows of A");
  } else {
    p.b = Vector::Zero(p.A.rows());
  }
  return p;
}

Json face_to_json(const FaceDescriptor& F) {
  Json blocks = Json::array();
  for (std::size_t j = 0; j < F.blocks.size(); ++j) {
    const ConeBlock& b = F.cone.block(j);
    if (auto* nf = std::get_if<NonNegFace>(&F.blocks[j])) {
      blocks.push_back({{"type", "nonneg"}, {"support", nf->support}});
    } else if (auto* sf = std::get_if<SocFace>(&F.blocks[j])) {
      Json o{{"type", "soc"}};
      o["state"] = sf->state == SocFace::State::Full ? "full" : sf->state == SocFace::State::Ray ? "ray" : "zero";
      if (sf->state == SocFace::State::Ray) o["ray"] = vector_to_json(sf->ray);
      blocks.push_back(o);
    } else {
      const Matrix& U = std::get<PsdFace>(F.blocks[j]).basis;
      blocks.push_back({{"type", "psd"}, {"rank", U.cols()}, {"side", b.size}, {"basis", matrix_to_json(U)}});
    }
  }
  return blocks;
}

FaceDescriptor face_from_json(const Json& j, const ConeProduct& K, const std::string& field) {
  if (!j.is_array() || j.size() != K.size()) throw InputError(field, "expected one entry per cone block");
  FaceDescriptor F{K, {}};
  for (std::size_t i = 0; i < j.size(); ++i) {
    const ConeBlock& b = K.block(i);
    const std::string f = field + "[" + std::to_string(i) + "]";
    const Json& o = j[i];
    if (!o.is_object()) throw InputError(f, "expected an object");
    switch (b.kind) {
      case ConeKind::NonNeg: {
        NonNegFace nf;
        for (const auto& v : o.at("support")) {
          Index k = v.get<Index>();
          if (k < 0 || k >= b.size) throw InputError(f + ".support", "index out of range");
          nf.support.push_back(k);
        }
        std::sort(nf.support.begin(), nf.support.end());
        F.blocks.push_back(nf);
        break;
      }
      case ConeKind::SOC: {
        std::string s = o.at("state").get<std::string>();
        if (s == "full") F.blocks.push_back(SocFace{});
        else if (s == "zero") F.blocks.push_back(SocFace{SocFace::State::Zero, {}});
        else if (s == "ray") {
          Vector r = vector_from_json(o.at("ray"), f + ".ray");
          if (r.size() != b.size) throw InputError(f + ".ray", "wrong length");
          F.blocks.push_back(SocFace{SocFace::State::Ray, r});
        } else throw InputError(f + ".state", "unknown SOC face state");
        break;
      }
      case ConeKind::PSD: {
        Index r = o.at("rank").get<Index>();
        Matrix U = matrix_from_json(o.at("basis"), f + ".basis", r);
        if (U.rows() != b.size) throw InputError(f + ".basis", "wrong row count");
        F.blocks.push_back(PsdFace{U});
        break;
      }
    }
  }
  return F;
}

Json cert_to_json(const ReductionCertificate& c) {
  Json j;
  j["mode"] = to_string(c.mode);
  j["status"] = to_string(c.status);
  j["phase1_steps"] = c.phase1_steps;
  Json dirs = Json::array();
  for (const auto& d : c.directions) dirs.push_back(vector_to_json(d));
  j["directions"] = dirs;
  Json faces = Json::array();
  for (const auto& f : c.faces) faces.push_back(face_to_json(f));
  j["faces"] = faces;
  j["step_tols"] = c.step_tols;
  j["slack_prime"] = c.slack_prime ? vector_to_json(*c.slack_prime) : Json(nullptr);
  j["slack_hat"] = c.slack_hat ? vector_to_json(*c.slack_hat) : Json(nullptr);
  return j;
}

ReductionCertificate cert_from_json(const Json& j, const ConeProduct& K) {
  if (!j.is_object()) throw InputError("<cert>", "expected an object");
  ReductionCertificate c;
  try {
    c.mode = cert_mode_from_string(j.at("mode").get<std::string>());
    c.status = cert_status_from_string(j.at("status").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw InputError("status", e.what());
  }
  c.phase1_steps = j.value("phase1_steps", 0);
  const Json& dirs = j.at("directions");
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    Vector d = vector_from_json(dirs[i], "directions[" + std::to_string(i) + "]");
    if (d.size() != K.dim()) throw InputError("directions[" + std::to_string(i) + "]", "wrong length");
    c.directions.push_back(d);
  }
  const Json& faces = j.at("faces");
  for (std::size_t i = 0; i < faces.size(); ++i)
    c.faces.push_back(face_from_json(faces[i], K, "faces[" + std::to_string(i) + "]"));
  if (j.contains("step_tols")) c.step_tols = j["step_tols"].get<std::vector<double>>();
  if (j.contains("slack_prime") && !j["slack_prime"].is_null()) c.slack_prime = vector_from_json(j["slack_prime"], "slack_prime");
  if (j.contains("slack_hat") && !j["slack_hat"].is_null()) c.slack_hat = vector_from_json(j["slack_hat"], "slack_hat");
  return c;
}

namespace {

void emit(const Json& j, std::ostringstream& os, int depth) {
  const std::string pad(std::size_t(2 * (depth + 1)), ' ');
  const std::string close(std::size_t(2 * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) { os << "{}"; return; }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map order: sorted
        if (!first) os << ",\n";
        first = false;
        os << pad << Json(it.key()).dump() << ": ";
        emit(it.value(), os, depth + 1);
      }
      os << "\n" << close << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) { os << "[]"; return; }
      bool scalars = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      if (scalars) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          emit(j[i], os, depth + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        emit(j[i], os, depth + 1);
      }
      os << "\n" << close << "]";
      return;
    }
    case Json::value_t::number_float: {
      double v = j.get<double>();
      if (!std::isfinite(v)) { os << "null"; return; }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
      std::string s(buf);
      if (s.find_first_of(".eE") == std::string::npos) s += ".0";
      os << s;
      return;
    }
    default: os << j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j) {
  std::ostringstream os;
  emit(j, os, 0);
  os << "\n";
  return os.str();
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path, "cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(path, std::string("invalid JSON: ") + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace conefract
