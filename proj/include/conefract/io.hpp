#pragma once

#include "conefract/model.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace conefract {

using Json = nlohmann::json;

/// Malformed input; `field` names the offending JSON path.
struct InputError : std::runtime_error {
  std::string field;
  InputError(std::string f, const std::string& msg) : std::runtime_error(f + ": " + msg), field(std::move(f)) {}
};

Json vector_to_json(const Eigen::Ref<const Vector>& v);
Json matrix_to_json(const Eigen::Ref<const Matrix>& M);
Vector vector_from_json(const Json& j, const std::string& field);
/// Rows of equal length; `cols` is used when the list is empty.
Matrix matrix_from_json(const Json& j, const std::string& field, Index cols);

Json cone_to_json(const ConeProduct& K);
ConeProduct cone_from_json(const Json& j, const std::string& field);

Json problem_to_json(const ConicLP& p);
ConicLP problem_from_json(const Json& j);

Json face_to_json(const FaceDescriptor& F);
FaceDescriptor face_from_json(const Json& j, const ConeProduct& K, const std::string& field);

Json cert_to_json(const ReductionCertificate& c);
ReductionCertificate cert_from_json(const Json& j, const ConeProduct& K);

/// Sorted keys, doubles printed with 17 significant digits.
std::string dump_json(const Json& j);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace conefract
