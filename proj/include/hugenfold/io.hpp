#pragma once

// JSON files: instances, solutions, certificates. Every big integer is a
// decimal string; bounds may also be "inf" / "-inf".

#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "hugenfold/instance.hpp"
#include "hugenfold/tables.hpp"

namespace hugenfold::io {

using Json = nlohmann::ordered_json;

/// Parses text; syntax errors report line and column.
Json parse_json(const std::string& text, const std::string& source = "<input>");
Json load_json(const std::string& path);
std::string dump(const Json& j);

Json int_json(const Int& v);
Json vec_json(const IntVec& v);
Json ext_json(const ExtInt& v);
Json matrix_json(const IntMatrix& m);

Int read_int(const Json& j, const std::string& path);
IntVec read_vec(const Json& j, const std::string& path);
ExtVec read_ext_vec(const Json& j, const std::string& path);
IntMatrix read_matrix(const Json& j, const std::string& path);

using Instance = std::variant<HugeTableInstance, HugeNFoldInstance>;

/// Dispatches on "kind". Throws ParseError naming the offending field.
Instance read_instance(const Json& j);
Json instance_json(const HugeTableInstance& tbl);
Json instance_json(const HugeNFoldInstance& inst);

/// {"types":[{"support":[{"brick":[...],"mult":"..."}]}]}
Json presentation_json(const CompactPresentation& cp);
CompactPresentation read_presentation(const Json& j, const std::string& path = "presentation");

Json certificate_json(const InfeasibilityCertificate& cert);
InfeasibilityCertificate read_certificate(const Json& j, const std::string& path = "certificate");

IntMatrix read_matrix_file(const Json& j);
Bimatrix read_bimatrix(const Json& j);

}  // namespace hugenfold::io
