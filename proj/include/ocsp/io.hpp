#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "ocsp/distribution.hpp"
#include "ocsp/instance.hpp"
#include "ocsp/label_cover.hpp"
#include "ocsp/reduction.hpp"

namespace ocsp {

using Json = nlohmann::json;

// Whole-file helpers. Read and write throw IoError with the path in the
// message; writes are not atomic.
struct IoError : Error {
    using Error::Error;
};
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

// Hash of a byte string in git's blob format:
// sha1("blob " + decimal length + NUL + bytes), lowercase hex.
std::string git_blob_sha1(const std::string& bytes);

// Parse with `where` (usually the file path) prefixed to any diagnostic.
Json parse_json(const std::string& text, const std::string& where);

// Object <-> schema converters. from_json functions throw SchemaError with a
// field path such as "constraints[3].weight" in the message. Rationals are
// fraction strings ("3/4"); integers may appear wherever a fraction is whole.
Json instance_to_json(const OcspInstance& inst);
OcspInstance instance_from_json(const Json& j);

Json ordering_to_json(const Ordering& ord);
Ordering ordering_from_json(const Json& j);

Json distribution_to_json(const BaseDistribution& d);
BaseDistribution distribution_from_json(const Json& j);

// Named constructor specs: "btw:q", "nbtw:q", "nbtw:q:j", "so:t:q1:q2",
// and "decouple:<spec>" wrapping any of them.
BaseDistribution distribution_by_spec(const std::string& spec);

Json label_cover_to_json(const LabelCoverInstance& lc);
LabelCoverInstance label_cover_from_json(const Json& j);

Json labeling_to_json(const Labeling& lab);
Labeling labeling_from_json(const Json& j);

Json function_to_json(const FiniteFunction<long long>& f);
FiniteFunction<long long> function_from_json(const Json& j);

Json assignment_to_json(const Assignment& asg);
Assignment assignment_from_json(const Json& j);

// Canonical renderings. JSON is 2-space indented with sorted keys and a
// trailing newline, so identical values give identical bytes. CSV flattens
// nested objects to dotted column names and arrays to [i] suffixes; exact
// fractions stay strings next to any float columns.
std::string render_json(const Json& j);
std::string render_csv(const Json& j);

}  // namespace ocsp
