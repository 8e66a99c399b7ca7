#pragma once
// JSON serialization for certificates. Files hold one JSON record per line so
// large enumerations can be streamed through verify without loading them all.

#include <functional>
#include <iosfwd>
#include <vector>

#include "json.hpp"
#include "ortho/perm.hpp"

namespace ortho {

nlohmann::json to_json(const OrthoCertificate& cert);
OrthoCertificate certificate_from_json(const nlohmann::json& j);

void write_certificates(std::ostream& out, const std::vector<OrthoCertificate>& certs);

// Calls fn on each record in the stream; returns the number of records read.
// Malformed JSON or record shape throws std::invalid_argument with the line number.
size_t for_each_certificate(std::istream& in,
                            const std::function<void(const OrthoCertificate&, size_t line)>& fn);

}  // namespace ortho
