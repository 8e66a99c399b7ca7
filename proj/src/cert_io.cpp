#include "ortho/cert_io.hpp"

#include <functional>
#include <istream>
#include <ostream>
#include <string>

namespace ortho {

nlohmann::json to_json(const OrthoCertificate& cert) {
  return nlohmann::json{{"n", cert.n},
                        {"kind", to_string(cert.kind)},
                        {"sigma", cert.sigma.map},
                        {"image", cert.image}};
}

OrthoCertificate certificate_from_json(const nlohmann::json& j) {
  OrthoCertificate cert;
  cert.n = j.at("n").get<int64_t>();
  cert.kind = kind_from_string(j.at("kind").get<std::string>());
  cert.sigma = Permutation(cert.n, j.at("sigma").get<std::vector<int64_t>>());
  cert.image = j.at("image").get<std::vector<int64_t>>();
  if ((int64_t)cert.image.size() != cert.n - 1)
    throw std::invalid_argument("certificate image has wrong length");
  return cert;
}

void write_certificates(std::ostream& out, const std::vector<OrthoCertificate>& certs) {
  for (const auto& c : certs) out << to_json(c).dump() << '\n';
}

size_t for_each_certificate(std::istream& in,
                            const std::function<void(const OrthoCertificate&, size_t)>& fn) {
  std::string line;
  size_t lineno = 0, count = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      fn(certificate_from_json(j), lineno);
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
    }
    ++count;
  }
  return count;
}

}  // namespace ortho
