#include "qcsoc/hash.h"

#include <openssl/sha.h>

#include <fmt/format.h>

namespace qcsoc {

std::string sha1_hex(std::string_view data) {
    unsigned char md[SHA_DIGEST_LENGTH];
    SHA1(reinterpret_cast<const unsigned char*>(data.data()), data.size(), md);
    std::string out;
    out.reserve(2 * SHA_DIGEST_LENGTH);
    for (unsigned char b : md) out += fmt::format("{:02x}", b);
    return out;
}

std::string git_blob_sha1(std::string_view data) {
    std::string buf = fmt::format("blob {}", data.size());
    buf.push_back('\0');
    buf.append(data);
    return sha1_hex(buf);
}

}  // namespace qcsoc
