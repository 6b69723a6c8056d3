#ifndef QCSOC_HASH_H
#define QCSOC_HASH_H

#include <span>
#include <string>
#include <string_view>

namespace qcsoc {

// Lowercase hex SHA-1 of the bytes.
std::string sha1_hex(std::string_view data);
// SHA-1 of "blob <len>\0" + data, matching `git hash-object`.
std::string git_blob_sha1(std::string_view data);

}  // namespace qcsoc

#endif  // QCSOC_HASH_H
