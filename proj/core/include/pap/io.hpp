#ifndef PAP_IO_HPP
#define PAP_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace pap {

// Shortest representation that round-trips a double exactly.
std::string format_double(double v);

// One CSV document: header + rows, every number via format_double so repeated
// runs are byte-identical.
std::string csv_document(const std::vector<std::string>& columns,
                         const std::vector<std::vector<double>>& rows);

// Write-temp-then-rename; creates parent directories.
void write_text_atomic(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

// FNV-1a 64-bit, as 16 hex digits. Manifest checksum for reproducibility
// comparisons, not a cryptographic digest.
std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace pap

#endif
