#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace drlab {

// One named block of parameters inside a snapshot file, tagged with the
// architecture descriptor of the net it belongs to.
struct SnapshotSection {
  std::string name;
  std::string arch;
  std::vector<double> values;
};

// Snapshot file layout: a text header
//
//   drlab-params v1
//   sections <n>
//   name <section name>
//   arch <architecture descriptor>
//   count <value count>
//   checksum <16 hex digits>          (FNV-1a 64 over the section's bytes)
//   ... (repeated per section)
//   ---
//
// followed by every section's values as little-endian 8-byte floats,
// concatenated in header order. Loading restores the exact bit pattern
// of every value and throws std::runtime_error on a malformed header,
// a truncated payload, or a checksum mismatch.
void save_snapshot(const std::string& path, const std::vector<SnapshotSection>& sections);
std::vector<SnapshotSection> load_snapshot(const std::string& path);

// Checksum used by the snapshot format, exposed for tests.
std::uint64_t fnv1a64(const unsigned char* data, std::size_t size);

}  // namespace drlab
