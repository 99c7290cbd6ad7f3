#include "drlab/approx/snapshot.hpp"

#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace drlab {

namespace {

constexpr char kMagic[] = "drlab-params v1";

std::vector<unsigned char> to_bytes(const std::vector<double>& values) {
  std::vector<unsigned char> bytes;
  bytes.reserve(values.size() * 8);
  for (const double v : values) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, 8);
    for (int shift = 0; shift < 64; shift += 8) {
      bytes.push_back(static_cast<unsigned char>((bits >> shift) & 0xffu));
    }
  }
  return bytes;
}

std::vector<double> from_bytes(const std::vector<unsigned char>& bytes) {
  std::vector<double> values(bytes.size() / 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) bits = (bits << 8) | bytes[i * 8 + static_cast<std::size_t>(b)];
    std::memcpy(&values[i], &bits, 8);
  }
  return values;
}

std::string hex64(std::uint64_t value) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << value;
  return out.str();
}

// Reads "<key> <rest of line>" and returns the rest; throws when the line
// is missing or starts with a different key.
std::string expect_field(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("snapshot: header ended before field '" + key + "'");
  }
  if (line.rfind(key + " ", 0) != 0) {
    throw std::runtime_error("snapshot: expected field '" + key + "', found '" + line + "'");
  }
  return line.substr(key.size() + 1);
}

}  // namespace

std::uint64_t fnv1a64(const unsigned char* data, std::size_t size) {
  std::uint64_t hash = 14695981039346656037ull;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= data[i];
    hash *= 1099511628211ull;
  }
  return hash;
}

void save_snapshot(const std::string& path, const std::vector<SnapshotSection>& sections) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("snapshot: cannot open '" + path + "' for writing");
  out << kMagic << "\n";
  out << "sections " << sections.size() << "\n";
  std::vector<std::vector<unsigned char>> blobs;
  blobs.reserve(sections.size());
  for (const SnapshotSection& section : sections) {
    if (section.name.empty() || section.name.find('\n') != std::string::npos) {
      throw std::invalid_argument("snapshot: section names must be nonempty single lines");
    }
    if (section.arch.find('\n') != std::string::npos) {
      throw std::invalid_argument("snapshot: architecture descriptors must be single lines");
    }
    blobs.push_back(to_bytes(section.values));
    out << "name " << section.name << "\n";
    out << "arch " << section.arch << "\n";
    out << "count " << section.values.size() << "\n";
    out << "checksum " << hex64(fnv1a64(blobs.back().data(), blobs.back().size())) << "\n";
  }
  out << "---\n";
  for (const std::vector<unsigned char>& blob : blobs) {
    out.write(reinterpret_cast<const char*>(blob.data()),
              static_cast<std::streamsize>(blob.size()));
  }
  if (!out) throw std::runtime_error("snapshot: write to '" + path + "' failed");
}

std::vector<SnapshotSection> load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("snapshot: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw std::runtime_error("snapshot: bad magic line in '" + path + "'");
  }
  std::size_t count = 0;
  {
    std::istringstream field(expect_field(in, "sections"));
    if (!(field >> count)) throw std::runtime_error("snapshot: unreadable section count");
  }
  std::vector<SnapshotSection> sections(count);
  std::vector<std::size_t> value_counts(count);
  std::vector<std::uint64_t> checksums(count);
  for (std::size_t i = 0; i < count; ++i) {
    sections[i].name = expect_field(in, "name");
    sections[i].arch = expect_field(in, "arch");
    {
      std::istringstream field(expect_field(in, "count"));
      if (!(field >> value_counts[i])) {
        throw std::runtime_error("snapshot: unreadable value count");
      }
    }
    {
      std::istringstream field(expect_field(in, "checksum"));
      field >> std::hex >> checksums[i];
      if (field.fail()) throw std::runtime_error("snapshot: unreadable checksum");
    }
  }
  if (!std::getline(in, line) || line != "---") {
    throw std::runtime_error("snapshot: missing header terminator");
  }
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<unsigned char> blob(value_counts[i] * 8);
    in.read(reinterpret_cast<char*>(blob.data()), static_cast<std::streamsize>(blob.size()));
    if (static_cast<std::size_t>(in.gcount()) != blob.size()) {
      throw std::runtime_error("snapshot: truncated payload for section '" + sections[i].name +
                               "'");
    }
    if (fnv1a64(blob.data(), blob.size()) != checksums[i]) {
      throw std::runtime_error("snapshot: checksum mismatch in section '" + sections[i].name +
                               "'");
    }
    sections[i].values = from_bytes(blob);
  }
  if (in.get() != std::ifstream::traits_type::eof()) {
    throw std::runtime_error("snapshot: trailing bytes after the last section");
  }
  return sections;
}

}  // namespace drlab
