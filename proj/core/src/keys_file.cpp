#include "tbrd/keys_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tbrd {

namespace {

constexpr const char* kMagic = "TBRD-KEYS v1";

int64_t parse_int(std::string_view s, const char* what) {
  int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw std::runtime_error(std::string("keys file: bad ") + what);
  }
  return v;
}

std::string_view expect_field(std::string_view line, std::string_view key) {
  if (!line.starts_with(key) || line.size() <= key.size() || line[key.size()] != '=') {
    throw std::runtime_error("keys file: expected " + std::string(key) + "=");
  }
  return line.substr(key.size() + 1);
}

}  // namespace

std::string format_keys_file(const KeysFile& kf) {
  if (static_cast<int64_t>(kf.keys.size()) != kf.params.n) {
    throw std::runtime_error("keys file must hold exactly n keys");
  }
  std::ostringstream out;
  out << kMagic << '\n';
  out << "operator_id=" << kf.operator_id << '\n';
  out << "uas_id=" << kf.uas_id << '\n';
  out << "t_int_ms=" << kf.params.t_int_ms << '\n';
  out << "d=" << kf.params.d << '\n';
  out << "n=" << kf.params.n << '\n';
  out << "t0_ms=" << kf.params.t0_ms << '\n';
  for (const Key32& k : kf.keys) out << to_hex(k) << '\n';
  return out.str();
}

KeysFile parse_keys_file(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto next_line = [&]() -> std::string {
    if (!std::getline(in, line)) throw std::runtime_error("keys file: truncated");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };

  if (next_line() != kMagic) throw std::runtime_error("keys file: bad magic");

  KeysFile kf;
  kf.operator_id = expect_field(next_line(), "operator_id");
  kf.uas_id = expect_field(next_line(), "uas_id");
  kf.params.t_int_ms = parse_int(expect_field(next_line(), "t_int_ms"), "t_int_ms");
  kf.params.d = static_cast<int32_t>(parse_int(expect_field(next_line(), "d"), "d"));
  kf.params.n = parse_int(expect_field(next_line(), "n"), "n");
  kf.params.t0_ms = parse_int(expect_field(next_line(), "t0_ms"), "t0_ms");
  if (!kf.params.valid()) throw std::runtime_error("keys file: invalid parameters");

  kf.keys.reserve(static_cast<size_t>(kf.params.n));
  for (int64_t i = 0; i < kf.params.n; ++i) {
    kf.keys.push_back(key_from_hex(next_line()));
  }
  if (std::getline(in, line) && !line.empty()) {
    throw std::runtime_error("keys file: trailing data");
  }
  return kf;
}

void write_keys_file(const std::filesystem::path& path, const KeysFile& kf) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open keys file for writing: " + path.string());
  out << format_keys_file(kf);
  if (!out.flush()) throw std::runtime_error("short write to keys file");
  std::filesystem::permissions(path, std::filesystem::perms::owner_read |
                                         std::filesystem::perms::owner_write);
}

KeysFile load_keys_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open keys file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_keys_file(buf.str());
}

}  // namespace tbrd
