#include <array>
#include <cctype>
#include <fstream>
#include <iterator>

#include "fsdim/digitseq.hpp"
#include "fsdim/error.hpp"

namespace fsdim {

namespace {

constexpr std::array<char, 4> kMagic = {'F', 'S', 'D', '1'};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

unsigned parse_header_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (line.size() < 3 || line.substr(0, 2) != "k=") {
    throw FormatError("digit file header must be 'k=<base>', got '" + std::string(line) + "'");
  }
  unsigned k = 0;
  for (char c : line.substr(2)) {
    if (c < '0' || c > '9' || k > 1000) throw FormatError("malformed base in header");
    k = k * 10 + static_cast<unsigned>(c - '0');
  }
  if (k < Alphabet::kMinBase || k > Alphabet::kMaxBase) {
    throw FormatError("header base " + std::to_string(k) + " outside [2, 36]");
  }
  return k;
}

void decode_ascii(std::string_view body, unsigned k, std::size_t offset,
                  std::vector<Digit>& out) {
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (is_space(c)) continue;
    auto d = char_to_digit(c);
    if (!d) {
      throw FormatError(std::string("invalid character '") + c + "' at byte " +
                        std::to_string(offset + i));
    }
    if (*d >= k) {
      throw FormatError("digit '" + std::string(1, c) + "' at byte " +
                        std::to_string(offset + i) + " is not below base " + std::to_string(k));
    }
    out.push_back(*d);
  }
}

void check_binary(std::span<const Digit> bytes, unsigned k, std::size_t offset) {
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (bytes[i] >= k) {
      throw FormatError("byte " + std::to_string(offset + i) + " holds digit " +
                        std::to_string(bytes[i]) + ", not below base " + std::to_string(k));
    }
  }
}

struct Header {
  unsigned base;
  DigitFileMode mode;
  std::size_t payload_offset;
};

Header read_header(std::istream& in) {
  std::array<char, 4> head{};
  in.read(head.data(), head.size());
  const auto got = static_cast<std::size_t>(in.gcount());
  if (got == head.size() && head == kMagic) {
    const int base = in.get();
    if (base == std::char_traits<char>::eof()) {
      throw FormatError("truncated binary digit file: missing base byte");
    }
    if (base < static_cast<int>(Alphabet::kMinBase) || base > static_cast<int>(Alphabet::kMaxBase)) {
      throw FormatError("binary header base " + std::to_string(base) + " outside [2, 36]");
    }
    return {static_cast<unsigned>(base), DigitFileMode::kBinary, 5};
  }
  // ASCII: re-read the first line from the start.
  in.clear();
  in.seekg(0);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty digit file");
  return {parse_header_line(line), DigitFileMode::kAscii, line.size() + 1};
}

class FileSource final : public DigitSource {
 public:
  FileSource(std::ifstream in, Header header) : in_(std::move(in)), header_(header) {
    offset_ = header.payload_offset;
  }

  std::size_t append(std::vector<Digit>& out, std::size_t want) override {
    const std::size_t before = out.size();
    std::vector<char> chunk;
    while (out.size() - before < want && in_) {
      chunk.resize(std::min<std::size_t>(want - (out.size() - before), 1 << 16));
      in_.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
      const auto got = static_cast<std::size_t>(in_.gcount());
      if (got == 0) break;
      std::string_view view(chunk.data(), got);
      if (header_.mode == DigitFileMode::kAscii) {
        decode_ascii(view, header_.base, offset_, out);
      } else {
        std::span<const Digit> bytes(reinterpret_cast<const Digit*>(chunk.data()), got);
        check_binary(bytes, header_.base, offset_);
        out.insert(out.end(), bytes.begin(), bytes.end());
      }
      offset_ += got;
    }
    return out.size() - before;
  }

 private:
  std::ifstream in_;
  Header header_;
  std::size_t offset_ = 0;
};

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open digit file " + path.string());
  return in;
}

}  // namespace

DigitSequence parse_digit_text(std::string_view text) {
  const auto newline = text.find('\n');
  const std::string_view header = text.substr(0, newline);
  const unsigned k = parse_header_line(header);
  std::vector<Digit> digits;
  if (newline != std::string_view::npos) {
    decode_ascii(text.substr(newline + 1), k, newline + 1, digits);
  }
  return DigitSequence(Alphabet(k), std::move(digits));
}

std::string format_digit_text(const DigitSequence& seq, std::size_t count) {
  std::string out = "k=" + std::to_string(seq.base()) + "\n";
  out += digits_to_string(seq.prefix(count));
  out += '\n';
  return out;
}

DigitSequence read_digit_file(const std::filesystem::path& path) {
  DigitSequence lazy = open_digit_file(path);
  auto digits = lazy.all();
  return DigitSequence(lazy.alphabet(), std::vector<Digit>(digits.begin(), digits.end()));
}

DigitSequence open_digit_file(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  const Header header = read_header(in);
  return DigitSequence(Alphabet(header.base),
                       std::make_unique<FileSource>(std::move(in), header),
                       DigitSequence::kFiniteUnknown);
}

void write_digit_file(const DigitSequence& seq, std::size_t count,
                      const std::filesystem::path& path, DigitFileMode mode) {
  auto digits = seq.prefix(count);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  if (mode == DigitFileMode::kAscii) {
    const std::string text = format_digit_text(seq, count);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
  } else {
    out.write(kMagic.data(), kMagic.size());
    out.put(static_cast<char>(seq.base()));
    out.write(reinterpret_cast<const char*>(digits.data()),
              static_cast<std::streamsize>(digits.size()));
  }
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace fsdim
