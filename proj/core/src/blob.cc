#include "ticketscope/blob.h"

#include <bit>
#include <cstring>

#include "ticketscope/error.h"
#include "ticketscope/util.h"

namespace ticketscope {

namespace {

constexpr char kMagic[8] = {'T', 'S', 'B', 'L', 'O', 'B', '0', '1'};
constexpr std::size_t kHeaderSize = 32;

template <class T>
void put_le(std::string& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  auto bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>(bits & 0xff));
    bits >>= 8;
  }
}

template <class T>
T get_le(const std::string& in, std::size_t offset) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = 0;
  for (std::size_t i = sizeof(U); i-- > 0;)
    bits = (bits << 8) | static_cast<unsigned char>(in[offset + i]);
  return std::bit_cast<T>(bits);
}

std::string header(std::uint32_t type, std::uint64_t rows, std::uint64_t cols) {
  std::string out(kMagic, sizeof kMagic);
  put_le(out, type);
  put_le(out, std::uint32_t{0});
  put_le(out, rows);
  put_le(out, cols);
  return out;
}

struct Header {
  std::uint32_t type;
  std::uint64_t rows;
  std::uint64_t cols;
};

Header parse_header(const std::string& bytes, const std::filesystem::path& path,
                    std::uint32_t want_type, std::size_t elem_size) {
  if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    throw Error("not a matrix blob: " + path.string());
  Header h{get_le<std::uint32_t>(bytes, 8), get_le<std::uint64_t>(bytes, 16),
           get_le<std::uint64_t>(bytes, 24)};
  if (h.type != want_type)
    throw Error("unexpected element type " + std::to_string(h.type) + " in " + path.string());
  if (h.cols != 0 && h.rows > (bytes.size() - kHeaderSize) / elem_size / h.cols)
    throw Error("truncated matrix blob: " + path.string());
  if (bytes.size() != kHeaderSize + h.rows * h.cols * elem_size)
    throw Error("matrix blob size does not match its header: " + path.string());
  return h;
}

}  // namespace

void write_matrix_blob(const std::filesystem::path& path, const Matrix& m) {
  std::string out = header(1, m.rows, m.cols);
  out.reserve(kHeaderSize + m.data.size() * 8);
  for (double v : m.data) put_le(out, v);
  write_file(path, out);
}

Matrix read_matrix_blob(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  const Header h = parse_header(bytes, path, 1, 8);
  Matrix m(h.rows, h.cols);
  for (std::size_t i = 0; i < m.data.size(); ++i)
    m.data[i] = get_le<double>(bytes, kHeaderSize + 8 * i);
  return m;
}

void write_u32_blob(const std::filesystem::path& path, const U32Blob& blob) {
  if (blob.data.size() != blob.rows * blob.cols) throw InvalidInput("u32 blob shape mismatch");
  std::string out = header(2, blob.rows, blob.cols);
  for (std::uint32_t v : blob.data) put_le(out, v);
  write_file(path, out);
}

U32Blob read_u32_blob(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  const Header h = parse_header(bytes, path, 2, 4);
  U32Blob blob{h.rows, h.cols, std::vector<std::uint32_t>(h.rows * h.cols)};
  for (std::size_t i = 0; i < blob.data.size(); ++i)
    blob.data[i] = get_le<std::uint32_t>(bytes, kHeaderSize + 4 * i);
  return blob;
}

nlohmann::json ArtifactManifest::to_json() const {
  return {{"kind", kind},
          {"feature_set", feature_set},
          {"hyperparameters", hyperparameters},
          {"seed", seed},
          {"vocab_hash", vocab_hash},
          {"corpus_hash", corpus_hash},
          {"created_at", created_at},
          {"format_version", format_version},
          {"extra", extra}};
}

ArtifactManifest ArtifactManifest::from_json(const nlohmann::json& j) {
  ArtifactManifest m;
  try {
    m.kind = j.at("kind").get<std::string>();
    m.feature_set = j.value("feature_set", "");
    m.hyperparameters = j.value("hyperparameters", nlohmann::json::object());
    m.seed = j.value("seed", std::uint64_t{0});
    m.vocab_hash = j.value("vocab_hash", "");
    m.corpus_hash = j.value("corpus_hash", "");
    m.created_at = j.value("created_at", "");
    m.format_version = j.at("format_version").get<int>();
    m.extra = j.value("extra", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid manifest: ") + e.what());
  }
  if (m.format_version != kFormatVersion)
    throw Error("unsupported manifest format_version " + std::to_string(m.format_version));
  return m;
}

void write_manifest(const std::filesystem::path& dir, const ArtifactManifest& manifest) {
  std::filesystem::create_directories(dir);
  write_json_file(dir / "manifest.json", manifest.to_json());
}

ArtifactManifest read_manifest(const std::filesystem::path& dir) {
  try {
    return ArtifactManifest::from_json(read_json_file(dir / "manifest.json"));
  } catch (...) {
    std::throw_with_nested(Error("cannot read manifest in " + dir.string()));
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  write_file(path, j.dump(2) + "\n");
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace ticketscope
