#include "shred/pipeline/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "json.hpp"
#include "shred/errors.hpp"

namespace shred::pipeline {
namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put_le(std::ofstream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::ifstream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw FormatError("checkpoint truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

void write_container(const std::filesystem::path& path, const json& meta, const std::vector<double>& payload) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write("SHRD", 4);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  const std::string text = meta.dump();
  put_le<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  put_le<std::uint64_t>(out, payload.size());
  for (double v : payload) put_le<double>(out, v);
  if (!out) throw FormatError("failed writing " + path.string());
}

void append(std::vector<double>& out, const Eigen::Ref<const Eigen::MatrixXd>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(m(i, j));
}

class Reader {
 public:
  explicit Reader(const std::vector<double>& data) : data_(data) {}
  Eigen::MatrixXd take(Eigen::Index rows, Eigen::Index cols) {
    const auto n = static_cast<std::size_t>(rows * cols);
    if (pos_ + n > data_.size()) throw FormatError("checkpoint payload shorter than its metadata declares");
    Eigen::MatrixXd m = Eigen::Map<const Eigen::MatrixXd>(data_.data() + pos_, rows, cols);
    pos_ += n;
    return m;
  }
  void finish() const {
    if (pos_ != data_.size()) throw FormatError("checkpoint payload longer than its metadata declares");
  }

 private:
  const std::vector<double>& data_;
  std::size_t pos_ = 0;
};

template <class T>
T meta_get(const json& meta, const char* key) {
  try {
    return meta.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint metadata: ") + e.what());
  }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const SvdBundle& b) {
  const json meta = {{"kind", "svd"},
                     {"rows", b.basis.rows()},
                     {"rank", b.rank()},
                     {"snapshots", b.latent.cols()}};
  std::vector<double> payload;
  append(payload, b.basis);
  append(payload, b.singular_values);
  append(payload, b.latent);
  payload.push_back(b.discarded_energy);
  write_container(path, meta, payload);
}

void save_checkpoint(const std::filesystem::path& path, const net::ShredModel& model) {
  const auto& a = model.architecture();
  const json meta = {{"kind", "shred_model"},
                     {"inputs", a.inputs},
                     {"outputs", a.outputs},
                     {"lstm_hidden", a.lstm_hidden},
                     {"decoder_hidden", a.decoder_hidden},
                     {"lag", a.lag},
                     {"seed", model.seed()}};
  std::vector<double> payload;
  for (const auto& block : model.params().blocks()) append(payload, block);
  append(payload, model.input_scaler().min);
  append(payload, model.input_scaler().span);
  append(payload, model.output_scaler().min);
  append(payload, model.output_scaler().span);
  write_container(path, meta, payload);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "SHRD", 4) != 0) throw FormatError("not a SHRD checkpoint");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion)
    throw UnsupportedVersion("checkpoint version " + std::to_string(version) + " (supported: " +
                             std::to_string(kCheckpointVersion) + ")");
  const auto meta_len = get_le<std::uint64_t>(in);
  if (meta_len > (1ULL << 30)) throw FormatError("checkpoint metadata length implausible");
  std::string text(meta_len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(meta_len))) throw FormatError("checkpoint truncated");
  json meta;
  try {
    meta = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("checkpoint metadata is not JSON: ") + e.what());
  }
  const auto count = get_le<std::uint64_t>(in);
  if (count > (1ULL << 34)) throw FormatError("checkpoint payload length implausible");
  std::vector<double> payload(count);
  for (auto& v : payload) v = get_le<double>(in);
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after checkpoint payload");

  Reader r(payload);
  const auto kind = meta_get<std::string>(meta, "kind");
  if (kind == "svd") {
    const auto rows = meta_get<Eigen::Index>(meta, "rows");
    const auto rank = meta_get<Eigen::Index>(meta, "rank");
    const auto snaps = meta_get<Eigen::Index>(meta, "snapshots");
    SvdBundle b;
    b.basis = r.take(rows, rank);
    b.singular_values = r.take(rank, 1);
    b.latent = r.take(rank, snaps);
    b.discarded_energy = r.take(1, 1)(0, 0);
    r.finish();
    return b;
  }
  if (kind == "shred_model") {
    net::Architecture a;
    a.inputs = meta_get<std::size_t>(meta, "inputs");
    a.outputs = meta_get<std::size_t>(meta, "outputs");
    a.lstm_hidden = meta_get<std::vector<std::size_t>>(meta, "lstm_hidden");
    a.decoder_hidden = meta_get<std::vector<std::size_t>>(meta, "decoder_hidden");
    a.lag = meta_get<std::size_t>(meta, "lag");
    const auto seed = meta_get<std::uint64_t>(meta, "seed");
    net::ShredModel shape(a, seed);
    net::NetworkParams params = shape.params().zeros_like();
    for (auto& block : params.blocks()) block = r.take(block.size(), 1);
    const auto f = static_cast<Eigen::Index>(a.inputs);
    const auto o = static_cast<Eigen::Index>(a.outputs);
    net::MinMaxScaler in_s{r.take(f, 1), r.take(f, 1)};
    net::MinMaxScaler out_s{r.take(o, 1), r.take(o, 1)};
    r.finish();
    return net::ShredModel(a, std::move(params), std::move(in_s), std::move(out_s), seed);
  }
  throw FormatError("unknown checkpoint kind '" + kind + "'");
}

}  // namespace shred::pipeline
