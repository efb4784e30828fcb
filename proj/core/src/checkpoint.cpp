#include "panelcast/checkpoint.hpp"

#include <bit>
#include <istream>
#include <ostream>

#include "panelcast/csv.hpp"
#include "panelcast/errors.hpp"

namespace panelcast {

namespace {

template <class T>
void put(std::ostream& out, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  auto bits = std::bit_cast<U>(value);
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>(bits & 0xFFu);
    bits >>= 8;
  }
  out.write(bytes.data(), bytes.size());
}

template <class T>
T get(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  std::array<char, sizeof(T)> bytes{};
  if (!in.read(bytes.data(), bytes.size())) throw DataError("checkpoint is truncated");
  U bits = 0;
  for (std::size_t i = sizeof(T); i-- > 0;) bits = (bits << 8) | static_cast<unsigned char>(bytes[i]);
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_checkpoint(const NetworkParams& params, std::ostream& out) {
  const auto spec = params.spec();
  out.write(kCheckpointMagic.data(), kCheckpointMagic.size());
  put(out, kCheckpointVersion);
  put(out, static_cast<std::uint32_t>(spec.input_size));
  put(out, static_cast<std::uint32_t>(spec.lstm_hidden));
  put(out, static_cast<std::uint32_t>(spec.gru_hidden));
  put(out, params.dropout_rate);
  put(out, params.seed);
  put(out, static_cast<std::uint64_t>(parameter_count(params)));
  for (const auto s : tensor_spans(params)) {
    for (const double v : s) put(out, v);
  }
}

void write_checkpoint(const NetworkParams& params, const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  write_checkpoint(params, out);
  out.flush();
  if (!out) throw IoError("failed writing checkpoint '" + path.string() + "'");
}

NetworkParams read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kCheckpointMagic) {
    throw DataError("not a panelcast checkpoint (bad magic)");
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  NetworkSpec spec;
  spec.input_size = static_cast<int>(get<std::uint32_t>(in));
  spec.lstm_hidden = static_cast<int>(get<std::uint32_t>(in));
  spec.gru_hidden = static_cast<int>(get<std::uint32_t>(in));
  spec.dropout_rate = get<double>(in);
  const auto seed = get<std::uint64_t>(in);
  const auto count = get<std::uint64_t>(in);

  NetworkParams params;
  params.dropout_rate = spec.dropout_rate;
  params.seed = seed;
  params.lstm = LstmParams::zeros(spec.input_size, spec.lstm_hidden);
  params.gru = GruParams::zeros(spec.lstm_hidden, spec.gru_hidden);
  params.head.weights = RowVector::Zero(spec.gru_hidden);
  if (count != parameter_count(params)) {
    throw DataError("checkpoint parameter count " + std::to_string(count) + " does not match its layer sizes");
  }
  for (auto s : tensor_spans(params)) {
    for (double& v : s) v = get<double>(in);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw DataError("checkpoint has trailing bytes");
  return params;
}

NetworkParams read_checkpoint(const std::filesystem::path& path) {
  auto in = csv::open_input(path);
  return read_checkpoint(in);
}

}  // namespace panelcast
