#ifndef PANELCAST_CHECKPOINT_HPP_
#define PANELCAST_CHECKPOINT_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "panelcast/network.hpp"

namespace panelcast {

// Binary layout, all integers and doubles little-endian:
//   magic       8 bytes  "PNLCAST\0"
//   version     u32      (1)
//   input_size  u32
//   lstm_hidden u32
//   gru_hidden  u32
//   dropout     f64
//   seed        u64
//   count       u64      number of doubles that follow
//   values      f64[count] tensors in visit_tensors order, each row-major
inline constexpr std::array<char, 8> kCheckpointMagic = {'P', 'N', 'L', 'C', 'A', 'S', 'T', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(const NetworkParams& params, std::ostream& out);
void write_checkpoint(const NetworkParams& params, const std::filesystem::path& path);

/// Throws DataError on a bad magic, version, or truncated payload.
NetworkParams read_checkpoint(std::istream& in);
NetworkParams read_checkpoint(const std::filesystem::path& path);

}  // namespace panelcast

#endif  // PANELCAST_CHECKPOINT_HPP_
