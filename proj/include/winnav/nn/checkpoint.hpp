#pragma once

#include <cstdint>
#include <cstring>
#include <map>
#include <string>

#include "winnav/nn/params.hpp"
#include "winnav/util/text_io.hpp"

namespace winnav::nn {

// Binary checkpoint container:
//   magic "WINCKPT1", kind string, meta key-value block, training step,
//   then one record per parameter: name, rows, cols, value/m/v arrays as
//   little-endian doubles. Round-trips bit-exactly. Loading refuses a
//   version (magic) or kind mismatch.
struct Checkpoint {
  std::string kind;                         // e.g. "predictor", "win", "baseline"
  std::map<std::string, std::string> meta;  // fingerprints, dims, hyperparameters
  std::int64_t step = 0;
};

namespace detail {

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_str(std::string& out, const std::string& s) {
  put_u64(out, s.size());
  out += s;
}
inline void put_doubles(std::string& out, const std::vector<double>& v) {
  put_u64(out, v.size());
  std::size_t at = out.size();
  out.resize(out.size() + v.size() * 8);
  std::memcpy(out.data() + at, v.data(), v.size() * 8);
}

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;
  std::uint64_t u64() {
    if (pos + 8 > buf.size()) throw DataError("checkpoint truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  std::string str() {
    std::uint64_t n = u64();
    if (pos + n > buf.size()) throw DataError("checkpoint truncated");
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
  std::vector<double> doubles() {
    std::uint64_t n = u64();
    if (pos + n * 8 > buf.size()) throw DataError("checkpoint truncated");
    std::vector<double> v(n);
    std::memcpy(v.data(), buf.data() + pos, n * 8);
    pos += n * 8;
    return v;
  }
};

}  // namespace detail

inline std::string serialize_checkpoint(const Checkpoint& ck, const ParamStore& store,
                                        std::int64_t optimizer_steps) {
  std::string out = "WINCKPT1";
  detail::put_str(out, ck.kind);
  detail::put_u64(out, ck.meta.size());
  for (const auto& [k, v] : ck.meta) {
    detail::put_str(out, k);
    detail::put_str(out, v);
  }
  detail::put_u64(out, static_cast<std::uint64_t>(ck.step));
  detail::put_u64(out, static_cast<std::uint64_t>(optimizer_steps));
  detail::put_u64(out, store.all().size());
  for (const auto& [name, p] : store.all()) {
    detail::put_str(out, name);
    detail::put_u64(out, static_cast<std::uint64_t>(p.rows));
    detail::put_u64(out, static_cast<std::uint64_t>(p.cols));
    detail::put_doubles(out, p.value);
    detail::put_doubles(out, p.adam_m);
    detail::put_doubles(out, p.adam_v);
  }
  return out;
}

// Parses a checkpoint into a fresh store. `expected_kind` empty accepts any.
inline Checkpoint parse_checkpoint(const std::string& buf, ParamStore& store,
                                   std::int64_t& optimizer_steps,
                                   const std::string& expected_kind = "") {
  if (buf.size() < 8 || buf.substr(0, 8) != "WINCKPT1")
    throw DataError("bad checkpoint magic/version (expected WINCKPT1)");
  detail::Reader r{buf, 8};
  Checkpoint ck;
  ck.kind = r.str();
  if (!expected_kind.empty() && ck.kind != expected_kind)
    throw DataError("checkpoint kind mismatch: have '" + ck.kind + "', want '" + expected_kind +
                    "'");
  std::uint64_t nmeta = r.u64();
  for (std::uint64_t i = 0; i < nmeta; ++i) {
    std::string k = r.str();
    ck.meta[k] = r.str();
  }
  ck.step = static_cast<std::int64_t>(r.u64());
  optimizer_steps = static_cast<std::int64_t>(r.u64());
  std::uint64_t nparams = r.u64();
  for (std::uint64_t i = 0; i < nparams; ++i) {
    std::string name = r.str();
    int rows = static_cast<int>(r.u64());
    int cols = static_cast<int>(r.u64());
    Param& p = store.has(name) ? store.get(name) : store.create(name, rows, cols);
    if (p.rows != rows || p.cols != cols)
      throw DataError("checkpoint shape mismatch for parameter " + name);
    p.value = r.doubles();
    p.adam_m = r.doubles();
    p.adam_v = r.doubles();
    if (p.value.size() != p.size() || p.adam_m.size() != p.size() || p.adam_v.size() != p.size())
      throw DataError("checkpoint size mismatch for parameter " + name);
    p.zero_grad();
  }
  return ck;
}

inline void save_checkpoint(const std::string& path, const Checkpoint& ck, const ParamStore& store,
                            std::int64_t optimizer_steps) {
  write_file(path, serialize_checkpoint(ck, store, optimizer_steps));
}

inline Checkpoint load_checkpoint(const std::string& path, ParamStore& store,
                                  std::int64_t& optimizer_steps,
                                  const std::string& expected_kind = "") {
  return parse_checkpoint(read_file(path), store, optimizer_steps, expected_kind);
}

}  // namespace winnav::nn
