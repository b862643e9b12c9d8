#include "faultsim/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "faultsim/error.hpp"

namespace faultsim::stepper {

namespace {

constexpr char kMagic[8] = {'F', 'S', 'C', 'K', 'P', 'T', '0', '1'};

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return r;
}

void put(std::ofstream &out, std::uint64_t v) {
  v = to_le(v);
  out.write(reinterpret_cast<const char *>(&v), 8);
}
void put_f64(std::ofstream &out, double d) { put(out, std::bit_cast<std::uint64_t>(d)); }

std::uint64_t get(std::ifstream &in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char *>(&v), 8);
  if (!in) throw Error("checkpoint: truncated file");
  return to_le(v);
}
double get_f64(std::ifstream &in) { return std::bit_cast<double>(get(in)); }

}  // namespace

void write_checkpoint(const SystemState &s, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("checkpoint: cannot open " + path);
  out.write(kMagic, 8);
  put(out, s.u.size());
  put(out, s.alpha.size());
  put(out, static_cast<std::uint64_t>(s.step));
  put_f64(out, s.t);
  put_f64(out, s.tau_prev);
  for (const auto *v : {&s.u, &s.ud, &s.udd})
    for (double d : *v) put_f64(out, d);
  for (double d : s.alpha) put_f64(out, d);
}

SystemState read_checkpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("checkpoint: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) throw Error("checkpoint: bad magic in " + path);
  SystemState s;
  const std::uint64_t n = get(in), m = get(in);
  s.step = static_cast<long>(get(in));
  s.t = get_f64(in);
  s.tau_prev = get_f64(in);
  for (auto *v : {&s.u, &s.ud, &s.udd}) {
    v->resize(n);
    for (auto &d : *v) d = get_f64(in);
  }
  s.alpha.resize(m);
  for (auto &d : s.alpha) d = get_f64(in);
  return s;
}

}  // namespace faultsim::stepper
