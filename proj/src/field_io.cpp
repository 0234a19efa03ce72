#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include "grushin/engine.hpp"
#include "grushin/errors.hpp"

namespace grushin {

namespace {

constexpr char kMagic[8] = {'G', 'R', 'S', 'H', 'F', 'L', 'D', '1'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw ContractError("field snapshot truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace

void save_field(const Field& f, std::ostream& os) {
  os.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(os, kVersion);
  put<std::int32_t>(os, f.grid.prime.d1);
  put<std::int32_t>(os, f.grid.d2);
  put<std::int32_t>(os, f.grid.prime.n);
  put<std::int32_t>(os, f.grid.n_second);
  put<double>(os, f.grid.prime.X);
  put<double>(os, f.grid.S);
  put<std::uint64_t>(os, f.values.size());
  for (const auto& v : f.values) {
    put<double>(os, v.real());
    put<double>(os, v.imag());
  }
  if (!os) throw std::runtime_error("field snapshot write failed");
}

Field load_field(std::istream& is) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw ContractError("not a field snapshot");
  if (get<std::uint32_t>(is) != kVersion) throw ContractError("unsupported snapshot version");
  GrushinGrid g;
  g.prime.d1 = get<std::int32_t>(is);
  g.d2 = get<std::int32_t>(is);
  g.prime.n = get<std::int32_t>(is);
  g.n_second = get<std::int32_t>(is);
  g.prime.X = get<double>(is);
  g.S = get<double>(is);
  g.validate();
  auto count = get<std::uint64_t>(is);
  if (count != g.size()) throw ContractError("snapshot size does not match its grid");
  Field f(g);
  for (auto& v : f.values) {
    double re = get<double>(is);
    double im = get<double>(is);
    v = {re, im};
  }
  return f;
}

void save_field(const Field& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  save_field(f, os);
}

Field load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return load_field(is);
}

}  // namespace grushin
