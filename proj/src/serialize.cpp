#include "waiterplan/serialize.hpp"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace waiterplan {

namespace {

constexpr char kMagic[4] = {'W', 'P', 'Z', '1'};

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("pz dump: truncated stream");
  return v;
}

void put_pz(std::ostream& os, const PolyZonotope& p) {
  put<uint32_t>(os, static_cast<uint32_t>(p.rows()));
  put<uint32_t>(os, static_cast<uint32_t>(p.cols()));
  put<uint32_t>(os, static_cast<uint32_t>(p.n_terms()));
  for (const auto& t : p.terms()) {
    put<uint32_t>(os, static_cast<uint32_t>(t.mono.factors().size()));
    for (const auto& f : t.mono.factors()) {
      put<uint8_t>(os, static_cast<uint8_t>(f.id.tag));
      put<uint32_t>(os, f.id.index);
      put<uint32_t>(os, f.exp);
    }
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.cols(); ++c) {
        put<double>(os, t.coeff(r, c));
      }
    }
  }
}

PolyZonotope get_pz(std::istream& is) {
  const auto rows = get<uint32_t>(is);
  const auto cols = get<uint32_t>(is);
  const auto n_terms = get<uint32_t>(is);
  std::vector<Term> terms;
  terms.reserve(n_terms);
  for (uint32_t i = 0; i < n_terms; ++i) {
    const auto n_factors = get<uint32_t>(is);
    Monomial mono = Monomial::one();
    for (uint32_t f = 0; f < n_factors; ++f) {
      const auto tag = get<uint8_t>(is);
      if (tag > static_cast<uint8_t>(VarTag::inertial)) {
        throw std::runtime_error("pz dump: bad indeterminate tag");
      }
      const auto index = get<uint32_t>(is);
      const auto exp = get<uint32_t>(is);
      mono = mono.times(Monomial::var({static_cast<VarTag>(tag), index}, exp));
    }
    MatX coeff(rows, cols);
    for (uint32_t r = 0; r < rows; ++r) {
      for (uint32_t c = 0; c < cols; ++c) {
        coeff(r, c) = get<double>(is);
      }
    }
    terms.push_back({std::move(coeff), std::move(mono)});
  }
  return PolyZonotope::from_terms(rows, cols, std::move(terms));
}

}  // namespace

void write_pz_dump(std::ostream& os,
                   const std::vector<std::pair<std::string, PolyZonotope>>& entries) {
  os.write(kMagic, 4);
  put<uint32_t>(os, 1);  // version
  put<uint32_t>(os, static_cast<uint32_t>(entries.size()));
  for (const auto& [name, pz] : entries) {
    put<uint16_t>(os, static_cast<uint16_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_pz(os, pz);
  }
  if (!os) throw std::runtime_error("pz dump: write failed");
}

std::vector<std::pair<std::string, PolyZonotope>> read_pz_dump(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("pz dump: bad magic, expected WPZ1");
  }
  const auto version = get<uint32_t>(is);
  if (version != 1) {
    throw std::runtime_error("pz dump: unsupported version " +
                             std::to_string(version));
  }
  const auto count = get<uint32_t>(is);
  std::vector<std::pair<std::string, PolyZonotope>> out;
  out.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    const auto name_len = get<uint16_t>(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    if (!is) throw std::runtime_error("pz dump: truncated stream");
    out.emplace_back(std::move(name), get_pz(is));
  }
  return out;
}

void write_pz_dump_file(
    const std::string& path,
    const std::vector<std::pair<std::string, PolyZonotope>>& entries) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("pz dump: cannot open " + path);
  write_pz_dump(os, entries);
}

std::vector<std::pair<std::string, PolyZonotope>> read_pz_dump_file(
    const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("pz dump: cannot open " + path);
  return read_pz_dump(is);
}

}  // namespace waiterplan
