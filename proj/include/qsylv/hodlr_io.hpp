#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "qsylv/hodlr.hpp"

// Binary layout (little-endian):
//   "QSH1" | u64 rows | u64 cols | u32 block_size | nodes in pre-order
//   leaf:   u8 0 | u64 r | u64 c | r*c f64 (row-major)
//   branch: u8 1 | A21: u32 rank, u64 rows, u64 cols, U row-major, V row-major | A12 likewise | A11 | A22
namespace qsylv {

namespace detail {

static_assert(std::endian::native == std::endian::little, "binary format assumes a little-endian host");

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  template <typename I>
  void put(I v) {
    os_.write(reinterpret_cast<const char*>(&v), sizeof(I));
  }
  void put_matrix(const DenseMatrix& a) {
    for (Index i = 0; i < a.rows(); ++i)
      for (Index j = 0; j < a.cols(); ++j) put<double>(a(i, j));
  }

 private:
  std::ostream& os_;
};

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}
  template <typename I>
  I get() {
    I v;
    is_.read(reinterpret_cast<char*>(&v), sizeof(I));
    if (is_.gcount() != std::streamsize(sizeof(I))) throw FormatError("truncated stream", offset_);
    offset_ += sizeof(I);
    return v;
  }
  DenseMatrix get_matrix(std::uint64_t r, std::uint64_t c) {
    if (r > (1u << 28) || c > (1u << 28) || (c != 0 && r > (std::uint64_t(1) << 34) / c))
      throw FormatError("implausible block size", offset_);
    DenseMatrix a(static_cast<Index>(r), static_cast<Index>(c));
    for (Index i = 0; i < a.rows(); ++i)
      for (Index j = 0; j < a.cols(); ++j) {
        a(i, j) = get<double>();
        if (!std::isfinite(a(i, j))) throw FormatError("non-finite value", offset_ - 8);
      }
    return a;
  }
  std::size_t offset() const { return offset_; }

 private:
  std::istream& is_;
  std::size_t offset_ = 0;
};

inline void write_lowrank(Writer& w, const LowRank<double>& l) {
  w.put<std::uint32_t>(std::uint32_t(l.rank()));
  w.put<std::uint64_t>(std::uint64_t(l.rows()));
  w.put<std::uint64_t>(std::uint64_t(l.cols()));
  w.put_matrix(l.U);
  w.put_matrix(l.V);
}

inline void write_node(Writer& w, const Hodlr& h) {
  if (h.is_leaf()) {
    w.put<std::uint8_t>(0);
    w.put<std::uint64_t>(std::uint64_t(h.rows()));
    w.put<std::uint64_t>(std::uint64_t(h.cols()));
    w.put_matrix(h.leaf());
    return;
  }
  w.put<std::uint8_t>(1);
  write_lowrank(w, h.a21());
  write_lowrank(w, h.a12());
  write_node(w, h.a11());
  write_node(w, h.a22());
}

inline LowRank<double> read_lowrank(Reader& r) {
  const auto k = r.get<std::uint32_t>();
  const auto m = r.get<std::uint64_t>();
  const auto n = r.get<std::uint64_t>();
  if (k > std::min(m, n)) throw FormatError("rank exceeds block dimensions", r.offset());
  DenseMatrix u = r.get_matrix(m, k);
  DenseMatrix v = r.get_matrix(n, k);
  return LowRank<double>(std::move(u), std::move(v));
}

inline Hodlr read_node(Reader& r, int depth) {
  if (depth > 64) throw FormatError("tree too deep", r.offset());
  const std::size_t at = r.offset();
  const auto tag = r.get<std::uint8_t>();
  if (tag == 0) {
    const auto rows = r.get<std::uint64_t>();
    const auto cols = r.get<std::uint64_t>();
    return Hodlr(r.get_matrix(rows, cols));
  }
  if (tag != 1) throw FormatError("unknown node tag", at);
  LowRank<double> a21 = read_lowrank(r);
  LowRank<double> a12 = read_lowrank(r);
  Hodlr a11 = read_node(r, depth + 1);
  Hodlr a22 = read_node(r, depth + 1);
  const std::size_t end = r.offset();
  try {
    return Hodlr(std::move(a11), std::move(a22), std::move(a21), std::move(a12));
  } catch (const InvalidInput&) {
    throw FormatError("inconsistent branch dimensions", end);
  }
}

}  // namespace detail

inline void serialize(const Hodlr& h, std::ostream& os, std::uint32_t block_size) {
  detail::Writer w(os);
  os.write("QSH1", 4);
  w.put<std::uint64_t>(std::uint64_t(h.rows()));
  w.put<std::uint64_t>(std::uint64_t(h.cols()));
  w.put<std::uint32_t>(block_size);
  detail::write_node(w, h);
  if (!os) throw Error("serialize: write failed");
}

inline void serialize(const Hodlr& h, std::ostream& os, const HodlrConfig& cfg = {}) {
  serialize(h, os, std::uint32_t(cfg.block_size));
}

struct LoadedHodlr {
  Hodlr matrix;
  std::uint32_t block_size = 0;
};

inline LoadedHodlr deserialize_with_header(std::istream& is) {
  detail::Reader r(is);
  char magic[4];
  for (char& c : magic) c = char(r.get<std::uint8_t>());
  if (std::memcmp(magic, "QSH1", 4) != 0) throw FormatError("bad magic", 0);
  const auto rows = r.get<std::uint64_t>();
  const auto cols = r.get<std::uint64_t>();
  const auto bs = r.get<std::uint32_t>();
  const std::size_t body = r.offset();
  Hodlr h = detail::read_node(r, 0);
  if (std::uint64_t(h.rows()) != rows || std::uint64_t(h.cols()) != cols)
    throw FormatError("header dimensions do not match tree", body);
  return {std::move(h), bs};
}

inline Hodlr deserialize(std::istream& is) { return deserialize_with_header(is).matrix; }

}  // namespace qsylv
