#include "icltemp/params_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace icltemp {

namespace {

void put(std::ostream& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, res.ptr - buf);
}

std::string expect_tag(std::istream& in, const char* tag) {
  std::string word;
  if (!(in >> word) || word != tag) {
    throw std::runtime_error(std::string("params file: expected '") + tag +
                             "', got '" + word + "'");
  }
  return word;
}

}  // namespace

void write_params_text(const AttentionParams& params, std::ostream& out) {
  const Index d = params.dim();
  out << "d " << d << "\n";
  out << "tau ";
  put(out, params.tau);
  out << "\nv22 ";
  put(out, params.v22);
  out << "\nM11 " << d << " " << d << "\n";
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      if (j > 0) out << ' ';
      put(out, params.m11(i, j));
    }
    out << '\n';
  }
  out << "m21 " << d << "\n";
  for (Index j = 0; j < d; ++j) {
    if (j > 0) out << ' ';
    put(out, params.m21(j));
  }
  out << "\nv21 " << d << "\n";
  for (Index j = 0; j < d; ++j) {
    if (j > 0) out << ' ';
    put(out, params.v21(j));
  }
  out << '\n';
}

AttentionParams read_params_text(std::istream& in) {
  expect_tag(in, "d");
  Index d = 0;
  if (!(in >> d) || d < 1) throw std::runtime_error("params file: bad dimension");

  AttentionParams params;
  expect_tag(in, "tau");
  if (!(in >> params.tau)) throw std::runtime_error("params file: bad tau");
  expect_tag(in, "v22");
  if (!(in >> params.v22)) throw std::runtime_error("params file: bad v22");

  expect_tag(in, "M11");
  Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows != d || cols != d) {
    throw std::runtime_error("params file: bad M11 header");
  }
  params.m11.resize(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      if (!(in >> params.m11(i, j))) {
        throw std::runtime_error("params file: truncated M11");
      }
    }
  }

  expect_tag(in, "m21");
  Index len = 0;
  if (!(in >> len) || len != d) throw std::runtime_error("params file: bad m21 header");
  params.m21.resize(d);
  for (Index j = 0; j < d; ++j) {
    if (!(in >> params.m21(j))) throw std::runtime_error("params file: truncated m21");
  }

  expect_tag(in, "v21");
  if (!(in >> len) || len != d) throw std::runtime_error("params file: bad v21 header");
  params.v21.resize(d);
  for (Index j = 0; j < d; ++j) {
    if (!(in >> params.v21(j))) throw std::runtime_error("params file: truncated v21");
  }
  return params;
}

}  // namespace icltemp
