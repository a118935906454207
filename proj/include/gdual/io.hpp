#ifndef GDUAL_IO_HPP_
#define GDUAL_IO_HPP_

// JSON and CSV formats.
//
//   frame    {"dim": d, "vectors": [[[re, im], ...d], ...n]}
//   operator {"rows": r, "cols": c, "entries": [[re, im], ...] row-major}
//   window   {"samples_per_unit": s, "period": P, "values": [[re, im], ...]}
//   lattice  {"a": "p/q", "b": "p/q"}
//
// Doubles are written in shortest round-trip form, so save then load is
// bit-exact. Needs nlohmann/json on the include path.

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "gdual/error.hpp"
#include "gdual/frame.hpp"
#include "gdual/gabor.hpp"
#include "gdual/oplin.hpp"

namespace gdual::io {

using json = nlohmann::json;

inline std::string read_text(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ParseError, "cannot write " + path);
  out << text;
}

// Parse errors carry 1-based line and column of the offending byte.
inline json parse_json(const std::string &text, const std::string &source = "<input>") {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::ParseError, source + ":" + std::to_string(line) + ":" +
                                           std::to_string(col) + ": " + e.what());
  }
}

inline json load_json(const std::string &path) { return parse_json(read_text(path), path); }

namespace detail {

[[noreturn]] inline void bad(const std::string &what) {
  throw Error(ErrorKind::ParseError, what);
}

inline const json &field(const json &j, const char *key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline long long positive_int(const json &j, const char *key) {
  const json &v = field(j, key);
  if (!v.is_number_integer() || v.get<long long>() <= 0) {
    bad(std::string("'") + key + "' must be a positive integer");
  }
  return v.get<long long>();
}

inline Complex complex_from(const json &j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    bad("complex numbers are [re, im] pairs");
  }
  return Complex(j[0].get<double>(), j[1].get<double>());
}

inline json complex_to(const Complex &z) { return json::array({z.real(), z.imag()}); }

}  // namespace detail

inline json frame_to_json(const Frame &phi) {
  json vectors = json::array();
  for (Eigen::Index k = 0; k < phi.count(); ++k) {
    json v = json::array();
    for (Eigen::Index i = 0; i < phi.dim(); ++i) v.push_back(detail::complex_to(phi.synthesis()(i, k)));
    vectors.push_back(std::move(v));
  }
  return json{{"dim", phi.dim()}, {"vectors", std::move(vectors)}};
}

inline Frame frame_from_json(const json &j) {
  const long long dim = detail::positive_int(j, "dim");
  const json &vectors = detail::field(j, "vectors");
  if (!vectors.is_array() || vectors.empty()) detail::bad("'vectors' must be a non-empty array");
  LinearMap t(dim, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    const json &v = vectors[k];
    if (!v.is_array() || v.size() != static_cast<std::size_t>(dim)) {
      throw Error(ErrorKind::DimensionMismatch,
                  "vector " + std::to_string(k) + " does not have dim " + std::to_string(dim) +
                      " entries");
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = detail::complex_from(v[i]);
    }
  }
  return Frame(std::move(t));
}

inline json map_to_json(const LinearMap &m) {
  json entries = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) entries.push_back(detail::complex_to(m(i, k)));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

inline LinearMap map_from_json(const json &j) {
  const long long rows = detail::positive_int(j, "rows");
  const long long cols = detail::positive_int(j, "cols");
  const json &entries = detail::field(j, "entries");
  if (!entries.is_array() || entries.size() != static_cast<std::size_t>(rows * cols)) {
    throw Error(ErrorKind::DimensionMismatch, "'entries' must hold rows*cols values");
  }
  LinearMap m(rows, cols);
  std::size_t at = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = detail::complex_from(entries[at++]);
  }
  if (!m.allFinite()) detail::bad("operator entries must be finite");
  return m;
}

inline json window_to_json(const SampledWindow &w) {
  json values = json::array();
  for (Eigen::Index j = 0; j < w.values.size(); ++j) values.push_back(detail::complex_to(w.values(j)));
  return json{{"samples_per_unit", w.grid.samples_per_unit},
              {"period", w.grid.period},
              {"values", std::move(values)}};
}

inline SampledWindow window_from_json(const json &j) {
  const GridSpec grid(static_cast<int>(detail::positive_int(j, "samples_per_unit")),
                      static_cast<int>(detail::positive_int(j, "period")));
  const json &values = detail::field(j, "values");
  if (!values.is_array() || values.size() != static_cast<std::size_t>(grid.total())) {
    throw Error(ErrorKind::DimensionMismatch, "'values' must hold s*P samples");
  }
  Vector v(grid.total());
  for (std::size_t i = 0; i < values.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = detail::complex_from(values[i]);
  }
  return SampledWindow(grid, std::move(v));
}

inline json lattice_to_json(const GaborLattice &lat) {
  return json{{"a", format_rational(lat.a)}, {"b", format_rational(lat.b)}};
}

inline GaborLattice lattice_from_json(const json &j) {
  auto rational = [&](const char *key) {
    const json &v = detail::field(j, key);
    if (!v.is_string()) detail::bad(std::string("'") + key + "' must be a \"p/q\" string");
    return parse_rational(v.get<std::string>());
  };
  return GaborLattice{rational("a"), rational("b")};
}

// CSV with a header row, full double precision.
class CsvWriter {
 public:
  CsvWriter(const std::string &path, const std::vector<std::string> &header)
      : out_(path), path_(path) {
    if (!out_) throw Error(ErrorKind::ParseError, "cannot write " + path);
    out_ << std::setprecision(17);
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  template <typename... Cells>
  void row(const Cells &...cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cells, first = false), ...);
    out_ << '\n';
  }

  const std::string &path() const { return path_; }

 private:
  std::ofstream out_;
  std::string path_;
};

// j, x, re, im per sample.
inline void write_window_csv(const std::string &path, const SampledWindow &w) {
  CsvWriter csv(path, {"j", "x", "re", "im"});
  for (Eigen::Index j = 0; j < w.values.size(); ++j) {
    csv.row(j, w.grid.point(j), w.values(j).real(), w.values(j).imag());
  }
}

}  // namespace gdual::io

#endif  // GDUAL_IO_HPP_
