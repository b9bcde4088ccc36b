#include "dpp/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace dpp::io {

namespace {

void write_scalar(std::ostream& os, Cplx z, bool complex_mode) {
  os << z.real();
  if (complex_mode) os << ',' << z.imag();
}

Cplx parse_entry(const std::string& tok, bool complex_mode) {
  const auto comma = tok.find(',');
  if (comma == std::string::npos) {
    if (complex_mode)
      throw ContractError("matrix entry '" + tok + "' missing imaginary part");
    return Cplx(std::stod(tok), 0.0);
  }
  if (!complex_mode)
    throw ContractError("complex entry '" + tok + "' in a real matrix");
  return Cplx(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
}

std::string next_content_line(std::istream& is) {
  std::string line;
  while (std::getline(is, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '#') continue;
    return line;
  }
  throw ContractError("matrix stream: unexpected end of input");
}

}  // namespace

void write_matrix(std::ostream& os, const Mat& m, const std::string& comment) {
  const bool complex_mode = (m.imag().cwiseAbs().maxCoeff() != 0.0);
  if (!comment.empty()) {
    std::istringstream cs(comment);
    std::string line;
    while (std::getline(cs, line)) os << "# " << line << '\n';
  }
  os.precision(std::numeric_limits<double>::max_digits10);
  os << m.rows() << ' ' << m.cols() << ' ' << (complex_mode ? "complex" : "real")
     << '\n';
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      write_scalar(os, m(i, j), complex_mode);
    }
    os << '\n';
  }
}

Mat read_matrix(std::istream& is) {
  std::istringstream header(next_content_line(is));
  long rows = 0, cols = 0;
  std::string mode;
  if (!(header >> rows >> cols >> mode) || rows < 0 || cols < 0)
    throw ContractError("matrix stream: malformed header");
  if (mode != "complex" && mode != "real")
    throw ContractError("matrix stream: mode must be 'complex' or 'real'");
  const bool complex_mode = (mode == "complex");
  Mat m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    std::istringstream row(next_content_line(is));
    std::string tok;
    for (long j = 0; j < cols; ++j) {
      if (!(row >> tok))
        throw ContractError("matrix stream: short row " + std::to_string(i + 1));
      m(i, j) = parse_entry(tok, complex_mode);
    }
  }
  return m;
}

void save_matrix(const std::string& path, const Mat& m,
                 const std::string& comment) {
  std::ofstream os(path);
  if (!os) throw ContractError("cannot open for writing: " + path);
  write_matrix(os, m, comment);
}

Mat load_matrix(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ContractError("cannot open for reading: " + path);
  return read_matrix(is);
}

}  // namespace dpp::io
