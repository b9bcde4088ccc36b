#pragma once

#include <iosfwd>
#include <string>

#include "dpp/common.hpp"

namespace dpp::io {

// Shared matrix text format:
//   line 1: "N M complex|real"
//   then N lines of M whitespace-separated entries, "re" or "re,im"
//   '#' starts a comment line.
// Printing uses max_digits10; re-parse agrees within 1e-15 relative.
void write_matrix(std::ostream& os, const Mat& m,
                  const std::string& comment = "");
Mat read_matrix(std::istream& is);

void save_matrix(const std::string& path, const Mat& m,
                 const std::string& comment = "");
Mat load_matrix(const std::string& path);

}  // namespace dpp::io
