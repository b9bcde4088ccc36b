#include "dpp/common.hpp"

#include <sstream>

namespace dpp {

std::string serialize_sample(const SampleSet& s, const std::string& algo) {
  std::ostringstream os;
  os << "seed=" << s.seed << " algo=" << algo << '\n';
  for (size_t i = 0; i < s.indices.size(); ++i) {
    if (i) os << ',';
    os << s.indices[i] + 1;
  }
  os << '\n';
  return os.str();
}

SampleSet parse_sample(const std::string& text, std::string* algo_out) {
  std::istringstream is(text);
  std::string header;
  if (!std::getline(is, header))
    throw ContractError("sample stream: missing header");
  SampleSet s;
  {
    std::istringstream hs(header);
    std::string tok;
    while (hs >> tok) {
      if (tok.rfind("seed=", 0) == 0) s.seed = std::stoull(tok.substr(5));
      if (tok.rfind("algo=", 0) == 0 && algo_out) *algo_out = tok.substr(5);
    }
  }
  std::string body;
  std::getline(is, body);
  std::istringstream bs(body);
  std::string item;
  while (std::getline(bs, item, ',')) {
    if (item.empty()) continue;
    const int idx = std::stoi(item);
    if (idx < 1) throw ContractError("sample stream: index below 1");
    s.indices.push_back(idx - 1);
  }
  if (!std::is_sorted(s.indices.begin(), s.indices.end()))
    throw ContractError("sample stream: indices not sorted");
  return s;
}

}  // namespace dpp
