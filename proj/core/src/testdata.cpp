#include "gridflex/testdata.hpp"

#include <stdexcept>
#include <string_view>

namespace gridflex {

namespace detail {
struct BundledText {
  std::string_view name;
  std::string_view text;
};
const std::vector<BundledText>& bundled_case_texts();
}  // namespace detail

std::vector<std::pair<std::string, CaseFile>> bundled_cases() {
  std::vector<std::pair<std::string, CaseFile>> out;
  for (const auto& entry : detail::bundled_case_texts())
    out.emplace_back(std::string(entry.name), parse_case(entry.text));
  return out;
}

CaseFile bundled_case(const std::string& name) {
  for (const auto& entry : detail::bundled_case_texts())
    if (entry.name == name) return parse_case(entry.text);
  throw std::out_of_range("no bundled case named " + name);
}

}  // namespace gridflex
