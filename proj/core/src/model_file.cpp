#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "cramerlab/error.hpp"
#include "cramerlab/models.hpp"

namespace cramerlab {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> tokens(const std::string& s) {
  std::string copy = s;
  std::replace(copy.begin(), copy.end(), ',', ' ');
  std::istringstream in(copy);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

template <typename T>
std::vector<T> numbers(const std::vector<std::string>& toks, std::string_view key) {
  std::vector<T> out;
  out.reserve(toks.size());
  for (const auto& t : toks) {
    std::size_t used = 0;
    try {
      if constexpr (std::is_same_v<T, double>)
        out.push_back(std::stod(t, &used));
      else
        out.push_back(static_cast<T>(std::stoll(t, &used)));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size())
      throw Error(ErrorCode::ParseError, "key '" + std::string(key) + "': '" + t + "' is not a valid number");
  }
  return out;
}

}  // namespace

FiniteLatticeModel parse_model_text(std::string_view text, std::string name) {
  static const std::vector<std::string> kKeys{"states", "transition", "f_num", "denom"};
  std::map<std::string, std::string> values;
  std::string current;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      current = trim(line.substr(0, eq));
      if (std::find(kKeys.begin(), kKeys.end(), current) == kKeys.end())
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": unknown key '" + current + "'");
      if (values.count(current))
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": duplicate key '" + current + "'");
      values[current] = line.substr(eq + 1);
    } else {
      if (current.empty())
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": value before any key");
      values[current] += " " + line;
    }
  }
  for (const char* key : {"states", "transition", "f_num"})
    if (!values.count(key)) throw Error(ErrorCode::ParseError, std::string("missing key '") + key + "'");

  auto states = tokens(values["states"]);
  auto transition = numbers<double>(tokens(values["transition"]), "transition");
  auto f_num = numbers<std::int64_t>(tokens(values["f_num"]), "f_num");
  std::int64_t denom = 1;
  if (values.count("denom")) {
    auto d = numbers<std::int64_t>(tokens(values["denom"]), "denom");
    if (d.size() != 1) throw Error(ErrorCode::ParseError, "key 'denom' takes exactly one integer");
    denom = d[0];
  }
  return FiniteLatticeModel::build(std::move(states), std::move(transition), std::move(f_num), denom, std::move(name));
}

FiniteLatticeModel load_model_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw Error(ErrorCode::ParseError, "cannot read model file '" + path + "'");
  std::ostringstream buf;
  buf << file.rdbuf();
  return parse_model_text(buf.str(), path);
}

}  // namespace cramerlab
