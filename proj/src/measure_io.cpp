#include "movelab/measure_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace movelab {

namespace {

using ordered_json = nlohmann::ordered_json;

template <class T>
std::string value_to_string(const T& v) {
  if constexpr (scalar_traits<T>::exact)
    return rat_to_string(v);
  else
    return double_to_string(v);
}

template <class Vec>
ordered_json vector_to_json_obj(const Vec& m, bool signed_flag) {
  ordered_json j;
  j["n"] = m.ground().n;
  if (m.ground().labels) j["labels"] = *m.ground().labels;
  j["mode"] = scalar_traits<std::decay_t<decltype(m[0])>>::exact ? "exact" : "float";
  if (signed_flag) j["signed"] = true;
  ordered_json entries = ordered_json::array();
  for (Config c = 0; c < m.size(); ++c) {
    if (m[c] == 0) continue;
    entries.push_back({config_to_bitstring(c, m.ground().n), value_to_string(m[c])});
  }
  j["entries"] = std::move(entries);
  return j;
}

std::string value_as_string(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();  // tolerated extension: bare JSON numbers
  fail(ErrKind::ParseError, "entry value must be a string");
}

struct ParsedFile {
  GroundSet ground;
  bool exact;
  bool signed_flag;
  std::vector<std::pair<Config, std::string>> entries;
};

ParsedFile parse_common(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    fail(ErrKind::ParseError, e.what());
  }
  if (!j.is_object() || !j.contains("n") || !j.contains("mode") || !j.contains("entries"))
    fail(ErrKind::ParseError, "measure file needs fields n, mode, entries");
  if (!j["n"].is_number_integer()) fail(ErrKind::ParseError, "n must be an integer");
  int n = j["n"].get<int>();
  std::optional<std::vector<std::string>> labels;
  if (j.contains("labels")) labels = j["labels"].get<std::vector<std::string>>();

  std::string mode = j["mode"].get<std::string>();
  if (mode != "exact" && mode != "float")
    fail(ErrKind::ParseError, "mode must be \"exact\" or \"float\"");

  ParsedFile out{GroundSet(n, std::move(labels)), mode == "exact",
                 j.value("signed", false), {}};
  if (!j["entries"].is_array()) fail(ErrKind::ParseError, "entries must be an array");
  for (const auto& e : j["entries"]) {
    if (!e.is_array() || e.size() != 2) fail(ErrKind::ParseError, "entry must be [bitstring, value]");
    Config c = config_from_bitstring(e[0].get<std::string>(), n);
    out.entries.emplace_back(c, value_as_string(e[1]));
  }
  return out;
}

template <class T>
std::vector<std::pair<Config, T>> convert_entries(
    const std::vector<std::pair<Config, std::string>>& raw) {
  std::vector<std::pair<Config, T>> out;
  out.reserve(raw.size());
  for (const auto& [c, s] : raw) {
    if constexpr (scalar_traits<T>::exact)
      out.emplace_back(c, rat_from_string(s));
    else
      out.emplace_back(c, double_from_string(s));
  }
  return out;
}

template <class T>
SignedVector<T> build_signed(const ParsedFile& pf) {
  std::vector<T> values(pf.ground.space_size(), scalar_traits<T>::zero());
  std::vector<char> seen(values.size(), 0);
  for (const auto& [c, v] : convert_entries<T>(pf.entries)) {
    if (seen[c]) fail(ErrKind::DuplicateConfiguration, config_to_bitstring(c, pf.ground.n));
    seen[c] = 1;
    values[c] = v;
  }
  return SignedVector<T>(pf.ground, std::move(values));
}

}  // namespace

std::string measure_to_json(const AnyMeasure& m) {
  return std::visit([](const auto& mm) { return vector_to_json_obj(mm, false).dump(2) + "\n"; },
                    m);
}

std::string signed_to_json(const AnySigned& v) {
  return std::visit(
      [](const auto& vv) {
        bool neg = !vv.is_nonnegative();
        return vector_to_json_obj(vv, neg).dump(2) + "\n";
      },
      v);
}

AnyMeasure measure_from_json(const std::string& text) {
  ParsedFile pf = parse_common(text);
  if (pf.exact)
    return MeasureQ::from_entries(pf.ground, convert_entries<Rat>(pf.entries));
  return MeasureD::from_entries(pf.ground, convert_entries<double>(pf.entries));
}

AnySigned signed_from_json(const std::string& text) {
  ParsedFile pf = parse_common(text);
  if (pf.exact) return build_signed<Rat>(pf);
  return build_signed<double>(pf);
}

AnyMeasure read_measure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrKind::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return measure_from_json(ss.str());
}

void write_measure_file(const std::string& path, const AnyMeasure& m) {
  std::ofstream out(path);
  if (!out) fail(ErrKind::ParseError, "cannot write " + path);
  out << measure_to_json(m);
}

void write_signed_file(const std::string& path, const AnySigned& v) {
  std::ofstream out(path);
  if (!out) fail(ErrKind::ParseError, "cannot write " + path);
  out << signed_to_json(v);
}

}  // namespace movelab
