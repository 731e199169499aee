#include "zetaprog/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace zetaprog {

void Report::add_assertion(std::string name, Verdict v, std::string detail, bool hard) {
  assertions.push_back({std::move(name), v, hard, std::move(detail)});
}

Verdict Report::overall() const {
  Verdict v = Verdict::pass;
  for (const auto& a : assertions) {
    if (!a.hard) continue;
    if (a.verdict == Verdict::fail) return Verdict::fail;
    if (a.verdict == Verdict::undecided) v = Verdict::undecided;
  }
  return v;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  return quote(std::get<std::string>(c));
}

void write_body(std::ostream& out, const Report& r) {
  if (r.columns.empty()) return;
  for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << quote(r.columns[i]);
  out << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
    out << '\n';
  }
}

}  // namespace

void write_csv(std::ostream& out, const Report& r) {
  out << "# zprog," << r.subcommand << '\n';
  for (const auto& [k, v] : r.inputs) out << "# input," << k << ',' << quote(v) << '\n';
  for (const auto& a : r.assertions) {
    out << "# assert," << a.name << ',' << to_string(a.verdict) << ',' << (a.hard ? "hard" : "soft") << ','
        << quote(a.detail) << '\n';
  }
  for (const auto& [k, v] : r.meta) out << "# meta," << k << ',' << quote(v) << '\n';
  out << "# overall," << to_string(r.overall()) << '\n';
  write_body(out, r);
}

std::string csv_body(const Report& r) {
  std::ostringstream os;
  write_body(os, r);
  return os.str();
}

void write_json(std::ostream& out, const Report& r) {
  using nlohmann::json;
  json j;
  j["subcommand"] = r.subcommand;
  j["inputs"] = json::object();
  for (const auto& [k, v] : r.inputs) j["inputs"][k] = v;
  j["columns"] = r.columns;
  j["rows"] = json::array();
  for (const auto& row : r.rows) {
    json jr = json::array();
    for (const auto& c : row) {
      if (const auto* i = std::get_if<std::int64_t>(&c)) {
        jr.push_back(*i);
      } else if (const auto* d = std::get_if<double>(&c)) {
        if (std::isfinite(*d)) {
          jr.push_back(*d);
        } else {
          jr.push_back(format_double(*d));
        }
      } else {
        jr.push_back(std::get<std::string>(c));
      }
    }
    j["rows"].push_back(std::move(jr));
  }
  j["assertions"] = json::array();
  for (const auto& a : r.assertions) {
    j["assertions"].push_back({{"name", a.name}, {"verdict", to_string(a.verdict)}, {"hard", a.hard}, {"detail", a.detail}});
  }
  j["meta"] = json::object();
  for (const auto& [k, v] : r.meta) j["meta"][k] = v;
  j["overall"] = to_string(r.overall());
  out << j.dump(2) << '\n';
}

}  // namespace zetaprog
