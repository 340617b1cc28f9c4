#include "perlat/transcript.hpp"

#include "perlat/generation.hpp"
#include "perlat/planner.hpp"

#include <sstream>

namespace perlat {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

bool relation_holds(const std::string& rel, const Rat& observed, const Rat& bound) {
  if (rel == ">=") return observed >= bound;
  if (rel == ">") return observed > bound;
  if (rel == "<=") return observed <= bound;
  if (rel == "<") return observed < bound;
  if (rel == "==") return observed == bound;
  throw config_error("unknown check relation: " + rel);
}

} // namespace

json rat_to_json(const Rat& x) {
  return json::array({numerator(x).str(), denominator(x).str()});
}

Rat rat_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_string())
    throw config_error("rational fields must be [numerator, denominator] string pairs");
  return Rat(Int(j[0].get<std::string>()), Int(j[1].get<std::string>()));
}

json int_to_json(const Int& x) { return x.str(); }

Int int_from_json(const json& j) {
  if (j.is_number_integer()) return Int(j.get<long long>());
  if (!j.is_string()) throw config_error("integer fields must be decimal strings");
  return Int(j.get<std::string>());
}

json rvec_to_json(const RVec& v) {
  json a = json::array();
  for (const Rat& x : v) a.push_back(rat_to_json(x));
  return a;
}

RVec rvec_from_json(const json& j) {
  if (!j.is_array()) throw config_error("vector fields must be arrays");
  RVec v;
  for (const auto& e : j) v.push_back(rat_of_any(e));
  return v;
}

json ivec_to_json(const IVec& v) {
  json a = json::array();
  for (const Int& x : v) a.push_back(x.str());
  return a;
}

IVec ivec_from_json(const json& j) {
  if (!j.is_array()) throw config_error("vector fields must be arrays");
  IVec v;
  for (const auto& e : j) v.push_back(int_from_json(e));
  return v;
}

json rmat_to_json(const RMat& m) {
  json a = json::array();
  for (const RVec& c : m) a.push_back(rvec_to_json(c));
  return a;
}

RMat rmat_from_json(const json& j) {
  if (!j.is_array()) throw config_error("matrix fields must be arrays of columns");
  RMat m;
  for (const auto& c : j) m.push_back(rvec_from_json(c));
  return m;
}

Rat rat_of_any(const json& j) {
  if (j.is_array()) return rat_from_json(j);
  if (j.is_string()) return rat_parse(j.get<std::string>());
  if (j.is_number_integer()) return Rat(j.get<long long>());
  throw config_error("expected a rational value");
}

Rat rat_parse(const std::string& text) {
  std::string s = text;
  if (!s.empty() && s[0] == '+') s = s.substr(1);
  if (s.empty()) throw config_error("empty rational literal");

  auto digits_only = [](const std::string& t) {
    if (t.empty()) return false;
    size_t i = t[0] == '-' ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
    return true;
  };

  size_t slash = s.find('/');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!digits_only(num) || !digits_only(den) || den[0] == '-')
      throw config_error("bad rational literal: " + text);
    Int d(den);
    if (d == 0) throw config_error("zero denominator: " + text);
    return Rat(Int(num), d);
  }

  size_t dot = s.find('.');
  if (dot != std::string::npos) {
    std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
    bool neg = !whole.empty() && whole[0] == '-';
    if (neg) whole = whole.substr(1);
    if (whole.empty()) whole = "0";
    if (frac.empty() || !digits_only(whole) || !digits_only(frac) || frac[0] == '-')
      throw config_error("bad decimal literal: " + text);
    Rat v = Rat(Int(whole)) + Rat(Int(frac), pow_int(Int(10), frac.size()));
    return neg ? -v : v;
  }

  if (!digits_only(s)) throw config_error("bad rational literal: " + text);
  return Rat(Int(s));
}

std::string dec_floor(const Rat& x, int digits) {
  if (digits < 0) throw config_error("negative digit count");
  Int scaled = floor_rat(x * pow_int(Int(10), static_cast<unsigned long>(digits)));
  bool neg = scaled < 0;
  std::string d = Int(abs(scaled)).str();
  if (static_cast<int>(d.size()) <= digits) d.insert(0, static_cast<size_t>(digits) + 1 - d.size(), '0');
  std::string out = neg ? "-" : "";
  out += d.substr(0, d.size() - static_cast<size_t>(digits));
  if (digits > 0) out += "." + d.substr(d.size() - static_cast<size_t>(digits));
  return out;
}

Check make_check(std::string name, std::string relation, Rat bound, Rat observed) {
  Check c;
  c.pass = relation_holds(relation, observed, bound);
  c.name = std::move(name);
  c.relation = std::move(relation);
  c.bound = std::move(bound);
  c.observed = std::move(observed);
  return c;
}

bool Transcript::all_pass() const {
  for (const Check& c : checks)
    if (!c.pass) return false;
  return true;
}

void Transcript::add_check(std::string name, std::string relation, Rat bound, Rat observed) {
  checks.push_back(make_check(std::move(name), std::move(relation), std::move(bound),
                              std::move(observed)));
}

json Transcript::body_json() const {
  json b;
  b["schema"] = schema;
  b["subcommand"] = subcommand;
  b["config"] = config;
  b["outputs"] = outputs;
  json rows = json::array();
  for (const Check& c : checks) {
    json r;
    r["name"] = c.name;
    r["relation"] = c.relation;
    r["bound"] = rat_to_json(c.bound);
    r["observed"] = rat_to_json(c.observed);
    r["pass"] = c.pass;
    rows.push_back(std::move(r));
  }
  b["checks"] = std::move(rows);
  return b;
}

std::string Transcript::body_string() const { return body_json().dump(2) + "\n"; }

json Transcript::to_json() const {
  json j = body_json();
  j["meta"] = metadata;
  return j;
}

Transcript Transcript::from_json(const json& j) {
  if (!j.is_object() || !j.contains("schema") || !j["schema"].is_number_integer())
    throw config_error("transcript without a schema number");
  Transcript t;
  t.schema = j["schema"].get<int>();
  if (t.schema != 1) throw config_error("unsupported transcript schema");
  t.subcommand = j.value("subcommand", std::string());
  t.config = j.value("config", json::object());
  t.outputs = j.value("outputs", json::object());
  if (j.contains("checks")) {
    if (!j["checks"].is_array()) throw config_error("transcript checks must be an array");
    for (const auto& r : j["checks"]) {
      Check c = make_check(r.at("name").get<std::string>(), r.at("relation").get<std::string>(),
                           rat_from_json(r.at("bound")), rat_from_json(r.at("observed")));
      if (r.contains("pass") && r["pass"].get<bool>() != c.pass)
        throw config_error("transcript check disagrees with its recorded verdict: " + c.name);
      t.checks.push_back(std::move(c));
    }
  }
  t.metadata = j.value("meta", json::object());
  return t;
}

namespace {

void csv_rows(std::ostringstream& os, const std::vector<Check>& checks,
              const std::string& source) {
  for (const Check& c : checks) {
    if (!source.empty()) os << csv_field(source) << ",";
    os << csv_field(c.name) << "," << c.relation << "," << dec_floor(c.observed, 12) << ","
       << dec_floor(c.bound, 12) << "," << csv_field(rat_str(c.observed)) << ","
       << csv_field(rat_str(c.bound)) << "," << (c.pass ? "pass" : "fail") << "\n";
  }
}

const char* kCsvColumns = "check,relation,observed,bound,observed_exact,bound_exact,verdict\n";

} // namespace

std::string checks_csv(const std::vector<Check>& checks) {
  std::ostringstream os;
  os << kCsvColumns;
  csv_rows(os, checks, "");
  return os.str();
}

std::string report_csv(const std::vector<Transcript>& ts) {
  std::ostringstream os;
  os << "source," << kCsvColumns;
  for (size_t i = 0; i < ts.size(); ++i)
    csv_rows(os, ts[i].checks, std::to_string(i) + ":" + ts[i].subcommand);
  return os.str();
}

std::string report_markdown(const std::vector<Transcript>& ts) {
  size_t total = 0, failed = 0;
  for (const Transcript& t : ts) {
    total += t.checks.size();
    for (const Check& c : t.checks)
      if (!c.pass) ++failed;
  }

  std::ostringstream os;
  os << "# Verification report\n\n";
  os << ts.size() << " transcript" << (ts.size() == 1 ? "" : "s") << ", " << total << " check"
     << (total == 1 ? "" : "s") << ", " << failed << " failure" << (failed == 1 ? "" : "s")
     << ".\n\n";

  os << "| transcript | checks | failures |\n|---|---|---|\n";
  for (size_t i = 0; i < ts.size(); ++i) {
    size_t f = 0;
    for (const Check& c : ts[i].checks)
      if (!c.pass) ++f;
    os << "| " << i << ": " << ts[i].subcommand << " | " << ts[i].checks.size() << " | " << f
       << " |\n";
  }

  if (failed > 0) {
    os << "\n## Failing checks\n\n| transcript | check | observed | relation | bound |\n"
       << "|---|---|---|---|---|\n";
    for (size_t i = 0; i < ts.size(); ++i)
      for (const Check& c : ts[i].checks)
        if (!c.pass)
          os << "| " << i << " | " << c.name << " | " << dec_floor(c.observed, 6) << " | "
             << c.relation << " | " << dec_floor(c.bound, 6) << " |\n";
  }

  os << "\n## Reference tables\n\n";
  os << "Spanning lower bounds, the products over (1 - 2^-i):\n\n| n |";
  for (int n = 2; n <= 6; ++n) os << " " << n << " |";
  os << "\n|---|---|---|---|---|---|\n| bound |";
  for (int n = 2; n <= 6; ++n) os << " " << dec_floor(span_product_bound(n), 3) << " |";
  os << "\n\nGeneration lower bounds, the products over zeta(i)^-1:\n\n| n |";
  for (int n = 2; n <= 6; ++n) os << " " << n << " |";
  os << "\n|---|---|---|---|---|---|\n| bound |";
  for (int n = 2; n <= 6; ++n) os << " " << dec_floor(zeta_product_bound(n), 3) << " |";
  os << "\n\nRepetition bounds, ours against the general Fourier approach:\n\n| n |";
  for (int n = 1; n <= 6; ++n) os << " " << n << " |";
  os << "\n|---|---|---|---|---|---|---|\n| ours |";
  for (int n = 1; n <= 6; ++n) os << " " << success_lower_bound(n).inverse_sci << " |";
  os << "\n| general Fourier |";
  for (int n = 1; n <= 6; ++n) os << " " << competitor_bound(n).inverse_sci << " |";
  os << "\n";
  return os.str();
}

} // namespace perlat
