#pragma once

/* Persistent result records.
 *
 * A transcript is the machine readable outcome of one batch run: the
 * configuration echoed back, the outputs of the modules that ran, and
 * one row per checked inequality with both sides materialized as exact
 * rationals.  Identical configurations produce byte identical bodies;
 * anything time dependent lives in a metadata block that the body
 * serialization excludes.
 *
 * Rationals cross the JSON boundary as ["numerator", "denominator"]
 * string pairs and integers as decimal strings, so nothing that was
 * computed exactly gets rounded on the way out.
 */

#include "perlat/numeric.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace perlat {

using json = nlohmann::json;

json rat_to_json(const Rat& x);
Rat rat_from_json(const json& j);
json int_to_json(const Int& x);
Int int_from_json(const json& j);
json rvec_to_json(const RVec& v);
RVec rvec_from_json(const json& j);
json ivec_to_json(const IVec& v);
IVec ivec_from_json(const json& j);
json rmat_to_json(const RMat& m);
RMat rmat_from_json(const json& j);

/* Accepts the pair form, a decimal string like "7.072" or "-3/8", or a
 * plain JSON integer. */
Rat rat_of_any(const json& j);

/* "p/q", "-12", "7.072" and the like into an exact rational. */
Rat rat_parse(const std::string& text);

/* x in fixed point with `digits` fractional digits, truncated toward
 * minus infinity, so printed lower bounds stay lower bounds. */
std::string dec_floor(const Rat& x, int digits);

/* One verified inequality, relation in { ">=", ">", "<=", "<", "==" },
 * read as: observed (relation) bound. */
struct Check {
  std::string name;
  std::string relation;
  Rat bound;
  Rat observed;
  bool pass = false;
};

Check make_check(std::string name, std::string relation, Rat bound, Rat observed);

struct Transcript {
  int schema = 1;
  std::string subcommand;
  json config;
  json outputs;
  std::vector<Check> checks;
  json metadata; // timestamps and machine facts, excluded from the body

  bool all_pass() const;
  void add_check(std::string name, std::string relation, Rat bound, Rat observed);

  json body_json() const;
  std::string body_string() const; // canonical dump of the body, sorted keys
  json to_json() const;            // body plus metadata
  static Transcript from_json(const json& j);
};

/* Header plus one row per check; exact values beside 12 digit decimal
 * approximations for reading. */
std::string checks_csv(const std::vector<Check>& checks);

/* Aggregate forms over several transcripts: the same CSV with a source
 * column, and a markdown summary that ends with the reference tables of
 * spanning products, zeta products, and repetition bounds. */
std::string report_csv(const std::vector<Transcript>& ts);
std::string report_markdown(const std::vector<Transcript>& ts);

} // namespace perlat
