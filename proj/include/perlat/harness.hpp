#pragma once

/* Batch orchestration: configuration parsing, subcommand dispatch, and
 * transcript assembly.
 *
 * Every runner is a pure function of its configuration JSON.  All
 * randomness flows through counter streams keyed by (seed, tag, trial),
 * so replaying a configuration reproduces the transcript body byte for
 * byte and running trials in any order or in parallel cannot change
 * what any single trial draws.  File handling stays in the command
 * line tool; runners see inlined data only.
 */

#include "perlat/infrastructure.hpp"
#include "perlat/planner.hpp"
#include "perlat/transcript.hpp"

namespace perlat {

struct ExperimentConfig {
  std::string subcommand; // synth | plan | sample | recover | verify | report
  std::uint64_t seed = 0;
  Int budget_terms = Int(1000000000);
  json params; // everything else, subcommand specific
};

ExperimentConfig parse_config(const json& config);

json infrastructure_to_json(const Infrastructure& infra);
Infrastructure infrastructure_from_json(const json& j);

/* Exact invariants of a diagonal period instance, packaged for the
 * planner: growth and density from the geometry, first minimum and
 * determinant from the periods, covering radius as the rational upper
 * bound on half the diagonal length. */
PlannerInput instance_planner_input(const Infrastructure& infra, const Rat& gamma = Rat(1));

/* Instances the verification suites default to: circumference 40 with
 * one interior cut in dimension one, a 10 x 10 torus with one cut per
 * axis in dimension two, 8^3 with one cut per axis in dimension three. */
Infrastructure reference_instance(int n);

Transcript run_synth(const ExperimentConfig& cfg);
Transcript run_plan(const ExperimentConfig& cfg);
Transcript run_sample(const ExperimentConfig& cfg);
Transcript run_recover(const ExperimentConfig& cfg);
Transcript run_verify(const ExperimentConfig& cfg);
Transcript run_report(const ExperimentConfig& cfg);

/* Parses, dispatches, and echoes the configuration into the result. */
Transcript run_experiment(const json& config);

} // namespace perlat
