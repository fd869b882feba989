#pragma once

#include <string>
#include <vector>

#include "tsfl/fractional.hpp"

namespace tsfl {

// One facility merge: the source slot's opening and routing are added into
// the target slot. target == -1 closes an empty source slot. A target equal to
// the current slot count creates a new slot at target_location.
struct RoundingMove {
  int phase = 0;
  int source = -1;
  NodeId source_location = -1;
  int target = -1;
  NodeId target_location = -1;
  double mass = 0.0;  // opening moved
};

struct RoundingTrace {
  std::vector<RoundingMove> moves;
  // Largest node-to-facility distance created in each phase, over R.
  double phase1_factor = 0.0;
  double phase2_factor = 0.0;

  std::string to_text() const;
  static RoundingTrace parse(const std::string& text);
};

struct RoundingResult {
  FractionalSolution solution;
  RoundingTrace trace;
};

// Merges partially open facilities so every facility ends up closed or with
// opening at least 1. Expects every partially open facility to be compliant
// (see rescale_structural); throws InvariantError otherwise. Node-to-facility
// distances grow to at most 4R.
RoundingResult round_solution(const Instance& instance,
                              const FractionalSolution& sol);

FractionalSolution replay_trace(const FractionalSolution& sol,
                                const RoundingTrace& trace);

}  // namespace tsfl
