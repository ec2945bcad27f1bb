#pragma once

#include <stdexcept>
#include <string>

namespace agr {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// goal cell unreachable from the actor's start under actor movement rules
struct UnreachableGoal : Error {
  using Error::Error;
};

// belief or recognizer initialized with no candidate goals
struct EmptyGoalSet : Error {
  using Error::Error;
};

// observation likelihood annihilated the whole belief (see DegeneratePolicy)
struct DegenerateObservation : Error {
  using Error::Error;
};

// instance generator exhausted its retry budget
struct GenerationFailure : Error {
  using Error::Error;
};

}  // namespace agr
