#pragma once

// Untrained message-passing link prediction: parameter-free feature
// propagation with inner-product scoring, path-based heuristics and their
// enumeration oracles, an optional trained linear head, and a transductive
// evaluation harness.

#include "utlink/eval.hpp"
#include "utlink/features.hpp"
#include "utlink/graph.hpp"
#include "utlink/harness.hpp"
#include "utlink/io.hpp"
#include "utlink/linear.hpp"
#include "utlink/pathmeasures.hpp"
#include "utlink/propagation.hpp"
#include "utlink/rng.hpp"
#include "utlink/verify.hpp"

namespace utlink {

inline constexpr const char* version = "0.1.0";

}  // namespace utlink
