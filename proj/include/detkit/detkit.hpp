#pragma once

// Decentralized binary detection toolkit: exact-arithmetic models and
// policies, MAP fusion, risk evaluation (exact and Monte Carlo), Chernoff
// error exponents with a finite-team lower bound, and team-design searches.

#include "detkit/errors.hpp"
#include "detkit/evaluate.hpp"
#include "detkit/exponent.hpp"
#include "detkit/fusion.hpp"
#include "detkit/io.hpp"
#include "detkit/model.hpp"
#include "detkit/optimize.hpp"
#include "detkit/policy.hpp"
#include "detkit/rational.hpp"
#include "detkit/rng.hpp"
