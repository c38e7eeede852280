#pragma once

// Sensor-stream authentication via keyed micro-distortion: a secret pad of
// sign bits perturbs each reading by a small epsilon, and statistical gauges
// over the (filtered) delta sequence separate genuine streams from
// impersonated ones.

#include "microdist/attackers.hpp"
#include "microdist/csv.hpp"
#include "microdist/detectors.hpp"
#include "microdist/distortion.hpp"
#include "microdist/evaluation.hpp"
#include "microdist/generators.hpp"
#include "microdist/pad.hpp"
#include "microdist/presets.hpp"
#include "microdist/rng.hpp"
#include "microdist/trace.hpp"
