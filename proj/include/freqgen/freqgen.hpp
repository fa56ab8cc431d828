#pragma once

#include "freqgen/asympt.hpp"
#include "freqgen/count.hpp"
#include "freqgen/error.hpp"
#include "freqgen/exact.hpp"
#include "freqgen/fit.hpp"
#include "freqgen/freq.hpp"
#include "freqgen/random.hpp"
#include "freqgen/sampler.hpp"
#include "freqgen/spec.hpp"
