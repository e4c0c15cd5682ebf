#pragma once

// Umbrella header.

#include "biomech.hpp"
#include "errors.hpp"
#include "fatigue.hpp"
#include "load_profile.hpp"
#include "motion.hpp"
#include "muscle.hpp"
#include "numerics.hpp"
#include "report.hpp"
#include "synth.hpp"
#include "text.hpp"
