#pragma once

#include "cfss/bits.hpp"
#include "cfss/entropy.hpp"
#include "cfss/errors.hpp"
#include "cfss/field.hpp"
#include "cfss/image.hpp"
#include "cfss/metrics.hpp"
#include "cfss/pipeline.hpp"
#include "cfss/predictor.hpp"
#include "cfss/prng.hpp"
#include "cfss/sharing.hpp"
#include "cfss/sideinfo.hpp"
