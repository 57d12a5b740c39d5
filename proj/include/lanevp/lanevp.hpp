#pragma once

#include "lanevp/augment.hpp"
#include "lanevp/eval.hpp"
#include "lanevp/heatmap.hpp"
#include "lanevp/lane_ingest.hpp"
#include "lanevp/polyfit.hpp"
#include "lanevp/polyroots.hpp"
#include "lanevp/rng.hpp"
#include "lanevp/synth.hpp"
#include "lanevp/types.hpp"
#include "lanevp/vp_labeler.hpp"
