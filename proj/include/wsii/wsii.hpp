#pragma once

// Umbrella header for the WS-II trajectory segmentation library.

#include "wsii/baselines.hpp"
#include "wsii/csv_io.hpp"
#include "wsii/error_signal.hpp"
#include "wsii/eval.hpp"
#include "wsii/forest.hpp"
#include "wsii/geo.hpp"
#include "wsii/model_io.hpp"
#include "wsii/rng.hpp"
#include "wsii/segmenter.hpp"
#include "wsii/synth.hpp"
#include "wsii/training.hpp"
#include "wsii/trajectory.hpp"
