#pragma once

#include "wavecast/config.hpp"
#include "wavecast/csv.hpp"
#include "wavecast/epiweek.hpp"
#include "wavecast/error.hpp"
#include "wavecast/eval.hpp"
#include "wavecast/experiment.hpp"
#include "wavecast/features.hpp"
#include "wavecast/ingest.hpp"
#include "wavecast/learn.hpp"
#include "wavecast/preprocess.hpp"
#include "wavecast/rng.hpp"
#include "wavecast/similarity.hpp"
