#pragma once

#include "tfm/model.hpp"
#include "tfm/rng.hpp"
#include "tfm/csv.hpp"
#include "tfm/ingest.hpp"
#include "tfm/fingerprint.hpp"
#include "tfm/parallel.hpp"
#include "tfm/similarity.hpp"
#include "tfm/baselines.hpp"
#include "tfm/perturb.hpp"
#include "tfm/eval.hpp"
#include "tfm/synth.hpp"
#include "tfm/network_export.hpp"
#include "tfm/report.hpp"

namespace tfm {
inline constexpr const char* kVersion = "0.1.0";
}
