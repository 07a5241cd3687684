#pragma once

#include "kpcov/dataset.hpp"
#include "kpcov/errors.hpp"
#include "kpcov/evaluation.hpp"
#include "kpcov/format.hpp"
#include "kpcov/framework.hpp"
#include "kpcov/keypoint_io.hpp"
#include "kpcov/knowledge_base.hpp"
#include "kpcov/metrics.hpp"
#include "kpcov/stats.hpp"
#include "kpcov/synth.hpp"
#include "kpcov/types.hpp"

namespace kpcov {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace kpcov
