#pragma once

#include "cdpu/agents.hpp"
#include "cdpu/beliefs.hpp"
#include "cdpu/causal_model.hpp"
#include "cdpu/environment.hpp"
#include "cdpu/error.hpp"
#include "cdpu/experiment.hpp"
#include "cdpu/model_io.hpp"
#include "cdpu/random.hpp"
#include "cdpu/report.hpp"
