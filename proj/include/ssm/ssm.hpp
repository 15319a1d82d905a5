#pragma once

// Umbrella header for the secure spatial modulation power-allocation library.

#include "ssm/channel_model.hpp"
#include "ssm/errors.hpp"
#include "ssm/experiment.hpp"
#include "ssm/info_metrics.hpp"
#include "ssm/numeric.hpp"
#include "ssm/pa_strategies.hpp"
#include "ssm/rng.hpp"
