#pragma once

// Umbrella header. The HTTP pieces (http_backend.hpp, http_operator_llm.hpp,
// backend_factory.hpp) are excluded on purpose; include them directly when
// you need networked backends.

#include "evorank/checkpoint.hpp"
#include "evorank/dataio.hpp"
#include "evorank/digest.hpp"
#include "evorank/errors.hpp"
#include "evorank/metrics.hpp"
#include "evorank/operator_llm.hpp"
#include "evorank/operators.hpp"
#include "evorank/optimizer.hpp"
#include "evorank/pareto.hpp"
#include "evorank/prompt_templates.hpp"
#include "evorank/report.hpp"
#include "evorank/score_cache.hpp"
#include "evorank/scripted_backend.hpp"
#include "evorank/serialization.hpp"
#include "evorank/tempralm_backend.hpp"
#include "evorank/timestamp.hpp"
#include "evorank/types.hpp"
