#pragma once

#include "ed/error.hpp"
#include "ed/ensemble_core.hpp"
#include "ed/estimators.hpp"
#include "ed/loss_report.hpp"
#include "ed/dispersion_loss.hpp"
#include "ed/classification_loss.hpp"
#include "ed/rng.hpp"
#include "ed/graph.hpp"
#include "ed/models.hpp"
#include "ed/parallel.hpp"
#include "ed/simulation.hpp"
#include "ed/io.hpp"
