#pragma once

#include "labprod/config.hpp"
#include "labprod/csv.hpp"
#include "labprod/emit.hpp"
#include "labprod/equilibrium.hpp"
#include "labprod/error.hpp"
#include "labprod/ingest.hpp"
#include "labprod/linalg.hpp"
#include "labprod/measures.hpp"
#include "labprod/pareto_fit.hpp"
#include "labprod/production_fit.hpp"
#include "labprod/record.hpp"
#include "labprod/synth.hpp"
