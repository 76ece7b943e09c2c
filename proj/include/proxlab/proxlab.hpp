#pragma once

// Umbrella header.

#include "proxlab/checkers.hpp"
#include "proxlab/config.hpp"
#include "proxlab/geometry.hpp"
#include "proxlab/io.hpp"
#include "proxlab/linalg.hpp"
#include "proxlab/mapping.hpp"
#include "proxlab/modulus.hpp"
#include "proxlab/parallel.hpp"
#include "proxlab/ppa.hpp"
#include "proxlab/problems.hpp"
#include "proxlab/rates.hpp"
#include "proxlab/report.hpp"
#include "proxlab/resolvents.hpp"
#include "proxlab/rng.hpp"
#include "proxlab/sampling.hpp"
#include "proxlab/schedule.hpp"
#include "proxlab/serialize.hpp"
#include "proxlab/validators.hpp"
