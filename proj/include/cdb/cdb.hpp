#pragma once

#include "cdb/assignment.hpp"
#include "cdb/blaschke.hpp"
#include "cdb/cauchy.hpp"
#include "cdb/error.hpp"
#include "cdb/examples.hpp"
#include "cdb/io.hpp"
#include "cdb/kernels.hpp"
#include "cdb/numeric.hpp"
#include "cdb/perturb.hpp"
#include "cdb/rank_one.hpp"
#include "cdb/spectra.hpp"
#include "cdb/zeros.hpp"
