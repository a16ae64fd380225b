#pragma once

#include "depfdr/dist_model.hpp"
#include "depfdr/empirical_proc.hpp"
#include "depfdr/experiments.hpp"
#include "depfdr/field_gen.hpp"
#include "depfdr/imaging.hpp"
#include "depfdr/io.hpp"
#include "depfdr/parallel.hpp"
#include "depfdr/rng.hpp"
#include "depfdr/stats.hpp"
#include "depfdr/testing_procedures.hpp"
