#pragma once

#include "mdplab/dp.hpp"
#include "mdplab/experiment.hpp"
#include "mdplab/incomplete.hpp"
#include "mdplab/mdp.hpp"
#include "mdplab/multi.hpp"
#include "mdplab/perturb.hpp"
#include "mdplab/scenario.hpp"
#include "mdplab/soft.hpp"
#include "mdplab/version.hpp"
