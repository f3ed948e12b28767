#pragma once

#include "hitchplan/angles.hpp"
#include "hitchplan/errors.hpp"
#include "hitchplan/kinematics.hpp"
#include "hitchplan/steering_map.hpp"
#include "hitchplan/motion_primitives.hpp"
#include "hitchplan/occupancy.hpp"
#include "hitchplan/planner.hpp"
#include "hitchplan/ik_study.hpp"
#include "hitchplan/scenario.hpp"
#include "hitchplan/svg.hpp"
#include "hitchplan/commands.hpp"
