#pragma once

#include "dthsem/bounds.hpp"
#include "dthsem/constraint.hpp"
#include "dthsem/decoupler.hpp"
#include "dthsem/errors.hpp"
#include "dthsem/extphase.hpp"
#include "dthsem/io.hpp"
#include "dthsem/linalg.hpp"
#include "dthsem/models.hpp"
#include "dthsem/multiplier.hpp"
#include "dthsem/trajectory.hpp"
