#pragma once

#include "rrefl/admissibility.hpp"
#include "rrefl/archive.hpp"
#include "rrefl/continuation.hpp"
#include "rrefl/errors.hpp"
#include "rrefl/family_distance.hpp"
#include "rrefl/field.hpp"
#include "rrefl/fv_operator.hpp"
#include "rrefl/gas.hpp"
#include "rrefl/geometry.hpp"
#include "rrefl/hash.hpp"
#include "rrefl/roots.hpp"
#include "rrefl/shock_relations.hpp"
#include "rrefl/solver.hpp"
#include "rrefl/square_map.hpp"
#include "rrefl/vec2.hpp"
