#pragma once

#include "qrelax/basis.hpp"
#include "qrelax/drift.hpp"
#include "qrelax/dynamics.hpp"
#include "qrelax/errors.hpp"
#include "qrelax/geometry.hpp"
#include "qrelax/nodes.hpp"
#include "qrelax/parallel.hpp"
#include "qrelax/state.hpp"
#include "qrelax/state_io.hpp"
#include "qrelax/survey.hpp"
#include "qrelax/vorticity.hpp"
