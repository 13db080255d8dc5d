#pragma once

#include "cdbc/errors.hpp"
#include "cdbc/circuit.hpp"
#include "cdbc/morphism.hpp"
#include "cdbc/colimits.hpp"
#include "cdbc/isomorphism.hpp"
#include "cdbc/compose.hpp"
#include "cdbc/dynamics.hpp"
#include "cdbc/classical.hpp"
#include "cdbc/dot.hpp"
#include "cdbc/fixtures.hpp"
#include "cdbc/serialization.hpp"
