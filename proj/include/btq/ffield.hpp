#pragma once

#include "btq/ffield/field.hpp"
#include "btq/ffield/fq_linalg.hpp"
#include "btq/ffield/lattice.hpp"
#include "btq/ffield/matrix.hpp"
#include "btq/ffield/poly.hpp"
#include "btq/ffield/popov.hpp"
#include "btq/ffield/ratfunc.hpp"
