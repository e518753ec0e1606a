#ifndef FROLOV_FROLOV_HPP
#define FROLOV_FROLOV_HPP

#include "frolov/level.hpp"
#include "frolov/lattice.hpp"
#include "frolov/enumeration.hpp"
#include "frolov/cubature.hpp"
#include "frolov/verify.hpp"
#include "frolov/format.hpp"

#endif  // FROLOV_FROLOV_HPP
