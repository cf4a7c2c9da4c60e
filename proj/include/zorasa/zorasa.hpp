#pragma once

#include "zorasa/core/linalg.hpp"
#include "zorasa/core/random.hpp"
#include "zorasa/core/types.hpp"
#include "zorasa/manifold.hpp"
#include "zorasa/manifolds/fixed_rank_psd.hpp"
#include "zorasa/manifolds/grassmann.hpp"
#include "zorasa/manifolds/sphere.hpp"
#include "zorasa/manifolds/stiefel.hpp"
#include "zorasa/oracle.hpp"
#include "zorasa/rasa.hpp"
#include "zorasa/verify/checks.hpp"
#include "zorasa/verify/ode.hpp"
