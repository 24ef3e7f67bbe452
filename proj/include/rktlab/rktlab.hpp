#ifndef RKTLAB_RKTLAB_HPP
#define RKTLAB_RKTLAB_HPP

#include "rktlab/numerics.hpp"
#include "rktlab/measures.hpp"
#include "rktlab/hardy.hpp"
#include "rktlab/paley_wiener.hpp"
#include "rktlab/model_space.hpp"
#include "rktlab/experiments.hpp"

#endif  // RKTLAB_RKTLAB_HPP
