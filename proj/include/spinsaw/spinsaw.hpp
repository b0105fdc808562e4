#pragma once

#include "spinsaw/exact_oracle.hpp"
#include "spinsaw/fptas.hpp"
#include "spinsaw/graph.hpp"
#include "spinsaw/mixing.hpp"
#include "spinsaw/model_io.hpp"
#include "spinsaw/numeric.hpp"
#include "spinsaw/saw_tree.hpp"
#include "spinsaw/spin_system.hpp"
#include "spinsaw/tree_marginal.hpp"
