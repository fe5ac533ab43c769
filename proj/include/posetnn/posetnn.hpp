#pragma once

#include "posetnn/error.hpp"
#include "posetnn/rational.hpp"
#include "posetnn/poset.hpp"
#include "posetnn/polytope.hpp"
#include "posetnn/tropical.hpp"
#include "posetnn/nn.hpp"
#include "posetnn/filters.hpp"
#include "posetnn/histogram.hpp"
#include "posetnn/image.hpp"
#include "posetnn/serialization.hpp"
