#pragma once

#include "bounds.hpp"
#include "build.hpp"
#include "certify.hpp"
#include "count.hpp"
#include "evolution.hpp"
#include "hermite.hpp"
#include "interval.hpp"
#include "io.hpp"
#include "minorant.hpp"
#include "polynomial.hpp"
#include "real.hpp"
#include "reference.hpp"
#include "reverse.hpp"
#include "roots.hpp"
#include "simplex.hpp"
