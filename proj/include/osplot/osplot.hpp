#pragma once

#include "osplot/error.hpp"
#include "osplot/expr.hpp"
#include "osplot/geom.hpp"
#include "osplot/spline.hpp"
#include "osplot/calculus.hpp"
#include "osplot/implicit.hpp"
#include "osplot/render.hpp"
#include "osplot/surface.hpp"
#include "osplot/demo.hpp"
