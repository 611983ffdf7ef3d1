#pragma once

#include "trifocal/constraints.hpp"
#include "trifocal/extraction.hpp"
#include "trifocal/io.hpp"
#include "trifocal/linalg.hpp"
#include "trifocal/param.hpp"
#include "trifocal/reference_case.hpp"
#include "trifocal/scalar.hpp"
#include "trifocal/tensor.hpp"
