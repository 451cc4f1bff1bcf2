#pragma once

#include "hybreg/errors.hpp"
#include "hybreg/linalg.hpp"
#include "hybreg/config.hpp"
#include "hybreg/dataset.hpp"
#include "hybreg/hybrid.hpp"
#include "hybreg/distributions.hpp"
#include "hybreg/inference.hpp"
#include "hybreg/gauge.hpp"
#include "hybreg/analysis.hpp"
#include "hybreg/report.hpp"
#include "hybreg/validation.hpp"
