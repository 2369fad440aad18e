#ifndef GSAUDIT_MULTIVERSE_HPP
#define GSAUDIT_MULTIVERSE_HPP

#include "multiverse/choice_graph.hpp"
#include "multiverse/optimize.hpp"
#include "multiverse/pipeline.hpp"

#endif
