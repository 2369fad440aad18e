#ifndef GSAUDIT_HPP
#define GSAUDIT_HPP

#include "gsaudit/corpus.hpp"
#include "gsaudit/diffexpr.hpp"
#include "gsaudit/enrichment.hpp"
#include "gsaudit/error.hpp"
#include "gsaudit/io.hpp"
#include "gsaudit/multiverse.hpp"
#include "gsaudit/preprocess.hpp"
#include "gsaudit/study.hpp"
#include "gsaudit/synthdata.hpp"
#include "gsaudit/version.hpp"

#endif
