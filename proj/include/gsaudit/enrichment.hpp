#ifndef GSAUDIT_ENRICHMENT_HPP
#define GSAUDIT_ENRICHMENT_HPP

#include "enrichment/table.hpp"
#include "enrichment/ora.hpp"
#include "enrichment/goseq.hpp"
#include "enrichment/gsea.hpp"
#include "enrichment/padog.hpp"

#endif
