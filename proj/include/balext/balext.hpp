#pragma once

#include "balext/bitstring.hpp"
#include "balext/canonical.hpp"
#include "balext/combinations.hpp"
#include "balext/error.hpp"
#include "balext/estimator.hpp"
#include "balext/extract.hpp"
#include "balext/params.hpp"
#include "balext/rational.hpp"
#include "balext/report_json.hpp"
#include "balext/rng.hpp"
#include "balext/seqtransform.hpp"
#include "balext/sources.hpp"
#include "balext/table.hpp"
#include "balext/table_io.hpp"
#include "balext/verify.hpp"
