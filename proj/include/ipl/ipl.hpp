#pragma once

#include "ipl/errors.hpp"
#include "ipl/exactlin.hpp"
#include "ipl/chain.hpp"
#include "ipl/sdr.hpp"
#include "ipl/she.hpp"
#include "ipl/operad/word.hpp"
#include "ipl/operad/element.hpp"
#include "ipl/operad/differential.hpp"
#include "ipl/operad/retraction.hpp"
#include "ipl/operad/verify.hpp"
#include "ipl/pipeline.hpp"
#include "ipl/fixtures.hpp"
#include "ipl/io.hpp"
