#ifndef BINARYGP_BINARYGP_HPP
#define BINARYGP_BINARYGP_HPP

#include "binarygp/common.hpp"
#include "binarygp/estimation.hpp"
#include "binarygp/inference.hpp"
#include "binarygp/io.hpp"
#include "binarygp/kernel.hpp"
#include "binarygp/logitnormal.hpp"
#include "binarygp/metrics.hpp"
#include "binarygp/optimize.hpp"
#include "binarygp/panel.hpp"
#include "binarygp/prediction.hpp"
#include "binarygp/rng.hpp"
#include "binarygp/simgen.hpp"
#include "binarygp/studies.hpp"

#endif  // BINARYGP_BINARYGP_HPP
