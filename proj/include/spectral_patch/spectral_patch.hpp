#pragma once

#include "spectral_patch/error.hpp"
#include "spectral_patch/modspace.hpp"
#include "spectral_patch/numfield.hpp"
#include "spectral_patch/polymat.hpp"
#include "spectral_patch/spectral.hpp"
