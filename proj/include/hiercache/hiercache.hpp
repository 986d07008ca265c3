#pragma once

#include "hiercache/bit_vector.hpp"
#include "hiercache/bounds.hpp"
#include "hiercache/gap.hpp"
#include "hiercache/hierarchy.hpp"
#include "hiercache/model.hpp"
#include "hiercache/params.hpp"
#include "hiercache/single_layer.hpp"
