#pragma once

#include "templar/ops.hpp"
