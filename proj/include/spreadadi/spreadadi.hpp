#pragma once

#include "closed_form.hpp"
#include "grid.hpp"
#include "impact.hpp"
#include "tridiagonal.hpp"
#include "operators.hpp"
#include "adi.hpp"
#include "stability.hpp"
#include "mc.hpp"
#include "config.hpp"
#include "app.hpp"
