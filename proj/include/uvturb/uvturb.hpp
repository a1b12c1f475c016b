#pragma once

#include "uvturb/errors.hpp"
#include "uvturb/specfun.hpp"
#include "uvturb/meijer_g.hpp"
#include "uvturb/channel.hpp"
#include "uvturb/geometry.hpp"
#include "uvturb/modem.hpp"
#include "uvturb/mcsim.hpp"
