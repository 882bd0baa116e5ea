#pragma once

#include "condest/applications.hpp"
#include "condest/dist.hpp"
#include "condest/error.hpp"
#include "condest/estimators.hpp"
#include "condest/oracle.hpp"
#include "condest/pipeline.hpp"
#include "condest/profile.hpp"
#include "condest/search.hpp"
#include "condest/target.hpp"
#include "condest/testkit.hpp"
#include "condest/vx.hpp"
