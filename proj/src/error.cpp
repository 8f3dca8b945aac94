#include "bnmon/error.hpp"
